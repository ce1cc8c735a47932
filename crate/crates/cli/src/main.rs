use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use twistk3::BigInt;
use twistk3_cli::{
    cmd_check_dstar, cmd_components, cmd_disc, cmd_example, cmd_sweep, cmd_witness, Example,
    Outcome,
};

#[derive(Parser)]
#[command(
    name = "twistk3",
    version,
    about = "Discriminant forms and witness certificates for twisted K3 lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Emit JSON instead of a text table.
    #[arg(long, global = true)]
    json: bool,
    /// Run the witness sweep over even d ≤ DMAX and r ≤ RMAX.
    #[arg(long, num_args = 2, value_names = ["DMAX", "RMAX"])]
    sweep: Option<Vec<u64>>,
    /// Seed for randomized sampling in the sweep.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Random classes sampled by the sweep.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide condition (**') for d' and certify every decomposition.
    CheckDstar { dprime: BigInt },
    /// Construct and verify a witness class for (d, r).
    Witness { d: BigInt, r: BigInt },
    /// Component census of the twisted moduli space for (d, r).
    Components {
        d: BigInt,
        r: BigInt,
        /// Half-width of the merge search box.
        #[arg(long, default_value_t = twistk3::moduli::DEFAULT_MERGE_BOUND)]
        bound: u32,
    },
    /// Discriminant data of T_w for w = w_{n,k}.
    #[command(allow_negative_numbers = true)]
    Disc {
        d: BigInt,
        r: BigInt,
        n: BigInt,
        k: BigInt,
    },
    /// Reproduce a worked example.
    Example { name: ExampleName },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleName {
    C8,
    C14,
}

fn run(cli: &Cli) -> Outcome {
    match (&cli.command, &cli.sweep) {
        (Some(_), Some(_)) => Err(twistk3_cli::UsageError(
            "--sweep cannot be combined with a subcommand".into(),
        )),
        (None, Some(v)) => cmd_sweep(v[0], v[1], cli.seed, cli.samples),
        (None, None) => Err(twistk3_cli::UsageError(
            "a subcommand or --sweep is required".into(),
        )),
        (Some(cmd), None) => match cmd {
            Command::CheckDstar { dprime } => cmd_check_dstar(dprime),
            Command::Witness { d, r } => cmd_witness(d, r),
            Command::Components { d, r, bound } => cmd_components(d, r, *bound),
            Command::Disc { d, r, n, k } => cmd_disc(d, r, n, k),
            Command::Example { name } => cmd_example(match name {
                ExampleName::C8 => Example::C8,
                ExampleName::C14 => Example::C14,
            }),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok((report, status)) => {
            let out = if cli.json {
                report.to_json() + "\n"
            } else {
                report.to_text()
            };
            let mut stdout = std::io::stdout().lock();
            match stdout
                .write_all(out.as_bytes())
                .and_then(|_| stdout.flush())
            {
                Ok(()) => ExitCode::from(status.code() as u8),
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {
                    ExitCode::from(status.code() as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
