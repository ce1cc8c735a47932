use std::collections::BTreeMap;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_twistk3"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let (code, stdout, stderr) = run(&full);
    let doc = serde_json::from_str(&stdout)
        .unwrap_or_else(|e| panic!("{args:?}: {e}\n{stdout}\n{stderr}"));
    (code, doc)
}

fn validator() -> jsonschema::Validator {
    let schema: Value = serde_json::from_str(twistk3_cli::SCHEMA).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn assert_valid(doc: &Value) {
    let v = validator();
    let errors: Vec<String> = v
        .iter_errors(doc)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{errors:#?}\n{doc:#}");
}

fn leaves(prefix: String, v: &Value, out: &mut BTreeMap<String, String>) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                let p = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                leaves(p, x, out);
            }
        }
        Value::Array(a) if !a.is_empty() => {
            for (i, x) in a.iter().enumerate() {
                leaves(format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::String(s) => {
            out.insert(prefix, s.clone());
        }
        other => {
            out.insert(prefix, other.to_string());
        }
    }
}

fn text_table(stdout: &str) -> BTreeMap<String, String> {
    stdout
        .lines()
        .map(|l| {
            let (k, v) = l.split_once("  ").expect("two-column row");
            (k.trim_end().to_string(), v.trim_start().to_string())
        })
        .collect()
}

const CASES: &[&[&str]] = &[
    &["example", "c8"],
    &["example", "c14"],
    &["witness", "2", "2"],
    &["witness", "8", "2"],
    &["witness", "26", "5"],
    &["components", "2", "2"],
    &["components", "2", "1"],
    &["disc", "2", "2", "0", "0"],
    &["disc", "14", "7", "0", "1"],
    &["disc", "2", "3", "1", "2"],
    &["check-dstar", "8"],
    &["check-dstar", "7"],
    &["check-dstar", "686"],
    &["--sweep", "30", "3", "--samples", "20"],
];

#[test]
fn every_report_matches_the_schema() {
    for args in CASES {
        let (_, doc) = json(args);
        assert_valid(&doc);
    }
}

#[test]
fn text_and_json_carry_the_same_values() {
    for args in CASES {
        let (c1, doc) = json(args);
        let (c2, stdout, _) = run(args);
        assert_eq!(c1, c2, "{args:?}");
        let mut expected = BTreeMap::new();
        leaves(String::new(), &doc, &mut expected);
        assert_eq!(text_table(&stdout), expected, "{args:?}");
    }
}

#[test]
fn schema_rejects_malformed_reports() {
    let (_, mut doc) = json(&["disc", "14", "7", "0", "1"]);
    doc["results"]["form"]["generators"][0]["q"] = Value::from("-1/686x");
    assert!(!validator().is_valid(&doc));
    let (_, mut doc) = json(&["witness", "2", "2"]);
    doc.as_object_mut().unwrap().remove("certificates");
    assert!(!validator().is_valid(&doc));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["example", "c8"]).0, 0);
    assert_eq!(run(&["witness", "2", "2"]).0, 0);
    assert_eq!(run(&["witness", "8", "2"]).0, 1);
    assert_eq!(run(&["witness", "2", "0"]).0, 2);
    assert_eq!(run(&["check-dstar", "0"]).0, 2);
    assert_eq!(run(&["example", "c9"]).0, 2);
    assert_eq!(run(&["disc", "3", "1", "0", "0"]).0, 2);
    assert_eq!(run(&[]).0, 2);
    assert_eq!(run(&["--sweep", "10", "2", "witness", "2", "2"]).0, 2);
}

#[test]
fn worked_examples_pass() {
    for name in ["c8", "c14"] {
        let (code, doc) = json(&["example", name]);
        assert_eq!(code, 0);
        assert_eq!(doc["results"]["all_passed"], true, "{doc:#}");
    }
}

#[test]
fn witness_for_level_two() {
    let (_, doc) = json(&["witness", "2", "2"]);
    let r = &doc["results"];
    assert_eq!(
        (r["witness"]["n"].as_i64(), r["witness"]["k"].as_i64()),
        (Some(1), Some(1))
    );
    assert_eq!(r["x"], 3);
    assert_eq!(r["verification"]["valid"], true);
}

#[test]
fn witness_rejected_when_four_divides_d() {
    let (code, doc) = json(&["witness", "8", "2"]);
    assert_eq!(code, 1);
    assert_eq!(doc["results"]["accepted"], false);
    assert!(doc["results"]["reason"]
        .as_str()
        .unwrap()
        .contains("4 divides d"));
    assert_eq!(doc["certificates"], Value::Array(vec![]));
}

#[test]
fn census_for_level_two() {
    let (_, doc) = json(&["components", "2", "2"]);
    let r = &doc["results"];
    assert_eq!(r["group_count"], 3);
    assert_eq!(r["upper_bound"], 4);
    assert_eq!(r["merged_pairs"], serde_json::json!([[[0, 0], [1, 0]]]));
    let (_, doc) = json(&["components", "2", "1"]);
    assert_eq!(doc["results"]["group_count"], 1);
}

#[test]
fn census_separates_by_square_residue() {
    let (_, doc) = json(&["components", "14", "7"]);
    let r = &doc["results"];
    let group_of = |nk: Value| {
        r["groups"]
            .as_array()
            .unwrap()
            .iter()
            .position(|g| g.as_array().unwrap().contains(&nk))
            .unwrap()
    };
    let (a, b) = (
        group_of(serde_json::json!([0, 1])),
        group_of(serde_json::json!([1, 3])),
    );
    assert_ne!(a, b);
    let sep = r["separations"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| {
            let pair = (
                s["left_group"].as_u64().unwrap() as usize,
                s["right_group"].as_u64().unwrap() as usize,
            );
            pair == (a.min(b), a.max(b))
        })
        .expect("separation recorded");
    assert_eq!(sep["reason"]["kind"], "square_residue");
}

#[test]
fn disc_reports() {
    let (_, doc) = json(&["disc", "14", "7", "0", "1"]);
    let r = &doc["results"];
    assert_eq!(
        r["smith_factors"]["factors"],
        serde_json::json!([1, 1, 686])
    );
    assert_eq!(r["structure"], "cyclic");
    assert_eq!(r["form"]["generators"][0]["q"], "1371/686");
    let (_, doc) = json(&["disc", "2", "2", "0", "0"]);
    assert_eq!(doc["results"]["form"], Value::Null);
    assert_eq!(
        doc["results"]["smith_factors"]["factors"],
        serde_json::json!([2, 2, 2])
    );
}

#[test]
fn check_dstar_reports() {
    let (code, doc) = json(&["check-dstar", "686"]);
    assert_eq!(code, 0);
    assert_eq!(doc["results"]["satisfies"], true);
    assert_eq!(doc["results"]["all_certified"], true);
    assert_eq!(
        doc["results"]["decompositions"].as_array().unwrap().len(),
        2
    );
    let (_, doc) = json(&["check-dstar", "7"]);
    assert_eq!(doc["results"]["satisfies"], false);
    assert_eq!(doc["results"]["all_certified"], false);
}

#[test]
fn sweep_is_reproducible() {
    let args = ["--sweep", "40", "3", "--seed", "7", "--samples", "30"];
    let (code, a) = json(&args);
    assert_eq!(code, 0);
    assert_eq!(a["results"]["failures"], 0);
    let (_, b) = json(&[
        "--threads",
        "1",
        "--sweep",
        "40",
        "3",
        "--seed",
        "7",
        "--samples",
        "30",
    ]);
    assert_eq!(a, b);
}
