//! When is `T_w` isometric to `K_{d'}^⊥`, and explicit witnesses `w` for each
//! admissible decomposition `d' = d·r²`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{factorize, inverse_mod, modulo, quadratic_roots, split_r, RSplit};
use crate::discform::{
    disc_form_k, disc_form_tw, normalize_cyclic, normalize_noncyclic, qform_iso, structure_of_disc,
    QMod2Z, Structure,
};
use crate::lattice::{gram_t0, invariant_factors_formula, smith_normal_form};
use crate::moduli::{canonicalize_wclass, star2_violation, star2prime_decompositions, WClass};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssocError {
    #[error("d = {d} fails condition (**): {reason}")]
    NotStar2 { d: BigInt, reason: String },
    #[error("r must be positive, got {0}")]
    BadOrder(BigInt),
    #[error("witness search for (d, r) = ({d}, {r}) failed at step {step}")]
    RecipeFailed { d: BigInt, r: BigInt, step: String },
    #[error("Disc T_w is not cyclic")]
    NotCyclic,
}

/// Which of the four existence constructions applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// `w = w_{nq², r0}`, `3 ∤ d`.
    #[serde(rename = "cyclic-3∤d")]
    CyclicNotDiv,
    /// `w = w_{nq², r0}`, `d = 6t`.
    #[serde(rename = "cyclic-3|d")]
    CyclicDiv,
    /// `w = w_{3nq², r0}`, `3 ∤ d`.
    #[serde(rename = "noncyclic-3∤d")]
    NonCyclicNotDiv,
    /// `w = w_{nq², 3r0}`, `d = 6t`.
    #[serde(rename = "noncyclic-3|d")]
    NonCyclicDiv,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::CyclicNotDiv => "cyclic-3∤d",
            Branch::CyclicDiv => "cyclic-3|d",
            Branch::NonCyclicNotDiv => "noncyclic-3∤d",
            Branch::NonCyclicDiv => "noncyclic-3|d",
        })
    }
}

/// `a·x² ≡ b (mod m)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Congruence {
    #[serde(with = "crate::serde_big")]
    pub a: BigInt,
    #[serde(with = "crate::serde_big")]
    pub b: BigInt,
    #[serde(with = "crate::serde_big")]
    pub m: BigInt,
}

impl Congruence {
    pub fn holds(&self, x: &BigInt) -> bool {
        modulo(&(&self.a * x * x - &self.b), &self.m).is_zero()
    }

    fn smallest_root(&self) -> Option<BigInt> {
        quadratic_roots(&self.a, &self.b, &self.m)
            .smallest()
            .cloned()
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·x² ≡ {} (mod {})", self.a, self.b, self.m)
    }
}

/// Intermediate values of the construction, for inspection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecipeTrace {
    /// Root of the first congruence, modulo `step_a_modulus`.
    #[serde(with = "crate::serde_big")]
    pub step_a_root: BigInt,
    #[serde(with = "crate::serde_big")]
    pub step_a_modulus: BigInt,
    /// Same root adjusted to be prime to `r0`.
    #[serde(with = "crate::serde_big")]
    pub coprime_root: BigInt,
    /// The parameter `n` is fixed modulo `n_modulus` by the inversion step.
    #[serde(with = "crate::serde_big")]
    pub n_residue: BigInt,
    #[serde(with = "crate::serde_big")]
    pub n_modulus: BigInt,
    /// Chosen `n = n_residue + shift·n_modulus`.
    #[serde(with = "crate::serde_big")]
    pub n_param: BigInt,
}

/// A verified witness `w` with `T_w ≅ K_{d'}^⊥`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    #[serde(with = "crate::serde_big")]
    pub d: BigInt,
    #[serde(with = "crate::serde_big")]
    pub r: BigInt,
    #[serde(with = "crate::serde_big")]
    pub dprime: BigInt,
    pub split: RSplit,
    pub branch: Branch,
    pub witness: WClass,
    /// The witness in the canonical grid.
    pub canonical: WClass,
    #[serde(with = "crate::serde_big")]
    pub x: BigInt,
    pub congruence: Congruence,
    pub recipe: RecipeTrace,
}

/// Outcome of [`matches_k`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchOutcome {
    pub matches: bool,
    /// Smallest solution of the deciding congruence.
    #[serde(with = "crate::serde_big::opt")]
    pub unit: Option<BigInt>,
    pub reason: Option<String>,
}

impl MatchOutcome {
    fn no(reason: impl Into<String>) -> Self {
        MatchOutcome {
            matches: false,
            unit: None,
            reason: Some(reason.into()),
        }
    }
}

/// Whether `Disc K_{d'}^⊥` is cyclic, as read off its presentation.
fn target_is_cyclic(dprime: &BigInt) -> Option<bool> {
    disc_form_k(dprime).ok().map(|f| f.is_cyclic())
}

/// The congruence deciding `T_w ≅ K_{d'}^⊥` on the factor generated by `[w]`,
/// in terms of the normalized `(n, k)`.
fn deciding_congruence(c: &WClass, cyclic: bool) -> Congruence {
    let (d, r) = (c.d(), c.r());
    let three = BigInt::from(3);
    let dr2 = d * r * r;
    let kk_2nd = -c.norm_numerator();
    if !cyclic {
        return Congruence {
            a: kk_2nd,
            b: BigInt::from(-3),
            m: dr2 * 2u32,
        };
    }
    if d.is_multiple_of(&three) {
        let t = d / 6;
        let m = &t * r * r * 12u32;
        Congruence {
            a: kk_2nd,
            b: &t * r * r * 4u32 - 3,
            m,
        }
    } else {
        Congruence {
            a: kk_2nd * 3u32,
            b: BigInt::from(-1),
            m: dr2 * 2u32,
        }
    }
}

/// Decide `T_w ≅ K_{d'}^⊥` by the congruence criteria, `d' = d r²`.
///
/// Exact when `Disc K_{d'}^⊥` is cyclic. In the non-cyclic case the two
/// summands are compared separately, which is sufficient but not necessary:
/// the 3-part is `Z/3^a × Z/3` and an isometry may exchange the two factors.
/// Use [`qform_iso`] on the full forms for an exact answer.
pub fn matches_k(c: &WClass) -> MatchOutcome {
    let dprime = c.dprime();
    let Some(target_cyclic) = target_is_cyclic(&dprime) else {
        return MatchOutcome::no(format!("C_{dprime} is empty"));
    };
    let structure = structure_of_disc(c);
    let shape_ok = match structure {
        Structure::Cyclic => target_cyclic,
        Structure::ThreeTimesCyclic => !target_cyclic,
        Structure::Other => false,
    };
    if !shape_ok {
        return MatchOutcome::no("structure mismatch");
    }
    let c = if target_cyclic {
        normalize_cyclic(c)
    } else {
        normalize_noncyclic(c)
    };
    let cong = deciding_congruence(&c, target_cyclic);
    let Some(x) = cong.smallest_root() else {
        return MatchOutcome::no(format!("{cong} has no solution"));
    };
    if !target_cyclic {
        // no unit freedom on Z/3: the values must agree exactly
        let tw = disc_form_tw(&c).expect("classified structure");
        let q3 = &tw.generators()[1].q;
        if q3 != &QMod2Z::from_ratio(-2, 3) {
            return MatchOutcome {
                matches: false,
                unit: None,
                reason: Some(format!("q on Z/3 is {q3}, not 4/3")),
            };
        }
    }
    MatchOutcome {
        matches: true,
        unit: Some(x),
        reason: None,
    }
}

/// Parameters of one branch, as functions of the split of `r`.
struct Plan {
    branch: Branch,
    /// `a·x² ≡ b` modulo `step_a_modulus`, solvable for every `n`.
    step_a: Congruence,
    /// Modulus of the coprimality adjustment, a multiple of `step_a.m`.
    adjust_modulus: BigInt,
    /// `n ≡ (n_coefficient · x²)⁻¹ (mod n_modulus)`.
    n_coefficient: BigInt,
    n_modulus: BigInt,
}

fn plan(d: &BigInt, r: &BigInt, split: &RSplit, cyclic: bool) -> Plan {
    let three = BigInt::from(3);
    let (q, r0) = (&split.q, &split.r0);
    let q2 = q * q;
    let r02 = r0 * r0;
    let two_s_q = (BigInt::one() << split.s) * q;
    let two_s_q2 = &two_s_q * &two_s_q;
    let div3 = d.is_multiple_of(&three);
    let t = d / 6;
    match (cyclic, div3) {
        (true, false) => Plan {
            branch: Branch::CyclicNotDiv,
            step_a: Congruence {
                a: &r02 * 3u32,
                b: BigInt::from(-1),
                m: d * &q2 * 2u32,
            },
            adjust_modulus: d * &two_s_q2 * 2u32,
            n_coefficient: d * &q2 * 6u32,
            n_modulus: r02,
        },
        (true, true) => Plan {
            branch: Branch::CyclicDiv,
            step_a: Congruence {
                a: r02.clone(),
                b: &t * r * r * 4u32 - 3,
                m: &t * &q2 * 12u32,
            },
            adjust_modulus: &t * &two_s_q2 * 12u32,
            n_coefficient: &t * &q2 * 4u32,
            n_modulus: r02,
        },
        (false, false) => Plan {
            branch: Branch::NonCyclicNotDiv,
            step_a: Congruence {
                a: r02.clone(),
                b: BigInt::from(-3),
                m: d * &q2 * 2u32,
            },
            adjust_modulus: d * &two_s_q2 * 2u32,
            n_coefficient: d * &q2 * 2u32,
            n_modulus: r02 / 3,
        },
        (false, true) => Plan {
            branch: Branch::NonCyclicDiv,
            step_a: Congruence {
                a: &r02 * 3u32,
                b: BigInt::from(-1),
                m: &t * &q2 * 4u32,
            },
            adjust_modulus: &t * &two_s_q2 * 4u32,
            n_coefficient: &t * &q2 * 4u32,
            n_modulus: r02,
        },
    }
}

/// Witness class and stored congruence for the parameter `n`.
fn witness_for(
    d: &BigInt,
    r: &BigInt,
    split: &RSplit,
    branch: Branch,
    n: &BigInt,
) -> (WClass, Congruence) {
    let (q, r0) = (&split.q, &split.r0);
    let q2 = q * q;
    let r02 = r0 * r0;
    let m = d * r * r * 2u32;
    let t = d / 6;
    let (nw, kw, cong) = match branch {
        Branch::CyclicNotDiv => {
            let a = (&r02 - n * d * &q2 * 2u32) * 3u32;
            (
                n * &q2,
                r0.clone(),
                Congruence {
                    a,
                    b: BigInt::from(-1),
                    m,
                },
            )
        }
        Branch::CyclicDiv => {
            let a = &r02 - n * &t * &q2 * 12u32;
            let b = &t * r * r * 4u32 - 3;
            (
                n * &q2,
                r0.clone(),
                Congruence {
                    a,
                    b,
                    m: &t * r * r * 12u32,
                },
            )
        }
        Branch::NonCyclicNotDiv => {
            let a = &r02 - n * d * &q2 * 6u32;
            (
                n * &q2 * 3u32,
                r0.clone(),
                Congruence {
                    a,
                    b: BigInt::from(-3),
                    m,
                },
            )
        }
        Branch::NonCyclicDiv => {
            let a = &r02 * 3u32 - n * &t * &q2 * 4u32;
            (
                n * &q2,
                r0 * 3u32,
                Congruence {
                    a,
                    b: BigInt::from(-1),
                    m: &t * r * r * 4u32,
                },
            )
        }
    };
    (
        WClass::new(d.clone(), r.clone(), nw, kw).expect("valid level"),
        cong,
    )
}

/// Upper limit on the shifts of `n` tried after the inversion step.
const MAX_SHIFTS: u32 = 64;

/// Build the witness for `(d, r)`: solve the `n`-independent congruence,
/// make the root prime to `r0`, fix `n` modulo `r0²` (or `r0²/3`) by
/// inversion, then take the least `n` in that class for which the full
/// congruence is solvable and the witness passes [`matches_k`].
pub fn construct_witness(d: &BigInt, r: &BigInt) -> Result<WitnessCertificate, AssocError> {
    if let Some(reason) = star2_violation(d) {
        return Err(AssocError::NotStar2 {
            d: d.clone(),
            reason,
        });
    }
    if r < &BigInt::one() {
        return Err(AssocError::BadOrder(r.clone()));
    }
    let fail = |step: &str| AssocError::RecipeFailed {
        d: d.clone(),
        r: r.clone(),
        step: step.into(),
    };
    let dprime = d * r * r;
    let cyclic = target_is_cyclic(&dprime).ok_or_else(|| fail("target"))?;
    let split = split_r(r, !cyclic).map_err(|_| fail("split"))?;
    let p = plan(d, r, &split, cyclic);

    let x_a = p.step_a.smallest_root().ok_or_else(|| fail("step A"))?;
    let x_b = if x_a.gcd(&split.r0).is_one() {
        x_a.clone()
    } else {
        let a =
            inverse_mod(&split.r0, &p.adjust_modulus).ok_or_else(|| fail("coprime adjustment"))?;
        BigInt::one() + a * &split.r0 * (&x_a - 1)
    };
    let coeff = &p.n_coefficient * &x_b * &x_b;
    let n_res = inverse_mod(&coeff, &p.n_modulus).ok_or_else(|| fail("inversion"))?;

    for j in 0..MAX_SHIFTS {
        let n = &n_res + &p.n_modulus * j;
        let (witness, congruence) = witness_for(d, r, &split, p.branch, &n);
        let Some(x) = congruence.smallest_root() else {
            continue;
        };
        if !matches_k(&witness).matches {
            continue;
        }
        return Ok(WitnessCertificate {
            d: d.clone(),
            r: r.clone(),
            dprime,
            split,
            branch: p.branch,
            canonical: canonicalize_wclass(&witness),
            witness,
            x,
            congruence,
            recipe: RecipeTrace {
                step_a_root: x_a,
                step_a_modulus: p.step_a.m.clone(),
                coprime_root: x_b,
                n_residue: n_res,
                n_modulus: p.n_modulus,
                n_param: n,
            },
        });
    }
    Err(fail("choice of n"))
}

/// Outcome of [`verify_certificate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub valid: bool,
    /// Name of the first failing check.
    pub failed_check: Option<String>,
}

/// Recheck a certificate from scratch.
pub fn verify_certificate(cert: &WitnessCertificate) -> Verification {
    let fail = |name: &str| Verification {
        valid: false,
        failed_check: Some(name.into()),
    };
    let w = &cert.witness;
    if cert.dprime != &cert.d * &cert.r * &cert.r || w.d() != &cert.d || w.r() != &cert.r {
        return fail("level");
    }
    let cyclic = matches!(cert.branch, Branch::CyclicNotDiv | Branch::CyclicDiv);
    match split_r(&cert.r, !cyclic) {
        Ok(s) if s == cert.split && s.product() == cert.r => {}
        _ => return fail("decomposition"),
    }
    let (rebuilt, cong) = witness_for(
        &cert.d,
        &cert.r,
        &cert.split,
        cert.branch,
        &cert.recipe.n_param,
    );
    if &rebuilt != w || cong != cert.congruence {
        return fail("witness");
    }
    if !cert.congruence.holds(&cert.x) {
        return fail("congruence");
    }
    if canonicalize_wclass(w) != cert.canonical {
        return fail("canonical");
    }
    match smith_normal_form(&gram_t0(w)) {
        Ok(g) if g == invariant_factors_formula(w) && g.order() == cert.dprime => {}
        _ => return fail("smith_normal_form"),
    }
    let (Ok(tw), Ok(k)) = (disc_form_tw(w), disc_form_k(&cert.dprime)) else {
        return fail("disc_form");
    };
    if tw.check_well_defined().is_err() || k.check_well_defined().is_err() {
        return fail("disc_form");
    }
    if !qform_iso(&tw, &k).map(|v| v.isomorphic).unwrap_or(false) {
        return fail("qform_iso");
    }
    if !matches_k(w).matches {
        return fail("matches_k");
    }
    Verification {
        valid: true,
        failed_check: None,
    }
}

/// One decomposition `d' = d r²` with its construction result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionResult {
    #[serde(with = "crate::serde_big")]
    pub d: BigInt,
    #[serde(with = "crate::serde_big")]
    pub r: BigInt,
    pub certificate: Option<WitnessCertificate>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssociationReport {
    #[serde(with = "crate::serde_big")]
    pub dprime: BigInt,
    /// `d'` admits a decomposition `d r²` with `d` satisfying (**).
    pub satisfies: bool,
    pub decompositions: Vec<DecompositionResult>,
}

impl AssociationReport {
    pub fn all_certified(&self) -> bool {
        self.decompositions.iter().all(|x| x.certificate.is_some())
    }
}

/// Construct a witness for every admissible decomposition of `d'`, ascending in `r`.
pub fn decide_associated(dprime: &BigInt) -> AssociationReport {
    let decomps = star2prime_decompositions(dprime);
    let decompositions = decomps
        .par_iter()
        .map(|(d, r)| match construct_witness(d, r) {
            Ok(cert) => DecompositionResult {
                d: d.clone(),
                r: r.clone(),
                certificate: Some(cert),
                error: None,
            },
            Err(e) => DecompositionResult {
                d: d.clone(),
                r: r.clone(),
                certificate: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    AssociationReport {
        dprime: dprime.clone(),
        satisfies: !decomps.is_empty(),
        decompositions,
    }
}

/// `|O(Disc T_w)/±id| = 2^(τ(d'/2) - 1)` for cyclic `Disc T_w`, with `τ` the
/// number of distinct prime factors. For `d' = 2` the group is trivial and
/// the bound is 1.
pub fn covering_index_bound(c: &WClass) -> Result<BigInt, AssocError> {
    if structure_of_disc(c) != Structure::Cyclic {
        return Err(AssocError::NotCyclic);
    }
    let tau = factorize(&(c.dprime() / 2)).num_distinct_primes();
    Ok(BigInt::one() << tau.saturating_sub(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(d: i64, r: i64, n: i64, k: i64) -> WClass {
        WClass::new(d, r, n, k).unwrap()
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn matches_examples() {
        let m = matches_k(&w(2, 2, 1, 1));
        assert!(m.matches);
        assert_eq!(m.unit, Some(big(3)));
        assert!(!matches_k(&w(2, 2, 0, 1)).matches);
        let m = matches_k(&w(2, 2, 0, 0));
        assert_eq!(m.reason.as_deref(), Some("structure mismatch"));
    }

    #[test]
    fn witness_examples() {
        let cert = construct_witness(&big(2), &big(2)).unwrap();
        assert_eq!(cert.witness, w(2, 2, 1, 1));
        assert_eq!(cert.x, big(3));
        assert_eq!(cert.branch, Branch::CyclicNotDiv);
        assert!(verify_certificate(&cert).valid);

        let cert = construct_witness(&big(14), &big(7)).unwrap();
        assert_eq!(cert.witness.k(), &big(1));
        assert!(cert.witness.n().is_multiple_of(&big(49)));
        assert!(verify_certificate(&cert).valid);

        let cert = construct_witness(&big(2), &big(1)).unwrap();
        assert_eq!(cert.canonical, w(2, 1, 0, 0));
        assert!(verify_certificate(&cert).valid);

        assert!(matches!(
            construct_witness(&big(8), &big(2)),
            Err(AssocError::NotStar2 { .. })
        ));
    }

    #[test]
    fn corrupted_certificate() {
        let mut cert = construct_witness(&big(2), &big(2)).unwrap();
        cert.x += 1;
        assert_eq!(
            verify_certificate(&cert).failed_check.as_deref(),
            Some("congruence")
        );
        let cert = construct_witness(&big(26), &big(5)).unwrap();
        assert!(verify_certificate(&cert).valid);
    }

    #[test]
    fn every_branch_is_reached() {
        let branch = |d: i64, r: i64| construct_witness(&big(d), &big(r)).unwrap().branch;
        assert_eq!(branch(14, 2), Branch::CyclicNotDiv);
        assert_eq!(branch(42, 5), Branch::CyclicDiv);
        assert_eq!(branch(14, 3), Branch::NonCyclicNotDiv);
        assert_eq!(branch(42, 3), Branch::NonCyclicDiv);
    }

    #[test]
    fn decide_examples() {
        let rep = decide_associated(&big(8));
        assert!(rep.satisfies && rep.all_certified());
        assert_eq!(rep.decompositions.len(), 1);
        assert!(!decide_associated(&big(7)).satisfies);
        let rep = decide_associated(&big(686));
        let rs: Vec<BigInt> = rep.decompositions.iter().map(|x| x.r.clone()).collect();
        assert_eq!(rs, vec![big(1), big(7)]);
        assert!(rep.all_certified());
    }

    #[test]
    fn index_examples() {
        assert_eq!(covering_index_bound(&w(2, 2, 1, 1)), Ok(big(1)));
        assert_eq!(covering_index_bound(&w(14, 7, 0, 1)), Ok(big(1)));
        assert_eq!(covering_index_bound(&w(26, 1, 0, 1)), Ok(big(1)));
        assert_eq!(covering_index_bound(&w(2, 1, 0, 0)), Ok(big(1)));
        assert_eq!(
            covering_index_bound(&w(2, 2, 0, 0)),
            Err(AssocError::NotCyclic)
        );
    }
}
