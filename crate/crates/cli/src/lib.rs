//! Report builders behind the `twistk3` binary.
//!
//! Every command produces a [`ReportDocument`]; the binary prints it either
//! as JSON or as a flattened `key  value` table built from the same JSON
//! value, so both modes carry identical numbers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use twistk3::assoc::{
    construct_witness, covering_index_bound, decide_associated, matches_k, verify_certificate,
    AssocError,
};
use twistk3::discform::{
    disc_form_k, disc_form_tw, order_of_w, qform_iso, structure_of_disc, wsquare,
};
use twistk3::lattice::{gram_t0, invariant_factors_formula, smith_normal_form};
use twistk3::moduli::{
    component_census, merge_rule_k_zero, satisfies_star2, square_obstruction,
    star2_via_reciprocity, CensusReport, Obstruction,
};
use twistk3::{BigInt, WClass};

pub const SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub certificates: Vec<Value>,
    pub version: String,
}

impl ReportDocument {
    fn new(command: &str, inputs: Value, results: Value, certificates: Vec<Value>) -> Self {
        ReportDocument {
            command: command.into(),
            inputs,
            results,
            certificates,
            version: concat!("twistk3 ", env!("CARGO_PKG_VERSION")).into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `path  value` lines for every leaf of the document.
    pub fn to_text(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut rows = Vec::new();
        flatten("", &value, &mut rows);
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        rows.iter()
            .map(|(k, v)| format!("{k:width$}  {v}\n"))
            .collect()
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    let join = |key: &str| {
        if prefix.is_empty() {
            key.to_string()
        } else {
            format!("{prefix}.{key}")
        }
    };
    match value {
        Value::Object(map) if !map.is_empty() => {
            map.iter().for_each(|(k, v)| flatten(&join(k), v, out))
        }
        Value::Array(items) if !items.is_empty() => items
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&format!("{prefix}[{i}]"), v, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// How the process should exit after printing a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// The input was well formed but the mathematics rejected it.
    Rejected,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Rejected => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub type Outcome = Result<(ReportDocument, Status), UsageError>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("core types serialize")
}

fn class(d: &BigInt, r: &BigInt, n: &BigInt, k: &BigInt) -> Result<WClass, UsageError> {
    WClass::new(d.clone(), r.clone(), n.clone(), k.clone()).map_err(|e| UsageError(e.to_string()))
}

fn require_level(d: &BigInt, r: &BigInt) -> Result<(), UsageError> {
    class(d, r, &BigInt::from(0), &BigInt::from(0)).map(|_| ())
}

pub fn cmd_check_dstar(dprime: &BigInt) -> Outcome {
    if dprime < &BigInt::from(1) {
        return Err(UsageError(format!("d' must be at least 1, got {dprime}")));
    }
    let report = decide_associated(dprime);
    let mut certificates = Vec::new();
    let decompositions: Vec<Value> = report
        .decompositions
        .iter()
        .map(|dec| {
            let mut row = json!({ "d": to_value(&Wrap(&dec.d)), "r": to_value(&Wrap(&dec.r)) });
            match &dec.certificate {
                Some(cert) => {
                    row["certified"] = json!(verify_certificate(cert).valid);
                    row["witness"] = to_value(&cert.witness);
                    row["x"] = to_value(&Wrap(&cert.x));
                    certificates.push(to_value(cert));
                }
                None => {
                    row["certified"] = json!(false);
                    row["error"] = json!(dec.error);
                }
            }
            row
        })
        .collect();
    let results = json!({
        "dprime": to_value(&Wrap(dprime)),
        "satisfies": report.satisfies,
        "all_certified": report.satisfies && report.all_certified(),
        "decompositions": decompositions,
    });
    Ok((
        ReportDocument::new(
            "check-dstar",
            json!({ "dprime": to_value(&Wrap(dprime)) }),
            results,
            certificates,
        ),
        Status::Success,
    ))
}

pub fn cmd_witness(d: &BigInt, r: &BigInt) -> Outcome {
    require_level(d, r)?;
    let inputs = json!({ "d": to_value(&Wrap(d)), "r": to_value(&Wrap(r)) });
    match construct_witness(d, r) {
        Ok(cert) => {
            let check = verify_certificate(&cert);
            let results = json!({
                "accepted": true,
                "witness": to_value(&cert.witness),
                "canonical": to_value(&cert.canonical),
                "x": to_value(&Wrap(&cert.x)),
                "branch": to_value(&cert.branch),
                "verification": to_value(&check),
            });
            let status = if check.valid {
                Status::Success
            } else {
                Status::Rejected
            };
            Ok((
                ReportDocument::new("witness", inputs, results, vec![to_value(&cert)]),
                status,
            ))
        }
        Err(AssocError::NotStar2 { reason, .. }) => {
            let results = json!({ "accepted": false, "reason": reason });
            Ok((
                ReportDocument::new("witness", inputs, results, vec![]),
                Status::Rejected,
            ))
        }
        Err(e) => {
            let results = json!({ "accepted": false, "reason": e.to_string() });
            Ok((
                ReportDocument::new("witness", inputs, results, vec![]),
                Status::Rejected,
            ))
        }
    }
}

fn census_results(rep: &CensusReport, bound: u32) -> Value {
    let nk = |c: &WClass| json!([to_value(&Wrap(c.n())), to_value(&Wrap(c.k()))]);
    let groups: Vec<Value> = rep
        .groups
        .iter()
        .map(|g| Value::Array(g.members.iter().map(nk).collect()))
        .collect();
    let merged_pairs: Vec<Value> = rep
        .merges
        .iter()
        .map(|m| json!([nk(&m.left), nk(&m.right)]))
        .collect();
    let separations: Vec<Value> = rep
        .separations
        .iter()
        .map(|s| {
            json!({
                "left_group": s.left,
                "right_group": s.right,
                "left": nk(&rep.groups[s.left].members[0]),
                "right": nk(&rep.groups[s.right].members[0]),
                "reason": to_value(&s.reason),
            })
        })
        .collect();
    let undecided: Vec<Value> = rep
        .undecided
        .iter()
        .map(|&(a, b)| json!([nk(&rep.groups[a].members[0]), nk(&rep.groups[b].members[0])]))
        .collect();
    json!({
        "d": to_value(&Wrap(&rep.d)),
        "r": to_value(&Wrap(&rep.r)),
        "bound": bound,
        "cells": rep.representatives.len(),
        "group_count": rep.group_count(),
        "lower_bound": rep.lower_bound,
        "upper_bound": to_value(&Wrap(&rep.upper_bound)),
        "groups": groups,
        "merged_pairs": merged_pairs,
        "separations": separations,
        "undecided": undecided,
    })
}

pub fn cmd_components(d: &BigInt, r: &BigInt, bound: u32) -> Outcome {
    require_level(d, r)?;
    let rep = component_census(d, r, bound).map_err(|e| UsageError(e.to_string()))?;
    let mut certificates: Vec<Value> = rep.merges.iter().map(to_value).collect();
    certificates.extend(rep.separations.iter().map(to_value));
    let inputs = json!({ "d": to_value(&Wrap(d)), "r": to_value(&Wrap(r)), "bound": bound });
    Ok((
        ReportDocument::new(
            "components",
            inputs,
            census_results(&rep, bound),
            certificates,
        ),
        Status::Success,
    ))
}

pub fn cmd_disc(d: &BigInt, r: &BigInt, n: &BigInt, k: &BigInt) -> Outcome {
    let c = class(d, r, n, k)?;
    let gram = gram_t0(&c);
    let snf = smith_normal_form(&gram).map_err(|e| UsageError(e.to_string()))?;
    let formula = invariant_factors_formula(&c);
    let (form, reason) = match disc_form_tw(&c) {
        Ok(f) => (to_value(&f), Value::Null),
        Err(e) => (Value::Null, json!(e.to_string())),
    };
    let results = json!({
        "class": to_value(&c),
        "gram": to_value(&gram),
        "smith_factors": to_value(&snf),
        "formula_factors": to_value(&formula),
        "factors_agree": snf == formula,
        "structure": to_value(&structure_of_disc(&c)),
        "order_of_w": to_value(&Wrap(&order_of_w(&c))),
        "w_square": to_value(&wsquare(&c)),
        "form": form,
        "unclassified_reason": reason,
    });
    Ok((
        ReportDocument::new("disc", to_value(&c), results, vec![]),
        Status::Success,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example {
    C8,
    C14,
}

fn check(name: &str, passed: bool, detail: String) -> Value {
    json!({ "name": name, "passed": passed, "detail": detail })
}

fn wc(d: i64, r: i64, n: i64, k: i64) -> WClass {
    WClass::new(d, r, n, k).expect("fixed example classes are valid")
}

fn example_c8() -> Vec<Value> {
    let m11 = matches_k(&wc(2, 2, 1, 1));
    let m01 = matches_k(&wc(2, 2, 0, 1));
    let m00 = matches_k(&wc(2, 2, 0, 0));
    let merged = merge_rule_k_zero(
        &wc(2, 2, 0, 0),
        &wc(2, 2, 1, 0),
        twistk3::moduli::DEFAULT_MERGE_BOUND,
    );
    let index = covering_index_bound(&wc(2, 2, 1, 1));
    vec![
        check(
            "w(1,1) matches K_8 with x = 3",
            m11.matches && m11.unit == Some(BigInt::from(3)),
            m11.unit.map_or("no unit".into(), |x| format!("x = {x}")),
        ),
        check(
            "w(0,1) does not match",
            !m01.matches,
            m01.reason.unwrap_or_default(),
        ),
        check(
            "w(0,0) does not match",
            !m00.matches,
            m00.reason.unwrap_or_default(),
        ),
        check(
            "w(0,0) and w(1,0) merge",
            merged == Ok(true),
            match merged {
                Ok(true) => "merge witness found".into(),
                Ok(false) => "no merge witness in the search box".into(),
                Err(e) => e.to_string(),
            },
        ),
        check(
            "covering index is 1",
            index.as_ref().is_ok_and(|i| *i == BigInt::from(1)),
            index.map_or_else(|e| e.to_string(), |i| format!("index {i}")),
        ),
    ]
}

fn example_c14() -> Vec<Value> {
    let (a, b) = (wc(14, 7, 0, 1), wc(14, 7, 1, 3));
    let k = disc_form_k(&BigInt::from(686)).expect("686 ≡ 2 mod 6");
    let iso = |c: &WClass| {
        disc_form_tw(c)
            .ok()
            .and_then(|f| qform_iso(&f, &k).ok())
            .and_then(|v| v.unit)
    };
    let describe = |u: &Option<BigInt>| {
        u.as_ref()
            .map_or("not isometric".into(), |u| format!("unit {u}"))
    };
    let (ia, ib) = (iso(&a), iso(&b));
    let ob = square_obstruction(&a, &b);
    let residues = format!(
        "2nd - k² mod 7: {} vs {}",
        twistk3::moduli::square_residue(&a),
        twistk3::moduli::square_residue(&b)
    );
    vec![
        check("T_w(0,1) ≅ K_686^⊥", ia.is_some(), describe(&ia)),
        check("T_w(1,3) ≅ K_686^⊥", ib.is_some(), describe(&ib)),
        check(
            "square obstruction separates them",
            ob == Ok(Obstruction::Obstructed),
            residues,
        ),
    ]
}

pub fn cmd_example(example: Example) -> Outcome {
    let (name, checks) = match example {
        Example::C8 => ("c8", example_c8()),
        Example::C14 => ("c14", example_c14()),
    };
    let all = checks.iter().all(|c| c["passed"] == json!(true));
    let results = json!({ "name": name, "checks": checks, "all_passed": all });
    let status = if all {
        Status::Success
    } else {
        Status::Rejected
    };
    Ok((
        ReportDocument::new("example", json!({ "name": name }), results, vec![]),
        status,
    ))
}

/// Witness construction and verification over every `(d, r)` with even
/// `d ≤ dmax` satisfying (**) and `r ≤ rmax`, plus `samples` random classes
/// checked for SNF/formula agreement and well-defined forms.
pub fn cmd_sweep(dmax: u64, rmax: u64, seed: u64, samples: usize) -> Outcome {
    if dmax < 2 || rmax < 1 {
        return Err(UsageError(format!(
            "sweep needs dmax ≥ 2 and rmax ≥ 1, got {dmax} {rmax}"
        )));
    }
    let cells: Vec<(u64, u64)> = (2..=dmax)
        .step_by(2)
        .filter(|&d| satisfies_star2(&BigInt::from(d)))
        .flat_map(|d| (1..=rmax).map(move |r| (d, r)))
        .collect();
    let rows: Vec<(Value, Option<Value>, bool)> = cells
        .par_iter()
        .map(|&(d, r)| {
            let (d, r) = (BigInt::from(d), BigInt::from(r));
            match construct_witness(&d, &r) {
                Ok(cert) => {
                    let v = verify_certificate(&cert);
                    let iso = disc_form_tw(&cert.witness)
                        .ok()
                        .zip(disc_form_k(&cert.dprime).ok())
                        .and_then(|(f, g)| qform_iso(&f, &g).ok())
                        .is_some_and(|v| v.isomorphic);
                    let agree = iso == matches_k(&cert.witness).matches;
                    let ok = v.valid && agree;
                    let row = json!({
                        "d": to_value(&Wrap(&d)), "r": to_value(&Wrap(&r)),
                        "witness": to_value(&cert.witness), "x": to_value(&Wrap(&cert.x)),
                        "valid": v.valid, "matches_k_agrees": agree,
                    });
                    (row, Some(to_value(&cert)), ok)
                }
                Err(e) => (json!({ "d": to_value(&Wrap(&d)), "r": to_value(&Wrap(&r)), "error": e.to_string() }), None, false),
            }
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample_failures = Vec::new();
    for _ in 0..samples {
        let d = 2 * rng.gen_range(1..=dmax / 2);
        let r = rng.gen_range(1..=rmax);
        let n = rng.gen_range(-(dmax as i64)..=dmax as i64);
        let k = rng.gen_range(-(dmax as i64)..=dmax as i64);
        let c = WClass::new(d, r, n, k).expect("valid sample");
        let snf_ok =
            smith_normal_form(&gram_t0(&c)).is_ok_and(|g| g == invariant_factors_formula(&c));
        let form_ok = disc_form_tw(&c)
            .map(|f| f.check_well_defined().is_ok())
            .unwrap_or(true);
        if !(snf_ok && form_ok) {
            sample_failures.push(to_value(&c));
        }
    }
    let reciprocity_mismatches: Vec<u64> = (2..=dmax)
        .step_by(2)
        .filter(|d| d % 6 != 4)
        .filter(|&d| {
            star2_via_reciprocity(&BigInt::from(d)).ok() != Some(satisfies_star2(&BigInt::from(d)))
        })
        .collect();

    let failures = rows.iter().filter(|(_, _, ok)| !ok).count()
        + sample_failures.len()
        + reciprocity_mismatches.len();
    let certificates = rows.iter().filter_map(|(_, c, _)| c.clone()).collect();
    let results = json!({
        "cells": rows.len(),
        "failures": failures,
        "witnesses": rows.into_iter().map(|(row, _, _)| row).collect::<Vec<_>>(),
        "samples": samples,
        "sample_failures": sample_failures,
        "reciprocity_mismatches": reciprocity_mismatches,
    });
    let inputs = json!({ "dmax": dmax, "rmax": rmax, "seed": seed });
    let status = if failures == 0 {
        Status::Success
    } else {
        Status::Rejected
    };
    Ok((
        ReportDocument::new("sweep", inputs, results, certificates),
        status,
    ))
}

/// Serializes a big integer the same way the core types do.
struct Wrap<'a>(&'a BigInt);

impl Serialize for Wrap<'_> {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        twistk3::serde_big::serialize(self.0, ser)
    }
}
