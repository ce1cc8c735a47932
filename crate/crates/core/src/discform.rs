//! Finite quadratic forms on discriminant groups.
//!
//! Forms are presented by independent generators: the group is the direct
//! product of the cyclic groups they generate. Values of `q` live in `Q/2Z`,
//! values of the bilinear form in `Q/Z`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{crt_combine, factorize, lcm_all, modulo, quadratic_roots, valuation};
use crate::moduli::WClass;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiscFormError {
    #[error("no closed form for discriminant group with invariant factors {factors:?}")]
    Unclassified { factors: Vec<BigInt> },
    #[error("C_{dprime} is empty: d' must be positive and congruent to 0 or 2 mod 6")]
    EmptyDivisor { dprime: BigInt },
    #[error("unsupported shape: {0}")]
    Unsupported(String),
    #[error("generator {label} is ill-defined: {reason}")]
    IllDefined { label: String, reason: String },
}

fn reduce(x: &BigRational, m: i64) -> BigRational {
    let m = BigRational::from_integer(m.into());
    let r = x - (x / &m).floor() * &m;
    debug_assert!(!r.is_negative());
    r
}

macro_rules! residue_type {
    ($name:ident, $modulus:expr, $doc:literal) => {
        #[doc = $doc]
        #[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub struct $name(#[serde(with = "crate::serde_big::frac")] BigRational);

        impl $name {
            pub fn new(x: &BigRational) -> Self {
                $name(reduce(x, $modulus))
            }

            pub fn from_ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
                Self::new(&BigRational::new(num.into(), den.into()))
            }

            pub fn zero() -> Self {
                $name(BigRational::zero())
            }

            /// Canonical representative.
            pub fn value(&self) -> &BigRational {
                &self.0
            }

            pub fn is_zero(&self) -> bool {
                self.0.is_zero()
            }

            pub fn add(&self, other: &Self) -> Self {
                Self::new(&(&self.0 + &other.0))
            }

            pub fn mul_int(&self, k: &BigInt) -> Self {
                Self::new(&(&self.0 * BigRational::from_integer(k.clone())))
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&crate::serde_big::frac::to_string(&self.0))
            }
        }
    };
}

residue_type!(
    QMod2Z,
    2,
    "A rational residue modulo 2, stored in `[0, 2)`."
);
residue_type!(
    QMod1Z,
    1,
    "A rational residue modulo 1, stored in `[0, 1)`."
);

impl QMod2Z {
    pub fn to_mod1(&self) -> QMod1Z {
        QMod1Z::new(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub label: String,
    #[serde(with = "crate::serde_big")]
    pub order: BigInt,
    pub q: QMod2Z,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteQuadraticForm {
    generators: Vec<Generator>,
    /// `b(g_i, g_j)`; the diagonal agrees with `q mod 1`.
    bilinear: Vec<Vec<QMod1Z>>,
}

impl FiniteQuadraticForm {
    pub fn new(
        generators: Vec<Generator>,
        bilinear: Vec<Vec<QMod1Z>>,
    ) -> Result<Self, DiscFormError> {
        let f = FiniteQuadraticForm {
            generators,
            bilinear,
        };
        f.check_well_defined()?;
        Ok(f)
    }

    /// Generators pairwise orthogonal.
    pub fn orthogonal(generators: Vec<Generator>) -> Result<Self, DiscFormError> {
        let m = generators.len();
        let bilinear = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        if i == j {
                            generators[i].q.to_mod1()
                        } else {
                            QMod1Z::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(generators, bilinear)
    }

    pub fn cyclic(label: &str, order: BigInt, q: QMod2Z) -> Result<Self, DiscFormError> {
        Self::orthogonal(vec![Generator {
            label: label.into(),
            order,
            q,
        }])
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn bilinear(&self, i: usize, j: usize) -> &QMod1Z {
        &self.bilinear[i][j]
    }

    pub fn order(&self) -> BigInt {
        self.generators.iter().map(|g| &g.order).product()
    }

    pub fn is_cyclic(&self) -> bool {
        let orders: Vec<&BigInt> = self
            .generators
            .iter()
            .map(|g| &g.order)
            .filter(|o| !o.is_one())
            .collect();
        orders
            .iter()
            .enumerate()
            .all(|(i, a)| orders[i + 1..].iter().all(|b| a.gcd(b).is_one()))
    }

    /// `q(Σ a_i g_i)`.
    pub fn q_of(&self, coeffs: &[BigInt]) -> QMod2Z {
        let mut acc = BigRational::zero();
        for (i, a) in coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            acc += self.generators[i].q.value() * BigRational::from_integer(a * a);
            for (j, c) in coeffs.iter().enumerate().skip(i + 1) {
                acc += self.bilinear[i][j].value() * BigRational::from_integer(a * c * 2u32);
            }
        }
        QMod2Z::new(&acc)
    }

    /// `b(Σ a_i g_i, Σ c_j g_j)`.
    pub fn b_of(&self, a: &[BigInt], c: &[BigInt]) -> QMod1Z {
        let mut acc = BigRational::zero();
        for (i, ai) in a.iter().enumerate() {
            for (j, cj) in c.iter().enumerate() {
                acc += self.bilinear[i][j].value() * BigRational::from_integer(ai * cj);
            }
        }
        QMod1Z::new(&acc)
    }

    /// `N q(g) ∈ Z` and `N² q(g) ≡ 0 mod 2` for each generator `g` of order `N`;
    /// the bilinear matrix is symmetric, matches `q` on the diagonal and is
    /// annihilated by the generator orders.
    pub fn check_well_defined(&self) -> Result<(), DiscFormError> {
        let m = self.generators.len();
        let bad = |label: &str, reason: &str| DiscFormError::IllDefined {
            label: label.into(),
            reason: reason.into(),
        };
        if self.bilinear.len() != m || self.bilinear.iter().any(|r| r.len() != m) {
            return Err(bad("*", "bilinear matrix has the wrong size"));
        }
        for (i, g) in self.generators.iter().enumerate() {
            if !g.order.is_positive() {
                return Err(bad(&g.label, "order must be positive"));
            }
            let n = BigRational::from_integer(g.order.clone());
            let nq = &n * g.q.value();
            if !nq.is_integer() {
                return Err(bad(&g.label, "N·q is not integral"));
            }
            if !(&n * nq).to_integer().is_even() {
                return Err(bad(&g.label, "N²·q is not even"));
            }
            if self.bilinear[i][i] != g.q.to_mod1() {
                return Err(bad(&g.label, "b(g,g) differs from q(g) mod 1"));
            }
            for j in 0..m {
                if self.bilinear[i][j] != self.bilinear[j][i] {
                    return Err(bad(&g.label, "bilinear matrix is not symmetric"));
                }
                if !self.bilinear[i][j].mul_int(&g.order).is_zero() {
                    return Err(bad(&g.label, "order does not annihilate b"));
                }
            }
        }
        Ok(())
    }

    /// Collapse a cyclic group presented by coprime-order generators onto
    /// the single generator `Σ g_i`.
    pub fn to_cyclic(&self) -> Option<(BigInt, QMod2Z)> {
        if !self.is_cyclic() {
            return None;
        }
        let ones = vec![BigInt::one(); self.generators.len()];
        Some((self.order(), self.q_of(&ones)))
    }

    /// The `p`-primary part, presented by the `p`-components of the generators.
    fn primary_part(&self, p: &BigInt) -> PrimaryPart {
        let mut orders = Vec::new();
        let mut qs = Vec::new();
        let mut eps = Vec::new();
        let mut idx = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            let e = valuation(&g.order, p);
            if e == 0 {
                continue;
            }
            let pe = p.pow(e);
            let rest = &g.order / &pe;
            let (ep, _) = crt_combine(&[(BigInt::one(), pe.clone()), (BigInt::zero(), rest)])
                .expect("coprime");
            qs.push(g.q.mul_int(&(&ep * &ep)));
            orders.push(pe);
            eps.push(ep);
            idx.push(i);
        }
        let b = idx
            .iter()
            .enumerate()
            .map(|(a, &i)| {
                idx.iter()
                    .enumerate()
                    .map(|(c, &j)| self.bilinear[i][j].mul_int(&(&eps[a] * &eps[c])))
                    .collect()
            })
            .collect();
        PrimaryPart {
            p: p.clone(),
            orders,
            q: qs,
            b,
        }
    }
}

impl fmt::Display for FiniteQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .generators
            .iter()
            .map(|g| format!("{}: Z/{}, q = {}", g.label, g.order, g.q))
            .collect();
        f.write_str(&parts.join("; "))
    }
}

struct PrimaryPart {
    p: BigInt,
    orders: Vec<BigInt>,
    q: Vec<QMod2Z>,
    b: Vec<Vec<QMod1Z>>,
}

impl PrimaryPart {
    fn q_of(&self, a: &[BigInt]) -> QMod2Z {
        let mut acc = QMod2Z::zero();
        for i in 0..a.len() {
            acc = acc.add(&self.q[i].mul_int(&(&a[i] * &a[i])));
            for j in i + 1..a.len() {
                acc = acc.add(&QMod2Z::new(
                    &(self.b[i][j].value() * BigRational::from_integer(&a[i] * &a[j] * 2u32)),
                ));
            }
        }
        acc
    }

    fn b_of(&self, a: &[BigInt], c: &[BigInt]) -> QMod1Z {
        let mut acc = QMod1Z::zero();
        for i in 0..a.len() {
            for j in 0..c.len() {
                acc = acc.add(&self.b[i][j].mul_int(&(&a[i] * &c[j])));
            }
        }
        acc
    }

    fn element_order(&self, a: &[BigInt]) -> BigInt {
        let ords: Vec<BigInt> = a
            .iter()
            .zip(&self.orders)
            .map(|(x, n)| n / n.gcd(x))
            .collect();
        lcm_all(&ords)
    }

    fn elements(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![Vec::new()];
        for n in &self.orders {
            let mut next = Vec::new();
            for v in &out {
                let mut x = BigInt::zero();
                while &x < n {
                    let mut w = v.clone();
                    w.push(x.clone());
                    next.push(w);
                    x += 1;
                }
            }
            out = next;
        }
        out
    }

    fn sorted_orders(&self) -> Vec<BigInt> {
        let mut o = self.orders.clone();
        o.sort();
        o
    }
}

/// Limit on the size of a non-cyclic primary part searched exhaustively.
const SEARCH_LIMIT: u64 = 1 << 16;

/// Smallest `x` in `[1, N)` coprime to `N` with `x² q1 ≡ q2 mod 2`, where
/// `q1, q2 ∈ (1/N)Z / 2Z`.
pub fn cyclic_unit(order: &BigInt, q1: &QMod2Z, q2: &QMod2Z) -> Option<BigInt> {
    if order.is_one() {
        return (q1 == q2).then(BigInt::one);
    }
    let n = BigRational::from_integer(order.clone());
    let c1 = (q1.value() * &n).to_integer();
    let c2 = (q2.value() * &n).to_integer();
    let roots = quadratic_roots(&c1, &c2, &(order * 2u32));
    let unit = roots
        .iter()
        .take_while(|x| x < order)
        .find(|x| x.gcd(order).is_one());
    unit
}

/// Result of [`qform_iso`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoVerdict {
    pub isomorphic: bool,
    /// For cyclic forms: the unit `x` with `x² q1(t) = q2(u)`.
    #[serde(with = "crate::serde_big::opt")]
    pub unit: Option<BigInt>,
}

/// Decide whether two forms with at most two generators are isometric.
pub fn qform_iso(
    f1: &FiniteQuadraticForm,
    f2: &FiniteQuadraticForm,
) -> Result<IsoVerdict, DiscFormError> {
    for f in [f1, f2] {
        if f.generators.len() > 2 {
            return Err(DiscFormError::Unsupported(format!(
                "{} generators",
                f.generators.len()
            )));
        }
    }
    let no = IsoVerdict {
        isomorphic: false,
        unit: None,
    };
    if f1.order() != f2.order() {
        return Ok(no);
    }
    if let (Some((n, q1)), Some((_, q2))) = (f1.to_cyclic(), f2.to_cyclic()) {
        let unit = cyclic_unit(&n, &q1, &q2);
        return Ok(IsoVerdict {
            isomorphic: unit.is_some(),
            unit,
        });
    }
    for p in factorize(&f1.order()).primes() {
        let (a, b) = (f1.primary_part(p), f2.primary_part(p));
        if a.sorted_orders() != b.sorted_orders() {
            return Ok(no);
        }
        if !primary_iso(&a, &b)? {
            return Ok(no);
        }
    }
    Ok(IsoVerdict {
        isomorphic: true,
        unit: None,
    })
}

fn primary_iso(a: &PrimaryPart, b: &PrimaryPart) -> Result<bool, DiscFormError> {
    if a.orders.len() == 1 {
        return Ok(cyclic_unit(&a.orders[0], &a.q[0], &b.q[0]).is_some());
    }
    let size: BigInt = b.orders.iter().product();
    if size > BigInt::from(SEARCH_LIMIT) {
        return Err(DiscFormError::Unsupported(format!(
            "primary part of order {size} too large to search"
        )));
    }
    // images of a's generators, largest order first
    let mut gens: Vec<usize> = (0..a.orders.len()).collect();
    gens.sort_by(|&i, &j| a.orders[j].cmp(&a.orders[i]));
    let unit = |i: usize| -> Vec<BigInt> {
        (0..a.orders.len())
            .map(|j| {
                if i == j {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            })
            .collect()
    };
    let elems = b.elements();
    let (g0, g1) = (gens[0], gens[1]);
    let cands = |g: usize| -> Vec<&Vec<BigInt>> {
        elems
            .iter()
            .filter(|y| b.element_order(y) == a.orders[g] && b.q_of(y) == a.q[g])
            .collect()
    };
    let c0 = cands(g0);
    let c1 = cands(g1);
    let target_b = a.b_of(&unit(g0), &unit(g1));
    for y0 in &c0 {
        for y1 in &c1 {
            if b.b_of(y0, y1) != target_b {
                continue;
            }
            if independent(b, y0, y1, &a.orders[g0], &a.orders[g1]) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// `<y0> ∩ <y1> = 0` in a `p`-group, given the orders of `y0, y1`.
fn independent(part: &PrimaryPart, y0: &[BigInt], y1: &[BigInt], n0: &BigInt, n1: &BigInt) -> bool {
    let p = &part.p;
    let reduce = |v: Vec<BigInt>| -> Vec<BigInt> {
        v.iter()
            .zip(&part.orders)
            .map(|(x, n)| modulo(x, n))
            .collect()
    };
    let z = reduce(y1.iter().map(|x| x * (n1 / p)).collect());
    let step = n0 / p;
    let mut j = BigInt::one();
    while &j < p {
        let m = &j * &step;
        if reduce(y0.iter().map(|x| x * &m).collect()) == z {
            return false;
        }
        j += 1;
    }
    true
}

/// Shape of `Disc T_w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    Cyclic,
    /// `Z/(r²d/3) × Z/3`.
    ThreeTimesCyclic,
    Other,
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Structure::Cyclic => "cyclic",
            Structure::ThreeTimesCyclic => "three_times_cyclic",
            Structure::Other => "other",
        })
    }
}

/// `ord [w] = lcm(r²d / gcd(r²d, 2nd - k²), rd / gcd(rd, k), r)`.
pub fn order_of_w(c: &WClass) -> BigInt {
    let (d, r, k) = (c.d(), c.r(), c.k());
    let r2d = r * r * d;
    let rd = r * d;
    let a = &r2d / r2d.gcd(&c.norm_numerator());
    let b = &rd / rd.gcd(k);
    lcm_all([&a, &b, r])
}

/// `(w)² = (2nd - k²)/(r²d) mod 2`.
pub fn wsquare(c: &WClass) -> QMod2Z {
    QMod2Z::from_ratio(c.norm_numerator(), c.r() * c.r() * c.d())
}

pub fn structure_of_disc(c: &WClass) -> Structure {
    let g = c.r().gcd(&c.norm_numerator());
    if g.is_one() {
        return Structure::Cyclic;
    }
    let three = BigInt::from(3);
    if g == three {
        let nine = BigInt::from(9);
        if !c.d().is_multiple_of(&three) || !(c.n() * c.d()).is_multiple_of(&nine) {
            return Structure::ThreeTimesCyclic;
        }
    }
    Structure::Other
}

/// Smallest shift `k + pr` (`p ≥ 0`) with `gcd(d, k + pr) = gcd(d, k, r)`,
/// combined with `n` or `n + r`, such that `gcd(r²d, 2nd - k²) = target`.
/// Both moves change `w` by an element of `Λ_d^∨`, so `T_w` is unchanged.
fn normalize_to(c: &WClass, target: u32) -> WClass {
    let (d, r) = (c.d(), c.r());
    let r2d = r * r * d;
    let s = d.gcd(c.k()).gcd(r);
    let target = BigInt::from(target);
    let mut p = BigInt::zero();
    while &p <= d {
        let k = c.k() + &p * r;
        if d.gcd(&k) == s {
            for n in [c.n().clone(), c.n() + r] {
                let m = c.with_nk(n, k.clone());
                if r2d.gcd(&m.norm_numerator()) == target {
                    return m;
                }
            }
        }
        p += 1;
    }
    panic!("no normalized pair for {c}");
}

/// Cyclic case: the pair with `gcd(r²d, 2nd - k²) = 1`, so `[w]` generates.
pub fn normalize_cyclic(c: &WClass) -> WClass {
    normalize_to(c, 1)
}

/// Non-cyclic case: the pair with `gcd(r²d, 2nd - k²) = 3`, so `[w]`
/// generates the factor of order `r²d/3`.
pub fn normalize_noncyclic(c: &WClass) -> WClass {
    normalize_to(c, 3)
}

/// `(Disc T_w, q_{T_w})` from the explicit generators.
pub fn disc_form_tw(c: &WClass) -> Result<FiniteQuadraticForm, DiscFormError> {
    let (d, r) = (c.d(), c.r());
    let r2d = r * r * d;
    match structure_of_disc(c) {
        Structure::Cyclic => {
            let c = normalize_cyclic(c);
            debug_assert!(r2d.gcd(&c.norm_numerator()).is_one());
            FiniteQuadraticForm::cyclic("[w]", r2d, wsquare(&c))
        }
        Structure::ThreeTimesCyclic => {
            let three = BigInt::from(3);
            let c = normalize_noncyclic(c);
            let (label, q3) = if d.is_multiple_of(&three) {
                ("u", QMod2Z::from_ratio(-d, 9))
            } else {
                ("u'", QMod2Z::from_ratio(-(d * c.norm_numerator()), 9))
            };
            FiniteQuadraticForm::orthogonal(vec![
                Generator {
                    label: "[w]".into(),
                    order: &r2d / &three,
                    q: wsquare(&c),
                },
                Generator {
                    label: label.into(),
                    order: three,
                    q: q3,
                },
            ])
        }
        Structure::Other => Err(DiscFormError::Unclassified {
            factors: crate::lattice::invariant_factors_formula(c)
                .factors()
                .to_vec(),
        }),
    }
}

/// `(Disc K_{d'}^⊥, q)`.
pub fn disc_form_k(dprime: &BigInt) -> Result<FiniteQuadraticForm, DiscFormError> {
    let six = BigInt::from(6);
    let res = modulo(dprime, &six);
    if !dprime.is_positive() || !(res.is_zero() || res == BigInt::from(2)) {
        return Err(DiscFormError::EmptyDivisor {
            dprime: dprime.clone(),
        });
    }
    if res.is_zero() {
        FiniteQuadraticForm::orthogonal(vec![
            Generator {
                label: "(1,0)".into(),
                order: dprime / 3,
                q: QMod2Z::from_ratio(3, dprime.clone()),
            },
            Generator {
                label: "(0,1)".into(),
                order: BigInt::from(3),
                q: QMod2Z::from_ratio(-2, 3),
            },
        ])
    } else {
        let num = BigInt::one() - dprime * 2u32;
        FiniteQuadraticForm::cyclic("u", dprime.clone(), QMod2Z::from_ratio(num, dprime * 3u32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(d: i64, r: i64, n: i64, k: i64) -> WClass {
        WClass::new(d, r, n, k).unwrap()
    }

    fn q2(n: i64, d: i64) -> QMod2Z {
        QMod2Z::from_ratio(n, d)
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn residues_normalize() {
        assert_eq!(q2(-1, 8), q2(15, 8));
        assert_eq!(q2(-5, 8).to_string(), "11/8");
        assert_eq!(q2(4, 2), QMod2Z::zero());
        assert_eq!(QMod1Z::from_ratio(-1, 3).to_string(), "2/3");
    }

    #[test]
    fn order_examples() {
        assert_eq!(order_of_w(&w(2, 2, 1, 1)), big(8));
        assert_eq!(order_of_w(&w(2, 2, 0, 0)), big(2));
        assert_eq!(order_of_w(&w(14, 7, 0, 1)), big(686));
    }

    #[test]
    fn wsquare_examples() {
        assert_eq!(wsquare(&w(2, 2, 1, 1)), q2(3, 8));
        assert_eq!(wsquare(&w(2, 2, 0, 1)), q2(15, 8));
        assert_eq!(wsquare(&w(2, 2, 0, 0)), QMod2Z::zero());
    }

    #[test]
    fn structure_examples() {
        assert_eq!(structure_of_disc(&w(2, 2, 1, 1)), Structure::Cyclic);
        assert_eq!(structure_of_disc(&w(2, 2, 0, 0)), Structure::Other);
        assert_eq!(
            structure_of_disc(&w(2, 6, 1, 1)),
            Structure::ThreeTimesCyclic
        );
    }

    #[test]
    fn tw_examples() {
        let f = disc_form_tw(&w(2, 2, 1, 1)).unwrap();
        assert_eq!(f.generators()[0].order, big(8));
        assert_eq!(f.generators()[0].q, q2(3, 8));
        let f = disc_form_tw(&w(2, 2, 0, 1)).unwrap();
        assert_eq!(f.generators()[0].q, q2(-1, 8));
        assert_eq!(
            disc_form_tw(&w(2, 2, 0, 0)),
            Err(DiscFormError::Unclassified {
                factors: vec![big(2), big(2), big(2)]
            })
        );
    }

    #[test]
    fn untwisted_class_normalizes_k() {
        // r = 1, k = 0 shifts to k = 1
        let f = disc_form_tw(&w(2, 1, 0, 0)).unwrap();
        assert_eq!(f.generators()[0].q, q2(-1, 2));
    }

    #[test]
    fn k_examples() {
        let f = disc_form_k(&big(8)).unwrap();
        assert_eq!(f.generators()[0].q, q2(11, 8));
        let f = disc_form_k(&big(12)).unwrap();
        assert_eq!(f.generators()[0].order, big(4));
        assert_eq!(f.generators()[0].q, q2(1, 4));
        assert_eq!(f.generators()[1].q, q2(4, 3));
        assert!(matches!(
            disc_form_k(&big(7)),
            Err(DiscFormError::EmptyDivisor { .. })
        ));
        assert!(disc_form_k(&big(2)).is_ok());
        assert!(disc_form_k(&big(6)).is_ok());
    }

    #[test]
    fn iso_examples() {
        let k8 = disc_form_k(&big(8)).unwrap();
        let t = disc_form_tw(&w(2, 2, 1, 1)).unwrap();
        assert_eq!(
            qform_iso(&t, &k8).unwrap(),
            IsoVerdict {
                isomorphic: true,
                unit: Some(big(3))
            }
        );
        assert!(qform_iso(&k8, &t).unwrap().isomorphic);
        let t = disc_form_tw(&w(2, 2, 0, 1)).unwrap();
        assert!(!qform_iso(&t, &k8).unwrap().isomorphic);
        assert_eq!(qform_iso(&k8, &k8).unwrap().unit, Some(big(1)));
    }

    #[test]
    fn iso_two_generator_three_part() {
        // (2/3, 2/3) and (4/3, 4/3) are anisotropic; (2/3, 4/3) is not
        let mk = |a: i64, b: i64| {
            FiniteQuadraticForm::orthogonal(vec![
                Generator {
                    label: "a".into(),
                    order: big(3),
                    q: q2(a, 3),
                },
                Generator {
                    label: "b".into(),
                    order: big(3),
                    q: q2(b, 3),
                },
            ])
            .unwrap()
        };
        assert!(qform_iso(&mk(2, 2), &mk(4, 4)).unwrap().isomorphic);
        assert!(!qform_iso(&mk(2, 4), &mk(2, 2)).unwrap().isomorphic);
        assert!(qform_iso(&mk(2, 4), &mk(4, 2)).unwrap().isomorphic);
    }

    #[test]
    fn ill_defined_rejected() {
        let g = Generator {
            label: "g".into(),
            order: big(3),
            q: q2(1, 3),
        };
        assert!(matches!(
            FiniteQuadraticForm::orthogonal(vec![g]),
            Err(DiscFormError::IllDefined { .. })
        ));
    }
}
