//! Twist classes `w_{n,k}`, admissibility of degrees, and the census of
//! components of the moduli of twisted K3 surfaces of degree `d` and order `r`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{factorize, inverse_mod, is_square_mod, modulo};
use crate::discform::{disc_form_tw, qform_iso, structure_of_disc, FiniteQuadraticForm, Structure};
use crate::lattice::{idx, invariant_factors_formula, Ambient, DiscGroup, LatticeVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuliError {
    #[error("degree d must be even and at least 2, got {0}")]
    BadDegree(BigInt),
    #[error("order r must be positive, got {0}")]
    BadOrder(BigInt),
    /// Levels are rendered as `(d, r)`.
    #[error("twist classes have different (d, r): {left} vs {right}")]
    Mismatch { left: String, right: String },
    #[error("{0} is not congruent to 0 or 2 mod 6; no reciprocity criterion applies")]
    NoReciprocityBranch(BigInt),
}

/// The class of `w_{n,k} = (1/r)(e1 + n f1 + (k/d) ℓ'_d)` in `Λ^∨_{d,r}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawWClass")]
pub struct WClass {
    #[serde(with = "crate::serde_big")]
    d: BigInt,
    #[serde(with = "crate::serde_big")]
    r: BigInt,
    #[serde(with = "crate::serde_big")]
    n: BigInt,
    #[serde(with = "crate::serde_big")]
    k: BigInt,
}

#[derive(Deserialize)]
struct RawWClass {
    #[serde(with = "crate::serde_big")]
    d: BigInt,
    #[serde(with = "crate::serde_big")]
    r: BigInt,
    #[serde(with = "crate::serde_big")]
    n: BigInt,
    #[serde(with = "crate::serde_big")]
    k: BigInt,
}

impl TryFrom<RawWClass> for WClass {
    type Error = ModuliError;

    fn try_from(raw: RawWClass) -> Result<Self, ModuliError> {
        WClass::new(raw.d, raw.r, raw.n, raw.k)
    }
}

impl WClass {
    pub fn new(
        d: impl Into<BigInt>,
        r: impl Into<BigInt>,
        n: impl Into<BigInt>,
        k: impl Into<BigInt>,
    ) -> Result<Self, ModuliError> {
        let (d, r) = (d.into(), r.into());
        if d < BigInt::from(2) || d.is_odd() {
            return Err(ModuliError::BadDegree(d));
        }
        if !r.is_positive() {
            return Err(ModuliError::BadOrder(r));
        }
        Ok(WClass {
            d,
            r,
            n: n.into(),
            k: k.into(),
        })
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn r(&self) -> &BigInt {
        &self.r
    }

    pub fn n(&self) -> &BigInt {
        &self.n
    }

    pub fn k(&self) -> &BigInt {
        &self.k
    }

    pub fn dprime(&self) -> BigInt {
        &self.d * &self.r * &self.r
    }

    /// `2nd - k²`, so that `(w)² = (2nd - k²)/(r²d)`.
    pub fn norm_numerator(&self) -> BigInt {
        &self.n * &self.d * 2u32 - &self.k * &self.k
    }

    /// Same `(d, r)`, new `(n, k)`.
    pub fn with_nk(&self, n: BigInt, k: BigInt) -> WClass {
        WClass {
            d: self.d.clone(),
            r: self.r.clone(),
            n,
            k,
        }
    }

    pub fn same_level(&self, other: &WClass) -> bool {
        self.d == other.d && self.r == other.r
    }

    /// `r·w = e1 + n f1 + (k/d) ℓ'_d`, an element of `Λ_d^∨`.
    pub fn r_w_vector(&self) -> LatticeVector {
        let amb = Ambient::lambda_d(self.d.clone()).expect("validated degree");
        LatticeVector::from_terms(
            &amb,
            &[
                (idx::E1, BigRational::one()),
                (idx::F1, BigRational::from_integer(self.n.clone())),
                (idx::ELL, BigRational::new(self.k.clone(), self.d.clone())),
            ],
        )
    }

    pub fn w_vector(&self) -> LatticeVector {
        self.r_w_vector()
            .scale(&BigRational::new(BigInt::one(), self.r.clone()))
    }

    /// Order of `[w]` in `Λ^∨_{d,r}`, by enumerating multiples.
    pub fn class_order(&self) -> BigInt {
        let w = self.w_vector();
        let mut m = BigInt::one();
        while !w.scale_int(m.clone()).is_in_dual() {
            m += 1;
        }
        m
    }

    pub fn is_canonical(&self) -> bool {
        let g = self.r.gcd(&self.d);
        !self.n.is_negative() && self.n < self.r && !self.k.is_negative() && self.k < g
    }
}

impl fmt::Display for WClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(d={}, r={}, n={}, k={})",
            self.d, self.r, self.n, self.k
        )
    }
}

/// `d` even, positive, and not divisible by 4, 9 or any odd prime `p ≡ 2 mod 3`.
pub fn satisfies_star2(d: &BigInt) -> bool {
    star2_violation(d).is_none()
}

/// The first reason `d` fails the criterion, if any.
pub fn star2_violation(d: &BigInt) -> Option<String> {
    if !d.is_positive() {
        return Some(format!("{d} is not positive"));
    }
    if d.is_odd() {
        return Some(format!("{d} is odd"));
    }
    for (p, e) in factorize(d).pairs() {
        match u32::try_from(p).ok() {
            Some(2) if e > 1 => return Some("4 divides d".into()),
            Some(3) if e > 1 => return Some("9 divides d".into()),
            Some(2) | Some(3) => {}
            _ if modulo(p, &BigInt::from(3)) != BigInt::one() => {
                return Some(format!("{p} divides d and {p} ≡ 2 mod 3"));
            }
            _ => {}
        }
    }
    None
}

/// The quadratic-residue form of the criterion: for `d ≡ 2 mod 6`, `-3` is a
/// square mod `2d`; for `d = 6t`, `-3` is a square mod `4t` and `4t` is a
/// nonzero square mod 3.
pub fn star2_via_reciprocity(d: &BigInt) -> Result<bool, ModuliError> {
    let six = BigInt::from(6);
    let three = BigInt::from(3);
    let minus3 = BigInt::from(-3);
    if !d.is_positive() {
        return Err(ModuliError::NoReciprocityBranch(d.clone()));
    }
    match u32::try_from(&modulo(d, &six)).expect("small") {
        2 => Ok(is_square_mod(&minus3, &(d * 2u32))),
        0 => {
            let t4 = d / 6 * 4;
            Ok(is_square_mod(&minus3, &t4) && modulo(&t4, &three).is_one())
        }
        _ => Err(ModuliError::NoReciprocityBranch(d.clone())),
    }
}

/// All `(d, r)` with `d r² = d'` and `d` satisfying the criterion, ascending in `r`.
pub fn star2prime_decompositions(dprime: &BigInt) -> Vec<(BigInt, BigInt)> {
    if !dprime.is_positive() {
        return Vec::new();
    }
    // square divisors r² of d'
    let mut rs = vec![BigInt::one()];
    for (p, e) in factorize(dprime).pairs() {
        let mut next = Vec::new();
        for r in &rs {
            let mut pk = BigInt::one();
            for _ in 0..=e / 2 {
                next.push(r * &pk);
                pk *= p;
            }
        }
        rs = next;
    }
    rs.sort();
    rs.into_iter()
        .map(|r| (dprime / (&r * &r), r))
        .filter(|(d, _)| satisfies_star2(d))
        .collect()
}

/// Equivalent class with `0 ≤ n < r` and `0 ≤ k < gcd(r, d)`.
///
/// Write `k = k0 + P r + Q d` with `0 ≤ k0 < gcd(r, d)` and the least
/// `Q ≥ 0`. The `P r` part shifts `w` by `P ℓ'/d ∈ Λ_d^∨`; the `Q d` part is
/// absorbed by `n ↦ n - Q k0 - d Q²/2`, which keeps the square of `r w`
/// and its divisibility and class, so the two are Eichler-equivalent.
pub fn canonicalize_wclass(c: &WClass) -> WClass {
    let (d, r) = (&c.d, &c.r);
    let g = r.gcd(d);
    let k0 = modulo(&c.k, &g);
    // Q d ≡ k - k0 (mod r), solved in units of g
    let step = (&c.k - &k0) / &g;
    let (rg, dg) = (r / &g, d / &g);
    let q = modulo(
        &(step * inverse_mod(&dg, &rg).expect("d/g and r/g are coprime")),
        &rg,
    );
    let n = &c.n - &q * &k0 - d * &q * &q / 2;
    c.with_nk(modulo(&n, r), k0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Obstruction {
    /// `2nd - k²` differs mod `r`: the classes are inequivalent.
    Obstructed,
    Inconclusive,
}

/// Residue of `2nd - k² = r²d·(w)²` mod `r`, an orbit invariant.
pub fn square_residue(c: &WClass) -> BigInt {
    modulo(&c.norm_numerator(), &c.r)
}

pub fn square_obstruction(c1: &WClass, c2: &WClass) -> Result<Obstruction, ModuliError> {
    check_level(c1, c2)?;
    Ok(if square_residue(c1) == square_residue(c2) {
        Obstruction::Inconclusive
    } else {
        Obstruction::Obstructed
    })
}

fn check_level(c1: &WClass, c2: &WClass) -> Result<(), ModuliError> {
    if c1.same_level(c2) {
        return Ok(());
    }
    Err(ModuliError::Mismatch {
        left: format!("({}, {})", c1.d, c1.r),
        right: format!("({}, {})", c2.d, c2.r),
    })
}

/// Default half-width of the dual-shift search box.
pub const DEFAULT_MERGE_BOUND: u32 = 2;

/// A shift `λ ∈ Λ_d^∨` with `r w1` and `r (w2 + λ)` in one orbit. The
/// coefficients are on `e1, f1, e2, f2, ℓ'_d/d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeWitness {
    #[serde(with = "crate::serde_big::vec")]
    pub lambda: Vec<BigInt>,
}

/// Orbit key of `y = a e1 + b f1 + c e2 + e f2 + g ℓ'` given `v = d·y`
/// (integral): content of `v`, then square, divisibility and class in `Z/d`
/// of the primitive vector `v / content`. Agrees with
/// [`crate::lattice::orbit_invariants`], whose scale is `d / content`.
fn small_orbit_key<T>(d: &T, v: &[T; 5]) -> Option<[T; 4]>
where
    T: Integer + Signed + Clone,
{
    let content = v.iter().fold(T::zero(), |g, c| g.gcd(c));
    if content.is_zero() {
        return None;
    }
    let p: Vec<T> = v.iter().map(|c| c.clone() / content.clone()).collect();
    let two = T::one() + T::one();
    let square = two * (p[0].clone() * p[1].clone() + p[2].clone() * p[3].clone())
        - d.clone() * p[4].clone() * p[4].clone();
    let dl = d.clone() * p[4].clone();
    let div = [&p[0], &p[1], &p[2], &p[3], &dl]
        .into_iter()
        .fold(T::zero(), |g, c| g.gcd(c));
    let class = (dl / div.clone()).mod_floor(d);
    Some([content, square, div, class])
}

/// `d·(r w)` in the coordinates `e1, f1, e2, f2, ℓ'`.
fn scaled_coords<T: From<i64> + Clone + Integer>(d: &T, n: &T, k: &T) -> [T; 5] {
    [
        d.clone(),
        d.clone() * n.clone(),
        T::zero(),
        T::zero(),
        k.clone(),
    ]
}

/// Box search in a fixed integer type; `lam` coefficients on `e1, f1, e2, f2, ℓ'/d`.
fn box_search<T>(d: T, r: T, c1: (T, T), c2: (T, T), range: &[i64]) -> Option<[i64; 5]>
where
    T: Integer + Signed + Clone + From<i64>,
{
    let target = small_orbit_key(&d, &scaled_coords(&d, &c1.0, &c1.1));
    let base = scaled_coords(&d, &c2.0, &c2.1);
    // a step of λ moves d·y by d·r on the U coordinates and by r on ℓ'
    let dr = d.clone() * r.clone();
    let steps = [dr.clone(), dr.clone(), dr.clone(), dr, r];
    let len = range.len();
    let mut lam = [0i64; 5];
    for mut code in 0..len.pow(5) {
        for slot in lam.iter_mut() {
            *slot = range[code % len];
            code /= len;
        }
        let mut y = base.clone();
        for i in 0..5 {
            if lam[i] != 0 {
                y[i] = y[i].clone() + steps[i].clone() * T::from(lam[i]);
            }
        }
        if small_orbit_key(&d, &y) == target {
            return Some(lam);
        }
    }
    None
}

/// Search `λ` in the box `|λ_i| ≤ bound` for an equivalence of `[w1]` and
/// `[w2]`. `None` is not a proof of inequivalence.
pub fn merge_search(
    c1: &WClass,
    c2: &WClass,
    bound: u32,
) -> Result<Option<MergeWitness>, ModuliError> {
    if square_obstruction(c1, c2)? == Obstruction::Obstructed {
        return Ok(None);
    }
    let b = i64::from(bound);
    let range: Vec<i64> = std::iter::once(0)
        .chain((1..=b).flat_map(|i| [i, -i]))
        .collect();
    // entries of d·y stay below d·(|n| + r·b + 1) + |k| + r·b; below 2^40
    // every intermediate product fits in an i128
    let limit = BigInt::from(1u64 << 40);
    let rb = &c1.r * b;
    let size = |c: &WClass| &c.d * (c.n.abs() + &rb + 1) + c.k.abs() + &rb;
    let small = size(c1) < limit && size(c2) < limit;
    let found = if small {
        let to = |x: &BigInt| i128::try_from(x).expect("bounded");
        box_search(
            to(&c1.d),
            to(&c1.r),
            (to(&c1.n), to(&c1.k)),
            (to(&c2.n), to(&c2.k)),
            &range,
        )
    } else {
        box_search(
            c1.d.clone(),
            c1.r.clone(),
            (c1.n.clone(), c1.k.clone()),
            (c2.n.clone(), c2.k.clone()),
            &range,
        )
    };
    Ok(found.map(|lam| MergeWitness {
        lambda: lam.iter().map(|&v| BigInt::from(v)).collect(),
    }))
}

/// Bounded search for a proof that `[w1]` and `[w2]` are equivalent.
pub fn merge_rule_k_zero(c1: &WClass, c2: &WClass, bound: u32) -> Result<bool, ModuliError> {
    Ok(merge_search(c1, c2, bound)?.is_some())
}

/// Invariants separating grid cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellInvariants {
    pub structure: Structure,
    pub factors: DiscGroup,
    #[serde(with = "crate::serde_big")]
    pub square_residue: BigInt,
    /// `None` when the structure has no closed form.
    pub form: Option<FiniteQuadraticForm>,
}

impl CellInvariants {
    pub fn of(c: &WClass) -> Self {
        CellInvariants {
            structure: structure_of_disc(c),
            factors: invariant_factors_formula(c),
            square_residue: square_residue(c),
            form: disc_form_tw(c).ok(),
        }
    }

    /// First invariant telling two cells apart, if any.
    pub fn separate(&self, other: &Self) -> Option<Separation> {
        if self.structure != other.structure {
            return Some(Separation::Structure {
                left: self.structure,
                right: other.structure,
            });
        }
        if self.factors != other.factors {
            return Some(Separation::InvariantFactors {
                left: self.factors.clone(),
                right: other.factors.clone(),
            });
        }
        if self.square_residue != other.square_residue {
            return Some(Separation::SquareResidue {
                left: self.square_residue.clone(),
                right: other.square_residue.clone(),
            });
        }
        if let (Some(a), Some(b)) = (&self.form, &other.form) {
            if !qform_iso(a, b).map(|v| v.isomorphic).unwrap_or(true) {
                return Some(Separation::QuadraticForm);
            }
        }
        None
    }
}

/// Why two invariant classes of grid cells are distinct components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Separation {
    Structure {
        left: Structure,
        right: Structure,
    },
    InvariantFactors {
        left: DiscGroup,
        right: DiscGroup,
    },
    SquareResidue {
        #[serde(with = "crate::serde_big")]
        left: BigInt,
        #[serde(with = "crate::serde_big")]
        right: BigInt,
    },
    QuadraticForm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeCertificate {
    pub left: WClass,
    pub right: WClass,
    pub witness: MergeWitness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    /// Indices into [`CensusReport::groups`].
    pub left: usize,
    pub right: usize,
    pub reason: Separation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusGroup {
    pub members: Vec<WClass>,
    /// Index of the invariant class this group belongs to.
    pub invariant_class: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    #[serde(with = "crate::serde_big")]
    pub d: BigInt,
    #[serde(with = "crate::serde_big")]
    pub r: BigInt,
    pub representatives: Vec<WClass>,
    pub groups: Vec<CensusGroup>,
    pub merges: Vec<MergeCertificate>,
    pub separations: Vec<SeparationCertificate>,
    /// Pairs of groups with identical invariants that no merge was found for.
    pub undecided: Vec<(usize, usize)>,
    /// Number of distinct invariant classes.
    pub lower_bound: usize,
    #[serde(with = "crate::serde_big")]
    pub upper_bound: BigInt,
}

impl CensusReport {
    pub fn group_count(&self) -> usize {
        self.groups.len()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let p = self.0[i];
        if p == i {
            return i;
        }
        let root = self.find(p);
        self.0[i] = root;
        root
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
        true
    }
}

/// Enumerate the canonical grid `0 ≤ n < r`, `0 ≤ k < gcd(r, d)`, merge cells
/// proven equivalent and separate cells with different invariants.
pub fn component_census(d: &BigInt, r: &BigInt, bound: u32) -> Result<CensusReport, ModuliError> {
    WClass::new(d.clone(), r.clone(), 0, 0)?;
    let g = r.gcd(d);
    let mut reps = Vec::new();
    let mut n = BigInt::zero();
    while &n < r {
        let mut k = BigInt::zero();
        while k < g {
            reps.push(WClass::new(d.clone(), r.clone(), n.clone(), k.clone())?);
            k += 1;
        }
        n += 1;
    }
    let inv: Vec<CellInvariants> = reps.par_iter().map(CellInvariants::of).collect();

    // invariant classes, in order of first appearance
    let mut class_of = vec![0usize; reps.len()];
    let mut class_reps: Vec<usize> = Vec::new();
    for i in 0..reps.len() {
        match class_reps
            .iter()
            .position(|&j| inv[i].separate(&inv[j]).is_none())
        {
            Some(c) => class_of[i] = c,
            None => {
                class_of[i] = class_reps.len();
                class_reps.push(i);
            }
        }
    }

    let pairs: Vec<(usize, usize)> = (0..reps.len())
        .flat_map(|i| (i + 1..reps.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| class_of[i] == class_of[j])
        .collect();
    let found: Vec<Option<MergeWitness>> = pairs
        .par_iter()
        .map(|&(i, j)| merge_search(&reps[i], &reps[j], bound).expect("same level"))
        .collect();
    let mut uf = UnionFind((0..reps.len()).collect());
    let mut merges = Vec::new();
    for (&(i, j), w) in pairs.iter().zip(found) {
        if let Some(witness) = w {
            if uf.union(i, j) {
                merges.push(MergeCertificate {
                    left: reps[i].clone(),
                    right: reps[j].clone(),
                    witness,
                });
            }
        }
    }

    let mut root_to_group = std::collections::BTreeMap::new();
    let mut groups: Vec<CensusGroup> = Vec::new();
    let mut group_of = vec![0usize; reps.len()];
    for i in 0..reps.len() {
        let root = uf.find(i);
        let gi = *root_to_group.entry(root).or_insert_with(|| {
            groups.push(CensusGroup {
                members: Vec::new(),
                invariant_class: class_of[i],
            });
            groups.len() - 1
        });
        groups[gi].members.push(reps[i].clone());
        group_of[i] = gi;
    }

    let mut separations = Vec::new();
    let mut undecided = Vec::new();
    let firsts: Vec<usize> = (0..groups.len())
        .map(|gi| group_of.iter().position(|&g| g == gi).expect("nonempty"))
        .collect();
    for a in 0..groups.len() {
        for b in a + 1..groups.len() {
            match inv[firsts[a]].separate(&inv[firsts[b]]) {
                Some(reason) => separations.push(SeparationCertificate {
                    left: a,
                    right: b,
                    reason,
                }),
                None => undecided.push((a, b)),
            }
        }
    }

    Ok(CensusReport {
        d: d.clone(),
        r: r.clone(),
        representatives: reps,
        groups,
        merges,
        separations,
        undecided,
        lower_bound: class_reps.len(),
        upper_bound: r * g,
    })
}
