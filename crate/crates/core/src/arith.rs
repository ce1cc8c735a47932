//! Exact integer and modular arithmetic.
//!
//! Everything here works on `BigInt`. Quadratic congruences `a·x² ≡ b (mod m)`
//! are solved prime power by prime power and recombined with the CRT, which
//! yields the complete root set; the reported root is always the smallest
//! nonnegative one.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("moduli {m1} and {m2} are not coprime (gcd {gcd})")]
    NotCoprime { m1: BigInt, m2: BigInt, gcd: BigInt },
    #[error("modulus must be positive, got {0}")]
    BadModulus(BigInt),
    #[error("expected a positive integer, got {0}")]
    NotPositive(BigInt),
    #[error("r = {0} is divisible by 3, so it cannot split as 2^s·q·r0 in the cyclic case")]
    ThreeDividesCyclic(BigInt),
}

/// Nonnegative residue of `a` modulo `m > 0`.
pub fn modulo(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

/// Inverse of `a` modulo `m`, if it exists. Modulo 1 everything inverts to 0.
pub fn inverse_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let egcd = a.mod_floor(m).extended_gcd(m);
    if egcd.gcd.is_one() {
        Some(egcd.x.mod_floor(m))
    } else {
        None
    }
}

/// `p`-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: &BigInt) -> u32 {
    debug_assert!(!n.is_zero());
    let mut n = n.abs();
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

pub fn gcd_all<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values.into_iter().fold(BigInt::zero(), |g, v| g.gcd(v))
}

pub fn lcm_all<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |l, v| l.lcm(v))
}

// ---------------------------------------------------------------------------
// Factorization

/// Prime factorization, primes strictly increasing, exponents at least one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pairs: Vec<PrimePower>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePower {
    #[serde(with = "crate::serde_big")]
    pub prime: BigInt,
    pub exponent: u32,
}

impl Factorization {
    pub fn pairs(&self) -> impl Iterator<Item = (&BigInt, u32)> {
        self.pairs.iter().map(|pp| (&pp.prime, pp.exponent))
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigInt> {
        self.pairs.iter().map(|pp| &pp.prime)
    }

    pub fn num_distinct_primes(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn product(&self) -> BigInt {
        self.pairs
            .iter()
            .map(|pp| num_traits::pow(pp.prime.clone(), pp.exponent as usize))
            .product()
    }

    pub fn exponent_of(&self, p: &BigInt) -> u32 {
        self.pairs
            .iter()
            .find(|pp| &pp.prime == p)
            .map_or(0, |pp| pp.exponent)
    }
}

const TRIAL_LIMIT: u64 = 1_000_000;

/// Prime factorization of `n ≥ 1`: trial division up to 10^6, then
/// Miller–Rabin and Pollard–Brent on what is left.
///
/// # Panics
///
/// Panics if `n < 1`.
pub fn factorize(n: &BigInt) -> Factorization {
    assert!(n.is_positive(), "factorize needs n >= 1, got {n}");
    let mut primes: Vec<BigInt> = Vec::new();
    let mut rest = n.clone();

    let mut p: u64 = 2;
    while p <= TRIAL_LIMIT {
        let pb = BigInt::from(p);
        if &pb * &pb > rest {
            break;
        }
        while (&rest % p).is_zero() {
            rest /= p;
            primes.push(pb.clone());
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !rest.is_one() {
        let limit = BigInt::from(TRIAL_LIMIT);
        if rest <= &limit * &limit {
            primes.push(rest);
        } else {
            split_into(&rest, &mut primes);
        }
    }
    primes.sort();

    let mut pairs: Vec<PrimePower> = Vec::new();
    for prime in primes {
        match pairs.last_mut() {
            Some(last) if last.prime == prime => last.exponent += 1,
            _ => pairs.push(PrimePower { prime, exponent: 1 }),
        }
    }
    Factorization { pairs }
}

fn split_into(n: &BigInt, out: &mut Vec<BigInt>) {
    if n.is_one() {
        return;
    }
    if is_probable_prime(n) {
        out.push(n.clone());
        return;
    }
    let d = pollard_brent(n);
    split_into(&d, out);
    split_into(&(n / &d), out);
}

const MR_BASES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Miller–Rabin with the first twelve prime bases; deterministic below 3.3·10^24.
pub fn is_probable_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2);
    if n < &two {
        return false;
    }
    for b in MR_BASES {
        let b = BigInt::from(b);
        if n == &b {
            return true;
        }
        if n.is_multiple_of(&b) {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let mut d = n_minus_1.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'witness: for b in MR_BASES {
        let mut x = BigInt::from(b).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A nontrivial divisor of the composite `n`.
fn pollard_brent(n: &BigInt) -> BigInt {
    if n.is_even() {
        return BigInt::from(2);
    }
    let mut c = BigInt::one();
    loop {
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut y = BigInt::from(2);
        let mut g = BigInt::one();
        let mut q = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut r: u64 = 1;
        let m: u64 = 128;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    q = (q * (&x - &y).abs()) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

// ---------------------------------------------------------------------------
// Chinese remainder theorem

/// Combine `x ≡ v_i (mod m_i)` for pairwise coprime `m_i` into a single
/// residue modulo the product.
pub fn crt_combine(residues: &[(BigInt, BigInt)]) -> Result<(BigInt, BigInt), ArithError> {
    let mut value = BigInt::zero();
    let mut modulus = BigInt::one();
    for (v, m) in residues {
        if !m.is_positive() {
            return Err(ArithError::BadModulus(m.clone()));
        }
        let g = modulus.gcd(m);
        if !g.is_one() {
            return Err(ArithError::NotCoprime {
                m1: modulus,
                m2: m.clone(),
                gcd: g,
            });
        }
        value = crt_pair(&value, &modulus, v, m);
        modulus *= m;
    }
    Ok((value, modulus))
}

/// `x ≡ a (mod m)`, `x ≡ b (mod n)` with `gcd(m, n) = 1`.
fn crt_pair(a: &BigInt, m: &BigInt, b: &BigInt, n: &BigInt) -> BigInt {
    let inv = inverse_mod(m, n).expect("coprime moduli");
    let t = ((b - a) * inv).mod_floor(n);
    (a + m * t).mod_floor(&(m * n))
}

// ---------------------------------------------------------------------------
// Quadratic congruences

/// Result of solving `a·x² ≡ b (mod m)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceSolution {
    pub solvable: bool,
    #[serde(with = "crate::serde_big::opt")]
    pub root: Option<BigInt>,
    #[serde(with = "crate::serde_big")]
    pub modulus: BigInt,
}

/// All solutions of a quadratic congruence: `x` is a root iff
/// `x mod period` is one of `residues`. `period` divides the modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSet {
    pub modulus: BigInt,
    pub period: BigInt,
    pub residues: Vec<BigInt>,
}

impl RootSet {
    fn empty(modulus: &BigInt) -> Self {
        RootSet {
            modulus: modulus.clone(),
            period: BigInt::one(),
            residues: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn smallest(&self) -> Option<&BigInt> {
        self.residues.first()
    }

    pub fn contains(&self, x: &BigInt) -> bool {
        self.residues
            .binary_search(&x.mod_floor(&self.period))
            .is_ok()
    }

    /// Roots in `[0, modulus)` in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = BigInt> + '_ {
        let blocks = (&self.modulus / &self.period).to_u64().unwrap_or(u64::MAX);
        (0..blocks).flat_map(move |j| {
            let base = &self.period * j;
            self.residues.iter().map(move |r| &base + r)
        })
    }

    /// Number of roots in `[0, modulus)`.
    pub fn count(&self) -> BigInt {
        (&self.modulus / &self.period) * BigInt::from(self.residues.len())
    }
}

/// Root cosets of `a·x² ≡ b (mod p^e)`: `(period, residues)`.
fn prime_power_roots(a: &BigInt, b: &BigInt, p: &BigInt, e: u32) -> Option<(BigInt, Vec<BigInt>)> {
    let pe = num_traits::pow(p.clone(), e as usize);
    let a = a.mod_floor(&pe);
    let b = b.mod_floor(&pe);
    if a.is_zero() {
        return b.is_zero().then(|| (BigInt::one(), vec![BigInt::zero()]));
    }
    let v = valuation(&a, p);
    if !b.is_zero() && valuation(&b, p) < v {
        return None;
    }
    let pv = num_traits::pow(p.clone(), v as usize);
    let big_e = e - v;
    let pbig = num_traits::pow(p.clone(), big_e as usize);
    let a_unit = &a / &pv;
    let c = ((&b / &pv) * inverse_mod(&a_unit, &pbig).expect("unit")).mod_floor(&pbig);
    unit_free_square_roots(&c, p, big_e)
}

/// Root cosets of `x² ≡ c (mod p^e)`.
fn unit_free_square_roots(c: &BigInt, p: &BigInt, e: u32) -> Option<(BigInt, Vec<BigInt>)> {
    if e == 0 {
        return Some((BigInt::one(), vec![BigInt::zero()]));
    }
    if c.is_zero() {
        let period = num_traits::pow(p.clone(), e.div_ceil(2) as usize);
        return Some((period, vec![BigInt::zero()]));
    }
    let u = valuation(c, p);
    if u % 2 == 1 {
        return None;
    }
    let half = num_traits::pow(p.clone(), (u / 2) as usize);
    let pu = num_traits::pow(p.clone(), u as usize);
    let k = e - u;
    let unit = c / &pu;
    let ys = unit_square_roots(&unit, p, k)?;
    let period = &half * num_traits::pow(p.clone(), k as usize);
    let mut residues: Vec<BigInt> = ys.iter().map(|y| (&half * y).mod_floor(&period)).collect();
    residues.sort();
    residues.dedup();
    Some((period, residues))
}

/// All square roots of a unit `c` modulo `p^k`, `k ≥ 1`.
fn unit_square_roots(c: &BigInt, p: &BigInt, k: u32) -> Option<Vec<BigInt>> {
    let pk = num_traits::pow(p.clone(), k as usize);
    let c = c.mod_floor(&pk);
    if p == &BigInt::from(2) {
        return two_adic_unit_roots(&c, k);
    }
    let mut y = sqrt_mod_prime(&c, p)?;
    let mut pj = p.clone();
    for _ in 1..k {
        pj *= p;
        let inv = inverse_mod(&(&y * 2u32), &pj).expect("odd prime, unit root");
        y = (&y - (&y * &y - &c) * inv).mod_floor(&pj);
    }
    let mut roots = vec![y.clone(), (&pk - &y).mod_floor(&pk)];
    roots.sort();
    roots.dedup();
    Some(roots)
}

/// Square roots of an odd `c` modulo `2^k`: search modulo 8, then lift one
/// bit at a time.
fn two_adic_unit_roots(c: &BigInt, k: u32) -> Option<Vec<BigInt>> {
    let c8 = (c % 8u32).to_u32().expect("small");
    match k {
        1 => return Some(vec![BigInt::one()]),
        2 => return (c8 % 4 == 1).then(|| vec![BigInt::from(1), BigInt::from(3)]),
        _ => {}
    }
    let y0 = (1u32..8).step_by(2).find(|y| (y * y) % 8 == c8)?;
    let mut y = BigInt::from(y0);
    for j in 3..k {
        let next = BigInt::one() << (j + 1);
        if !((&y * &y - c).mod_floor(&next)).is_zero() {
            y += BigInt::one() << (j - 1);
        }
    }
    let m = BigInt::one() << k;
    let half = BigInt::one() << (k - 1);
    let mut roots: Vec<BigInt> = [y.clone(), -&y, &y + &half, &half - &y]
        .iter()
        .map(|v| v.mod_floor(&m))
        .collect();
    roots.sort();
    roots.dedup();
    Some(roots)
}

/// Tonelli–Shanks modulo an odd prime.
fn sqrt_mod_prime(c: &BigInt, p: &BigInt) -> Option<BigInt> {
    let c = c.mod_floor(p);
    if c.is_zero() {
        return Some(c);
    }
    let p_minus_1 = p - 1u32;
    let euler = &p_minus_1 >> 1;
    if !c.modpow(&euler, p).is_one() {
        return None;
    }
    let mut q = p_minus_1.clone();
    let mut s = 0u32;
    while q.is_even() {
        q >>= 1;
        s += 1;
    }
    if s == 1 {
        return Some(c.modpow(&((p + 1u32) >> 2), p));
    }
    let mut z = BigInt::from(2);
    while z.modpow(&euler, p) != p_minus_1 {
        z += 1u32;
    }
    let mut m = s;
    let mut cc = z.modpow(&q, p);
    let mut t = c.modpow(&q, p);
    let mut r = c.modpow(&((&q + 1u32) >> 1), p);
    while !t.is_one() {
        let mut i = 0u32;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = (&t2 * &t2) % p;
            i += 1;
        }
        let mut b = cc.clone();
        for _ in 0..(m - i - 1) {
            b = (&b * &b) % p;
        }
        m = i;
        cc = (&b * &b) % p;
        t = (t * &cc) % p;
        r = (r * &b) % p;
    }
    debug_assert_eq!((&r * &r) % p, c);
    Some(r)
}

/// Complete root set of `a·x² ≡ b (mod m)`.
///
/// # Panics
///
/// Panics if `m < 1`.
pub fn quadratic_roots(a: &BigInt, b: &BigInt, m: &BigInt) -> RootSet {
    assert!(m.is_positive(), "modulus must be >= 1, got {m}");
    let mut period = BigInt::one();
    let mut residues = vec![BigInt::zero()];
    for (p, e) in factorize(m).pairs() {
        let Some((pp, local)) = prime_power_roots(a, b, p, e) else {
            return RootSet::empty(m);
        };
        let mut next = Vec::with_capacity(residues.len() * local.len());
        for r1 in &residues {
            for r2 in &local {
                next.push(crt_pair(r1, &period, r2, &pp));
            }
        }
        period *= &pp;
        residues = next;
    }
    residues.sort();
    residues.dedup();
    RootSet {
        modulus: m.clone(),
        period,
        residues,
    }
}

/// Decide `a·x² ≡ b (mod m)` and return its smallest nonnegative root.
pub fn solve_quadratic_congruence(a: &BigInt, b: &BigInt, m: &BigInt) -> CongruenceSolution {
    let roots = quadratic_roots(a, b, m);
    CongruenceSolution {
        solvable: !roots.is_empty(),
        root: roots.smallest().cloned(),
        modulus: m.clone(),
    }
}

pub fn is_square_mod(a: &BigInt, m: &BigInt) -> bool {
    solve_quadratic_congruence(&BigInt::one(), a, m).solvable
}

// ---------------------------------------------------------------------------
// r = 2^s · q · r0

/// `r = 2^s · q · r0` where `q` collects the prime powers with `p ≡ 1 (mod 3)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RSplit {
    pub s: u32,
    #[serde(with = "crate::serde_big")]
    pub q: BigInt,
    #[serde(with = "crate::serde_big")]
    pub r0: BigInt,
}

impl RSplit {
    pub fn product(&self) -> BigInt {
        (BigInt::one() << self.s) * &self.q * &self.r0
    }
}

/// Split `r` as `2^s · q · r0`. With `three_in_r0` the 3-part of `r` goes to
/// `r0`; otherwise `3 | r` is rejected.
pub fn split_r(r: &BigInt, three_in_r0: bool) -> Result<RSplit, ArithError> {
    if !r.is_positive() {
        return Err(ArithError::NotPositive(r.clone()));
    }
    let three = BigInt::from(3);
    let mut split = RSplit {
        s: 0,
        q: BigInt::one(),
        r0: BigInt::one(),
    };
    for (p, e) in factorize(r).pairs() {
        let pe = num_traits::pow(p.clone(), e as usize);
        if p == &BigInt::from(2) {
            split.s = e;
        } else if p == &three {
            if !three_in_r0 {
                return Err(ArithError::ThreeDividesCyclic(r.clone()));
            }
            split.r0 *= pe;
        } else if (p % 3u32).is_one() {
            split.q *= pe;
        } else {
            split.r0 *= pe;
        }
    }
    Ok(split)
}
