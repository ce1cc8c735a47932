use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::LatticeError;
use crate::arith::gcd_all;
use crate::moduli::WClass;

/// A symmetric integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramMatrix {
    #[serde(with = "rows_serde")]
    rows: Vec<Vec<BigInt>>,
}

impl GramMatrix {
    pub fn new(rows: Vec<Vec<BigInt>>) -> Result<Self, LatticeError> {
        let n = rows.len();
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(LatticeError::NotSquare);
        }
        for i in 0..n {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(LatticeError::NotSymmetric);
                }
            }
        }
        Ok(GramMatrix { rows })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self, LatticeError> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            BigInt::one()
                        } else {
                            BigInt::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        GramMatrix { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn is_even(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, r)| r[i].is_even())
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn determinant(&self) -> BigInt {
        let n = self.dim();
        let mut a = self.rows.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }
}

impl fmt::Display for GramMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                format!(
                    "[{}]",
                    r.iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(", ")
                )
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

mod rows_serde {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Row(#[serde(with = "crate::serde_big::vec")] Vec<BigInt>);

    pub fn serialize<S: Serializer>(rows: &[Vec<BigInt>], ser: S) -> Result<S::Ok, S::Error> {
        let wrapped: Vec<Row> = rows.iter().map(|r| Row(r.clone())).collect();
        wrapped.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        Ok(Vec::<Row>::deserialize(de)?
            .into_iter()
            .map(|r| r.0)
            .collect())
    }
}

/// A finite abelian group `Z/g1 × … × Z/gk` with `g1 | g2 | … | gk`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiscGroup {
    #[serde(with = "crate::serde_big::vec")]
    factors: Vec<BigInt>,
}

impl DiscGroup {
    /// Build from a divisibility chain of positive factors.
    pub fn from_chain(factors: Vec<BigInt>) -> Self {
        debug_assert!(factors.iter().all(|g| g.is_positive()));
        debug_assert!(factors.windows(2).all(|w| w[1].is_multiple_of(&w[0])));
        DiscGroup { factors }
    }

    /// All invariant factors, trivial ones included.
    pub fn factors(&self) -> &[BigInt] {
        &self.factors
    }

    /// Invariant factors with the trivial (= 1) ones dropped.
    pub fn nontrivial(&self) -> Vec<BigInt> {
        self.factors
            .iter()
            .filter(|g| !g.is_one())
            .cloned()
            .collect()
    }

    pub fn normalized(&self, drop_trivial: bool) -> Vec<BigInt> {
        if drop_trivial {
            self.nontrivial()
        } else {
            self.factors.clone()
        }
    }

    pub fn order(&self) -> BigInt {
        self.factors.iter().product()
    }

    pub fn is_cyclic(&self) -> bool {
        self.nontrivial().len() <= 1
    }

    pub fn exponent(&self) -> BigInt {
        self.factors.last().cloned().unwrap_or_else(BigInt::one)
    }
}

impl fmt::Display for DiscGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Invariant factors of the cokernel of `g`, by row and column reduction
/// pivoting on the entry of smallest absolute value.
pub fn smith_normal_form(g: &GramMatrix) -> Result<DiscGroup, LatticeError> {
    let n = g.dim();
    let mut a = g.rows.clone();
    for t in 0..n {
        loop {
            let Some((pi, pj)) = smallest_entry(&a, t) else {
                return Err(LatticeError::Singular);
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }

            let mut dirty = false;
            for i in t + 1..n {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..n {
                    let v = &q * &a[t][j];
                    a[i][j] -= v;
                }
                dirty |= !a[i][t].is_zero();
            }
            for j in t + 1..n {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for i in t..n {
                    let v = &q * &a[i][t];
                    a[i][j] -= v;
                }
                dirty |= !a[t][j].is_zero();
            }
            if dirty {
                continue;
            }
            // pivot must divide the remaining block
            let bad = (t + 1..n)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !a[i][j].is_multiple_of(&a[t][t]));
            match bad {
                Some((i, _)) => {
                    for j in t..n {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
    }
    let factors = (0..n).map(|i| a[i][i].abs()).collect();
    Ok(DiscGroup::from_chain(factors))
}

fn smallest_entry(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let n = a.len();
    let mut best: Option<(usize, usize)> = None;
    for i in t..n {
        for j in t..n {
            if a[i][j].is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Gram matrix of `T_0 = <e1 - n f1, r f1, k f1 + ℓ'_d>`.
pub fn gram_t0(c: &WClass) -> GramMatrix {
    let (d, r, n, k) = (c.d(), c.r(), c.n(), c.k());
    let z = BigInt::zero();
    GramMatrix {
        rows: vec![
            vec![-(n * 2u32), r.clone(), k.clone()],
            vec![r.clone(), z.clone(), z.clone()],
            vec![k.clone(), z, -d],
        ],
    }
}

/// Invariant factors of `Disc T_0` from the gcds of the minors of its Gram
/// matrix: `g1 = gcd(2n, r, k, d)`, `g2 = gcd(r², kr, rd, 2nd - k²)/g1`,
/// `g3 = dr²/(g1 g2)`.
pub fn invariant_factors_formula(c: &WClass) -> DiscGroup {
    let (d, r, n, k) = (c.d(), c.r(), c.n(), c.k());
    let g1 = gcd_all([&(n * 2u32), r, k, d]);
    let g2 = gcd_all([&(r * r), &(k * r), &(r * d), &c.norm_numerator()]) / &g1;
    let g3 = d * r * r / (&g1 * &g2);
    DiscGroup::from_chain(vec![g1, g2, g3])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factors(g: &DiscGroup) -> Vec<i64> {
        g.factors()
            .iter()
            .map(|v| i64::try_from(v).unwrap())
            .collect()
    }

    fn w(d: i64, r: i64, n: i64, k: i64) -> WClass {
        WClass::new(d, r, n, k).unwrap()
    }

    #[test]
    fn gram_t0_examples() {
        let expect = |c: WClass, rows: &[&[i64]]| {
            assert_eq!(gram_t0(&c), GramMatrix::from_i64(rows).unwrap())
        };
        expect(w(2, 2, 1, 1), &[&[-2, 2, 1], &[2, 0, 0], &[1, 0, -2]]);
        expect(w(2, 2, 0, 0), &[&[0, 2, 0], &[2, 0, 0], &[0, 0, -2]]);
        expect(w(14, 7, 0, 1), &[&[0, 7, 1], &[7, 0, 0], &[1, 0, -14]]);
    }

    #[test]
    fn snf_examples() {
        assert_eq!(
            factors(&smith_normal_form(&gram_t0(&w(2, 2, 1, 1))).unwrap()),
            vec![1, 1, 8]
        );
        assert_eq!(
            factors(&smith_normal_form(&gram_t0(&w(2, 2, 0, 0))).unwrap()),
            vec![2, 2, 2]
        );
        assert_eq!(
            factors(&smith_normal_form(&GramMatrix::identity(3)).unwrap()),
            vec![1, 1, 1]
        );
    }

    #[test]
    fn snf_rejects_singular() {
        let g = GramMatrix::from_i64(&[&[2, 4], &[4, 8]]).unwrap();
        assert_eq!(smith_normal_form(&g), Err(LatticeError::Singular));
    }

    #[test]
    fn snf_needs_divisibility_fixup() {
        // diag(2, 3) has invariant factors (1, 6)
        let g = GramMatrix::from_i64(&[&[2, 0], &[0, 3]]).unwrap();
        assert_eq!(factors(&smith_normal_form(&g).unwrap()), vec![1, 6]);
    }

    #[test]
    fn formula_examples() {
        assert_eq!(
            factors(&invariant_factors_formula(&w(2, 2, 1, 1))),
            vec![1, 1, 8]
        );
        assert_eq!(
            factors(&invariant_factors_formula(&w(2, 2, 0, 0))),
            vec![2, 2, 2]
        );
        assert_eq!(
            factors(&invariant_factors_formula(&w(14, 7, 0, 1))),
            vec![1, 1, 686]
        );
    }

    #[test]
    fn determinant_and_evenness() {
        let g = gram_t0(&w(14, 7, 3, 5));
        assert_eq!(g.determinant(), BigInt::from(14 * 49));
        assert!(g.is_even());
        let mut e8 = Vec::new();
        for row in super::super::E8_GRAM {
            e8.push(row.iter().map(|&v| BigInt::from(v)).collect());
        }
        let e8 = GramMatrix::new(e8).unwrap();
        assert_eq!(e8.determinant(), BigInt::one());
        assert!(e8.is_even());
    }

    #[test]
    fn rejects_malformed() {
        assert_eq!(
            GramMatrix::from_i64(&[&[1, 2], &[3, 4]]),
            Err(LatticeError::NotSymmetric)
        );
        assert_eq!(
            GramMatrix::from_i64(&[&[1, 2]]),
            Err(LatticeError::NotSquare)
        );
        assert_eq!(GramMatrix::new(vec![]), Err(LatticeError::Empty));
    }
}
