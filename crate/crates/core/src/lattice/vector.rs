use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{idx, LatticeError};

/// `E8(-1)`: the negated Cartan matrix, Bourbaki numbering.
pub const E8_GRAM: [[i64; 8]; 8] = [
    [-2, 0, 1, 0, 0, 0, 0, 0],
    [0, -2, 0, 1, 0, 0, 0, 0],
    [1, 0, -2, 1, 0, 0, 0, 0],
    [0, 1, 1, -2, 1, 0, 0, 0],
    [0, 0, 0, 1, -2, 1, 0, 0],
    [0, 0, 0, 0, 1, -2, 1, 0],
    [0, 0, 0, 0, 0, 1, -2, 1],
    [0, 0, 0, 0, 0, 0, 1, -2],
];

/// The lattice a [`LatticeVector`] is expressed in.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "lattice")]
pub enum Ambient {
    /// `Λ_d`, 21 coordinates.
    LambdaD {
        #[serde(with = "crate::serde_big")]
        d: BigInt,
    },
    /// `Λ_d ⊕ U4`, 23 coordinates; the extra pair is `(e4, f4)`.
    LambdaDU {
        #[serde(with = "crate::serde_big")]
        d: BigInt,
    },
}

impl Ambient {
    pub fn lambda_d(d: impl Into<BigInt>) -> Result<Self, LatticeError> {
        let d = d.into();
        check_degree(&d)?;
        Ok(Ambient::LambdaD { d })
    }

    pub fn lambda_d_u(d: impl Into<BigInt>) -> Result<Self, LatticeError> {
        let d = d.into();
        check_degree(&d)?;
        Ok(Ambient::LambdaDU { d })
    }

    pub fn d(&self) -> &BigInt {
        match self {
            Ambient::LambdaD { d } | Ambient::LambdaDU { d } => d,
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Ambient::LambdaD { .. } => idx::RANK_LAMBDA_D,
            Ambient::LambdaDU { .. } => idx::RANK_LAMBDA_D_U,
        }
    }

    /// Gram entry `(b_i, b_j)` of the basis.
    pub fn pairing(&self, i: usize, j: usize) -> BigInt {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        match (lo, hi) {
            (a, b) if b < 8 => BigInt::from(E8_GRAM[a][b]),
            (a, b) if (8..16).contains(&a) && b < 16 => BigInt::from(E8_GRAM[a - 8][b - 8]),
            (idx::E1, idx::F1) | (idx::E2, idx::F2) | (idx::E4, idx::F4) => BigInt::one(),
            (idx::ELL, idx::ELL) => -self.d(),
            _ => BigInt::zero(),
        }
    }

    fn name(&self) -> String {
        match self {
            Ambient::LambdaD { d } => format!("Λ_{d}"),
            Ambient::LambdaDU { d } => format!("Λ_{d}⊕U"),
        }
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn check_degree(d: &BigInt) -> Result<(), LatticeError> {
    if d < &BigInt::from(2) || d.is_odd() {
        return Err(LatticeError::BadDegree(d.clone()));
    }
    Ok(())
}

/// A vector of `L ⊗ Q` for an ambient lattice `L`, in exact rational
/// coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeVector {
    ambient: Ambient,
    coords: Vec<BigRational>,
}

impl LatticeVector {
    pub fn new(ambient: Ambient, coords: Vec<BigRational>) -> Result<Self, LatticeError> {
        if coords.len() != ambient.rank() {
            return Err(LatticeError::BadLength {
                expected: ambient.rank(),
                found: coords.len(),
            });
        }
        Ok(LatticeVector { ambient, coords })
    }

    pub fn from_integers(ambient: Ambient, coords: &[i64]) -> Result<Self, LatticeError> {
        let coords = coords
            .iter()
            .map(|&c| BigRational::from_integer(c.into()))
            .collect();
        Self::new(ambient, coords)
    }

    pub fn zero(ambient: &Ambient) -> Self {
        LatticeVector {
            ambient: ambient.clone(),
            coords: vec![BigRational::zero(); ambient.rank()],
        }
    }

    pub fn basis(ambient: &Ambient, i: usize) -> Self {
        let mut v = Self::zero(ambient);
        v.coords[i] = BigRational::one();
        v
    }

    /// Sparse constructor: unspecified coordinates are zero.
    pub fn from_terms(ambient: &Ambient, terms: &[(usize, BigRational)]) -> Self {
        let mut v = Self::zero(ambient);
        for (i, c) in terms {
            v.coords[*i] += c;
        }
        v
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &BigRational {
        &self.coords[i]
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        LatticeVector {
            ambient: self.ambient.clone(),
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }

    pub fn scale_int(&self, s: impl Into<BigInt>) -> Self {
        self.scale(&BigRational::from_integer(s.into()))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    /// Membership in the dual lattice: pairing with every basis vector is integral.
    pub fn is_in_dual(&self) -> bool {
        (0..self.ambient.rank()).all(|i| self.pair_with_basis(i).is_integer())
    }

    /// `(self, b_i)`.
    pub fn pair_with_basis(&self, i: usize) -> BigRational {
        let mut acc = BigRational::zero();
        for (j, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let g = self.ambient.pairing(i, j);
            if !g.is_zero() {
                acc += c * BigRational::from_integer(g);
            }
        }
        acc
    }

    /// Integer coordinates, if integral.
    pub fn integer_coords(&self) -> Option<Vec<BigInt>> {
        self.coords
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    /// gcd of the coordinates of an integral vector (0 for the zero vector).
    pub fn content(&self) -> Option<BigInt> {
        let ints = self.integer_coords()?;
        Some(ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c)))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_some_and(|c| c.is_one())
    }

    /// Least common denominator of the coordinates.
    pub fn denominator(&self) -> BigInt {
        self.coords
            .iter()
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()))
    }

    /// Reinterpret a `Λ_d` vector inside `Λ_d ⊕ U4`.
    pub fn embed_with_u(&self) -> Self {
        match &self.ambient {
            Ambient::LambdaD { d } => {
                let mut coords = self.coords.clone();
                coords.extend([BigRational::zero(), BigRational::zero()]);
                LatticeVector {
                    ambient: Ambient::LambdaDU { d: d.clone() },
                    coords,
                }
            }
            Ambient::LambdaDU { .. } => self.clone(),
        }
    }

    pub fn square(&self) -> BigRational {
        inner_product(self, self).expect("same ambient")
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;

    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        assert_eq!(
            self.ambient, rhs.ambient,
            "adding vectors of different lattices"
        );
        LatticeVector {
            ambient: self.ambient.clone(),
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;

    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        assert_eq!(
            self.ambient, rhs.ambient,
            "subtracting vectors of different lattices"
        );
        LatticeVector {
            ambient: self.ambient.clone(),
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;

    fn neg(self) -> LatticeVector {
        LatticeVector {
            ambient: self.ambient.clone(),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 7] = ["e1", "f1", "e2", "f2", "ℓ'", "e4", "f4"];
        let mut terms = Vec::new();
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = if i < 8 {
                format!("a{}", i + 1)
            } else if i < 16 {
                format!("a{}'", i - 7)
            } else {
                NAMES[i - 16].to_string()
            };
            terms.push(format!("{}·{}", crate::serde_big::frac::to_string(c), name));
        }
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

/// The symmetric bilinear form of the common ambient lattice.
pub fn inner_product(x: &LatticeVector, y: &LatticeVector) -> Result<BigRational, LatticeError> {
    if x.ambient != y.ambient {
        return Err(LatticeError::AmbientMismatch {
            left: x.ambient.name(),
            right: y.ambient.name(),
        });
    }
    let mut acc = BigRational::zero();
    for (i, xi) in x.coords.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.coords.iter().enumerate() {
            if yj.is_zero() {
                continue;
            }
            let g = x.ambient.pairing(i, j);
            if !g.is_zero() {
                acc += xi * yj * BigRational::from_integer(g);
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn hyperbolic_and_ell_pairings() {
        let amb = Ambient::lambda_d(2).unwrap();
        let e1 = LatticeVector::basis(&amb, idx::E1);
        let f1 = LatticeVector::basis(&amb, idx::F1);
        let ell = LatticeVector::basis(&amb, idx::ELL);
        assert_eq!(inner_product(&e1, &f1).unwrap(), q(1));
        assert_eq!(inner_product(&ell, &ell).unwrap(), q(-2));
        let v = &(&e1 + &f1) + &ell;
        assert_eq!(inner_product(&v, &v).unwrap(), q(0));
    }

    #[test]
    fn ambient_mismatch_is_rejected() {
        let a = LatticeVector::basis(&Ambient::lambda_d(2).unwrap(), idx::E1);
        let b = LatticeVector::basis(&Ambient::lambda_d(4).unwrap(), idx::E1);
        assert!(matches!(
            inner_product(&a, &b),
            Err(LatticeError::AmbientMismatch { .. })
        ));
        let c = LatticeVector::basis(&Ambient::lambda_d_u(2).unwrap(), idx::E1);
        assert!(inner_product(&a, &c).is_err());
    }

    #[test]
    fn bad_degree() {
        assert!(Ambient::lambda_d(3).is_err());
        assert!(Ambient::lambda_d(0).is_err());
    }

    #[test]
    fn e8_block_matches_documentation() {
        let doc = super::super::BASIS_DOC;
        let block: Vec<Vec<i64>> = doc
            .lines()
            .skip_while(|l| l.trim() != "E8")
            .skip(1)
            .take_while(|l| l.trim() != "END")
            .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
            .collect();
        assert_eq!(block.len(), 8);
        for (i, row) in block.iter().enumerate() {
            assert_eq!(row.as_slice(), &E8_GRAM[i]);
        }
    }

    #[test]
    fn dual_membership() {
        let amb = Ambient::lambda_d(6).unwrap();
        let ell_over_d =
            LatticeVector::from_terms(&amb, &[(idx::ELL, BigRational::new(1.into(), 6.into()))]);
        assert!(ell_over_d.is_in_dual());
        assert!(!ell_over_d.is_integral());
        let half_e1 =
            LatticeVector::from_terms(&amb, &[(idx::E1, BigRational::new(1.into(), 2.into()))]);
        assert!(!half_e1.is_in_dual());
    }
}
