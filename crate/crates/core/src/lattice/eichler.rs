//! Orbits of vectors under the stable orthogonal group of `Λ_d`.
//!
//! `Λ_d` contains two hyperbolic planes, so primitive vectors are classified
//! by square, divisibility and the class of `x/div(x)` in `Disc Λ_d ≅ Z/d`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{idx, Ambient, LatticeError, LatticeVector};
use crate::arith::modulo;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EichlerInvariants {
    #[serde(with = "crate::serde_big")]
    pub square: BigInt,
    #[serde(with = "crate::serde_big")]
    pub divisibility: BigInt,
    /// Class of `x/div(x)` as a multiple of `[ℓ'_d/d]`, in `[0, d)`.
    #[serde(with = "crate::serde_big")]
    pub disc_class: BigInt,
}

/// Invariants of a rational vector: the positive scale making it primitive
/// integral, and the invariants of the result.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrbitInvariants {
    #[serde(with = "crate::serde_big::frac")]
    pub scale: BigRational,
    pub primitive: EichlerInvariants,
}

fn require_lambda_d(x: &LatticeVector) -> Result<&BigInt, LatticeError> {
    match x.ambient() {
        Ambient::LambdaD { d } => Ok(d),
        other => Err(LatticeError::WrongAmbient {
            expected: "Λ_d".into(),
            found: other.to_string(),
        }),
    }
}

/// Square, divisibility and discriminant class of a primitive integral vector of `Λ_d`.
pub fn eichler_invariants(x: &LatticeVector) -> Result<EichlerInvariants, LatticeError> {
    let d = require_lambda_d(x)?;
    let content = x.content().ok_or(LatticeError::NotIntegral)?;
    if content != BigInt::from(1) {
        return Err(LatticeError::NotPrimitive { content });
    }
    let divisibility = (0..x.ambient().rank())
        .map(|i| x.pair_with_basis(i).to_integer())
        .fold(BigInt::zero(), |g, v| g.gcd(&v));
    // x/div lies in Λ_d^∨; its unimodular part is integral, so only the
    // ℓ' coordinate c/div contributes, as (d c / div)·[ℓ'/d].
    let c = x.coord(idx::ELL).to_integer();
    let disc_class = modulo(&(d * c / &divisibility), d);
    Ok(EichlerInvariants {
        square: x.square().to_integer(),
        divisibility,
        disc_class,
    })
}

/// Whether two primitive vectors of `Λ_d` lie in one orbit.
pub fn eichler_equivalent(x: &LatticeVector, y: &LatticeVector) -> Result<bool, LatticeError> {
    if x.ambient() != y.ambient() {
        return Err(LatticeError::AmbientMismatch {
            left: x.ambient().to_string(),
            right: y.ambient().to_string(),
        });
    }
    Ok(eichler_invariants(x)? == eichler_invariants(y)?)
}

/// Orbit invariants of a nonzero vector of `Λ_d ⊗ Q`. Two vectors are in the
/// same orbit iff these agree.
pub fn orbit_invariants(v: &LatticeVector) -> Result<OrbitInvariants, LatticeError> {
    require_lambda_d(v)?;
    let den = v.denominator();
    let ints = v.scale_int(den.clone());
    let content = ints.content().expect("cleared denominators");
    if content.is_zero() {
        return Err(LatticeError::NotPrimitive { content });
    }
    let scale = BigRational::new(den, content.abs());
    let primitive = eichler_invariants(&v.scale(&scale))?;
    Ok(OrbitInvariants { scale, primitive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn lam(d: i64) -> Ambient {
        Ambient::lambda_d(d).unwrap()
    }

    fn vec(d: i64, terms: &[(usize, i64)]) -> LatticeVector {
        let terms: Vec<_> = terms
            .iter()
            .map(|&(i, c)| (i, BigRational::from_integer(c.into())))
            .collect();
        LatticeVector::from_terms(&lam(d), &terms)
    }

    #[test]
    fn worked_example_pairs() {
        let e1 = vec(2, &[(idx::E1, 1)]);
        let y = vec(2, &[(idx::E1, 1), (idx::F1, 1), (idx::ELL, 1)]);
        assert!(eichler_equivalent(&e1, &y).unwrap());
        let z = vec(2, &[(idx::E1, 1), (idx::F1, 1)]);
        assert!(!eichler_equivalent(&e1, &z).unwrap());
        assert!(eichler_equivalent(&e1, &e1).unwrap());
    }

    #[test]
    fn rejects_non_primitive() {
        let x = vec(2, &[(idx::E1, 2), (idx::F1, 4)]);
        assert_eq!(
            eichler_invariants(&x),
            Err(LatticeError::NotPrimitive {
                content: BigInt::from(2)
            })
        );
        let u = LatticeVector::basis(&Ambient::lambda_d_u(2).unwrap(), idx::E1);
        assert!(matches!(
            eichler_invariants(&u),
            Err(LatticeError::WrongAmbient { .. })
        ));
    }

    /// Compare the read-off class with a direct search in `Λ_d^∨ / Λ_d`:
    /// `x/div - j·ℓ'/d` must be integral for exactly the reported `j`.
    #[test]
    fn disc_class_matches_dual_quotient() {
        for d in [2i64, 4, 6, 10, 12] {
            for a in -3i64..=3 {
                for c in -7i64..=7 {
                    for m in [1i64, 2, 3, 6] {
                        let x = vec(d, &[(idx::E1, m), (idx::F1, a), (idx::ELL, c)]);
                        let Ok(inv) = eichler_invariants(&x) else {
                            continue;
                        };
                        let y = x.scale(&BigRational::new(BigInt::one(), inv.divisibility.clone()));
                        let hits: Vec<i64> = (0..d)
                            .filter(|&j| {
                                let shift = LatticeVector::from_terms(
                                    &lam(d),
                                    &[(idx::ELL, BigRational::new(j.into(), d.into()))],
                                );
                                (&y - &shift).is_integral()
                            })
                            .collect();
                        assert_eq!(
                            hits,
                            vec![i64::try_from(&inv.disc_class).unwrap()],
                            "d={d} x={x}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn orbit_invariants_scale_out() {
        let v = vec(2, &[(idx::E1, 2), (idx::F1, 2), (idx::ELL, 2)])
            .scale(&BigRational::new(1.into(), 4.into()));
        let inv = orbit_invariants(&v).unwrap();
        assert_eq!(inv.scale, BigRational::from_integer(2.into()));
        assert_eq!(inv.primitive.square, BigInt::zero());
        assert!(orbit_invariants(&LatticeVector::zero(&lam(2))).is_err());
    }
}
