use num_rational::BigRational;
use num_traits::Zero;

use super::{idx, Ambient, LatticeError, LatticeVector};
use crate::moduli::WClass;

/// `exp(B)` on `(Λ_d ⊕ U4) ⊗ Q` for `B ∈ Λ_d ⊗ Q`:
/// `z ↦ z - (B,z) f4`, `e4 ↦ e4 + B - (B²/2) f4`, `f4 ↦ f4`.
pub fn bfield_shift(b: &LatticeVector, v: &LatticeVector) -> Result<LatticeVector, LatticeError> {
    let d = match b.ambient() {
        Ambient::LambdaD { d } => d,
        other => {
            return Err(LatticeError::WrongAmbient {
                expected: "Λ_d".into(),
                found: other.to_string(),
            })
        }
    };
    let expected = Ambient::LambdaDU { d: d.clone() };
    if v.ambient() != &expected {
        return Err(LatticeError::WrongAmbient {
            expected: expected.to_string(),
            found: v.ambient().to_string(),
        });
    }
    let a = v.coord(idx::E4).clone();
    let bu = b.embed_with_u();
    // (B, z) where z is the Λ_d part of v; B has no e4/f4 components
    let bz = super::inner_product(&bu, v)?;
    let mut out = v + &bu.scale(&a);
    let half_b2 = b.square() / BigRational::from_integer(2.into());
    let df = -(bz + &a * half_b2);
    if !df.is_zero() {
        out = &out + &LatticeVector::from_terms(&expected, &[(idx::F4, df)]);
    }
    Ok(out)
}

/// Whether `exp(w) x` is integral in `Λ_d ⊕ U4`, i.e. `x ∈ T_w`.
pub fn exp_w_integrality(c: &WClass, x: &LatticeVector) -> Result<bool, LatticeError> {
    let image = bfield_shift(&c.w_vector(), &x.embed_with_u())?;
    Ok(image.is_integral())
}
