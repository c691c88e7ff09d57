//! Exact arithmetic in the real Clifford algebra Cl(r,s).
//!
//! The quadratic space R^{r,s} carries the bilinear form
//! `<z_i, z_j> = eps_i delta_ij` with `eps_i = +1` for the first `r` basis
//! vectors and `eps_i = -1` for the remaining `s`.  Generators multiply by
//! the rule `z_i z_j + z_j z_i = -2 <z_i, z_j>`, so positive directions
//! square to `-1` and negative directions square to `+1`.
//!
//! Elements are stored as maps from basis blades to rational coefficients.
//! A blade is a bitmask over generator indices, read in ascending index
//! order; products are resolved by counting transpositions, so every
//! computation stays in exact rational arithmetic.

pub mod element;
pub mod pin;

pub use element::CliffordElement;
pub use pin::PinElement;

use num::BigRational;
use thiserror::Error;

/// Rational scalar used throughout the crate.
pub type Scalar = BigRational;

/// Shorthand for an exact integer-valued scalar.
pub fn scalar_from(n: i64) -> Scalar {
    BigRational::from_integer(n.into())
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CliffordError {
    #[error("signature must satisfy r + s >= 1")]
    EmptySignature,
    #[error("signature supports at most {max} generators, got r + s = {got}")]
    TooManyGenerators { max: u32, got: u32 },
    #[error("operands live over different signatures: ({0},{1}) vs ({2},{3})")]
    SignatureMismatch(u32, u32, u32, u32),
    #[error("generator index {index} out of range for r + s = {dim}")]
    GeneratorOutOfRange { index: u32, dim: u32 },
    #[error("vector has <v,v> = 0 and cannot act by twisted conjugation")]
    NullFactor,
    #[error("vector length {got} does not match r + s = {dim}")]
    VectorLength { got: usize, dim: u32 },
    #[error("factor norms must be +1 or -1 for this operation")]
    NotUnitNorm,
}

/// Signature (r,s) of the quadratic space: `r` positive directions followed
/// by `s` negative ones.  Generator indices are zero-based, so index `i`
/// is positive exactly when `i < r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    r: u32,
    s: u32,
}

/// Hard cap on r + s so blade masks fit in a `u32`.
pub const MAX_GENERATORS: u32 = 30;

impl Signature {
    pub fn new(r: u32, s: u32) -> Result<Self, CliffordError> {
        if r + s == 0 {
            return Err(CliffordError::EmptySignature);
        }
        if r + s > MAX_GENERATORS {
            return Err(CliffordError::TooManyGenerators {
                max: MAX_GENERATORS,
                got: r + s,
            });
        }
        Ok(Signature { r, s })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    /// Number of generators, r + s.
    pub fn dim(&self) -> u32 {
        self.r + self.s
    }

    /// `<z_i, z_i>`: +1 on the first r indices, -1 after.
    pub fn metric_sign(&self, index: u32) -> i64 {
        assert!(index < self.dim(), "generator index out of range");
        if index < self.r {
            1
        } else {
            -1
        }
    }

    /// Square of the generator in the algebra: `z_i^2 = -<z_i, z_i>`.
    pub fn generator_square(&self, index: u32) -> i64 {
        -self.metric_sign(index)
    }

    /// Mask with every generator bit set; the blade of the volume form.
    pub fn full_mask(&self) -> u32 {
        if self.dim() == 32 {
            u32::MAX
        } else {
            (1u32 << self.dim()) - 1
        }
    }

    /// Inner product of coordinate vectors with respect to the form.
    pub fn inner_product(&self, v: &[Scalar], w: &[Scalar]) -> Result<Scalar, CliffordError> {
        if v.len() != self.dim() as usize {
            return Err(CliffordError::VectorLength {
                got: v.len(),
                dim: self.dim(),
            });
        }
        if w.len() != self.dim() as usize {
            return Err(CliffordError::VectorLength {
                got: w.len(),
                dim: self.dim(),
            });
        }
        let mut acc = Scalar::from_integer(0.into());
        for i in 0..self.dim() as usize {
            let term = &v[i] * &w[i];
            if self.metric_sign(i as u32) > 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        Ok(acc)
    }
}

/// Parity of the transposition count needed to merge two ascending blades:
/// the number of pairs (i in a, j in b) with i > j.
fn merge_parity_is_odd(a: u32, b: u32) -> bool {
    let mut count = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        count += ((a as u64) >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    count % 2 == 1
}

/// Product of two basis blades: resulting blade mask and the sign picked up
/// from reordering and from squaring repeated generators.
pub fn blade_mul(sig: Signature, a: u32, b: u32) -> (u32, i64) {
    debug_assert!(a <= sig.full_mask() && b <= sig.full_mask());
    let mut sign = if merge_parity_is_odd(a, b) { -1 } else { 1 };
    let mut common = a & b;
    while common != 0 {
        let i = common.trailing_zeros();
        sign *= sig.generator_square(i);
        common &= common - 1;
    }
    (a ^ b, sign)
}

/// Grade of a blade.
pub fn blade_grade(mask: u32) -> u32 {
    mask.count_ones()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signature_rejects_degenerate_and_oversized() {
        assert_eq!(Signature::new(0, 0), Err(CliffordError::EmptySignature));
        assert!(Signature::new(16, 15).is_err());
        assert!(Signature::new(1, 0).is_ok());
    }

    #[test]
    fn generator_squares_follow_the_sign_convention() {
        let sig = Signature::new(2, 3).unwrap();
        assert_eq!(sig.generator_square(0), -1, "positive direction squares to -1");
        assert_eq!(sig.generator_square(1), -1);
        assert_eq!(sig.generator_square(2), 1, "negative direction squares to +1");
        assert_eq!(sig.generator_square(4), 1);
    }

    #[test]
    fn blade_mul_matches_hand_computation() {
        // In Cl(2,0): z0 z1 * z0 = -z0 z0 z1 = -(-1) z1 = z1.
        let sig = Signature::new(2, 0).unwrap();
        let (mask, sign) = blade_mul(sig, 0b11, 0b01);
        assert_eq!((mask, sign), (0b10, 1));

        // z0 * z0 z1 = (z0 z0) z1 = -z1.
        let (mask, sign) = blade_mul(sig, 0b01, 0b11);
        assert_eq!((mask, sign), (0b10, -1));
    }

    #[test]
    fn blade_mul_is_associative_on_every_triple_up_to_four_generators() {
        for (r, s) in [(1, 0), (0, 1), (2, 0), (1, 1), (2, 2), (3, 1), (0, 4)] {
            let sig = Signature::new(r, s).unwrap();
            let top = sig.full_mask();
            for a in 0..=top {
                for b in 0..=top {
                    let ab = blade_mul(sig, a, b);
                    for c in 0..=top {
                        let bc = blade_mul(sig, b, c);
                        let left = {
                            let (m, sg) = blade_mul(sig, ab.0, c);
                            (m, sg * ab.1)
                        };
                        let right = {
                            let (m, sg) = blade_mul(sig, a, bc.0);
                            (m, sg * bc.1)
                        };
                        assert_eq!(
                            left, right,
                            "associativity failed at ({r},{s}) on blades {a:b},{b:b},{c:b}"
                        );
                    }
                }
            }
        }
    }
}
