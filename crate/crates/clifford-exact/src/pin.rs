//! Factored products of vectors and their twisted conjugation action.
//!
//! A Pin element is kept as its list of vector factors rather than as an
//! expanded algebra element.  The factored form makes the norm and the
//! twisted adjoint action exact one-reflection-at-a-time computations, and
//! the expanded form stays available for cross-checks.

use num::{BigRational, One, Zero};

use crate::{CliffordElement, CliffordError, Scalar, Signature};

/// A product of anisotropic vectors in Cl(r,s).  The empty product is the
/// identity.  Factors constructed through [`PinElement::new`] must have
/// `<v,v> = +-1`; [`PinElement::from_unnormalized`] admits any anisotropic
/// factors, for callers that only use scale-invariant operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PinElement {
    sig: Signature,
    factors: Vec<Vec<Scalar>>,
    unit_norm: bool,
}

impl PinElement {
    pub fn identity(sig: Signature) -> Self {
        PinElement {
            sig,
            factors: Vec::new(),
            unit_norm: true,
        }
    }

    pub fn new(sig: Signature, factors: Vec<Vec<Scalar>>) -> Result<Self, CliffordError> {
        let one = Scalar::one();
        for v in &factors {
            let q = sig.inner_product(v, v)?;
            if q != one && q != -one.clone() {
                return Err(CliffordError::NotUnitNorm);
            }
        }
        Ok(PinElement {
            sig,
            factors,
            unit_norm: true,
        })
    }

    /// Factors of any nonzero square length.  The norm is no longer +-1, so
    /// only scale-invariant operations (the twisted adjoint) are meaningful.
    pub fn from_unnormalized(
        sig: Signature,
        factors: Vec<Vec<Scalar>>,
    ) -> Result<Self, CliffordError> {
        for v in &factors {
            if sig.inner_product(v, v)?.is_zero() {
                return Err(CliffordError::NullFactor);
            }
        }
        Ok(PinElement {
            sig,
            factors,
            unit_norm: false,
        })
    }

    /// Single basis-vector factor.
    pub fn generator(sig: Signature, index: u32) -> Result<Self, CliffordError> {
        if index >= sig.dim() {
            return Err(CliffordError::GeneratorOutOfRange {
                index,
                dim: sig.dim(),
            });
        }
        let mut v = vec![Scalar::zero(); sig.dim() as usize];
        v[index as usize] = Scalar::one();
        PinElement::new(sig, vec![v])
    }

    /// Product of basis-vector factors, in the given order.
    pub fn from_generator_indices(sig: Signature, indices: &[u32]) -> Result<Self, CliffordError> {
        let mut factors = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= sig.dim() {
                return Err(CliffordError::GeneratorOutOfRange {
                    index: i,
                    dim: sig.dim(),
                });
            }
            let mut v = vec![Scalar::zero(); sig.dim() as usize];
            v[i as usize] = Scalar::one();
            factors.push(v);
        }
        PinElement::new(sig, factors)
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn factors(&self) -> &[Vec<Scalar>] {
        &self.factors
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn has_unit_factors(&self) -> bool {
        self.unit_norm
    }

    /// Concatenation of factor lists; the group product.
    pub fn product(&self, other: &Self) -> Result<Self, CliffordError> {
        if self.sig != other.sig {
            return Err(CliffordError::SignatureMismatch(
                self.sig.r(),
                self.sig.s(),
                other.sig.r(),
                other.sig.s(),
            ));
        }
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Ok(PinElement {
            sig: self.sig,
            factors,
            unit_norm: self.unit_norm && other.unit_norm,
        })
    }

    /// Multiply out the factors in the full algebra.
    pub fn expand(&self) -> CliffordElement {
        let mut acc = CliffordElement::one(self.sig);
        for v in &self.factors {
            let f = CliffordElement::vector(self.sig, v).expect("factor length checked");
            acc = &acc * &f;
        }
        acc
    }

    /// `N(phi)` as a scalar: the product of the factor square lengths.
    /// Agrees with expanding `phi * alpha(transpose(phi))`.
    pub fn norm_scalar(&self) -> Scalar {
        let mut acc = Scalar::one();
        for v in &self.factors {
            acc *= self
                .sig
                .inner_product(v, v)
                .expect("factor length checked");
        }
        acc
    }

    /// Twisted conjugation by one vector: `w - 2 (<w,v>/<v,v>) v`.
    /// Scale invariant in `v`; reflects across the hyperplane normal to `v`.
    pub fn reflect(sig: Signature, v: &[Scalar], w: &[Scalar]) -> Result<Vec<Scalar>, CliffordError> {
        let vv = sig.inner_product(v, v)?;
        if vv.is_zero() {
            return Err(CliffordError::NullFactor);
        }
        let wv = sig.inner_product(w, v)?;
        let coeff = BigRational::from_integer(2.into()) * wv / vv;
        let mut out = w.to_vec();
        for i in 0..out.len() {
            out[i] -= &coeff * &v[i];
        }
        Ok(out)
    }

    /// Twisted adjoint action on a coordinate vector: the composite of the
    /// per-factor reflections, leftmost factor applied last.
    pub fn twisted_adjoint(&self, w: &[Scalar]) -> Result<Vec<Scalar>, CliffordError> {
        if w.len() != self.sig.dim() as usize {
            return Err(CliffordError::VectorLength {
                got: w.len(),
                dim: self.sig.dim(),
            });
        }
        let mut cur = w.to_vec();
        for v in self.factors.iter().rev() {
            cur = Self::reflect(self.sig, v, &cur)?;
        }
        Ok(cur)
    }

    /// Matrix of the twisted adjoint on the standard basis, columns are
    /// images.
    pub fn twisted_adjoint_matrix(&self) -> Vec<Vec<Scalar>> {
        let n = self.sig.dim() as usize;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![Scalar::zero(); n];
            e[j] = Scalar::one();
            cols.push(self.twisted_adjoint(&e).expect("basis vector length"));
        }
        // transpose columns into row-major form
        let mut rows = vec![vec![Scalar::zero(); n]; n];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..n {
                rows[i][j] = col[i].clone();
            }
        }
        rows
    }

    /// Matrix of `(-1)^n N(phi) Ad~_phi` where `n` is the factor count.
    /// Requires unit-norm factors so the scalar is +-1.
    pub fn orthogonal_part(&self) -> Result<Vec<Vec<Scalar>>, CliffordError> {
        if !self.unit_norm {
            return Err(CliffordError::NotUnitNorm);
        }
        let mut scale = self.norm_scalar();
        if self.factor_count() % 2 == 1 {
            scale = -scale;
        }
        let mut m = self.twisted_adjoint_matrix();
        for row in m.iter_mut() {
            for entry in row.iter_mut() {
                *entry *= &scale;
            }
        }
        Ok(m)
    }
}
