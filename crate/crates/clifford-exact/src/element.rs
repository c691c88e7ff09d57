//! General Clifford algebra elements with exact rational coefficients.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num::Zero;

use crate::{blade_grade, blade_mul, CliffordError, Scalar, Signature};

/// An element of Cl(r,s): a finite sum of basis blades with nonzero rational
/// coefficients.  The map is keyed by blade masks in ascending order and
/// never stores a zero coefficient, so structural equality is semantic
/// equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffordElement {
    sig: Signature,
    terms: BTreeMap<u32, Scalar>,
}

impl CliffordElement {
    pub fn zero(sig: Signature) -> Self {
        CliffordElement {
            sig,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(sig: Signature, value: Scalar) -> Self {
        let mut el = Self::zero(sig);
        el.add_term(0, value);
        el
    }

    pub fn one(sig: Signature) -> Self {
        Self::scalar(sig, Scalar::from_integer(1.into()))
    }

    /// Single basis blade with coefficient one.
    pub fn blade(sig: Signature, mask: u32) -> Self {
        assert!(mask <= sig.full_mask(), "blade outside the algebra");
        let mut el = Self::zero(sig);
        el.add_term(mask, Scalar::from_integer(1.into()));
        el
    }

    pub fn basis_vector(sig: Signature, index: u32) -> Result<Self, CliffordError> {
        if index >= sig.dim() {
            return Err(CliffordError::GeneratorOutOfRange {
                index,
                dim: sig.dim(),
            });
        }
        Ok(Self::blade(sig, 1 << index))
    }

    /// Grade-one element with the given coordinates.
    pub fn vector(sig: Signature, coords: &[Scalar]) -> Result<Self, CliffordError> {
        if coords.len() != sig.dim() as usize {
            return Err(CliffordError::VectorLength {
                got: coords.len(),
                dim: sig.dim(),
            });
        }
        let mut el = Self::zero(sig);
        for (i, c) in coords.iter().enumerate() {
            el.add_term(1 << i, c.clone());
        }
        Ok(el)
    }

    /// The volume form `z_1 z_2 ... z_{r+s}`.
    pub fn volume_form(sig: Signature) -> Self {
        Self::blade(sig, sig.full_mask())
    }

    /// Exact value of the square of the volume form, always +1 or -1.
    pub fn omega_square(sig: Signature) -> i64 {
        let (mask, sign) = blade_mul(sig, sig.full_mask(), sig.full_mask());
        debug_assert_eq!(mask, 0);
        sign
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Scalar)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mask: u32) -> Scalar {
        self.terms.get(&mask).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_scalar(&self) -> bool {
        self.terms.keys().all(|m| *m == 0)
    }

    pub fn scalar_part(&self) -> Scalar {
        self.coefficient(0)
    }

    /// Coordinates of the grade-one part.
    pub fn vector_part(&self) -> Vec<Scalar> {
        let mut coords = vec![Scalar::zero(); self.sig.dim() as usize];
        for (mask, c) in &self.terms {
            if blade_grade(*mask) == 1 {
                coords[mask.trailing_zeros() as usize] = c.clone();
            }
        }
        coords
    }

    /// True when every blade has grade one.
    pub fn is_vector(&self) -> bool {
        self.terms.keys().all(|m| blade_grade(*m) == 1)
    }

    fn add_term(&mut self, mask: u32, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mask) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn require_same_signature(&self, other: &Self) -> Result<(), CliffordError> {
        if self.sig != other.sig {
            return Err(CliffordError::SignatureMismatch(
                self.sig.r(),
                self.sig.s(),
                other.sig.r(),
                other.sig.s(),
            ));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, CliffordError> {
        self.require_same_signature(other)?;
        let mut out = self.clone();
        for (mask, c) in &other.terms {
            out.add_term(*mask, c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, CliffordError> {
        self.require_same_signature(other)?;
        let mut out = Self::zero(self.sig);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let (mask, sign) = blade_mul(self.sig, *ma, *mb);
                let mut coeff = ca * cb;
                if sign < 0 {
                    coeff = -coeff;
                }
                out.add_term(mask, coeff);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &Scalar) -> Self {
        let mut out = Self::zero(self.sig);
        for (mask, c) in &self.terms {
            out.add_term(*mask, c * factor);
        }
        out
    }

    /// Grade involution: negates odd-grade blades.
    pub fn alpha(&self) -> Self {
        let mut out = Self::zero(self.sig);
        for (mask, c) in &self.terms {
            let coeff = if blade_grade(*mask) % 2 == 1 {
                -c.clone()
            } else {
                c.clone()
            };
            out.add_term(*mask, coeff);
        }
        out
    }

    /// Transpose (reversal): writes every blade in reverse generator order,
    /// a sign of (-1)^{k(k-1)/2} on grade-k blades.
    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.sig);
        for (mask, c) in &self.terms {
            let k = blade_grade(*mask) as u64;
            let coeff = if (k * (k.saturating_sub(1)) / 2) % 2 == 1 {
                -c.clone()
            } else {
                c.clone()
            };
            out.add_term(*mask, coeff);
        }
        out
    }

    /// Norm form `N(x) = x * alpha(transpose(x))`; scalar on products of
    /// vectors, multiplicative there.
    pub fn norm(&self) -> Self {
        self.checked_mul(&self.transpose().alpha())
            .expect("same signature by construction")
    }
}

impl Add for &CliffordElement {
    type Output = CliffordElement;
    fn add(self, rhs: &CliffordElement) -> CliffordElement {
        self.checked_add(rhs).expect("signature mismatch in +")
    }
}

impl Sub for &CliffordElement {
    type Output = CliffordElement;
    fn sub(self, rhs: &CliffordElement) -> CliffordElement {
        self.checked_add(&(-rhs)).expect("signature mismatch in -")
    }
}

impl Neg for &CliffordElement {
    type Output = CliffordElement;
    fn neg(self) -> CliffordElement {
        self.scale(&Scalar::from_integer((-1).into()))
    }
}

impl Mul for &CliffordElement {
    type Output = CliffordElement;
    fn mul(self, rhs: &CliffordElement) -> CliffordElement {
        self.checked_mul(rhs).expect("signature mismatch in *")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_from;

    fn sig(r: u32, s: u32) -> Signature {
        Signature::new(r, s).unwrap()
    }

    #[test]
    fn zero_coefficients_never_survive() {
        let s2 = sig(2, 0);
        let z0 = CliffordElement::basis_vector(s2, 0).unwrap();
        let diff = &z0 - &z0;
        assert!(diff.is_zero());
        assert_eq!(diff.terms().count(), 0);
    }

    #[test]
    fn generators_anticommute_and_square_correctly() {
        let s = sig(1, 1);
        let z0 = CliffordElement::basis_vector(s, 0).unwrap();
        let z1 = CliffordElement::basis_vector(s, 1).unwrap();
        assert_eq!(&z0 * &z0, CliffordElement::scalar(s, scalar_from(-1)));
        assert_eq!(&z1 * &z1, CliffordElement::scalar(s, scalar_from(1)));
        let anti = &(&z0 * &z1) + &(&z1 * &z0);
        assert!(anti.is_zero(), "distinct generators anticommute");
    }

    #[test]
    fn volume_form_square_follows_the_residue_pattern() {
        // omega^2 = (-1)^s when r+s = 0,3 mod 4 and (-1)^{s+1} otherwise.
        for r in 0..=6u32 {
            for s in 0..=6u32 {
                if r + s == 0 {
                    continue;
                }
                let sg = sig(r, s);
                let expect = match (r + s) % 4 {
                    0 | 3 => if s % 2 == 0 { 1 } else { -1 },
                    _ => if s % 2 == 0 { -1 } else { 1 },
                };
                assert_eq!(
                    CliffordElement::omega_square(sg),
                    expect,
                    "omega^2 at ({r},{s})"
                );
            }
        }
    }

    #[test]
    fn norm_of_a_vector_is_its_square_length() {
        let s = sig(2, 1);
        let v = CliffordElement::vector(
            s,
            &[scalar_from(1), scalar_from(2), scalar_from(3)],
        )
        .unwrap();
        // <v,v> = 1 + 4 - 9 = -4.
        let n = v.norm();
        assert!(n.is_scalar());
        assert_eq!(n.scalar_part(), scalar_from(-4));
    }

    #[test]
    fn transpose_reverses_products() {
        let s = sig(2, 2);
        let a = CliffordElement::blade(s, 0b0111);
        let b = CliffordElement::blade(s, 0b1010);
        let lhs = (&a * &b).transpose();
        let rhs = &b.transpose() * &a.transpose();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn alpha_is_an_algebra_homomorphism() {
        let s = sig(3, 1);
        let a = &CliffordElement::blade(s, 0b0110) + &CliffordElement::basis_vector(s, 3).unwrap();
        let b = &CliffordElement::blade(s, 0b1001) - &CliffordElement::one(s);
        assert_eq!((&a * &b).alpha(), &a.alpha() * &b.alpha());
    }
}
