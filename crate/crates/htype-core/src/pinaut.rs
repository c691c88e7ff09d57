//! Automorphisms induced by invertible elements of the Clifford algebra.
//!
//! A product of unit-norm vectors acts on the module through the generator
//! actions, and that module map forces a unique companion map on the
//! center.  The companion is computed here directly from the module
//! action: conjugating each J_k by the module map lands back in the span
//! of the J_l, and reading off the coefficients gives the center map
//! column by column.  No formula for the companion is assumed; agreement
//! with the closed expression through the twisted adjoint is left to the
//! tests.

use clifford_exact::{CliffordElement, PinElement, Scalar, Signature};
use rand::Rng;

use crate::involution::generator_product;
use crate::linalg::{rat, RMat, Rat, SignedPerm};
use crate::rep::Representation;
use crate::HtypeError;

/// Action of a general algebra element on the module: the sum of its
/// blade actions.
pub fn module_action(rep: &Representation, elt: &CliffordElement) -> Result<RMat, HtypeError> {
    if elt.signature() != rep.signature() {
        return Err(HtypeError::InvalidModule(
            "algebra element and module have different signatures".into(),
        ));
    }
    let dim = rep.dim();
    let mut acc = RMat::zero(dim, dim);
    for (mask, coeff) in elt.terms() {
        let indices: Vec<u32> = (0..rep.signature().dim()).filter(|i| mask >> i & 1 == 1).collect();
        let op = generator_product(rep, &indices);
        for j in 0..dim {
            let i = op.target(j);
            let add = coeff * rat(op.sign(j) as i64);
            let cur = acc.get(i, j) + add;
            acc.set(i, j, cur);
        }
    }
    Ok(acc)
}

fn factor_action(rep: &Representation, v: &[Scalar]) -> RMat {
    let dim = rep.dim();
    let mut acc = RMat::zero(dim, dim);
    for (k, coeff) in v.iter().enumerate() {
        if coeff == &rat(0) {
            continue;
        }
        let g = rep.generator(k);
        for j in 0..dim {
            let i = g.target(j);
            let cur = acc.get(i, j) + coeff * rat(g.sign(j) as i64);
            acc.set(i, j, cur);
        }
    }
    acc
}

/// Module action of a factored product of vectors, rightmost factor first.
pub fn pin_action(rep: &Representation, phi: &PinElement) -> RMat {
    let mut acc = RMat::identity(rep.dim());
    for v in phi.factors() {
        acc = acc.mul(&factor_action(rep, v));
    }
    acc
}

/// A module map together with the center map it induces.
#[derive(Debug, Clone)]
pub struct InducedPair {
    pub a: RMat,
    pub c: RMat,
}

fn adjoint(m: &RMat, eta: &[i8]) -> RMat {
    let d = RMat::diagonal_i8(eta);
    d.mul(&m.transpose()).mul(&d)
}

fn trace_signed_perm_times(g: &SignedPerm, m: &RMat) -> Rat {
    let inv = g.inverse();
    (0..m.nrows())
        .map(|j| {
            let b = inv.target(j);
            m.get(b, j) * rat(g.sign(b) as i64)
        })
        .sum()
}

/// The automorphism pair induced by a Pin element.  Fails if a factor does
/// not have unit norm, or if conjugation by the module action does not
/// stabilize the span of the generator actions (which never happens for
/// genuine products of unit vectors).
pub fn induced_pair(rep: &Representation, phi: &PinElement) -> Result<InducedPair, HtypeError> {
    if !phi.has_unit_factors() {
        return Err(clifford_exact::CliffordError::NotUnitNorm.into());
    }
    let sig = rep.signature();
    let n = sig.dim() as usize;
    let dim = rep.dim();
    let a = pin_action(rep, phi);
    let a_adj = adjoint(&a, rep.eta());

    // adj(A) J_k A = J_{D z_k} determines D; the center map is its adjoint
    // for the center scalar product.
    let mut d = RMat::zero(n, n);
    for k in 0..n {
        let conj = a_adj.mul(&rep.generator(k).to_rational()).mul(&a);
        let mut residual = conj.clone();
        for l in 0..n {
            let g = rep.generator(l);
            let coeff = -trace_signed_perm_times(g, &conj) * rat(sig.metric_sign(l as u32))
                / rat(dim as i64);
            if coeff != rat(0) {
                for j in 0..dim {
                    let i = g.target(j);
                    let cur = residual.get(i, j) - &coeff * rat(g.sign(j) as i64);
                    residual.set(i, j, cur);
                }
                d.set(l, k, coeff);
            }
        }
        if !residual.is_zero() {
            return Err(HtypeError::InvalidModule(
                "conjugated generator action leaves the generator span".into(),
            ));
        }
    }
    let eta_c: Vec<i8> = (0..n).map(|k| sig.metric_sign(k as u32) as i8).collect();
    let c = adjoint(&d, &eta_c);
    Ok(InducedPair { a, c })
}

/// The distinct module maps among +-Id and +-(volume action) that induce
/// the identity on the center.  Its size is the order of the kernel of
/// the center representation on those canonical elements.
pub fn central_kernel(rep: &Representation) -> Vec<SignedPerm> {
    let dim = rep.dim();
    let id = SignedPerm::identity(dim);
    let vol = rep.volume_action();
    let candidates = [id.clone(), id.negate(), vol.clone(), vol.negate()];
    let mut out: Vec<SignedPerm> = Vec::new();
    for m in candidates {
        let fixes_center = (0..rep.signature().dim() as usize).all(|k| {
            let g = rep.generator(k);
            m.form_adjoint(rep.eta()).compose(g).compose(&m) == *g
        });
        if fixes_center && !out.contains(&m) {
            out.push(m);
        }
    }
    out
}

/// Expected size of [`central_kernel`]: the volume action joins +-Id
/// exactly when conjugation by it fixes every generator action (r odd),
/// and enlarges the kernel only when it is not itself a scalar.
pub fn predicted_kernel_order(r: u32, volume_scalar: bool) -> usize {
    if r % 2 == 0 || volume_scalar {
        2
    } else {
        4
    }
}

/// A random product of unit-norm vectors: single basis vectors and
/// two-coordinate vectors with rational entries from Pythagorean triples,
/// so every factor has square length exactly +-1.
pub fn random_pin_element(
    sig: Signature,
    factor_count: usize,
    rng: &mut impl Rng,
) -> PinElement {
    const TRIPLES: [(i64, i64, i64); 5] =
        [(3, 4, 5), (5, 12, 13), (8, 15, 17), (20, 21, 29), (7, 24, 25)];
    let n = sig.dim() as usize;
    let r = sig.r() as usize;
    let mut factors = Vec::with_capacity(factor_count);
    for _ in 0..factor_count {
        let mut v = vec![Scalar::from_integer(0.into()); n];
        if n == 1 || rng.gen_bool(0.4) {
            let i = rng.gen_range(0..n);
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            v[i] = rat(sign);
        } else {
            let i = rng.gen_range(0..n - 1);
            let j = rng.gen_range(i + 1..n);
            let (a, b, c) = TRIPLES[rng.gen_range(0..TRIPLES.len())];
            let (num_i, num_j, den) = if (i < r) == (j < r) {
                // same sign class: (a/c)^2 + (b/c)^2 = 1
                (a, b, c)
            } else if rng.gen_bool(0.5) {
                // mixed class, square length +1: (c/a)^2 - (b/a)^2 = 1
                (c, b, a)
            } else {
                // mixed class, square length -1
                (b, c, a)
            };
            let si = if rng.gen_bool(0.5) { 1 } else { -1 };
            let sj = if rng.gen_bool(0.5) { 1 } else { -1 };
            v[i] = rat(si * num_i) / rat(den);
            v[j] = rat(sj * num_j) / rat(den);
        }
        factors.push(v);
    }
    PinElement::new(sig, factors).expect("factors built with unit norm")
}
