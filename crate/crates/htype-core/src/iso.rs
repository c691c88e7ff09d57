//! An explicit isomorphism between the algebras with center signatures
//! (1,7) and (7,1).
//!
//! The classification says these two are isomorphic once the (7,1) side is
//! built on the sum of a minimal module and its reversed-form copy.  This
//! module produces the isomorphism concretely: a signed permutation of the
//! centers that reverses every metric sign, and an exact rational module
//! map.  The map is pinned down by four coefficients on a four-dimensional
//! joint eigenspace and extended along two-generator products; all the
//! compatibility identities are then checked in exact arithmetic.
//!
//! The extension rests on a regraded family of generator products.  On the
//! (1,7) side set D_k = -J_k J_0 for k = 1..7, on the (7,1) side set
//! D'_k = J'_{k-1} J'_7.  Both families square to +1, anticommute pairwise
//! and are skew-adjoint, so each is itself an admissible module for seven
//! negative generators, and the module map only has to intertwine the two
//! regraded families.  The intertwining relation carries a sign: the map
//! conjugates J_a J_b to -J'_{a-1} J'_{b-1}, so products of four original
//! generators transport with a plus sign while products of two transport
//! with a minus.

use num::{Signed, Zero};

use clifford_exact::Signature;

use crate::algebra::HTypeAlgebra;
use crate::build;
use crate::involution::{self, generator_product};
use crate::linalg::{rat, RMat, Rat, SignedPerm};
use crate::rep::{EForm, ModuleSpec, Representation, Variant};
use crate::HtypeError;

/// Index words, in source generators, of the three commuting involutions
/// that carve out the eigenspace the map is solved on.  Their images under
/// the center map give the target family.  Every nonempty subset product is
/// a four-generator word, hence traceless, so the joint +1 eigenspace has
/// dimension exactly 32 / 2^3 = 4 on both sides.
const CUT_WORDS: [[u32; 4]; 3] = [[3, 4, 5, 6], [1, 2, 3, 4], [1, 3, 5, 7]];

/// Exact isomorphism data between the two algebras.
///
/// `center_map` sends the k-th source center generator to the image index
/// with a plus sign while reversing the metric; `module_map` is the
/// invertible rational matrix completing it to a Lie algebra isomorphism.
#[derive(Debug, Clone)]
pub struct SwapWitness {
    pub source: Representation,
    pub target: Representation,
    pub center_map: SignedPerm,
    pub module_map: RMat,
    /// The eigenspace block in the complex coordinates induced by the two
    /// commuting complex structures: (lambda_1, lambda_2, mu_1, mu_2).
    pub coefficients: [Rat; 4],
    /// Shared norm of the eigenspace frame vectors.
    pub frame_norm: Rat,
}

fn center_image(k: usize) -> usize {
    if k == 0 {
        7
    } else {
        k - 1
    }
}

fn form_value(eta: &[i8], u: &[Rat], v: &[Rat]) -> Rat {
    let mut acc = Rat::zero();
    for (b, (x, y)) in u.iter().zip(v).enumerate() {
        if !x.is_zero() && !y.is_zero() {
            acc += rat(eta[b] as i64) * x * y;
        }
    }
    acc
}

fn form_value_i64(eta: &[i8], u: &[i64], v: &[i64]) -> i64 {
    u.iter()
        .zip(v)
        .enumerate()
        .map(|(b, (x, y))| eta[b] as i64 * x * y)
        .sum()
}

fn to_rat_vec(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| rat(x)).collect()
}

fn mat_from_columns(cols: &[Vec<Rat>]) -> RMat {
    let nrows = cols[0].len();
    let mut m = RMat::zero(nrows, cols.len());
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            if !v.is_zero() {
                m.set(i, j, v.clone());
            }
        }
    }
    m
}

/// diag(eta) * P as a dense rational matrix.
fn form_times(eta: &[i8], p: &SignedPerm) -> RMat {
    let n = p.dim();
    let mut m = RMat::zero(n, n);
    for j in 0..n {
        let i = p.target(j);
        m.set(i, j, rat(eta[i] as i64 * p.sign(j) as i64));
    }
    m
}

/// Positive squarefree kernel of a nonzero integer.
fn squarefree_part(n: i64) -> i64 {
    let mut n = n.abs();
    let mut sf = 1;
    let mut d = 2;
    while d * d <= n {
        while n % (d * d) == 0 {
            n /= d * d;
        }
        if n % d == 0 {
            sf *= d;
            n /= d;
        }
        d += 1;
    }
    sf * n
}

fn exact_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() || x.is_zero() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Rat::new(n, d))
    } else {
        None
    }
}

/// Inverse of a matrix whose columns are orthogonal and non-null for
/// diag(eta): W^{-1} = N^{-1} W^T diag(eta) with N the diagonal Gram.
fn orthogonal_inverse(w: &RMat, eta: &[i8]) -> Result<RMat, HtypeError> {
    let h = RMat::diagonal_i8(eta);
    let gram = w.transpose().mul(&h).mul(w);
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            if i == j && gram.get(i, j).is_zero() {
                return Err(HtypeError::Extension("frame column is null".into()));
            }
            if i != j && !gram.get(i, j).is_zero() {
                return Err(HtypeError::Extension("frame is not orthogonal".into()));
            }
        }
    }
    let mut inv = w.transpose().mul(&h);
    for i in 0..inv.nrows() {
        let d = gram.get(i, i).clone();
        let row: Vec<Rat> = inv.row(i).to_vec();
        for (j, v) in row.into_iter().enumerate() {
            inv.set(i, j, v / &d);
        }
    }
    Ok(inv)
}

/// The regraded generator family J_j J_pivot (j != pivot), optionally
/// negated, which realizes seven negative generators on the same module.
fn regraded_family(rep: &Representation, pivot: usize, negate: bool) -> Vec<SignedPerm> {
    let piv = rep.generator(pivot);
    (0..rep.generators().len())
        .filter(|&j| j != pivot)
        .map(|j| {
            let d = rep.generator(j).compose(piv);
            if negate {
                d.negate()
            } else {
                d
            }
        })
        .collect()
}

/// Both regraded families as verified representations of signature (0,7).
pub fn regraded_representations(
    source: &Representation,
    target: &Representation,
) -> Result<(Representation, Representation), HtypeError> {
    let sig = Signature::new(0, 7)?;
    let d_src = Representation::new(
        sig,
        source.eta().to_vec(),
        regraded_family(source, 0, true),
        Variant::Unique,
        EForm::Neutral,
    )?;
    let d_tgt = Representation::new(
        sig,
        target.eta().to_vec(),
        regraded_family(target, 7, false),
        Variant::Unique,
        EForm::Neutral,
    )?;
    Ok((d_src, d_tgt))
}

/// Pick the eigenspace seed on the source side: an integer combination of
/// the joint basis that is orthogonal to its images under both structure
/// operators and whose norm can be scaled rationally to `target_norm`.
fn choose_seed(
    basis: &[Vec<i64>],
    eta: &[i8],
    i_op: &SignedPerm,
    t_op: &SignedPerm,
    target_norm: i64,
) -> Option<Vec<Rat>> {
    let k = basis.len();
    let dim = basis[0].len();
    let mut combos = 1usize;
    for _ in 0..k {
        combos *= 3;
    }
    for code in 1..combos {
        let mut c = code;
        let mut coeffs = Vec::with_capacity(k);
        for _ in 0..k {
            coeffs.push(match c % 3 {
                0 => 0i64,
                1 => 1,
                _ => -1,
            });
            c /= 3;
        }
        match coeffs.iter().find(|&&x| x != 0) {
            Some(&first) if first == 1 => {}
            _ => continue,
        }
        let mut v = vec![0i64; dim];
        for (coef, b) in coeffs.iter().zip(basis) {
            if *coef != 0 {
                for (slot, x) in v.iter_mut().zip(b) {
                    *slot += coef * x;
                }
            }
        }
        let norm = form_value_i64(eta, &v, &v);
        if norm <= 0 || squarefree_part(norm) != squarefree_part(target_norm) {
            continue;
        }
        if form_value_i64(eta, &v, &i_op.apply_i64(&v)) != 0 {
            continue;
        }
        if form_value_i64(eta, &v, &t_op.apply_i64(&v)) != 0 {
            continue;
        }
        let scale = exact_sqrt(&(rat(target_norm) / rat(norm)))?;
        return Some(v.iter().map(|&x| rat(x) * &scale).collect());
    }
    None
}

/// The +1 eigenvector line of an involution inside a small subspace, as an
/// unnormalized integer vector.
fn plus_eigenvector(t_op: &SignedPerm, basis: &[&Vec<i64>]) -> Option<Vec<i64>> {
    for v in basis.iter().copied() {
        let tv = t_op.apply_i64(v);
        let w: Vec<i64> = v.iter().zip(&tv).map(|(a, b)| a + b).collect();
        if w.iter().any(|&x| x != 0) {
            return Some(w);
        }
    }
    None
}

/// Construct the isomorphism between the algebra with center signature
/// (1,7) on its minimal module and the algebra with center signature (7,1)
/// on the sum of a minimal module and its reversed-form copy.
pub fn swap_witness() -> Result<SwapWitness, HtypeError> {
    let source = build::canonical_minimal(1, 7)?;
    let target = build::module_for_spec(7, 1, ModuleSpec::new(1, 1)?)?;
    let dim = source.dim();
    if target.dim() != dim {
        return Err(HtypeError::Extension("module dimensions differ".into()));
    }

    let center_map = SignedPerm::new(
        (0..8).map(|k| center_image(k) as u32).collect(),
        vec![1; 8],
    );
    for k in 0..8u32 {
        let src_sign = source.signature().metric_sign(k);
        let tgt_sign = target
            .signature()
            .metric_sign(center_image(k as usize) as u32);
        if src_sign != -tgt_sign {
            return Err(HtypeError::Extension(
                "center map does not reverse the metric".into(),
            ));
        }
    }

    // Commuting involution families and their joint +1 eigenspaces.
    let src_cuts: Vec<SignedPerm> = CUT_WORDS
        .iter()
        .map(|w| generator_product(&source, w))
        .collect();
    let tgt_cuts: Vec<SignedPerm> = CUT_WORDS
        .iter()
        .map(|w| {
            let mapped: Vec<u32> = w.iter().map(|&i| center_image(i as usize) as u32).collect();
            generator_product(&target, &mapped)
        })
        .collect();
    for c in src_cuts.iter().chain(&tgt_cuts) {
        if c.compose(c).as_scalar() != Some(1) {
            return Err(HtypeError::Extension("cut word is not an involution".into()));
        }
    }
    for (i, a) in src_cuts.iter().enumerate() {
        for b in &src_cuts[i + 1..] {
            if !a.commutes_with(b) {
                return Err(HtypeError::Extension("source cuts do not commute".into()));
            }
        }
    }
    for (i, a) in tgt_cuts.iter().enumerate() {
        for b in &tgt_cuts[i + 1..] {
            if !a.commutes_with(b) {
                return Err(HtypeError::Extension("target cuts do not commute".into()));
            }
        }
    }
    let e_src = involution::joint_positive_basis(dim, &src_cuts);
    let e_tgt = involution::joint_positive_basis(dim, &tgt_cuts);
    if e_src.len() != 4 || e_tgt.len() != 4 {
        return Err(HtypeError::Extension(format!(
            "joint eigenspaces have dimensions {} and {}",
            e_src.len(),
            e_tgt.len()
        )));
    }

    // Structure operators.  On the source, I = J_1 J_2 J_7 J_0 and
    // T = J_1 J_2 J_7 with I T = J_0; their images under the center map
    // play the same roles on the target.
    let i_src = generator_product(&source, &[1, 2, 7, 0]);
    let t_src = generator_product(&source, &[1, 2, 7]);
    let i_tgt = generator_product(&target, &[0, 1, 6, 7]);
    let t_tgt = generator_product(&target, &[0, 1, 6]);
    let operator_checks: [(&SignedPerm, i8, &[SignedPerm]); 4] = [
        (&i_src, -1, &src_cuts),
        (&t_src, -1, &src_cuts),
        (&i_tgt, -1, &tgt_cuts),
        (&t_tgt, 1, &tgt_cuts),
    ];
    for (op, square, cuts) in operator_checks {
        if op.compose(op).as_scalar() != Some(square) {
            return Err(HtypeError::Extension(
                "structure operator has the wrong square".into(),
            ));
        }
        for c in cuts {
            if !op.commutes_with(c) {
                return Err(HtypeError::Extension(
                    "structure operator moves the eigenspace".into(),
                ));
            }
        }
    }

    // Target frame: each joint basis vector lives in one summand of the
    // direct sum; T' restricted to a summand's eigenspace part has a
    // nondegenerate +1 line, and the two summands give opposite norms.
    let half = dim / 2;
    let mut plus_part: Vec<&Vec<i64>> = Vec::new();
    let mut minus_part: Vec<&Vec<i64>> = Vec::new();
    for v in &e_tgt {
        let lo = v.iter().take(half).any(|&x| x != 0);
        let hi = v.iter().skip(half).any(|&x| x != 0);
        match (lo, hi) {
            (true, false) => plus_part.push(v),
            (false, true) => minus_part.push(v),
            _ => {
                return Err(HtypeError::Extension(
                    "joint basis vector straddles the direct sum".into(),
                ))
            }
        }
    }
    if plus_part.len() != 2 || minus_part.len() != 2 {
        return Err(HtypeError::Extension(
            "joint eigenspace is unbalanced across the sum".into(),
        ));
    }
    let line_a = plus_eigenvector(&t_tgt, &plus_part)
        .ok_or_else(|| HtypeError::Extension("no +1 line in the first summand".into()))?;
    let line_b = plus_eigenvector(&t_tgt, &minus_part)
        .ok_or_else(|| HtypeError::Extension("no +1 line in the second summand".into()))?;
    let eta_t = target.eta();
    let norm_a = form_value_i64(eta_t, &line_a, &line_a);
    let norm_b = form_value_i64(eta_t, &line_b, &line_b);
    if norm_a + norm_b != 0 || norm_a == 0 {
        return Err(HtypeError::Extension(
            "summand lines do not carry opposite norms".into(),
        ));
    }
    let (x1_raw, x3_raw, frame_norm_i) = if norm_a > 0 {
        (line_a, line_b, norm_a)
    } else {
        (line_b, line_a, norm_b)
    };

    let x1 = to_rat_vec(&x1_raw);
    let x3 = to_rat_vec(&x3_raw);
    let x2 = i_tgt.apply_rat(&x1);
    let x4 = i_tgt.apply_rat(&x3);
    let xs = [x1, x2, x3, x4];

    // Source frame: seed plus its orbit under I, T, J_0, scaled to the
    // exact norm of the target frame.
    let eta_s = source.eta();
    let y1 = choose_seed(&e_src, eta_s, &i_src, &t_src, frame_norm_i).ok_or_else(|| {
        HtypeError::Extension("no eigenspace seed matches the target norm".into())
    })?;
    let y2 = i_src.apply_rat(&y1);
    let y3 = t_src.apply_rat(&y1);
    let y4 = i_src.apply_rat(&y3);
    if y4 != source.generator(0).apply_rat(&y1) {
        return Err(HtypeError::Extension(
            "structure operators do not compose to J_0".into(),
        ));
    }
    let ys = [y1, y2, y3, y4];

    // Both frames must be orthogonal with norms (c, -c, -c, c).
    let frame_norm = rat(frame_norm_i);
    for (frame, eta) in [(&ys, eta_s), (&xs, eta_t)] {
        for i in 0..4 {
            for j in 0..4 {
                let want = match (i, j) {
                    (0, 0) | (3, 3) => frame_norm.clone(),
                    (1, 1) | (2, 2) => -frame_norm.clone(),
                    _ => Rat::zero(),
                };
                if form_value(eta, &frame[i], &frame[j]) != want {
                    return Err(HtypeError::Extension("frame Gram matrix is wrong".into()));
                }
            }
        }
    }

    // The eigenspace block.  In the complex coordinates induced by I and
    // I', the compatibility condition on the eigenspace reads
    // conj(A)^T diag(-1,1) A = offdiag(1,1), solved by these values.
    let lambda1 = -(rat(1) / rat(2));
    let lambda2 = rat(1) / rat(2);
    let mu1 = rat(1);
    let mu2 = rat(1);
    let alpha: [[Rat; 4]; 4] = [
        [lambda1.clone(), Rat::zero(), mu1.clone(), Rat::zero()],
        [Rat::zero(), lambda1.clone(), Rat::zero(), mu1.clone()],
        [lambda2.clone(), Rat::zero(), mu2.clone(), Rat::zero()],
        [Rat::zero(), lambda2.clone(), Rat::zero(), mu2.clone()],
    ];

    // Extend along the regraded families: the map sends D_a y to D'_a
    // applied to the eigenspace image of y.
    let d_src = regraded_family(&source, 0, true);
    let d_tgt = regraded_family(&target, 7, false);
    let mut w_cols = Vec::with_capacity(dim);
    let mut rhs_cols = Vec::with_capacity(dim);
    for a in 0..8 {
        for j in 0..4 {
            let (w_col, img) = if a == 0 {
                (ys[j].clone(), alpha_image(&alpha, &xs, j))
            } else {
                let w_col = d_src[a - 1].apply_rat(&ys[j]);
                let base = alpha_image(&alpha, &xs, j);
                (w_col, d_tgt[a - 1].apply_rat(&base))
            };
            w_cols.push(w_col);
            rhs_cols.push(img);
        }
    }
    let w = mat_from_columns(&w_cols);
    let rhs = mat_from_columns(&rhs_cols);
    let w_inv = orthogonal_inverse(&w, eta_s)?;
    let module_map = rhs.mul(&w_inv);

    Ok(SwapWitness {
        source,
        target,
        center_map,
        module_map,
        coefficients: [lambda1, lambda2, mu1, mu2],
        frame_norm,
    })
}

fn alpha_image(alpha: &[[Rat; 4]; 4], xs: &[Vec<Rat>; 4], j: usize) -> Vec<Rat> {
    let dim = xs[0].len();
    let mut acc = vec![Rat::zero(); dim];
    for (i, x) in xs.iter().enumerate() {
        let c = &alpha[i][j];
        if !c.is_zero() {
            for (slot, v) in acc.iter_mut().zip(x) {
                *slot += c * v;
            }
        }
    }
    acc
}

impl SwapWitness {
    /// Exact check of the defining identity on every center generator:
    /// A^T eta' J'_{C(k)} A + eta J_k = 0, plus invertibility of A.
    pub fn verify(&self) -> Result<(), HtypeError> {
        let at = self.module_map.transpose();
        for k in 0..self.source.generators().len() {
            let img = self.center_map.target(k);
            let lhs = at
                .mul(&form_times(self.target.eta(), self.target.generator(img)))
                .mul(&self.module_map);
            let rhs = form_times(self.source.eta(), self.source.generator(k));
            if !lhs.add(&rhs).is_zero() {
                return Err(HtypeError::Extension(format!(
                    "compatibility residual is nonzero at generator {k}"
                )));
            }
        }
        if self.module_map.clone().rank() != self.module_map.nrows() {
            return Err(HtypeError::Extension("module map is singular".into()));
        }
        Ok(())
    }

    /// Independent route: compare brackets pairwise through the two maps.
    /// C[x, y] must equal [Ax, Ay] for all basis pairs.
    pub fn brackets_match(&self) -> bool {
        let src_alg = HTypeAlgebra::new(self.source.clone());
        let tgt_alg = HTypeAlgebra::new(self.target.clone());
        let dim = self.source.dim();
        let cols: Vec<Vec<Rat>> = (0..dim)
            .map(|j| {
                (0..dim)
                    .map(|i| self.module_map.get(i, j).clone())
                    .collect()
            })
            .collect();
        for i in 0..dim {
            for j in i + 1..dim {
                let lhs_src = src_alg.bracket_basis(i, j);
                let mut lhs = vec![Rat::zero(); 8];
                for (k, v) in lhs_src.into_iter().enumerate() {
                    let img = self.center_map.target(k);
                    lhs[img] = rat(self.center_map.sign(k) as i64) * v;
                }
                let rhs = tgt_alg.bracket(&cols[i], &cols[j]);
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_exists_with_the_frozen_block_coefficients() {
        let w = swap_witness().unwrap();
        let half = rat(1) / rat(2);
        assert_eq!(w.coefficients[0], -half.clone());
        assert_eq!(w.coefficients[1], half);
        assert_eq!(w.coefficients[2], rat(1));
        assert_eq!(w.coefficients[3], rat(1));
        // The three defining equations of the eigenspace block.
        let [l1, l2, m1, m2] = &w.coefficients;
        assert_eq!(-l1 * l1 + l2 * l2, Rat::zero());
        assert_eq!(-m1 * m1 + m2 * m2, Rat::zero());
        assert_eq!(-l1 * m1 + l2 * m2, rat(1));
    }

    #[test]
    fn center_map_reverses_every_metric_sign() {
        let w = swap_witness().unwrap();
        for k in 0..8u32 {
            let img = w.center_map.target(k as usize) as u32;
            assert_eq!(
                w.source.signature().metric_sign(k),
                -w.target.signature().metric_sign(img)
            );
            assert_eq!(w.center_map.sign(k as usize), 1);
        }
    }

    #[test]
    fn compatibility_residuals_vanish_on_all_generators() {
        let w = swap_witness().unwrap();
        w.verify().unwrap();
    }

    #[test]
    fn module_map_intertwines_brackets_through_the_center_map() {
        let w = swap_witness().unwrap();
        assert!(w.brackets_match());
    }

    #[test]
    fn regraded_families_are_admissible_negative_representations() {
        let source = build::canonical_minimal(1, 7).unwrap();
        let target = build::module_for_spec(7, 1, ModuleSpec::new(1, 1).unwrap()).unwrap();
        let (d_src, d_tgt) = regraded_representations(&source, &target).unwrap();
        assert_eq!(d_src.signature().s(), 7);
        assert_eq!(d_tgt.signature().s(), 7);
    }

    #[test]
    fn module_map_intertwines_the_regraded_families() {
        let w = swap_witness().unwrap();
        let d_src = regraded_family(&w.source, 0, true);
        let d_tgt = regraded_family(&w.target, 7, false);
        for (a, b) in d_src.iter().zip(&d_tgt) {
            let lhs = w.module_map.mul(&a.to_rational());
            let rhs = b.to_rational().mul(&w.module_map);
            assert!(lhs.add(&rhs.neg()).is_zero());
        }
    }
}
