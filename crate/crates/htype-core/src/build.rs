//! Constructing admissible modules.
//!
//! Minimal modules on the 9 x 9 reference grid come from cutting the left
//! regular representation of Cl(r,s) by commuting right multiplications.
//! Outside the grid we tensor a smaller module with a fixed 16-dimensional
//! period module, and arbitrary multiplicities come from direct sums.

use clifford_exact::{blade_mul, Signature};

use crate::involution;
use crate::linalg::SignedPerm;
use crate::rep::{EForm, ModuleSpec, Representation, Variant};
use crate::{verify, HtypeError};

/// Sign of the scalar product restricted to a basis blade: the product of
/// the metric signs of the participating generators.
fn blade_metric(sig: Signature, mask: u32) -> i8 {
    let mut sign = 1i8;
    let mut rest = mask;
    while rest != 0 {
        let i = rest.trailing_zeros();
        if sig.metric_sign(i) < 0 {
            sign = -sign;
        }
        rest &= rest - 1;
    }
    sign
}

/// Right multiplication x -> x g on the blade basis.
fn right_mul(sig: Signature, g: u32) -> SignedPerm {
    let dim = 1usize << sig.dim();
    let mut target = vec![0u32; dim];
    let mut sign = vec![0i8; dim];
    for b in 0..dim as u32 {
        let (mask, sg) = blade_mul(sig, b, g);
        target[b as usize] = mask;
        sign[b as usize] = sg as i8;
    }
    SignedPerm::new(target, sign)
}

/// Every XOR combination of the given masks, including 0.
fn xor_span(masks: &[u32]) -> Vec<u32> {
    let mut span = vec![0u32];
    for &m in masks {
        let mut next = Vec::with_capacity(span.len() * 2);
        for &h in &span {
            next.push(h);
            next.push(h ^ m);
        }
        span = next;
    }
    span.sort_unstable();
    span.dedup();
    span
}

/// Two blades commute in the algebra exactly when their products in both
/// orders carry the same sign.
fn blades_commute(sig: Signature, a: u32, b: u32) -> bool {
    blade_mul(sig, a, b).1 == blade_mul(sig, b, a).1
}

/// Search for `count` blades g with g^2 = 1 whose right multiplications are
/// mutually commuting, independent and self-adjoint for the blade metric.
/// Depth-first in ascending mask order, so the result is deterministic.
fn cut_blades(sig: Signature, count: usize) -> Option<Vec<u32>> {
    if count == 0 {
        return Some(Vec::new());
    }
    let eta: Vec<i8> = (0..1u32 << sig.dim())
        .map(|b| blade_metric(sig, b))
        .collect();
    let mut candidates = Vec::new();
    for g in 1..(1u32 << sig.dim()) {
        let (mask, sign) = blade_mul(sig, g, g);
        debug_assert_eq!(mask, 0);
        if sign == 1 && right_mul(sig, g).symmetric_wrt(&eta) {
            candidates.push(g);
        }
    }

    fn dfs(
        sig: Signature,
        candidates: &[u32],
        start: usize,
        chosen: &mut Vec<u32>,
        count: usize,
    ) -> bool {
        if chosen.len() == count {
            return true;
        }
        if candidates.len() - start < count - chosen.len() {
            return false;
        }
        for idx in start..candidates.len() {
            let g = candidates[idx];
            if !chosen.iter().all(|&h| blades_commute(sig, g, h)) {
                continue;
            }
            if xor_span(chosen).contains(&g) {
                continue;
            }
            chosen.push(g);
            if dfs(sig, candidates, idx + 1, chosen, count) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    let mut chosen = Vec::new();
    if dfs(sig, &candidates, 0, &mut chosen, count) {
        Some(chosen)
    } else {
        None
    }
}

/// Expansion of prod_j (1 + R_{g_j}) e_b as blade -> coefficient.
fn orbit_vector(sig: Signature, cuts: &[u32], b: u32) -> Vec<(u32, i64)> {
    let mut terms = vec![(b, 1i64)];
    for &g in cuts {
        let mut next = Vec::with_capacity(terms.len() * 2);
        for &(c, coeff) in &terms {
            let (mask, sign) = blade_mul(sig, c, g);
            next.push((c, coeff));
            next.push((mask, coeff * sign));
        }
        next.sort_unstable_by_key(|&(m, _)| m);
        // Independence keeps all supports distinct, so no merging is needed,
        // but fold duplicates defensively.
        let mut folded: Vec<(u32, i64)> = Vec::with_capacity(next.len());
        for (m, c) in next {
            if let Some(last) = folded.last_mut() {
                if last.0 == m {
                    last.1 += c;
                    continue;
                }
            }
            folded.push((m, c));
        }
        folded.retain(|&(_, c)| c != 0);
        terms = folded;
    }
    terms
}

/// Minimal module on the reference grid, built directly inside Cl(r,s).
///
/// The joint +1 eigenspace of the chosen right multiplications carries the
/// left action of the generators; orbit sums over the cut cosets give an
/// orthogonal basis on which every generator acts as a signed permutation.
fn direct_minimal(r: u32, s: u32) -> Result<Representation, HtypeError> {
    let sig = Signature::new(r, s)?;
    let n = sig.dim();
    let want_dim = verify::minimal_dimension(r, s)?;
    let p = verify::involution_count(r, s)? as usize;
    debug_assert_eq!(want_dim as u64, 1u64 << (n as usize - p));

    let cuts = cut_blades(sig, p).ok_or(HtypeError::Construction {
        r,
        s,
        reason: "no commuting family of cut blades of the required size".into(),
    })?;

    let span = xor_span(&cuts);
    let mut reps = Vec::new();
    for b in 0..(1u32 << n) {
        if span.iter().map(|&h| b ^ h).min().unwrap() == b {
            reps.push(b);
        }
    }
    debug_assert_eq!(reps.len(), want_dim as usize);
    let index_of = |mask: u32| -> usize {
        let rep = span.iter().map(|&h| mask ^ h).min().unwrap();
        reps.binary_search(&rep).expect("coset representative")
    };

    let orbits: Vec<Vec<(u32, i64)>> = reps
        .iter()
        .map(|&b| orbit_vector(sig, &cuts, b))
        .collect();
    let eta: Vec<i8> = reps.iter().map(|&b| blade_metric(sig, b)).collect();
    if cfg!(debug_assertions) {
        // The basis must be orthogonal with norms eta_b 2^p.
        for (i, orbit) in orbits.iter().enumerate() {
            let norm: i64 = orbit
                .iter()
                .map(|&(m, c)| c * c * blade_metric(sig, m) as i64)
                .sum();
            debug_assert_eq!(norm, (eta[i] as i64) << cuts.len());
        }
    }

    let mut generators = Vec::with_capacity(n as usize);
    for k in 0..n {
        let zmask = 1u32 << k;
        let mut target = vec![0u32; reps.len()];
        let mut sign = vec![0i8; reps.len()];
        for (i, &b) in reps.iter().enumerate() {
            let j = index_of(zmask ^ b);
            let source = zmask ^ reps[j];
            let base_coeff = orbits[i]
                .iter()
                .find(|&&(m, _)| m == source)
                .map(|&(_, c)| c)
                .expect("orbit covers its coset");
            let coeff = base_coeff * blade_mul(sig, zmask, source).1;
            debug_assert!(coeff == 1 || coeff == -1);
            target[i] = j as u32;
            sign[i] = coeff as i8;
            if cfg!(debug_assertions) {
                // Full check that L_k maps the orbit vector to coeff times
                // the target orbit vector, not just one matching entry.
                let mut image: Vec<(u32, i64)> = orbits[i]
                    .iter()
                    .map(|&(m, c)| {
                        let (mm, sg) = blade_mul(sig, zmask, m);
                        (mm, c * sg)
                    })
                    .collect();
                image.sort_unstable_by_key(|&(m, _)| m);
                let mut expect: Vec<(u32, i64)> = orbits[j]
                    .iter()
                    .map(|&(m, c)| (m, c * coeff))
                    .collect();
                expect.sort_unstable_by_key(|&(m, _)| m);
                debug_assert_eq!(image, expect);
            }
        }
        generators.push(SignedPerm::new(target, sign));
    }

    let mut rep = Representation::new_unchecked(sig, eta, generators, Variant::Unique, EForm::Neutral);
    annotate_variant(&mut rep)?;
    Ok(rep)
}

/// Fill in the variant tag from the actual volume action.
fn annotate_variant(rep: &mut Representation) -> Result<(), HtypeError> {
    let sig = rep.signature();
    if verify::has_two_variants(sig.r(), sig.s()) {
        let vol = rep.volume_action().as_scalar().ok_or(HtypeError::Construction {
            r: sig.r(),
            s: sig.s(),
            reason: "volume form does not act as a scalar on a minimal module".into(),
        })?;
        rep.set_variant(if vol > 0 { Variant::Plus } else { Variant::Minus });
    } else {
        rep.set_variant(Variant::Unique);
    }
    Ok(())
}

/// Tensor a module over Cl(r,s) with a 16-dimensional period module so the
/// result is a module over Cl(r + 8, s), Cl(r, s + 8) or Cl(r + 4, s + 4).
///
/// The period's generators keep acting on their own factor, while the base
/// generators are twisted by the period's volume form, which squares to the
/// identity, is self-adjoint, and anticommutes with the period generators.
/// This preserves the Clifford relations and admissibility on the product.
pub(crate) fn tensor_periodic(
    base: &Representation,
    period: &Representation,
) -> Result<Representation, HtypeError> {
    let (br, bs) = (base.signature().r(), base.signature().s());
    let (pr, ps) = (period.signature().r(), period.signature().s());
    if !matches!((pr, ps), (8, 0) | (0, 8) | (4, 4)) {
        return Err(HtypeError::Construction {
            r: pr,
            s: ps,
            reason: "period factor must have signature (8,0), (0,8) or (4,4)".into(),
        });
    }
    let omega = period.volume_action();
    if omega.compose(&omega).as_scalar() != Some(1) || !omega.symmetric_wrt(period.eta()) {
        return Err(HtypeError::Construction {
            r: pr,
            s: ps,
            reason: "period volume must be a self-adjoint involution".into(),
        });
    }
    debug_assert!(period
        .generators()
        .iter()
        .all(|j| j.anticommutes_with(&omega)));

    let sig = Signature::new(br + pr, bs + ps)?;
    let id_base = SignedPerm::identity(base.dim());
    let mut generators = Vec::with_capacity(sig.dim() as usize);
    for k in 0..br {
        generators.push(base.generator(k as usize).kron(&omega));
    }
    for l in 0..pr {
        generators.push(id_base.kron(period.generator(l as usize)));
    }
    for k in br..(br + bs) {
        generators.push(base.generator(k as usize).kron(&omega));
    }
    for l in pr..(pr + ps) {
        generators.push(id_base.kron(period.generator(l as usize)));
    }

    let mut eta = Vec::with_capacity(base.dim() * period.dim());
    for &eb in base.eta() {
        for &ew in period.eta() {
            eta.push(eb * ew);
        }
    }

    let mut rep = Representation::new_unchecked(sig, eta, generators, Variant::Unique, EForm::Neutral);
    annotate_variant(&mut rep)?;
    Ok(rep)
}

/// Construct some minimal module for (r, s), with no variant preference.
fn construct_any(r: u32, s: u32) -> Result<Representation, HtypeError> {
    if r <= 8 && s <= 8 && r + s <= 10 {
        return direct_minimal(r, s);
    }
    let ((br, bs), (pr, ps)) = if r >= 8 {
        ((r - 8, s), (8, 0))
    } else if s >= 8 {
        ((r, s - 8), (0, 8))
    } else {
        ((r - 4, s - 4), (4, 4))
    };
    let base = construct_any(br, bs)?;
    let period = direct_minimal(pr, ps)?;
    tensor_periodic(&base, &period)
}

/// A minimal admissible module over Cl(r,s).
///
/// At signatures with two minimal module classes the `variant` picks the
/// sign of the volume action; everywhere else it must be `Unique`.
pub fn minimal_module(r: u32, s: u32, variant: Variant) -> Result<Representation, HtypeError> {
    let two = verify::has_two_variants(r, s);
    match (two, variant) {
        (false, Variant::Unique) | (true, Variant::Plus) | (true, Variant::Minus) => {}
        (false, _) => {
            return Err(HtypeError::InvalidModule(format!(
                "({r}, {s}) has a unique minimal module class"
            )))
        }
        (true, _) => {
            return Err(HtypeError::InvalidModule(format!(
                "({r}, {s}) has two minimal module classes; pick plus or minus"
            )))
        }
    }
    let mut rep = construct_any(r, s)?;
    if two && rep.variant() != variant {
        // r + s is odd here, so negating every generator flips the volume
        // sign while keeping the Clifford relations and the scalar product.
        rep.negate_generators();
        debug_assert_eq!(rep.variant(), variant);
    }
    involution::attach_form_class(&mut rep)?;
    rep.verify()?;
    Ok(rep)
}

/// Extend a module by one full period: tensor with a minimal module of
/// signature (8,0), (0,8) or (4,4).  The periodicity theorems say the
/// symmetry algebra dimension is unchanged.
pub fn periodic_extension(
    base: &Representation,
    pr: u32,
    ps: u32,
) -> Result<Representation, HtypeError> {
    let period = direct_minimal(pr, ps)?;
    tensor_periodic(base, &period)
}

/// Default minimal module: the plus variant where two classes exist.
pub fn canonical_minimal(r: u32, s: u32) -> Result<Representation, HtypeError> {
    let variant = if verify::has_two_variants(r, s) {
        Variant::Plus
    } else {
        Variant::Unique
    };
    minimal_module(r, s, variant)
}

/// Direct sum of `p` copies of a minimal module and `q` copies of the same
/// module with the sign of the scalar product reversed.
///
/// Reversing the scalar product realizes the second module type wherever
/// one exists, so (p, q) are the two multiplicities.  When the restricted
/// form of the cell is neutral the two types coincide and q must be 0.
pub fn assemble(r: u32, s: u32, spec: ModuleSpec) -> Result<Representation, HtypeError> {
    if spec.q > 0 && !verify::e_form_definite(r, s) {
        return Err(HtypeError::InvalidModule(format!(
            "({r}, {s}) has a single module type; the second multiplicity must be zero"
        )));
    }
    let base = canonical_minimal(r, s)?;
    let copies = spec.total() as usize;
    let gens: Vec<SignedPerm> = (0..base.signature().dim() as usize)
        .map(|k| {
            let mut acc = base.generator(k).clone();
            for _ in 1..copies {
                acc = acc.direct_sum(base.generator(k));
            }
            acc
        })
        .collect();
    let mut eta = Vec::with_capacity(copies * base.dim());
    for _ in 0..spec.p {
        eta.extend_from_slice(base.eta());
    }
    for _ in 0..spec.q {
        eta.extend(base.eta().iter().map(|&e| -e));
    }
    let mut rep = Representation::new_unchecked(base.signature(), eta, gens, Variant::Unique, EForm::Neutral);
    annotate_variant(&mut rep)?;
    involution::attach_form_class(&mut rep)?;
    rep.verify()?;
    Ok(rep)
}

/// Direct sum of `p` copies of the plus module and `q` copies of the minus
/// module at a signature with two minimal module classes.  The two classes
/// share the scalar product and differ in the volume action, so for p, q
/// both positive the volume acts as a non-scalar involution.
pub fn assemble_volume_split(
    r: u32,
    s: u32,
    spec: ModuleSpec,
) -> Result<Representation, HtypeError> {
    if !verify::has_two_variants(r, s) {
        return Err(HtypeError::InvalidModule(format!(
            "({r}, {s}) has a unique minimal module class; nothing to split"
        )));
    }
    let plus = minimal_module(r, s, Variant::Plus)?;
    let minus = minimal_module(r, s, Variant::Minus)?;
    let gens: Vec<SignedPerm> = (0..plus.signature().dim() as usize)
        .map(|k| {
            let mut parts: Vec<&SignedPerm> = Vec::new();
            for _ in 0..spec.p {
                parts.push(plus.generator(k));
            }
            for _ in 0..spec.q {
                parts.push(minus.generator(k));
            }
            let mut acc = parts[0].clone();
            for part in &parts[1..] {
                acc = acc.direct_sum(part);
            }
            acc
        })
        .collect();
    let mut eta = Vec::with_capacity(spec.total() as usize * plus.dim());
    for _ in 0..spec.total() {
        eta.extend_from_slice(plus.eta());
    }
    let label = if spec.q == 0 {
        Variant::Plus
    } else if spec.p == 0 {
        Variant::Minus
    } else {
        Variant::Mixed
    };
    let mut rep = Representation::new_unchecked(plus.signature(), eta, gens, label, EForm::Neutral);
    involution::attach_form_class(&mut rep)?;
    rep.verify()?;
    Ok(rep)
}

/// The module for a multiplicity pair, routed through whichever mechanism
/// realizes the second class at this cell: the volume split where two
/// minimal classes exist, the reversed scalar product where the restricted
/// form is definite.  The two agree up to isomorphism where both apply.
pub fn module_for_spec(r: u32, s: u32, spec: ModuleSpec) -> Result<Representation, HtypeError> {
    if spec.q == 0 {
        assemble(r, s, spec)
    } else if verify::has_two_variants(r, s) {
        assemble_volume_split(r, s, spec)
    } else {
        assemble(r, s, spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_module_is_the_rotation_by_ninety_degrees() {
        let rep = minimal_module(1, 0, Variant::Unique).unwrap();
        assert_eq!(rep.dim(), 2);
        assert_eq!(rep.eta(), &[1, 1]);
        let j = rep.generator(0);
        assert_eq!(j.compose(j).as_scalar(), Some(-1));
    }

    #[test]
    fn grid_cells_have_reference_dimensions() {
        for (r, s) in [(1u32, 1u32), (2, 0), (0, 2), (3, 0), (4, 0), (2, 3), (0, 7)] {
            let rep = canonical_minimal(r, s).unwrap();
            assert_eq!(
                rep.dim() as u32,
                verify::minimal_dimension(r, s).unwrap(),
                "dimension at ({r}, {s})"
            );
        }
    }

    #[test]
    fn variants_differ_by_volume_sign() {
        let plus = minimal_module(3, 0, Variant::Plus).unwrap();
        let minus = minimal_module(3, 0, Variant::Minus).unwrap();
        assert_eq!(plus.volume_action().as_scalar(), Some(1));
        assert_eq!(minus.volume_action().as_scalar(), Some(-1));
        assert_eq!(plus.eta(), minus.eta());
    }

    #[test]
    fn variant_request_is_validated() {
        assert!(minimal_module(3, 0, Variant::Unique).is_err());
        assert!(minimal_module(2, 0, Variant::Plus).is_err());
    }

    #[test]
    fn periodic_extension_reaches_the_second_grid_copy() {
        let rep = canonical_minimal(9, 0).unwrap();
        assert_eq!(rep.dim(), 32);
        let rep = canonical_minimal(4, 5).unwrap();
        assert_eq!(rep.dim(), 32);
    }

    #[test]
    fn assembled_sum_has_multiplicity_dimensions() {
        let spec = ModuleSpec::new(2, 0).unwrap();
        let rep = assemble(1, 1, spec).unwrap();
        assert_eq!(rep.dim(), 8);

        let spec = ModuleSpec::new(1, 1).unwrap();
        let rep = assemble(3, 0, spec).unwrap();
        assert_eq!(rep.dim(), 8);
        // Sign-flipped copies leave the generators untouched, so at a cell
        // with two classes the summands stay in the same volume class.
        assert_eq!(rep.volume_action().as_scalar(), Some(1));
    }

    #[test]
    fn neutral_cells_reject_second_multiplicity() {
        let spec = ModuleSpec::new(1, 1).unwrap();
        assert!(assemble(1, 1, spec).is_err());
    }

    #[test]
    fn volume_split_mixes_the_two_classes() {
        let spec = ModuleSpec::new(1, 1).unwrap();
        let rep = assemble_volume_split(3, 0, spec).unwrap();
        assert_eq!(rep.dim(), 8);
        assert_eq!(rep.volume_action().as_scalar(), None);
        let vol = rep.volume_action();
        assert!(vol.compose(&vol).as_scalar() == Some(1));
        assert!(assemble_volume_split(2, 1, spec).is_err());
    }

    #[test]
    fn flipped_copies_flip_the_restricted_form() {
        let plus_only = assemble(3, 1, ModuleSpec::new(1, 0).unwrap()).unwrap();
        let minus_only = assemble(3, 1, ModuleSpec::new(0, 1).unwrap()).unwrap();
        assert_eq!(plus_only.eplus(), EForm::PositiveDefinite);
        assert_eq!(minus_only.eplus(), EForm::NegativeDefinite);
        let mixed = assemble(3, 1, ModuleSpec::new(1, 1).unwrap()).unwrap();
        assert_eq!(mixed.eplus(), EForm::Neutral);
    }
}
