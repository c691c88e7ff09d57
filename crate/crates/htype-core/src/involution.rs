//! Commuting involutions built from generator products, the common
//! eigenspaces they cut out, and the operators that move data between
//! those eigenspaces.
//!
//! Products of three or four distinct generators are the only candidates:
//! exactly those squaring to +Id survive, and they are automatically
//! self-adjoint and compatible with the sign classes of the scalar product.
//! A maximal commuting independent family of them cuts the module into
//! equal slices, and one- or two-generator products shuttle between the
//! slices.  All searches run in ascending index order, so results are
//! deterministic.

use crate::linalg::{rat, RMat, Rat, SignedPerm};
use crate::rep::{EForm, Representation};
use crate::{verify, HtypeError};

/// How a three- or four-generator involution sits relative to the split of
/// generators into positive and negative directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvolutionKind {
    FourPositive,
    FourNegative,
    FourBalanced,
    TriplePositive,
    TripleMixed,
}

impl InvolutionKind {
    /// Four-generator members cut joint eigenspaces; the odd ones do not
    /// always, so they are kept apart.
    pub fn is_starred(self) -> bool {
        matches!(
            self,
            InvolutionKind::FourPositive | InvolutionKind::FourNegative | InvolutionKind::FourBalanced
        )
    }

    fn classify(r: u32, indices: &[u32]) -> Option<InvolutionKind> {
        let pos = indices.iter().filter(|&&i| i < r).count();
        match (indices.len(), pos) {
            (4, 4) => Some(InvolutionKind::FourPositive),
            (4, 0) => Some(InvolutionKind::FourNegative),
            (4, 2) => Some(InvolutionKind::FourBalanced),
            (3, 3) => Some(InvolutionKind::TriplePositive),
            (3, 1) => Some(InvolutionKind::TripleMixed),
            _ => None,
        }
    }
}

/// A generator product that is an involution on the module.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub indices: Vec<u32>,
    pub kind: InvolutionKind,
    pub matrix: SignedPerm,
}

/// The product J_{i_1} ... J_{i_k} as an operator.
pub fn generator_product(rep: &Representation, indices: &[u32]) -> SignedPerm {
    let mut acc = SignedPerm::identity(rep.dim());
    for &i in indices {
        acc = acc.compose(rep.generator(i as usize));
    }
    acc
}

fn build_candidate(rep: &Representation, indices: &[u32]) -> Option<Candidate> {
    let kind = InvolutionKind::classify(rep.signature().r(), indices)?;
    let matrix = generator_product(rep, indices);
    if matrix.compose(&matrix).as_scalar() != Some(1) {
        return None;
    }
    debug_assert!(matrix.symmetric_wrt(rep.eta()));
    debug_assert!(matrix.preserves_sign_classes(rep.eta()));
    Some(Candidate {
        indices: indices.to_vec(),
        kind,
        matrix,
    })
}

/// All three- and four-generator involutions, four-generator ones first,
/// each group in ascending index order.
pub fn candidate_involutions(rep: &Representation) -> Vec<Candidate> {
    let n = rep.signature().dim();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    if let Some(cand) = build_candidate(rep, &[a, b, c, d]) {
                        out.push(cand);
                    }
                }
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if let Some(cand) = build_candidate(rep, &[a, b, c]) {
                    out.push(cand);
                }
            }
        }
    }
    out
}

/// A maximal commuting independent family of candidate involutions.  The
/// four-generator members come first; at most one odd member closes the
/// list.
#[derive(Debug, Clone)]
pub struct CommutingSet {
    pub members: Vec<Candidate>,
    pub starred: usize,
}

impl CommutingSet {
    pub fn starred_matrices(&self) -> Vec<SignedPerm> {
        self.members[..self.starred]
            .iter()
            .map(|c| c.matrix.clone())
            .collect()
    }
}

fn mask_of(indices: &[u32]) -> u32 {
    indices.iter().fold(0u32, |m, &i| m | (1 << i))
}

fn in_xor_span(masks: &[u32], mask: u32) -> bool {
    let mut span = vec![0u32];
    for &m in masks {
        let mut next = Vec::with_capacity(span.len() * 2);
        for &h in &span {
            next.push(h);
            next.push(h ^ m);
        }
        span = next;
    }
    span.contains(&mask)
}

/// Upper bound on the size of a commuting independent all-four family with
/// masks drawn from `masks`.
///
/// On even-weight masks the pairing B(x, y) = |x and y| mod 2 is the polar
/// form of q(x) = (|x| / 2) mod 2, and a commuting independent family of
/// four-sets spans a subspace on which both vanish identically.  The
/// largest such subspace inside the span of `masks` is its Witt index,
/// computed here by splitting off hyperbolic planes.  A plane whose three
/// nonzero vectors all have q = 1 contributes nothing unless a radical
/// vector with q = 1 exists to absorb the defect; two such planes cancel
/// each other, so only the parity of their count matters.
fn singular_bound(masks: &[u32]) -> usize {
    let b_odd = |x: u32, y: u32| (x & y).count_ones() % 2 == 1;
    let q_odd = |x: u32| (x.count_ones() / 2) % 2 == 1;
    let mut basis: Vec<u32> = Vec::new();
    for &m in masks {
        let mut x = m;
        while x != 0 {
            match basis.iter().find(|&&b| b.ilog2() == x.ilog2()) {
                Some(&b) => x ^= b,
                None => break,
            }
        }
        if x != 0 {
            basis.push(x);
        }
    }
    let mut planes = 0usize;
    let mut defects = 0usize;
    loop {
        let pair = (0..basis.len())
            .flat_map(|i| (i + 1..basis.len()).map(move |j| (i, j)))
            .find(|&(i, j)| b_odd(basis[i], basis[j]));
        let Some((i, j)) = pair else { break };
        let f = basis.swap_remove(j);
        let e = basis.swap_remove(i);
        for x in basis.iter_mut() {
            if b_odd(*x, f) {
                *x ^= e;
            }
            if b_odd(*x, e) {
                *x ^= f;
            }
        }
        planes += 1;
        if q_odd(e) && q_odd(f) {
            defects += 1;
        }
    }
    // what is left of the basis spans the radical of the pairing, where q
    // is linear
    if basis.iter().any(|&x| q_odd(x)) {
        planes + basis.len() - 1
    } else {
        planes + basis.len() - defects % 2
    }
}

/// The search runs on index masks alone.  Two generator products J_S, J_T
/// obey J_S J_T = (-1)^(|S||T| - |S cap T|) J_T J_S, so with |S| = 4 and
/// |T| in {3, 4} they commute exactly when the intersection is even.  A
/// subset product of chosen members is, up to sign, the generator product
/// of the XOR of their masks, and a product of a nonempty proper subset of
/// the generators always has zero trace (conjugation by a generator inside
/// an even word, or outside an odd one, flips its sign).  Hence every
/// independent commuting member halves the joint +1 eigenspace on its own,
/// with a single exception: a subset product hitting the full generator
/// set while the volume element acts as a scalar.
struct Search<'a> {
    fours: Vec<&'a Candidate>,
    triples: Vec<&'a Candidate>,
    halve_triple: bool,
    /// Full generator mask when the volume element is scalar, the one case
    /// where a trace correction can spoil the halving.
    scalar_volume: Option<u32>,
}

impl<'a> Search<'a> {
    /// `span` holds all XOR combinations of the chosen masks, zero included.
    fn compatible(&self, masks: &[u32], span: &[u32], cand: &Candidate, halving: bool) -> bool {
        let cmask = mask_of(&cand.indices);
        masks
            .iter()
            .all(|&m| (m & cmask).count_ones() % 2 == 0)
            && !span.contains(&cmask)
            && (!halving
                || self
                    .scalar_volume
                    .map_or(true, |full| !span.contains(&(full ^ cmask))))
    }

    /// Depth-first search for `fours_wanted` four-generator members plus
    /// optionally one odd member, in ascending candidate order.
    fn run(
        &self,
        start: usize,
        chosen: &mut Vec<&'a Candidate>,
        masks: &mut Vec<u32>,
        span: &mut Vec<u32>,
        fours_wanted: usize,
        odd_wanted: bool,
    ) -> Option<Vec<Candidate>> {
        if chosen.len() == fours_wanted {
            if !odd_wanted {
                return Some(chosen.iter().map(|c| (*c).clone()).collect());
            }
            for cand in &self.triples {
                if !self.compatible(masks, span, cand, self.halve_triple) {
                    continue;
                }
                let mut members: Vec<Candidate> = chosen.iter().map(|c| (*c).clone()).collect();
                members.push((*cand).clone());
                return Some(members);
            }
            return None;
        }
        for idx in start..self.fours.len() {
            let cand = self.fours[idx];
            if !self.compatible(masks, span, cand, true) {
                continue;
            }
            chosen.push(cand);
            let cmask = mask_of(&cand.indices);
            masks.push(cmask);
            let old_len = span.len();
            for i in 0..old_len {
                let h = span[i];
                span.push(h ^ cmask);
            }
            if let Some(found) = self.run(idx + 1, chosen, masks, span, fours_wanted, odd_wanted) {
                return Some(found);
            }
            chosen.pop();
            masks.pop();
            span.truncate(old_len);
        }
        None
    }
}

/// Exact check of a family the mask search proposed: the matrices must be
/// commuting involutions and each starred prefix must halve the joint +1
/// eigenspace, the odd member included where the cell demands it.
fn verify_family(
    rep: &Representation,
    members: &[Candidate],
    starred: usize,
    two: bool,
) -> Result<(), HtypeError> {
    for (i, a) in members.iter().enumerate() {
        if !a.matrix.is_involution() {
            return Err(HtypeError::Involution(format!(
                "member {:?} is not an involution",
                a.indices
            )));
        }
        for b in &members[i + 1..] {
            if !a.matrix.commutes_with(&b.matrix) {
                return Err(HtypeError::Involution(format!(
                    "members {:?} and {:?} do not commute",
                    a.indices, b.indices
                )));
            }
        }
    }
    let dim = rep.dim();
    let mats: Vec<SignedPerm> = members.iter().map(|c| c.matrix.clone()).collect();
    for m in 1..=starred {
        if joint_positive_basis(dim, &mats[..m]).len() != dim >> m {
            return Err(HtypeError::Involution(format!(
                "starred member {m} fails to halve the joint eigenspace"
            )));
        }
    }
    if !two && members.len() > starred {
        if joint_positive_basis(dim, &mats).len() != dim >> (starred + 1) {
            return Err(HtypeError::Involution(
                "odd member fails to halve the joint eigenspace".into(),
            ));
        }
    }
    Ok(())
}

/// Fixed family for (7,0).  A valid family of this size is not unique and
/// the search order would pick a different one; this choice is pinned so
/// reported operators and transfer tables stay stable.
fn pinned_set_7_0(rep: &Representation) -> Result<CommutingSet, HtypeError> {
    let index_sets: [&[u32]; 4] = [&[0, 1, 3, 4], &[0, 1, 5, 6], &[0, 2, 3, 5], &[0, 1, 2]];
    let mut members = Vec::new();
    let mut masks = Vec::new();
    for indices in index_sets {
        let cand = build_candidate(rep, indices).ok_or_else(|| {
            HtypeError::Involution("pinned (7,0) member is not an involution".into())
        })?;
        if !members
            .iter()
            .all(|m: &Candidate| m.matrix.commutes_with(&cand.matrix))
            || in_xor_span(&masks, mask_of(indices))
        {
            return Err(HtypeError::Involution(
                "pinned (7,0) family fails commutation or independence".into(),
            ));
        }
        masks.push(mask_of(indices));
        members.push(cand);
    }
    Ok(CommutingSet { members, starred: 3 })
}

/// Maximal commuting independent family of involutions for this module.
///
/// The size is forced by the module dimension: dim = 2^(r + s - size).
/// Where the cell has two module classes the family always closes with an
/// odd member, which there may act as a scalar and is excluded from the
/// eigenspace cut.
pub fn maximal_commuting_set(rep: &Representation) -> Result<CommutingSet, HtypeError> {
    let sig = rep.signature();
    let (r, s) = (sig.r(), sig.s());
    let p = verify::involution_count(r, s)? as usize;
    if p == 0 {
        return Ok(CommutingSet {
            members: Vec::new(),
            starred: 0,
        });
    }
    if (r, s) == (7, 0) {
        let set = pinned_set_7_0(rep)?;
        verify_family(rep, &set.members, set.starred, verify::has_two_variants(r, s))?;
        return Ok(set);
    }
    let two = verify::has_two_variants(r, s);
    let all = candidate_involutions(rep);
    let fours: Vec<&Candidate> = all.iter().filter(|c| c.kind.is_starred()).collect();
    let triples: Vec<&Candidate> = all.iter().filter(|c| !c.kind.is_starred()).collect();
    // When the Witt bound already rules out an all-four family of size p,
    // trying one anyway would walk the whole tree just to prove absence,
    // which is hopeless at fourteen or more generators.
    let four_masks: Vec<u32> = fours.iter().map(|c| mask_of(&c.indices)).collect();
    let all_four_feasible = p <= singular_bound(&four_masks);
    let search = Search {
        fours,
        triples,
        halve_triple: !two,
        scalar_volume: rep
            .volume_action()
            .as_scalar()
            .map(|_| (1u32 << sig.dim()) - 1),
    };

    let attempt = |fours_wanted: usize, odd_wanted: bool| -> Option<Vec<Candidate>> {
        let mut chosen = Vec::new();
        let mut masks = Vec::new();
        let mut span = vec![0u32];
        search.run(0, &mut chosen, &mut masks, &mut span, fours_wanted, odd_wanted)
    };

    let set = if !two {
        all_four_feasible
            .then(|| attempt(p, false))
            .flatten()
            .map(|members| CommutingSet { members, starred: p })
            .or_else(|| {
                attempt(p - 1, true).map(|members| CommutingSet {
                    members,
                    starred: p - 1,
                })
            })
    } else {
        attempt(p - 1, true).map(|members| CommutingSet {
            members,
            starred: p - 1,
        })
    };
    let set = set.ok_or_else(|| {
        HtypeError::Involution(format!(
            "no commuting independent family of size {p} found at ({r}, {s})"
        ))
    })?;
    verify_family(rep, &set.members, set.starred, two)?;
    Ok(set)
}

/// Basis of the joint +1 eigenspace of commuting involutions, as integer
/// orbit sums with pairwise disjoint support.
pub(crate) fn joint_positive_basis(dim: usize, members: &[SignedPerm]) -> Vec<Vec<i64>> {
    let mut products = vec![SignedPerm::identity(dim)];
    for m in members {
        let added: Vec<SignedPerm> = products.iter().map(|p| p.compose(m)).collect();
        products.extend(added);
    }
    let mut used = vec![false; dim];
    let mut basis = Vec::new();
    for c in 0..dim {
        if used[c] {
            continue;
        }
        let mut acc = vec![0i64; dim];
        for p in &products {
            let t = p.target(c);
            acc[t] += p.sign(c) as i64;
            used[t] = true;
        }
        if acc.iter().any(|&x| x != 0) {
            basis.push(acc);
        }
    }
    basis
}

fn diag_signature(eta: &[i8], basis: &[Vec<i64>]) -> Result<(usize, usize), HtypeError> {
    let mut pos = 0;
    let mut neg = 0;
    for v in basis {
        let norm: i64 = v
            .iter()
            .enumerate()
            .map(|(b, &x)| eta[b] as i64 * x * x)
            .sum();
        if norm > 0 {
            pos += 1;
        } else if norm < 0 {
            neg += 1;
        } else {
            return Err(HtypeError::Involution(
                "degenerate restricted scalar product".into(),
            ));
        }
    }
    Ok((pos, neg))
}

/// The two nested eigenspaces cut out by a commuting family.
///
/// The starred members always cut; at cells with two module classes the
/// odd member is excluded from the second cut as well, since there it can
/// act as a scalar.
#[derive(Debug, Clone)]
pub struct CommonEigenspace {
    pub estar_basis: Vec<Vec<i64>>,
    pub e_basis: Vec<Vec<i64>>,
    /// (positive, negative) inertia of the restricted scalar product.
    pub estar_signature: (usize, usize),
    pub e_signature: (usize, usize),
}

pub fn common_eigenspace(
    rep: &Representation,
    set: &CommutingSet,
) -> Result<CommonEigenspace, HtypeError> {
    let sig = rep.signature();
    let starred = set.starred_matrices();
    let estar_basis = joint_positive_basis(rep.dim(), &starred);
    if estar_basis.len() << set.starred != rep.dim() {
        return Err(HtypeError::Involution(format!(
            "joint eigenspace has dimension {} instead of {}",
            estar_basis.len(),
            rep.dim() >> set.starred
        )));
    }
    let e_members: Vec<SignedPerm> = if verify::has_two_variants(sig.r(), sig.s()) {
        starred
    } else {
        set.members.iter().map(|c| c.matrix.clone()).collect()
    };
    let e_basis = joint_positive_basis(rep.dim(), &e_members);
    let estar_signature = diag_signature(rep.eta(), &estar_basis)?;
    let e_signature = diag_signature(rep.eta(), &e_basis)?;
    Ok(CommonEigenspace {
        estar_basis,
        e_basis,
        estar_signature,
        e_signature,
    })
}

/// Compute the restricted form class on the small eigenspace and store it
/// on the representation.
pub(crate) fn attach_form_class(rep: &mut Representation) -> Result<(), HtypeError> {
    let set = maximal_commuting_set(rep)?;
    let spaces = common_eigenspace(rep, &set)?;
    let (pos, neg) = spaces.e_signature;
    let class = if neg == 0 {
        EForm::PositiveDefinite
    } else if pos == 0 {
        EForm::NegativeDefinite
    } else {
        EForm::Neutral
    };
    rep.set_eplus(class);
    Ok(())
}

/// A one- or two-generator product moving the base eigenspace to the one
/// labelled by `pattern`: it commutes with the l-th starred member where
/// pattern[l] = +1 and anticommutes where it is -1.
#[derive(Debug, Clone)]
pub struct Transfer {
    pub pattern: Vec<i8>,
    pub indices: Vec<u32>,
    pub matrix: SignedPerm,
}

fn matches_pattern(m: &SignedPerm, starred: &[SignedPerm], pattern: &[i8]) -> bool {
    starred.iter().zip(pattern).all(|(p, &sign)| {
        if sign > 0 {
            m.commutes_with(p)
        } else {
            m.anticommutes_with(p)
        }
    })
}

/// One transfer per joint eigenspace, identity first.  Fails if some
/// eigenspace is not reachable by a single or double generator product.
pub fn transfer_maps(
    rep: &Representation,
    set: &CommutingSet,
) -> Result<Vec<Transfer>, HtypeError> {
    let n = rep.signature().dim();
    let starred = set.starred_matrices();
    let k = set.starred;
    let mut out = vec![Transfer {
        pattern: vec![1; k],
        indices: Vec::new(),
        matrix: SignedPerm::identity(rep.dim()),
    }];
    for bits in 1u32..(1 << k) {
        let pattern: Vec<i8> = (0..k)
            .map(|l| if bits >> l & 1 == 1 { -1 } else { 1 })
            .collect();
        let mut found = None;
        'search: {
            for i in 0..n {
                let m = generator_product(rep, &[i]);
                if matches_pattern(&m, &starred, &pattern) {
                    found = Some(Transfer {
                        pattern: pattern.clone(),
                        indices: vec![i],
                        matrix: m,
                    });
                    break 'search;
                }
            }
            for i in 0..n {
                for j in i + 1..n {
                    let m = generator_product(rep, &[i, j]);
                    if matches_pattern(&m, &starred, &pattern) {
                        found = Some(Transfer {
                            pattern: pattern.clone(),
                            indices: vec![i, j],
                            matrix: m,
                        });
                        break 'search;
                    }
                }
            }
        }
        match found {
            Some(t) => out.push(t),
            None => {
                return Err(HtypeError::Involution(format!(
                    "no one or two generator transfer reaches the eigenspace with signs {pattern:?}"
                )))
            }
        }
    }
    Ok(out)
}

/// A generator product singled out as extra structure on the base
/// eigenspace.
#[derive(Debug, Clone)]
pub struct OperatorChoice {
    pub indices: Vec<u32>,
    pub matrix: SignedPerm,
}

/// Distinguished operators commuting with the starred members: a complex
/// structure, an anticommuting partner completing it to a quaternion
/// triple, a sign-reversing involution, and an odd product.  Which of them
/// exist depends on the signature.
#[derive(Debug, Clone)]
pub struct StructureOperators {
    pub complex: Option<OperatorChoice>,
    pub quaternion_partner: Option<OperatorChoice>,
    pub negative: Option<OperatorChoice>,
    pub odd: Option<OperatorChoice>,
}

pub fn structure_operators(rep: &Representation, set: &CommutingSet) -> StructureOperators {
    let n = rep.signature().dim();
    let starred = set.starred_matrices();
    let commutes_all =
        |m: &SignedPerm| -> bool { starred.iter().all(|p| m.commutes_with(p)) };

    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let m = generator_product(rep, &[i, j]);
            if commutes_all(&m) {
                pairs.push((vec![i, j], m));
            }
        }
    }

    let complex = pairs
        .iter()
        .find(|(_, m)| m.compose(m).as_scalar() == Some(-1))
        .map(|(idx, m)| OperatorChoice {
            indices: idx.clone(),
            matrix: m.clone(),
        });
    let quaternion_partner = complex.as_ref().and_then(|i_op| {
        pairs
            .iter()
            .find(|(_, m)| {
                m.compose(m).as_scalar() == Some(-1) && m.anticommutes_with(&i_op.matrix)
            })
            .map(|(idx, m)| OperatorChoice {
                indices: idx.clone(),
                matrix: m.clone(),
            })
    });
    let negative = pairs
        .iter()
        .find(|(_, m)| {
            m.compose(m).as_scalar() == Some(1) && m.reverses_sign_classes(rep.eta())
        })
        .map(|(idx, m)| OperatorChoice {
            indices: idx.clone(),
            matrix: m.clone(),
        });

    let mut odd = None;
    for i in 0..n {
        let m = generator_product(rep, &[i]);
        if commutes_all(&m) {
            odd = Some(OperatorChoice {
                indices: vec![i],
                matrix: m,
            });
            break;
        }
    }
    if odd.is_none() {
        'triples: for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let m = generator_product(rep, &[a, b, c]);
                    if commutes_all(&m) {
                        odd = Some(OperatorChoice {
                            indices: vec![a, b, c],
                            matrix: m,
                        });
                        break 'triples;
                    }
                }
            }
        }
    }

    StructureOperators {
        complex,
        quaternion_partner,
        negative,
        odd,
    }
}

/// Everything needed to restrict operators to the base eigenspace and to
/// extend them back: the eigenspace basis, one transfer per eigenspace,
/// and the change-of-basis matrix assembled from both.
pub struct Frame {
    pub set: CommutingSet,
    pub transfers: Vec<Transfer>,
    pub basis: Vec<Vec<i64>>,
    block: usize,
    parities: Vec<bool>,
    w: RMat,
    w_inv: RMat,
    d_star: Vec<Rat>,
}

pub fn eigenspace_frame(rep: &Representation) -> Result<Frame, HtypeError> {
    let set = maximal_commuting_set(rep)?;
    let spaces = common_eigenspace(rep, &set)?;
    let transfers = transfer_maps(rep, &set)?;
    let basis = spaces.estar_basis;
    let block = basis.len();
    let dim = rep.dim();
    debug_assert_eq!(block * transfers.len(), dim);

    let mut cols: Vec<Vec<i64>> = Vec::with_capacity(dim);
    for t in &transfers {
        for v in &basis {
            cols.push(t.matrix.apply_i64(v));
        }
    }
    let mut norms = Vec::with_capacity(dim);
    for col in &cols {
        let norm: i64 = col
            .iter()
            .enumerate()
            .map(|(b, &x)| rep.eta()[b] as i64 * x * x)
            .sum();
        if norm == 0 {
            return Err(HtypeError::Involution(
                "transfer image with degenerate norm".into(),
            ));
        }
        norms.push(rat(norm));
    }

    let mut w = RMat::zero(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            if x != 0 {
                w.set(i, j, rat(x));
            }
        }
    }
    // Columns are orthogonal for the scalar product, so the inverse is the
    // weighted transpose.
    let mut w_inv = RMat::zero(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let val = w.get(j, i) * rat(rep.eta()[j] as i64) / &norms[i];
            if val != rat(0) {
                w_inv.set(i, j, val);
            }
        }
    }
    if dim <= 64 {
        debug_assert!(w_inv.mul(&w) == RMat::identity(dim));
    }

    let parities = transfers.iter().map(|t| t.indices.len() % 2 == 1).collect();
    let d_star = norms[..block].to_vec();
    Ok(Frame {
        set,
        transfers,
        basis,
        block,
        parities,
        w,
        w_inv,
        d_star,
    })
}

impl Frame {
    pub fn block_dim(&self) -> usize {
        self.block
    }

    /// Coordinates on the base eigenspace of an operator preserving it.
    pub fn restrict(&self, a: &RMat) -> RMat {
        let m = self.w_inv.mul(a).mul(&self.w);
        let mut out = RMat::zero(self.block, self.block);
        for i in 0..self.block {
            for j in 0..self.block {
                out.set(i, j, m.get(i, j).clone());
            }
        }
        out
    }

    /// Rebuild a full solution of the skew-adjointness equations from its
    /// base block.  Blocks reached by an even transfer repeat the base
    /// block; odd transfers conjugate by the form adjoint with a sign.
    pub fn extend(&self, a1: &RMat) -> RMat {
        let dim = self.w.nrows();
        let mut big = RMat::zero(dim, dim);
        for (cell, &oddness) in self.parities.iter().enumerate() {
            let offset = cell * self.block;
            for i in 0..self.block {
                for j in 0..self.block {
                    let val = if oddness {
                        -(a1.get(j, i) * &self.d_star[j] / &self.d_star[i])
                    } else {
                        a1.get(i, j).clone()
                    };
                    if val != rat(0) {
                        big.set(offset + i, offset + j, val);
                    }
                }
            }
        }
        self.w.mul(&big).mul(&self.w_inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build;
    use crate::rep::Variant;

    fn indices(set: &CommutingSet) -> Vec<Vec<u32>> {
        set.members.iter().map(|c| c.indices.clone()).collect()
    }

    #[test]
    fn singular_bound_on_reference_spans() {
        // four weight-4 masks over eight indices with even pairwise meets
        let grid = [0b0000_1111u32, 0b1111_0000, 0b0011_0011, 0b0101_0101];
        assert_eq!(singular_bound(&grid), 4);
        assert_eq!(singular_bound(&[0b1111]), 1);
        // two weight-2 masks meeting in one index: the plane they span has
        // no nonzero vector with q = 0
        assert_eq!(singular_bound(&[0b011, 0b110]), 0);
        // a defective radical vector rescues one singular line from it
        assert_eq!(singular_bound(&[0b011, 0b110, 0b11_0000]), 1);
        assert_eq!(singular_bound(&[]), 0);
    }

    #[test]
    fn singular_bound_depends_on_the_generator_split() {
        // masks of four distinct indices out of twelve, with an even count
        // below the positive/negative split point
        let masks = |split: u32| -> Vec<u32> {
            let mut out = Vec::new();
            for a in 0..12u32 {
                for b in a + 1..12 {
                    for c in b + 1..12 {
                        for d in c + 1..12 {
                            let pos = [a, b, c, d].iter().filter(|&&i| i < split).count();
                            if pos % 2 == 0 {
                                out.push((1 << a) | (1 << b) | (1 << c) | (1 << d));
                            }
                        }
                    }
                }
            }
            out
        };
        // five four-sets fit when eight of twelve indices are positive but
        // only four when seven are, which is why the (7, 5) module closes
        // with a three-generator member while (8, 4) does not
        assert_eq!(singular_bound(&masks(8)), 5);
        assert_eq!(singular_bound(&masks(7)), 4);
    }

    #[test]
    fn pinned_family_and_tiny_eigenspace_at_7_0() {
        let rep = build::minimal_module(7, 0, Variant::Plus).unwrap();
        let set = maximal_commuting_set(&rep).unwrap();
        assert_eq!(
            indices(&set),
            vec![
                vec![0, 1, 3, 4],
                vec![0, 1, 5, 6],
                vec![0, 2, 3, 5],
                vec![0, 1, 2]
            ]
        );
        assert_eq!(set.starred, 3);
        let spaces = common_eigenspace(&rep, &set).unwrap();
        assert_eq!(spaces.estar_basis.len(), 1);
        assert_eq!(spaces.e_basis.len(), 1);
        assert_eq!(spaces.e_signature, (1, 0));
        let transfers = transfer_maps(&rep, &set).unwrap();
        assert_eq!(transfers.len(), 8);
        let ops = structure_operators(&rep, &set);
        assert_eq!(ops.odd.unwrap().indices, vec![0, 1, 2]);
    }

    #[test]
    fn searched_family_at_6_0_matches_hand_computation() {
        let rep = build::minimal_module(6, 0, Variant::Unique).unwrap();
        let set = maximal_commuting_set(&rep).unwrap();
        assert_eq!(
            indices(&set),
            vec![vec![0, 1, 2, 3], vec![0, 1, 4, 5], vec![0, 2, 4]]
        );
        assert_eq!(set.starred, 2);
        let spaces = common_eigenspace(&rep, &set).unwrap();
        assert_eq!(spaces.estar_basis.len(), 2);
        assert_eq!(spaces.e_basis.len(), 1);
        let ops = structure_operators(&rep, &set);
        assert_eq!(ops.complex.unwrap().indices, vec![0, 1]);
        assert!(ops.quaternion_partner.is_none());
        assert!(ops.negative.is_none());
        assert_eq!(ops.odd.unwrap().indices, vec![0, 2, 4]);
    }

    #[test]
    fn quaternion_pair_exists_at_4_0() {
        let rep = build::minimal_module(4, 0, Variant::Unique).unwrap();
        let set = maximal_commuting_set(&rep).unwrap();
        assert_eq!(indices(&set), vec![vec![0, 1, 2, 3]]);
        let ops = structure_operators(&rep, &set);
        let i_op = ops.complex.unwrap();
        let j_op = ops.quaternion_partner.unwrap();
        assert_eq!(i_op.indices, vec![0, 1]);
        assert_eq!(j_op.indices, vec![0, 2]);
        assert!(i_op.matrix.anticommutes_with(&j_op.matrix));
        let k = i_op.matrix.compose(&j_op.matrix);
        assert_eq!(k.compose(&k).as_scalar(), Some(-1));
        assert!(ops.negative.is_none());
        assert!(ops.odd.is_none());
    }

    #[test]
    fn neutral_cell_1_1_has_reversing_and_odd_operators() {
        let rep = build::minimal_module(1, 1, Variant::Unique).unwrap();
        let set = maximal_commuting_set(&rep).unwrap();
        assert!(set.members.is_empty());
        let ops = structure_operators(&rep, &set);
        assert!(ops.complex.is_none());
        assert_eq!(ops.negative.unwrap().indices, vec![0, 1]);
        assert_eq!(ops.odd.unwrap().indices, vec![0]);
    }

    #[test]
    fn eigenspace_sizes_at_reference_cells() {
        let rep = build::minimal_module(0, 7, Variant::Unique).unwrap();
        let set = maximal_commuting_set(&rep).unwrap();
        assert_eq!(set.starred, 3);
        let spaces = common_eigenspace(&rep, &set).unwrap();
        assert_eq!(spaces.e_basis.len(), 2);
        assert_eq!(spaces.e_signature, (1, 1));

        let rep = build::minimal_module(6, 3, Variant::Unique).unwrap();
        let set = maximal_commuting_set(&rep).unwrap();
        let spaces = common_eigenspace(&rep, &set).unwrap();
        assert_eq!(spaces.estar_basis.len(), 8);
    }

    #[test]
    fn transfers_cover_every_eigenspace() {
        for (r, s) in [(8u32, 0u32), (1, 0), (4, 3)] {
            let rep = build::canonical_minimal(r, s).unwrap();
            let set = maximal_commuting_set(&rep).unwrap();
            let transfers = transfer_maps(&rep, &set).unwrap();
            assert_eq!(transfers.len(), 1 << set.starred, "at ({r}, {s})");
            assert!(transfers[0].indices.is_empty());
        }
    }

    #[test]
    fn frame_round_trips_arbitrary_blocks() {
        let rep = build::minimal_module(4, 0, Variant::Unique).unwrap();
        let frame = eigenspace_frame(&rep).unwrap();
        let k = frame.block_dim();
        let mut a1 = RMat::zero(k, k);
        let mut counter = 1i64;
        for i in 0..k {
            for j in 0..k {
                a1.set(i, j, rat(counter));
                counter += 3;
            }
        }
        let full = frame.extend(&a1);
        let back = frame.restrict(&full);
        assert!(back == a1);
    }
}
