//! The two-step nilpotent Lie algebra attached to an admissible module,
//! and the dimension of the algebra of symmetries acting trivially on the
//! center.
//!
//! The algebra is U + R^{r,s} with bracket defined by
//! <J_z x, y> = <z, [x, y]> and center R^{r,s}.  A linear map `a` on U is
//! an infinitesimal symmetry fixing the center exactly when
//! adj(a) J_z + J_z a = 0 for every z, where adj is the adjoint for the
//! module scalar product.  Since the generators act by signed
//! permutations, every entry of that equation couples at most two entries
//! of `a` with coefficients +-1, and the full solution space can be read
//! off a union-find over the matrix entries.  A modular rank computation
//! over two random word-size primes serves as the engine for large
//! modules, where it is cheaper than rational elimination and fails only
//! if a prime divides an unlucky minor.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::linalg::{
    is_prime_u64, rat, sparse_rank_mod_p, RMat, Rat, SignedPerm, SignedUnionFind,
};
use crate::rep::Representation;
use crate::HtypeError;

/// The Lie algebra built from an admissible module: module plus center,
/// with the bracket of module elements landing in the center.
pub struct HTypeAlgebra {
    rep: Representation,
}

impl HTypeAlgebra {
    pub fn new(rep: Representation) -> Self {
        HTypeAlgebra { rep }
    }

    pub fn representation(&self) -> &Representation {
        &self.rep
    }

    pub fn module_dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn center_dim(&self) -> usize {
        self.rep.signature().dim() as usize
    }

    pub fn total_dim(&self) -> usize {
        self.module_dim() + self.center_dim()
    }

    /// Center coordinates of [x, y] for module vectors x, y.
    pub fn bracket(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        let sig = self.rep.signature();
        let eta = self.rep.eta();
        (0..self.center_dim())
            .map(|k| {
                let jx = self.rep.generator(k).apply_rat(x);
                let inner: Rat = jx
                    .iter()
                    .zip(y)
                    .enumerate()
                    .map(|(b, (a, c))| a * c * rat(eta[b] as i64))
                    .sum();
                inner * rat(sig.metric_sign(k as u32))
            })
            .collect()
    }

    /// [e_i, e_j] for module basis vectors, computed without touching the
    /// full inner product.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vec<Rat> {
        let sig = self.rep.signature();
        let eta = self.rep.eta();
        (0..self.center_dim())
            .map(|k| {
                let g = self.rep.generator(k);
                if g.target(i) == j {
                    rat(g.sign(i) as i64 * eta[j] as i64 * sig.metric_sign(k as u32))
                } else {
                    rat(0)
                }
            })
            .collect()
    }

    /// Whether the brackets of basis vectors span the whole center, i.e.
    /// the algebra has no abelian factor hiding in the center.
    pub fn brackets_span_center(&self) -> bool {
        let n = self.center_dim();
        let dim = self.module_dim();
        let mut pivots: Vec<Vec<Rat>> = Vec::new();
        for i in 0..dim {
            for j in i + 1..dim {
                let mut v = self.bracket_basis(i, j);
                for p in &pivots {
                    let lead = p.iter().position(|x| *x != rat(0)).unwrap();
                    if v[lead] != rat(0) {
                        let f = &v[lead] / &p[lead];
                        for (ve, pe) in v.iter_mut().zip(p) {
                            *ve -= &f * pe;
                        }
                    }
                }
                if v.iter().any(|x| *x != rat(0)) {
                    pivots.push(v);
                    if pivots.len() == n {
                        return true;
                    }
                }
            }
        }
        pivots.len() == n
    }

    /// Check [a x, a y] = c [x, y] on all pairs of module basis vectors.
    pub fn is_automorphism_pair(&self, a: &RMat, c: &RMat) -> bool {
        let dim = self.module_dim();
        if a.nrows() != dim || a.ncols() != dim {
            return false;
        }
        if c.nrows() != self.center_dim() || c.ncols() != self.center_dim() {
            return false;
        }
        let cols: Vec<Vec<Rat>> = (0..dim)
            .map(|j| (0..dim).map(|i| a.get(i, j).clone()).collect())
            .collect();
        for i in 0..dim {
            for j in i + 1..dim {
                let lhs = self.bracket(&cols[i], &cols[j]);
                let rhs = c.apply(&self.bracket_basis(i, j));
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }
}

/// Which engine computes the symmetry dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMode {
    /// Exact below 64 module dimensions, modular from there on.
    Auto,
    Exact,
    Modular,
}

/// Result of a symmetry dimension computation, with enough detail to
/// reproduce it.
#[derive(Debug, Clone, Serialize)]
pub struct SolverReport {
    pub dimension: u64,
    pub engine: String,
    pub primes: Vec<u64>,
}

/// Dimension of {a : adj(a) J_z + J_z a = 0 for all z}, the Lie algebra of
/// the symmetry group acting trivially on the center.
pub fn aut0_dimension(
    rep: &Representation,
    mode: SolverMode,
    seed: u64,
) -> Result<SolverReport, HtypeError> {
    let exact = match mode {
        SolverMode::Exact => true,
        SolverMode::Modular => false,
        SolverMode::Auto => rep.dim() < 64,
    };
    if exact {
        Ok(SolverReport {
            dimension: aut0_exact(rep),
            engine: "exact".into(),
            primes: Vec::new(),
        })
    } else {
        let (dimension, primes) = aut0_modular(rep, seed)?;
        Ok(SolverReport {
            dimension,
            engine: "modular".into(),
            primes,
        })
    }
}

/// The equation indexed by (k, i, j) couples the entries u1, u2 of the
/// unknown matrix with coefficients c1, c2:
///   c1 a[t_k(j), i] + c2 a[inv_t_k(i), j] = 0.
fn equation_terms(
    gen: &SignedPerm,
    inv: &SignedPerm,
    eta: &[i8],
    dim: usize,
    i: usize,
    j: usize,
) -> ((usize, i64), (usize, i64)) {
    let tj = gen.target(j);
    let c1 = eta[i] as i64 * eta[tj] as i64 * gen.sign(j) as i64;
    let u1 = tj * dim + i;
    let ti = inv.target(i);
    let c2 = gen.sign(ti) as i64;
    let u2 = ti * dim + j;
    ((u1, c1), (u2, c2))
}

fn aut0_exact(rep: &Representation) -> u64 {
    let dim = rep.dim();
    let eta = rep.eta();
    let mut uf = SignedUnionFind::new(dim * dim);
    for k in 0..rep.signature().dim() as usize {
        let gen = rep.generator(k);
        let inv = gen.inverse();
        for i in 0..dim {
            for j in 0..dim {
                let ((u1, c1), (u2, c2)) = equation_terms(gen, &inv, eta, dim, i, j);
                if u1 == u2 {
                    if c1 + c2 != 0 {
                        uf.kill(u1);
                    }
                } else {
                    uf.relate(u1, u2, (-c1 * c2) as i8);
                }
            }
        }
    }
    uf.live_classes() as u64
}

fn aut0_modular(rep: &Representation, seed: u64) -> Result<(u64, Vec<u64>), HtypeError> {
    let dim = rep.dim();
    let eta = rep.eta();
    let unknowns = dim * dim;
    let mut rows: Vec<Vec<(u32, i64)>> = Vec::new();
    for k in 0..rep.signature().dim() as usize {
        let gen = rep.generator(k);
        let inv = gen.inverse();
        for i in 0..dim {
            for j in 0..dim {
                let ((u1, c1), (u2, c2)) = equation_terms(gen, &inv, eta, dim, i, j);
                if u1 == u2 {
                    if c1 + c2 != 0 {
                        rows.push(vec![(u1 as u32, 1)]);
                    }
                } else {
                    rows.push(vec![(u1 as u32, c1), (u2 as u32, c2)]);
                }
            }
        }
    }
    let primes = random_primes(seed, 2);
    let ranks: Vec<usize> = primes
        .iter()
        .map(|&p| sparse_rank_mod_p(&rows, p))
        .collect();
    // A prime can only underestimate the rank, so the larger value wins.
    let rank = *ranks.iter().max().unwrap();
    if rank > unknowns {
        return Err(HtypeError::Solver(
            "modular rank exceeds the number of unknowns".into(),
        ));
    }
    Ok(((unknowns - rank) as u64, primes))
}

fn random_primes(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let c = rng.gen_range((1u64 << 30)..(1u64 << 31)) | 1;
        if is_prime_u64(c) && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Random elements of the solution space, for round-trip testing.  The
/// union-find classes parametrize solutions: pick a value per live class
/// and spread it with the recorded signs.
pub fn sample_aut0_solutions(rep: &Representation, count: usize, seed: u64) -> Vec<RMat> {
    let dim = rep.dim();
    let eta = rep.eta();
    let mut uf = SignedUnionFind::new(dim * dim);
    for k in 0..rep.signature().dim() as usize {
        let gen = rep.generator(k);
        let inv = gen.inverse();
        for i in 0..dim {
            for j in 0..dim {
                let ((u1, c1), (u2, c2)) = equation_terms(gen, &inv, eta, dim, i, j);
                if u1 == u2 {
                    if c1 + c2 != 0 {
                        uf.kill(u1);
                    }
                } else {
                    uf.relate(u1, u2, (-c1 * c2) as i8);
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut values = vec![0i64; dim * dim];
        for e in 0..dim * dim {
            let (root, _) = uf.find(e);
            if root == e && !uf.is_killed(e) {
                values[e] = rng.gen_range(-9i64..=9);
            }
        }
        let mut a = RMat::zero(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let e = i * dim + j;
                let (root, sign) = uf.find(e);
                if !uf.is_killed(e) && values[root] != 0 {
                    a.set(i, j, rat(sign as i64 * values[root]));
                }
            }
        }
        out.push(a);
    }
    out
}

/// Check adj(a) J_k + J_k a = 0 for every generator, with adj the adjoint
/// for the module scalar product.
pub fn is_aut0_element(rep: &Representation, a: &RMat) -> bool {
    let adj = RMat::diagonal_i8(rep.eta())
        .mul(&a.transpose())
        .mul(&RMat::diagonal_i8(rep.eta()));
    for k in 0..rep.signature().dim() as usize {
        let jk = rep.generator(k).to_rational();
        if !adj.mul(&jk).add(&jk.mul(a)).is_zero() {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build;
    use crate::involution;
    use crate::rep::ModuleSpec;

    /// Slow reference: assemble the dense linear system and count its
    /// rational nullspace.
    fn dense_solution_dimension(rep: &Representation) -> usize {
        let dim = rep.dim();
        let eta = rep.eta();
        let mut rows = Vec::new();
        for k in 0..rep.signature().dim() as usize {
            let gen = rep.generator(k);
            let inv = gen.inverse();
            for i in 0..dim {
                for j in 0..dim {
                    let ((u1, c1), (u2, c2)) = equation_terms(gen, &inv, eta, dim, i, j);
                    let mut row = vec![rat(0); dim * dim];
                    row[u1] += rat(c1);
                    row[u2] += rat(c2);
                    rows.push(row);
                }
            }
        }
        RMat::from_rows(rows).nullspace().len()
    }

    fn exact_dim(r: u32, s: u32) -> u64 {
        let rep = build::canonical_minimal(r, s).unwrap();
        aut0_dimension(&rep, SolverMode::Exact, 7).unwrap().dimension
    }

    #[test]
    fn union_find_agrees_with_dense_nullspace() {
        for (r, s) in [(1u32, 0u32), (0, 1), (2, 0), (1, 1)] {
            let rep = build::canonical_minimal(r, s).unwrap();
            let fast = aut0_dimension(&rep, SolverMode::Exact, 0).unwrap();
            assert_eq!(
                fast.dimension as usize,
                dense_solution_dimension(&rep),
                "at ({r}, {s})"
            );
        }
    }

    #[test]
    fn symmetry_dimensions_at_reference_cells() {
        assert_eq!(exact_dim(1, 0), 3);
        assert_eq!(exact_dim(0, 1), 3);
        assert_eq!(exact_dim(2, 0), 6);
        assert_eq!(exact_dim(1, 1), 6);
        assert_eq!(exact_dim(0, 2), 6);
        assert_eq!(exact_dim(3, 0), 3);
        assert_eq!(exact_dim(8, 0), 1);
        assert_eq!(exact_dim(7, 0), 0);
        assert_eq!(exact_dim(0, 3), 10);
    }

    #[test]
    fn modular_engine_agrees_with_exact() {
        for (r, s) in [(0u32, 3u32), (4, 0), (5, 1)] {
            let rep = build::canonical_minimal(r, s).unwrap();
            let a = aut0_dimension(&rep, SolverMode::Exact, 11).unwrap();
            let b = aut0_dimension(&rep, SolverMode::Modular, 11).unwrap();
            assert_eq!(a.dimension, b.dimension, "at ({r}, {s})");
            assert_eq!(b.primes.len(), 2);
        }
    }

    #[test]
    fn multiplicity_grows_the_group() {
        // two copies of the smallest module: Sp(4, R) has dimension 10
        let rep = build::assemble(1, 0, ModuleSpec::new(2, 0).unwrap()).unwrap();
        let report = aut0_dimension(&rep, SolverMode::Exact, 0).unwrap();
        assert_eq!(report.dimension, 10);
    }

    #[test]
    fn bracket_is_antisymmetric_and_surjective() {
        let rep = build::canonical_minimal(2, 1).unwrap();
        let alg = HTypeAlgebra::new(rep);
        let x: Vec<Rat> = (0..alg.module_dim()).map(|i| rat(i as i64 + 1)).collect();
        let y: Vec<Rat> = (0..alg.module_dim())
            .map(|i| rat(2 * i as i64 - 3))
            .collect();
        let xy = alg.bracket(&x, &y);
        let yx = alg.bracket(&y, &x);
        for (a, b) in xy.iter().zip(&yx) {
            assert_eq!(*a, -b.clone());
        }
        assert!(alg.brackets_span_center());
    }

    #[test]
    fn dilation_is_an_automorphism_pair() {
        let rep = build::canonical_minimal(1, 1).unwrap();
        let alg = HTypeAlgebra::new(rep);
        let a = RMat::identity(alg.module_dim()).scale(&rat(3));
        let c = RMat::identity(alg.center_dim()).scale(&rat(9));
        assert!(alg.is_automorphism_pair(&a, &c));
        let c_wrong = RMat::identity(alg.center_dim()).scale(&rat(3));
        assert!(!alg.is_automorphism_pair(&a, &c_wrong));
    }

    #[test]
    fn sampled_solutions_solve_the_equations_and_round_trip() {
        let rep = build::canonical_minimal(4, 0).unwrap();
        let frame = involution::eigenspace_frame(&rep).unwrap();
        for a in sample_aut0_solutions(&rep, 10, 20260815) {
            assert!(is_aut0_element(&rep, &a));
            let back = frame.extend(&frame.restrict(&a));
            assert!(back == a);
        }
    }
}
