//! Randomized invariants of the module and algebra layers.  The unit tests
//! pin exact values at reference cells; here the claims that should hold
//! everywhere get thrown at arbitrary inputs: signed permutation
//! arithmetic against dense matrices, structural contracts of assembled
//! sums, basis independence of the symmetry dimension, and agreement of
//! the two rank engines.

use htype_core::algebra::{aut0_dimension, HTypeAlgebra, SolverMode};
use htype_core::build::{canonical_minimal, module_for_spec, periodic_extension};
use htype_core::linalg::{rat, Rat, SignedPerm};
use htype_core::rep::{ModuleSpec, Representation};
use htype_core::verify;
use proptest::prelude::*;

/// Small cells kept cheap enough for exact solves inside a proptest loop.
const CELLS: &[(u32, u32)] = &[
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
    (4, 0),
    (2, 2),
    (1, 3),
    (0, 4),
    (5, 0),
    (0, 5),
    (1, 4),
];

fn arb_cell() -> impl Strategy<Value = (u32, u32)> {
    prop::sample::select(CELLS)
}

fn arb_signed_perm(n: usize) -> impl Strategy<Value = SignedPerm> {
    let targets = Just((0..n as u32).collect::<Vec<_>>()).prop_shuffle();
    let signs = prop::collection::vec(prop::sample::select(vec![1i8, -1]), n);
    (targets, signs).prop_map(|(t, s)| SignedPerm::new(t, s))
}

fn dense_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// The same module in a shuffled, resigned basis: J -> W J W^-1 together
/// with the transported scalar product.
fn change_basis(rep: &Representation, w: &SignedPerm) -> Representation {
    let winv = w.inverse();
    let gens: Vec<SignedPerm> = rep
        .generators()
        .iter()
        .map(|j| w.compose(j).compose(&winv))
        .collect();
    let mut eta = vec![0i8; rep.dim()];
    for i in 0..rep.dim() {
        eta[w.target(i)] = rep.eta()[i];
    }
    Representation::new(rep.signature(), eta, gens, rep.variant(), rep.eplus())
        .expect("a permuted basis preserves every structural relation")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn signed_permutations_mirror_dense_matrix_algebra(
        (a, b) in (2usize..=16).prop_flat_map(|n| (arb_signed_perm(n), arb_signed_perm(n))),
    ) {
        prop_assert_eq!(a.compose(&b).to_dense(), dense_mul(&a.to_dense(), &b.to_dense()));
        prop_assert_eq!(a.compose(&a.inverse()).as_scalar(), Some(1));
        prop_assert_eq!(SignedPerm::from_dense(&a.to_dense()), Some(a.clone()));
    }

    #[test]
    fn kronecker_products_compose_factor_by_factor(
        (a, c) in (2usize..=6).prop_flat_map(|n| (arb_signed_perm(n), arb_signed_perm(n))),
        (b, d) in (2usize..=6).prop_flat_map(|n| (arb_signed_perm(n), arb_signed_perm(n))),
    ) {
        prop_assert_eq!(
            a.kron(&b).compose(&c.kron(&d)),
            a.compose(&c).kron(&b.compose(&d))
        );
    }

    #[test]
    fn assembled_sums_satisfy_the_structural_contract(
        (r, s) in arb_cell(),
        p in 1u32..=3,
        q_raw in 0u32..=2,
    ) {
        let second_class = verify::has_two_variants(r, s) || verify::e_form_definite(r, s);
        let q = if second_class { q_raw } else { 0 };
        let spec = ModuleSpec::new(p, q).unwrap();
        let rep = module_for_spec(r, s, spec).unwrap();
        prop_assert!(rep.verify().is_ok());
        let minimal = verify::minimal_dimension(r, s).unwrap();
        prop_assert_eq!(rep.dim() as u32, spec.total() * minimal);
        if s > 0 {
            let (pos, neg) = rep.module_signature();
            prop_assert_eq!(pos, neg);
        }
    }

    #[test]
    fn symmetry_dimension_ignores_the_basis(
        (rep, w) in arb_cell().prop_flat_map(|(r, s)| {
            let rep = canonical_minimal(r, s).unwrap();
            let n = rep.dim();
            (Just(rep), arb_signed_perm(n))
        }),
    ) {
        let reference = aut0_dimension(&rep, SolverMode::Exact, 0).unwrap().dimension;
        let moved = change_basis(&rep, &w);
        let dim = aut0_dimension(&moved, SolverMode::Exact, 0).unwrap().dimension;
        prop_assert_eq!(dim, reference);
    }

    #[test]
    fn symmetry_dimension_ignores_the_sign_of_the_scalar_product(
        (r, s) in arb_cell(),
    ) {
        let rep = canonical_minimal(r, s).unwrap();
        let flipped = Representation::new(
            rep.signature(),
            rep.eta().iter().map(|&e| -e).collect(),
            rep.generators().to_vec(),
            rep.variant(),
            rep.eplus(),
        )
        .unwrap();
        let a = aut0_dimension(&rep, SolverMode::Exact, 0).unwrap().dimension;
        let b = aut0_dimension(&flipped, SolverMode::Exact, 0).unwrap().dimension;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn rank_engines_agree(
        (r, s) in arb_cell(),
        seed in any::<u64>(),
    ) {
        let rep = canonical_minimal(r, s).unwrap();
        let exact = aut0_dimension(&rep, SolverMode::Exact, 0).unwrap();
        let modular = aut0_dimension(&rep, SolverMode::Modular, seed).unwrap();
        prop_assert_eq!(exact.dimension, modular.dimension);
        prop_assert_eq!(modular.primes.len(), 2);
    }

    #[test]
    fn periodic_extension_scales_the_module_sixteenfold(
        (r, s) in prop::sample::select(&[(1u32, 0u32), (0, 1), (1, 1), (2, 0), (0, 2), (2, 1)][..]),
        (pr, ps) in prop::sample::select(&[(8u32, 0u32), (0, 8), (4, 4)][..]),
    ) {
        let base = canonical_minimal(r, s).unwrap();
        let ext = periodic_extension(&base, pr, ps).unwrap();
        prop_assert!(ext.verify().is_ok());
        prop_assert_eq!(ext.dim(), 16 * base.dim());
        prop_assert_eq!(ext.signature().r(), r + pr);
        prop_assert_eq!(ext.signature().s(), s + ps);
    }

    #[test]
    fn brackets_are_antisymmetric_and_linear(
        (cell, x, y, c) in arb_cell().prop_flat_map(|(r, s)| {
            let n = canonical_minimal(r, s).unwrap().dim();
            let coord = prop::collection::vec(-4i64..=4, n);
            (Just((r, s)), coord.clone(), coord, -3i64..=3)
        }),
    ) {
        let alg = HTypeAlgebra::new(canonical_minimal(cell.0, cell.1).unwrap());
        let xr: Vec<Rat> = x.iter().map(|&v| rat(v)).collect();
        let yr: Vec<Rat> = y.iter().map(|&v| rat(v)).collect();
        let xy = alg.bracket(&xr, &yr);
        let yx = alg.bracket(&yr, &xr);
        prop_assert_eq!(xy.len(), alg.center_dim());
        for (u, v) in xy.iter().zip(&yx) {
            prop_assert_eq!(u.clone(), -v.clone());
        }
        // scaling the first argument scales the bracket
        let scaled: Vec<Rat> = xr.iter().map(|v| v * rat(c)).collect();
        let got = alg.bracket(&scaled, &yr);
        for (u, v) in got.iter().zip(&xy) {
            prop_assert_eq!(u.clone(), v * rat(c));
        }
    }
}
