//! Expected symmetry groups, cell by cell, and the isomorphism test.
//!
//! For every base cell the catalog stores which classical group the symmetry
//! group reduces to, as a formula in the module multiplicities.  Cells
//! outside the base range are brought back by the same periodicity steps
//! that govern the module dimensions; those steps do not change the group.
//! The isomorphism test between two algebras of the family needs no linear
//! algebra at all, it is a residue computation on the signature plus a
//! comparison of multiplicities.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::rep::ModuleSpec;
use crate::{verify, HtypeError};

/// Classical group families occurring as symmetry groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupFamily {
    #[serde(rename = "gl_r")]
    GeneralLinearReal,
    #[serde(rename = "gl_h")]
    GeneralLinearQuaternion,
    #[serde(rename = "o")]
    Orthogonal,
    #[serde(rename = "o_c")]
    OrthogonalComplex,
    #[serde(rename = "o_star")]
    OrthogonalStar,
    #[serde(rename = "u")]
    Unitary,
    #[serde(rename = "sp_r")]
    SymplecticReal,
    #[serde(rename = "sp_c")]
    SymplecticComplex,
    #[serde(rename = "sp_h")]
    SymplecticQuaternion,
}

impl GroupFamily {
    /// Real dimension of the group with parameters (a, b).  The second
    /// parameter is only meaningful for the indefinite families and must be
    /// zero elsewhere.  Conventions: `SymplecticReal(a)` is Sp(2a, R),
    /// `SymplecticComplex(a)` is Sp(2a, C), `OrthogonalStar(a)` is O*(2a).
    pub fn real_dimension(self, a: u32, b: u32) -> u64 {
        let a = u64::from(a);
        let b = u64::from(b);
        match self {
            GroupFamily::GeneralLinearReal => a * a,
            GroupFamily::GeneralLinearQuaternion => 4 * a * a,
            GroupFamily::Orthogonal => {
                let n = a + b;
                n * n.saturating_sub(1) / 2
            }
            GroupFamily::OrthogonalComplex => a * a.saturating_sub(1),
            GroupFamily::OrthogonalStar => a * (2 * a).saturating_sub(1),
            GroupFamily::Unitary => {
                let n = a + b;
                n * n
            }
            GroupFamily::SymplecticReal => a * (2 * a + 1),
            GroupFamily::SymplecticComplex => 2 * a * (2 * a + 1),
            GroupFamily::SymplecticQuaternion => {
                let n = a + b;
                n * (2 * n + 1)
            }
        }
    }

    fn takes_two_params(self) -> bool {
        matches!(
            self,
            GroupFamily::Orthogonal | GroupFamily::Unitary | GroupFamily::SymplecticQuaternion
        )
    }
}

/// How the multiplicities (p, q) enter the group parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamRule {
    /// One parameter, scale * (p + q).  The two module classes, when they
    /// exist at all, give isomorphic algebras here.
    M,
    /// Both parameters equal to the multiplicity.  These cells have a single
    /// module class and a neutral restricted form, so q = 0 always.
    Mm,
    /// Parameters scale * p and scale * q, one per module class.
    Pq,
}

/// One stored cell: the group formula at a base signature.
#[derive(Debug, Clone, Deserialize)]
pub struct CatalogCell {
    pub r: u32,
    pub s: u32,
    pub family: GroupFamily,
    pub param: ParamRule,
    pub scale: u32,
    pub power: u32,
    /// Verbatim table text where it deviates from the formula, kept so the
    /// deviation stays visible in reports.
    #[serde(default)]
    pub printed: Option<String>,
}

#[derive(Debug, Deserialize)]
struct CatalogFile {
    version: u32,
    cells: Vec<CatalogCell>,
}

static CATALOG: OnceLock<HashMap<(u32, u32), CatalogCell>> = OnceLock::new();

fn catalog() -> &'static HashMap<(u32, u32), CatalogCell> {
    CATALOG.get_or_init(|| {
        let raw = include_str!("../data/group_catalog.json");
        let file: CatalogFile = serde_json::from_str(raw).expect("group catalog parses");
        assert_eq!(file.version, 1, "unexpected group catalog version");
        assert_eq!(file.cells.len(), 50, "group catalog covers the base cells");
        let mut map = HashMap::new();
        for cell in file.cells {
            assert!(cell.scale == 1 || cell.scale == 2);
            assert!(cell.power == 1 || cell.power == 2);
            if cell.param == ParamRule::Pq {
                assert!(cell.family.takes_two_params());
            }
            let prev = map.insert((cell.r, cell.s), cell);
            assert!(prev.is_none());
        }
        map
    })
}

/// The stored formula at a base cell, if (r, s) is one.
pub fn catalog_cell(r: u32, s: u32) -> Option<&'static CatalogCell> {
    catalog().get(&(r, s))
}

/// All base cells, row by row.
pub fn catalog_cells() -> Vec<&'static CatalogCell> {
    let mut cells: Vec<&'static CatalogCell> = catalog().values().collect();
    cells.sort_by_key(|c| (c.s, c.r));
    cells
}

/// Walk (r, s) back to a base cell.  Each step subtracts (8, 0), (0, 8) or
/// (4, 4), so both residues mod 4 survive and the group formula transfers.
pub fn base_cell(r: u32, s: u32) -> Result<(u32, u32), HtypeError> {
    if r + s == 0 {
        return Err(HtypeError::Catalog(
            "the signature needs at least one generator".into(),
        ));
    }
    let (mut r, mut s) = (r, s);
    while catalog_cell(r, s).is_none() {
        if r >= 8 {
            r -= 8;
        } else if s >= 8 {
            s -= 8;
        } else if r >= 4 && s >= 4 {
            r -= 4;
            s -= 4;
        } else {
            return Err(HtypeError::Catalog(format!(
                "no reduction step applies to ({r}, {s})"
            )));
        }
    }
    Ok((r, s))
}

/// Whether a second multiplicity can be realized at (r, s), either as the
/// other volume class or by reversing the scalar product.
pub fn mixed_spec_available(r: u32, s: u32) -> bool {
    verify::has_two_variants(r, s) || verify::e_form_definite(r, s)
}

fn check_spec(r: u32, s: u32, spec: ModuleSpec) -> Result<(), HtypeError> {
    if spec.p + spec.q == 0 {
        return Err(HtypeError::InvalidModule(
            "module must contain at least one minimal summand".into(),
        ));
    }
    if spec.q > 0 && !mixed_spec_available(r, s) {
        return Err(HtypeError::InvalidModule(format!(
            "cell ({r}, {s}) has a single module class, so q must be 0"
        )));
    }
    Ok(())
}

/// A resolved group: `power` copies of the family with parameters (a, b).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpectedGroup {
    pub family: GroupFamily,
    pub a: u32,
    pub b: u32,
    pub power: u32,
}

impl ExpectedGroup {
    pub fn dimension(&self) -> u64 {
        u64::from(self.power) * self.family.real_dimension(self.a, self.b)
    }
}

impl std::fmt::Display for ExpectedGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let one = match self.family {
            GroupFamily::GeneralLinearReal => format!("GL({},R)", self.a),
            GroupFamily::GeneralLinearQuaternion => format!("GL({},H)", self.a),
            GroupFamily::Orthogonal => format!("O({},{})", self.a, self.b),
            GroupFamily::OrthogonalComplex => format!("O({},C)", self.a),
            GroupFamily::OrthogonalStar => format!("O*({})", 2 * self.a),
            GroupFamily::Unitary => format!("U({},{})", self.a, self.b),
            GroupFamily::SymplecticReal => format!("Sp({},R)", 2 * self.a),
            GroupFamily::SymplecticComplex => format!("Sp({},C)", 2 * self.a),
            GroupFamily::SymplecticQuaternion => format!("Sp({},{})", self.a, self.b),
        };
        if self.power == 2 {
            write!(f, "{one} x {one}")
        } else {
            write!(f, "{one}")
        }
    }
}

/// The symmetry group predicted for the algebra built at (r, s) with the
/// given multiplicities.
pub fn expected_group(r: u32, s: u32, spec: ModuleSpec) -> Result<ExpectedGroup, HtypeError> {
    check_spec(r, s, spec)?;
    let (br, bs) = base_cell(r, s)?;
    let cell = catalog_cell(br, bs).expect("base_cell lands on a stored cell");
    let (a, b) = match cell.param {
        ParamRule::M => (cell.scale * (spec.p + spec.q), 0),
        ParamRule::Mm => (cell.scale * spec.p, cell.scale * spec.p),
        ParamRule::Pq => (cell.scale * spec.p, cell.scale * spec.q),
    };
    Ok(ExpectedGroup {
        family: cell.family,
        a,
        b,
        power: cell.power,
    })
}

/// The multiplicity pairs a sweep should exercise at (r, s): both pure
/// multiplicities, plus the mixed pair where a second class exists.
pub fn sweep_specs(r: u32, s: u32) -> Vec<ModuleSpec> {
    let mut specs = vec![ModuleSpec { p: 1, q: 0 }, ModuleSpec { p: 2, q: 0 }];
    if mixed_spec_available(r, s) {
        specs.push(ModuleSpec { p: 1, q: 1 });
    }
    specs
}

/// Outcome of the isomorphism test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IsoVerdict {
    Isomorphic,
    NotIsomorphic,
    /// Not isomorphic for the crudest of reasons, recorded separately.
    DimensionMismatch,
}

fn module_dimension(r: u32, s: u32, spec: ModuleSpec) -> Result<u64, HtypeError> {
    Ok(u64::from(verify::minimal_dimension(r, s)?) * u64::from(spec.p + spec.q))
}

fn same_multiset(u: ModuleSpec, v: ModuleSpec) -> bool {
    (u.p, u.q) == (v.p, v.q) || (u.p, u.q) == (v.q, v.p)
}

/// Isomorphism test for two algebras over the same signature.
///
/// For r = 0, 1, 2 mod 4 the module dimension decides.  For r = 3 mod 4 the
/// two class multiplicities are invariants, up to swapping the classes.
pub fn classify_same_signature(
    r: u32,
    s: u32,
    u: ModuleSpec,
    v: ModuleSpec,
) -> Result<IsoVerdict, HtypeError> {
    check_spec(r, s, u)?;
    check_spec(r, s, v)?;
    if module_dimension(r, s, u)? != module_dimension(r, s, v)? {
        return Ok(IsoVerdict::DimensionMismatch);
    }
    if r % 4 == 3 && !same_multiset(u, v) {
        return Ok(IsoVerdict::NotIsomorphic);
    }
    Ok(IsoVerdict::Isomorphic)
}

/// Isomorphism test between the algebra at (r, s) with multiplicities `u`
/// and the algebra at the swapped signature (s, r) with multiplicities `v`.
///
/// When neither index is 3 mod 4 the module dimension decides.  When both
/// are, matching residues mod 8 reduce the question to the same-signature
/// test and differing residues exclude an isomorphism.  In the mixed case
/// the residue pair either excludes an isomorphism outright or asks the
/// module on the 3 mod 4 side to weigh its two classes equally.
pub fn classify_swapped(
    r: u32,
    s: u32,
    u: ModuleSpec,
    v: ModuleSpec,
) -> Result<IsoVerdict, HtypeError> {
    if r == s {
        return classify_same_signature(r, s, u, v);
    }
    check_spec(r, s, u)?;
    check_spec(s, r, v)?;
    if module_dimension(r, s, u)? != module_dimension(s, r, v)? {
        return Ok(IsoVerdict::DimensionMismatch);
    }
    let (r4, s4) = (r % 4, s % 4);
    if r4 != 3 && s4 != 3 {
        return Ok(IsoVerdict::Isomorphic);
    }
    if r4 == 3 && s4 == 3 {
        if r % 8 == s % 8 {
            // Peeling off periods turns this into a same-signature pair, so
            // the class multiplicities decide, up to the swap.
            return Ok(if same_multiset(u, v) {
                IsoVerdict::Isomorphic
            } else {
                IsoVerdict::NotIsomorphic
            });
        }
        return Ok(IsoVerdict::NotIsomorphic);
    }
    let (mut a8, mut b8, split) = if r4 == 3 { (r % 8, s % 8, u) } else { (s % 8, r % 8, v) };
    if a8 == 7 && (4..=6).contains(&b8) {
        // Subtracting the (4, 4) period from both signatures lands in the
        // residue pairs below without touching the multiplicities.
        a8 = 3;
        b8 -= 4;
    }
    let balanced_suffices = match (a8, b8) {
        (3, 0) | (3, 4) | (3, 5) | (3, 6) | (7, 0) | (7, 1) | (7, 2) => true,
        (3, 1) | (3, 2) | (3, 7) => false,
        _ => unreachable!("one residue is 3 mod 4 and the other is not"),
    };
    Ok(if balanced_suffices && split.p == split.q {
        IsoVerdict::Isomorphic
    } else {
        IsoVerdict::NotIsomorphic
    })
}

/// Isomorphism test between arbitrary signatures.  Signatures that are
/// neither equal nor swaps of each other never give isomorphic algebras.
pub fn classify(
    r1: u32,
    s1: u32,
    u: ModuleSpec,
    r2: u32,
    s2: u32,
    v: ModuleSpec,
) -> Result<IsoVerdict, HtypeError> {
    if (r1, s1) == (r2, s2) {
        classify_same_signature(r1, s1, u, v)
    } else if (r1, s1) == (s2, r2) {
        classify_swapped(r1, s1, u, v)
    } else {
        check_spec(r1, s1, u)?;
        check_spec(r2, s2, v)?;
        Ok(IsoVerdict::NotIsomorphic)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, RMat};

    fn spec(p: u32, q: u32) -> ModuleSpec {
        ModuleSpec { p, q }
    }

    /// Nullity of X -> X^T G + G X over the reals, as a reference for the
    /// dimension formulas of the orthogonal and symplectic families.
    fn pair_condition_nullity(g: &RMat) -> usize {
        let n = g.nrows();
        let mut rows = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let mut row = vec![rat(0); n * n];
                for k in 0..n {
                    // (X^T G)[a][b] collects X[k][a] G[k][b].
                    row[k * n + a] += g.get(k, b).clone();
                    // (G X)[a][b] collects G[a][k] X[k][b].
                    row[k * n + b] += g.get(a, k).clone();
                }
                rows.push(row);
            }
        }
        let system = RMat::from_rows(rows);
        n * n - system.rank()
    }

    #[test]
    fn dimension_formulas_match_small_nullity_oracles() {
        // sp(2, R): X^T J + J X = 0 for the standard symplectic form.
        let j = RMat::from_i64_rows(&[vec![0, 1], vec![-1, 0]]);
        assert_eq!(
            pair_condition_nullity(&j) as u64,
            GroupFamily::SymplecticReal.real_dimension(1, 0)
        );

        // o(2, 1): X^T G + G X = 0 for an indefinite symmetric form.
        let g = RMat::diagonal_i8(&[1, 1, -1]);
        assert_eq!(
            pair_condition_nullity(&g) as u64,
            GroupFamily::Orthogonal.real_dimension(2, 1)
        );

        // sp(2, C) realified: X + iY with both parts in sp(2, R).
        assert_eq!(
            2 * pair_condition_nullity(&j) as u64,
            GroupFamily::SymplecticComplex.real_dimension(1, 0)
        );

        // u(1, 1) realified on R^4: commutes with the complex structure and
        // is skew for the indefinite Hermitian form, whose real part is
        // diag(1, 1, -1, -1).
        let h = RMat::diagonal_i8(&[1, 1, -1, -1]);
        let i_mat = RMat::from_i64_rows(&[
            vec![0, -1, 0, 0],
            vec![1, 0, 0, 0],
            vec![0, 0, 0, -1],
            vec![0, 0, 1, 0],
        ]);
        let n = 4;
        let mut rows = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let mut skew = vec![rat(0); n * n];
                let mut comm = vec![rat(0); n * n];
                for k in 0..n {
                    skew[k * n + a] += h.get(k, b).clone();
                    skew[k * n + b] += h.get(a, k).clone();
                    comm[a * n + k] += i_mat.get(k, b).clone();
                    comm[k * n + b] -= i_mat.get(a, k).clone();
                }
                rows.push(skew);
                rows.push(comm);
            }
        }
        let system = RMat::from_rows(rows);
        assert_eq!(
            (n * n - system.rank()) as u64,
            GroupFamily::Unitary.real_dimension(1, 1)
        );
    }

    #[test]
    fn resolved_groups_match_frozen_symmetry_dimensions() {
        let checks: Vec<(u32, u32, ModuleSpec, u64, &str)> = vec![
            (1, 0, spec(1, 0), 3, "Sp(2,R)"),
            (0, 1, spec(1, 0), 3, "Sp(2,R)"),
            (2, 0, spec(1, 0), 6, "Sp(2,C)"),
            (1, 1, spec(1, 0), 6, "Sp(2,R) x Sp(2,R)"),
            (0, 2, spec(1, 0), 6, "Sp(2,C)"),
            (3, 0, spec(1, 0), 3, "Sp(1,0)"),
            (0, 3, spec(1, 0), 10, "Sp(1,1)"),
            (7, 0, spec(1, 0), 0, "O(1,0)"),
            (8, 0, spec(1, 0), 1, "GL(1,R)"),
            (1, 0, spec(2, 0), 10, "Sp(4,R)"),
        ];
        for (r, s, m, dim, text) in checks {
            let group = expected_group(r, s, m).unwrap();
            assert_eq!(group.dimension(), dim, "dimension at ({r}, {s}) {m}");
            assert_eq!(group.to_string(), text, "display at ({r}, {s}) {m}");
        }
    }

    #[test]
    fn printed_table_text_deviates_only_at_one_cell() {
        let mut printed = Vec::new();
        for cell in catalog_cells() {
            if cell.printed.is_some() {
                printed.push((cell.r, cell.s));
            }
        }
        assert_eq!(printed, vec![(0, 2)]);
        let cell = catalog_cell(0, 2).unwrap();
        assert_eq!(cell.printed.as_deref(), Some("Sp(2,C)"));
        // At multiplicity 1 the printed text agrees with the formula, from
        // multiplicity 2 on it no longer does, so it is kept as an annotation
        // rather than as the truth.
        assert_eq!(expected_group(0, 2, spec(1, 0)).unwrap().to_string(), "Sp(2,C)");
        assert_ne!(expected_group(0, 2, spec(2, 0)).unwrap().to_string(), "Sp(2,C)");
    }

    #[test]
    fn every_signature_reduces_to_a_base_cell() {
        for r in 0..=12u32 {
            for s in 0..=12u32 {
                if r + s == 0 {
                    continue;
                }
                let (br, bs) = base_cell(r, s).unwrap();
                assert!(catalog_cell(br, bs).is_some(), "({r}, {s}) -> ({br}, {bs})");
                assert_eq!(br % 4, r % 4, "first residue survives at ({r}, {s})");
                assert_eq!(bs % 4, s % 4, "second residue survives at ({r}, {s})");
            }
        }
        assert!(base_cell(0, 0).is_err());
    }

    #[test]
    fn same_signature_verdicts() {
        // Where only the dimension matters, mixed and pure specs agree.
        assert_eq!(
            classify_same_signature(5, 0, spec(2, 0), spec(1, 1)).unwrap(),
            IsoVerdict::Isomorphic
        );
        assert_eq!(
            classify_same_signature(1, 0, spec(1, 0), spec(2, 0)).unwrap(),
            IsoVerdict::DimensionMismatch
        );
        // At r = 3 mod 4 the pair of multiplicities decides, up to swap.
        assert_eq!(
            classify_same_signature(3, 0, spec(2, 0), spec(1, 1)).unwrap(),
            IsoVerdict::NotIsomorphic
        );
        assert_eq!(
            classify_same_signature(3, 0, spec(1, 2), spec(2, 1)).unwrap(),
            IsoVerdict::Isomorphic
        );
        assert_eq!(
            classify_same_signature(7, 0, spec(3, 1), spec(1, 3)).unwrap(),
            IsoVerdict::Isomorphic
        );
    }

    #[test]
    fn swapped_signature_verdicts() {
        use IsoVerdict::*;

        // Both indices 0, 1 or 2 mod 4: dimension decides.
        assert_eq!(classify_swapped(1, 0, spec(1, 0), spec(1, 0)).unwrap(), Isomorphic);
        assert_eq!(classify_swapped(4, 1, spec(1, 0), spec(2, 0)).unwrap(), Isomorphic);
        assert_eq!(classify_swapped(4, 1, spec(1, 0), spec(1, 0)).unwrap(), DimensionMismatch);

        // One index 3 mod 4, balanced multiplicities required and sufficient.
        assert_eq!(classify_swapped(3, 0, spec(1, 1), spec(1, 0)).unwrap(), Isomorphic);
        assert_eq!(classify_swapped(3, 0, spec(2, 0), spec(1, 0)).unwrap(), NotIsomorphic);
        assert_eq!(classify_swapped(3, 0, spec(1, 0), spec(1, 0)).unwrap(), DimensionMismatch);
        assert_eq!(classify_swapped(7, 1, spec(1, 1), spec(1, 0)).unwrap(), Isomorphic);
        assert_eq!(classify_swapped(0, 7, spec(1, 0), spec(1, 1)).unwrap(), Isomorphic);

        // One index 3 mod 4 in a residue pair that excludes isomorphisms.
        assert_eq!(classify_swapped(3, 1, spec(1, 0), spec(1, 0)).unwrap(), NotIsomorphic);
        assert_eq!(classify_swapped(3, 1, spec(1, 1), spec(2, 0)).unwrap(), NotIsomorphic);
        assert_eq!(classify_swapped(2, 3, spec(1, 0), spec(1, 0)).unwrap(), NotIsomorphic);

        // Both indices 3 mod 4 with different residues mod 8: never.
        assert_eq!(classify_swapped(7, 3, spec(1, 1), spec(1, 1)).unwrap(), NotIsomorphic);
        // Matching residues mod 8 fall back to the multiplicity pair.
        assert_eq!(classify_swapped(3, 3, spec(1, 2), spec(2, 1)).unwrap(), Isomorphic);
        assert_eq!(classify_swapped(3, 3, spec(3, 0), spec(2, 1)).unwrap(), NotIsomorphic);

        // Beyond the base range: (7, 4) behaves like (3, 0) and (7, 5) like
        // (3, 1), after one (4, 4) period.
        assert_eq!(classify_swapped(7, 4, spec(1, 1), spec(1, 0)).unwrap(), Isomorphic);
        assert_eq!(classify_swapped(7, 4, spec(2, 0), spec(1, 0)).unwrap(), NotIsomorphic);
        assert_eq!(classify_swapped(7, 5, spec(1, 1), spec(2, 0)).unwrap(), NotIsomorphic);
    }

    #[test]
    fn distinct_signatures_never_give_isomorphic_algebras() {
        assert_eq!(
            classify(2, 0, spec(1, 0), 1, 1, spec(1, 0)).unwrap(),
            IsoVerdict::NotIsomorphic
        );
        assert_eq!(
            classify(1, 0, spec(1, 0), 1, 0, spec(1, 0)).unwrap(),
            IsoVerdict::Isomorphic
        );
        assert_eq!(
            classify(1, 7, spec(1, 0), 7, 1, spec(1, 1)).unwrap(),
            IsoVerdict::Isomorphic
        );
    }

    #[test]
    fn mixed_specs_are_rejected_where_only_one_class_exists() {
        assert!(expected_group(2, 1, spec(1, 1)).is_err());
        assert!(expected_group(0, 3, spec(1, 1)).is_err());
        assert!(expected_group(1, 2, spec(1, 1)).is_ok());
        assert!(expected_group(3, 1, spec(1, 1)).is_ok());
        assert!(classify_swapped(0, 3, spec(1, 1), spec(1, 0)).is_err());
    }
}
