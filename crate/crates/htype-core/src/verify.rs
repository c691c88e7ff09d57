//! Reference data for minimal module dimensions and per-cell flags.
//!
//! The table covers 0 <= r, s <= 8.  Outside that range entries are derived
//! through the periodicity reductions (r-8, s), (r, s-8) and (r-4, s-4),
//! which multiply the minimal dimension by 16.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::Deserialize;

use crate::HtypeError;

/// One cell of the reference table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub struct TableEntry {
    pub r: u32,
    pub s: u32,
    /// Dimension of a minimal admissible module.
    pub dim: u32,
    /// Minimal admissible module is two copies of the irreducible one.
    pub doubled: bool,
    /// Two inequivalent minimal modules, told apart by the volume action.
    pub two_variants: bool,
    /// Restricted form class on the common eigenspace: "definite" or "neutral".
    pub e_form: EFormClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EFormClass {
    Definite,
    Neutral,
}

#[derive(Debug, Deserialize)]
struct TableFile {
    version: u32,
    cells: Vec<TableEntry>,
}

static TABLE: OnceLock<HashMap<(u32, u32), TableEntry>> = OnceLock::new();

fn table() -> &'static HashMap<(u32, u32), TableEntry> {
    TABLE.get_or_init(|| {
        let raw = include_str!("../data/dimension_table.json");
        let file: TableFile = serde_json::from_str(raw).expect("dimension table parses");
        assert_eq!(file.version, 1, "unexpected dimension table version");
        assert_eq!(file.cells.len(), 81, "dimension table covers a 9x9 grid");
        let mut map = HashMap::new();
        for cell in file.cells {
            assert!(cell.dim.is_power_of_two());
            let prev = map.insert((cell.r, cell.s), cell);
            assert!(prev.is_none(), "duplicate cell ({}, {})", cell.r, cell.s);
        }
        map
    })
}

/// Table lookup for 0 <= r, s <= 8.  `None` outside the stored grid.
pub fn table_entry(r: u32, s: u32) -> Option<TableEntry> {
    table().get(&(r, s)).copied()
}

/// All stored cells with r + s >= 1, row by row.
pub fn table_cells() -> Vec<TableEntry> {
    let mut cells: Vec<TableEntry> = table().values().copied().collect();
    cells.sort_by_key(|c| (c.s, c.r));
    cells.retain(|c| c.r + c.s >= 1);
    cells
}

/// Dimension of a minimal admissible module for arbitrary (r, s).
pub fn minimal_dimension(r: u32, s: u32) -> Result<u32, HtypeError> {
    if r + s == 0 {
        return Err(HtypeError::InvalidSignature(
            "need at least one generator".into(),
        ));
    }
    if let Some(entry) = table_entry(r, s) {
        return Ok(entry.dim);
    }
    let (br, bs) = reduction_step(r, s).ok_or_else(|| {
        HtypeError::InvalidSignature(format!("no reduction applies to ({r}, {s})"))
    })?;
    let base = minimal_dimension(br, bs)?;
    base.checked_mul(16)
        .ok_or_else(|| HtypeError::InvalidSignature(format!("dimension overflow at ({r}, {s})")))
}

/// Number of commuting involutions cutting the minimal module, from the
/// identity dim = 2^(r + s - p).
pub fn involution_count(r: u32, s: u32) -> Result<u32, HtypeError> {
    let dim = minimal_dimension(r, s)?;
    let log = dim.trailing_zeros();
    Ok(r + s - log)
}

/// Whether (r, s) admits two minimal modules distinguished by the volume.
pub fn has_two_variants(r: u32, s: u32) -> bool {
    (r + 4 - (s % 4)) % 4 == 3 && s % 2 == 0
}

/// Whether the restricted form on the common eigenspace is definite.
pub fn e_form_definite(r: u32, s: u32) -> bool {
    r % 4 == 3 || s % 4 == 0
}

/// One periodicity step toward the stored grid, if any applies.
pub fn reduction_step(r: u32, s: u32) -> Option<(u32, u32)> {
    if r <= 8 && s <= 8 {
        None
    } else if r > 8 {
        Some((r - 8, s))
    } else if s > 8 {
        Some((r, s - 8))
    } else {
        unreachable!()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_flags_follow_residue_rules() {
        for cell in table_cells() {
            assert_eq!(
                cell.two_variants,
                has_two_variants(cell.r, cell.s),
                "variant flag at ({}, {})",
                cell.r,
                cell.s
            );
            assert_eq!(
                cell.e_form == EFormClass::Definite,
                e_form_definite(cell.r, cell.s),
                "form class at ({}, {})",
                cell.r,
                cell.s
            );
        }
    }

    #[test]
    fn periodicity_multiplies_dimension_by_sixteen() {
        for s in 0..=8u32 {
            for r in 0..=8u32 {
                if r + s == 0 {
                    continue;
                }
                let base = table_entry(r, s).unwrap().dim;
                if r + 4 <= 8 && s + 4 <= 8 {
                    assert_eq!(table_entry(r + 4, s + 4).unwrap().dim, 16 * base);
                }
                assert_eq!(minimal_dimension(r + 8, s).unwrap(), 16 * base);
                assert_eq!(minimal_dimension(r, s + 8).unwrap(), 16 * base);
            }
        }
    }

    #[test]
    fn known_small_dimensions() {
        assert_eq!(minimal_dimension(1, 0).unwrap(), 2);
        assert_eq!(minimal_dimension(0, 1).unwrap(), 2);
        assert_eq!(minimal_dimension(3, 0).unwrap(), 4);
        assert_eq!(minimal_dimension(7, 0).unwrap(), 8);
        assert_eq!(minimal_dimension(8, 0).unwrap(), 16);
        assert_eq!(minimal_dimension(0, 7).unwrap(), 16);
        assert_eq!(minimal_dimension(9, 0).unwrap(), 32);
        assert_eq!(minimal_dimension(16, 0).unwrap(), 256);
    }

    #[test]
    fn involution_counts_match_known_cells() {
        assert_eq!(involution_count(1, 0).unwrap(), 0);
        assert_eq!(involution_count(1, 1).unwrap(), 0);
        assert_eq!(involution_count(3, 0).unwrap(), 1);
        assert_eq!(involution_count(6, 0).unwrap(), 3);
        assert_eq!(involution_count(7, 0).unwrap(), 4);
        assert_eq!(involution_count(8, 0).unwrap(), 4);
        assert_eq!(involution_count(0, 7).unwrap(), 3);
    }

    #[test]
    fn irreducible_dimension_oracle_agrees_with_doubling_flags() {
        // Real Clifford algebras with our square convention are classified by
        // (s - r) mod 8; the matrix size follows from the total dimension.
        // The minimal admissible module is either the irreducible module or
        // two copies of it, so this recomputes the doubling flag from scratch.
        for cell in table_cells() {
            let n = cell.r + cell.s;
            let total: u64 = 1 << n;
            let class = (cell.s + 8 - (cell.r % 8)) % 8;
            // (blocks, real dimension of one matrix entry)
            let (blocks, entry) = match class {
                0 | 2 => (1, 1),
                1 => (2, 1),
                3 | 7 => (1, 2),
                4 | 6 => (1, 4),
                5 => (2, 4),
                _ => unreachable!(),
            };
            let k2 = total / (blocks * entry);
            let k = (k2 as f64).sqrt().round() as u64;
            assert_eq!(k * k, k2, "square matrix size at ({}, {})", cell.r, cell.s);
            let irr = k * entry;
            let min = cell.dim as u64;
            if cell.doubled {
                assert_eq!(min, 2 * irr, "doubled cell ({}, {})", cell.r, cell.s);
            } else {
                assert_eq!(min, irr, "plain cell ({}, {})", cell.r, cell.s);
            }
        }
    }
}
