//! Batch verification: every stored group formula against the computed
//! symmetry dimension, over the standard multiplicity sweep.  Cases are
//! independent, so they fan out across worker threads; the report is
//! assembled in a fixed order afterwards.

use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;

use htype_core::algebra::{aut0_dimension, SolverMode};
use htype_core::build::module_for_spec;
use htype_core::catalog::{catalog_cell, catalog_cells, expected_group, sweep_specs};
use htype_core::rep::ModuleSpec;
use htype_core::verify;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseStatus {
    Match,
    Mismatch,
    Skipped,
}

#[derive(Debug, Serialize)]
pub struct CaseRecord {
    pub r: u32,
    pub s: u32,
    pub p: u32,
    pub q: u32,
    pub module_dim: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub computed_dim: Option<u64>,
    pub expected_group: String,
    pub expected_dim: u64,
    pub status: CaseStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub primes: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u128>,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    #[serde(rename = "match")]
    pub matched: usize,
    pub mismatch: usize,
    pub skipped: usize,
}

#[derive(Debug, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub mode: String,
    pub seed: u64,
    pub cases: Vec<CaseRecord>,
    pub summary: Summary,
}

pub struct TableOptions {
    pub mode: SolverMode,
    pub mode_name: String,
    pub seed: u64,
    pub max_dim: Option<u32>,
    pub cells: Option<Vec<(u32, u32)>>,
    pub timings: bool,
}

/// Seed derivation per case so reruns of any subset agree with the full
/// sweep case by case.
fn case_seed(base: u64, r: u32, s: u32, spec: ModuleSpec) -> u64 {
    base.wrapping_mul(1_000_003)
        .wrapping_add(u64::from(r) * 1009 + u64::from(s) * 101 + u64::from(spec.p) * 11 + u64::from(spec.q))
}

fn formula_note(r: u32, s: u32, rendered: &str) -> Option<String> {
    let printed = catalog_cell(r, s).and_then(|c| c.printed.as_deref())?;
    if printed == rendered {
        None
    } else {
        Some(format!(
            "catalog text reads {printed}; the parameterized formula gives {rendered}"
        ))
    }
}

fn run_case(r: u32, s: u32, spec: ModuleSpec, opts: &TableOptions) -> CaseRecord {
    let started = Instant::now();
    let group = expected_group(r, s, spec).expect("sweep specs are valid at catalog cells");
    let rendered = group.to_string();
    let note = formula_note(r, s, &rendered);
    let module_dim = verify::minimal_dimension(r, s)
        .map(|d| d * spec.total())
        .unwrap_or(0);
    let mut record = CaseRecord {
        r,
        s,
        p: spec.p,
        q: spec.q,
        module_dim,
        computed_dim: None,
        expected_group: rendered,
        expected_dim: group.dimension(),
        status: CaseStatus::Skipped,
        engine: None,
        primes: Vec::new(),
        note,
        millis: None,
    };
    if let Some(limit) = opts.max_dim {
        if module_dim > limit {
            record.note = Some(format!(
                "skipped: module dimension {module_dim} exceeds the requested limit {limit}"
            ));
            return record;
        }
    }
    match module_for_spec(r, s, spec)
        .and_then(|rep| aut0_dimension(&rep, opts.mode, case_seed(opts.seed, r, s, spec)))
    {
        Ok(solved) => {
            record.status = if solved.dimension == record.expected_dim {
                CaseStatus::Match
            } else {
                CaseStatus::Mismatch
            };
            record.computed_dim = Some(solved.dimension);
            record.engine = Some(solved.engine);
            record.primes = solved.primes;
        }
        Err(err) => {
            record.note = Some(format!("skipped: {err}"));
        }
    }
    if opts.timings {
        record.millis = Some(started.elapsed().as_millis());
    }
    record
}

pub fn run(opts: &TableOptions) -> VerificationReport {
    let mut jobs: Vec<(u32, u32, ModuleSpec)> = Vec::new();
    for cell in catalog_cells() {
        if let Some(wanted) = &opts.cells {
            if !wanted.contains(&(cell.r, cell.s)) {
                continue;
            }
        }
        for spec in sweep_specs(cell.r, cell.s) {
            jobs.push((cell.r, cell.s, spec));
        }
    }
    jobs.sort_by_key(|&(r, s, spec)| (s, r, spec.q, spec.p));
    let cases: Vec<CaseRecord> = jobs
        .par_iter()
        .map(|&(r, s, spec)| run_case(r, s, spec, opts))
        .collect();
    let summary = Summary {
        matched: cases.iter().filter(|c| c.status == CaseStatus::Match).count(),
        mismatch: cases.iter().filter(|c| c.status == CaseStatus::Mismatch).count(),
        skipped: cases.iter().filter(|c| c.status == CaseStatus::Skipped).count(),
    };
    VerificationReport {
        schema_version: 1,
        mode: opts.mode_name.clone(),
        seed: opts.seed,
        cases,
        summary,
    }
}

pub fn render_text(report: &VerificationReport) -> String {
    let mut out = String::new();
    for case in &report.cases {
        let status = match case.status {
            CaseStatus::Match => "match",
            CaseStatus::Mismatch => "MISMATCH",
            CaseStatus::Skipped => "skipped",
        };
        let computed = case
            .computed_dim
            .map(|d| d.to_string())
            .unwrap_or_else(|| "-".into());
        out.push_str(&format!(
            "({}, {}) p={} q={} dim {:>4}  computed {:>4}  expected {:>4}  {}  {}",
            case.r, case.s, case.p, case.q, case.module_dim, computed, case.expected_dim, case.expected_group, status
        ));
        if let Some(note) = &case.note {
            out.push_str(&format!("  [{note}]"));
        }
        if let Some(ms) = case.millis {
            out.push_str(&format!("  ({ms} ms)"));
        }
        out.push('\n');
    }
    out.push_str(&format!(
        "{} match, {} mismatch, {} skipped\n",
        report.summary.matched, report.summary.mismatch, report.summary.skipped
    ));
    out
}
