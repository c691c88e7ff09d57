//! `htype`: build admissible Clifford modules, compute symmetry group
//! dimensions of the associated two-step nilpotent algebras, verify the
//! stored group table, and decide isomorphism questions.
//!
//! Exit codes: 0 when the command succeeds (and every checked value
//! matches), 1 when a verification mismatch is found, 2 on invalid input.
//! All JSON output is deterministic for fixed inputs; timing fields only
//! appear behind `--timings`.

mod cache;
mod table;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::time::Instant;

use htype_core::algebra::{aut0_dimension, SolverMode};
use htype_core::build::module_for_spec;
use htype_core::catalog::{classify, expected_group, IsoVerdict};
use htype_core::iso::swap_witness;
use htype_core::rep::{ModuleSpec, Representation, Variant};
use htype_core::verify;

#[derive(Parser)]
#[command(name = "htype", version, about = "Exact symmetry computations for pseudo H-type algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Admissible module construction
    Rep {
        #[command(subcommand)]
        cmd: RepCmd,
    },
    /// Symmetry dimension of one algebra
    Aut {
        #[command(subcommand)]
        cmd: AutCmd,
    },
    /// Batch verification of the stored group table
    Table {
        #[command(subcommand)]
        cmd: TableCmd,
    },
    /// Isomorphism verdict for a pair of signatures
    Classify(ClassifyArgs),
    /// Explicit isomorphism constructions
    Iso {
        #[command(subcommand)]
        cmd: IsoCmd,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Unique,
    Plus,
    Minus,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Unique => Variant::Unique,
            VariantArg::Plus => Variant::Plus,
            VariantArg::Minus => Variant::Minus,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Exact,
    Modular,
}

impl ModeArg {
    fn solver(self) -> SolverMode {
        match self {
            ModeArg::Auto => SolverMode::Auto,
            ModeArg::Exact => SolverMode::Exact,
            ModeArg::Modular => SolverMode::Modular,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ModeArg::Auto => "auto",
            ModeArg::Exact => "exact",
            ModeArg::Modular => "modular",
        }
    }
}

#[derive(Subcommand)]
enum RepCmd {
    /// Build a module and write it as JSON
    Gen(RepGenArgs),
}

#[derive(Args)]
struct RepGenArgs {
    #[arg(long)]
    r: u32,
    #[arg(long)]
    s: u32,
    /// Minimal module class; defaults to plus where two classes exist
    #[arg(long, conflicts_with = "copies")]
    variant: Option<VariantArg>,
    /// Multiplicities "P" or "P,Q" for a direct sum of minimal modules
    #[arg(long, value_parser = parse_copies)]
    copies: Option<(u32, u32)>,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum AutCmd {
    /// Compute the symmetry dimension and compare with the stored formula
    Dim(AutDimArgs),
}

#[derive(Args)]
struct AutDimArgs {
    #[arg(long)]
    r: u32,
    #[arg(long)]
    s: u32,
    #[arg(long, default_value_t = 1)]
    p: u32,
    #[arg(long, default_value_t = 0)]
    q: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Include wall-clock timing in the output
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand)]
enum TableCmd {
    /// Run every stored formula against the computed dimension
    Verify(TableVerifyArgs),
}

#[derive(Args)]
struct TableVerifyArgs {
    /// Skip cases whose module dimension exceeds this bound
    #[arg(long)]
    max_dim: Option<u32>,
    /// Restrict to these cells, each as "r,s"; repeatable
    #[arg(long, value_parser = parse_cell)]
    cells: Vec<(u32, u32)>,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    r: u32,
    #[arg(long)]
    s: u32,
    #[arg(long, default_value_t = 1)]
    p: u32,
    #[arg(long, default_value_t = 0)]
    q: u32,
    /// Target signature; defaults to the swap (s, r)
    #[arg(long)]
    to_r: Option<u32>,
    #[arg(long)]
    to_s: Option<u32>,
    /// Fix the target multiplicities instead of searching over them
    #[arg(long, requires = "to_q")]
    to_p: Option<u32>,
    #[arg(long, requires = "to_p")]
    to_q: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand)]
enum IsoCmd {
    /// Explicit isomorphism between the algebras over (1,7) and (7,1)
    #[command(name = "demo-17-71")]
    Demo1771 {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn parse_copies(text: &str) -> Result<(u32, u32), String> {
    let parts: Vec<&str> = text.split(',').collect();
    let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| e.to_string());
    match parts.as_slice() {
        [p] => Ok((parse(p)?, 0)),
        [p, q] => Ok((parse(p)?, parse(q)?)),
        _ => Err("expected \"P\" or \"P,Q\"".into()),
    }
}

fn parse_cell(text: &str) -> Result<(u32, u32), String> {
    let parts: Vec<&str> = text.split(',').collect();
    let [r, s] = parts.as_slice() else {
        return Err("expected \"r,s\"".into());
    };
    let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| e.to_string());
    Ok((parse(r)?, parse(s)?))
}

fn emit_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serializes")
    );
}

fn main() {
    std::process::exit(run(Cli::parse()));
}

fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Rep { cmd: RepCmd::Gen(args) } => rep_gen(args),
        Command::Aut { cmd: AutCmd::Dim(args) } => aut_dim(args),
        Command::Table { cmd: TableCmd::Verify(args) } => table_verify(args),
        Command::Classify(args) => run_classify(args),
        Command::Iso { cmd: IsoCmd::Demo1771 { format } } => iso_demo(format),
    }
}

fn invalid(message: impl std::fmt::Display) -> i32 {
    eprintln!("error: {message}");
    2
}

fn build_requested(args: &RepGenArgs) -> Result<Representation, htype_core::HtypeError> {
    if let Some((p, q)) = args.copies {
        let spec = ModuleSpec::new(p, q)?;
        return module_for_spec(args.r, args.s, spec);
    }
    let variant = args.variant.map(Variant::from).unwrap_or_else(|| {
        if verify::has_two_variants(args.r, args.s) {
            Variant::Plus
        } else {
            Variant::Unique
        }
    });
    cache::minimal_module(args.r, args.s, variant)
}

fn rep_gen(args: RepGenArgs) -> i32 {
    let rep = match build_requested(&args) {
        Ok(rep) => rep,
        Err(err) => return invalid(err),
    };
    let wire = rep.to_wire();
    let body = match args.format {
        Format::Json => serde_json::to_string_pretty(&wire).expect("module serializes"),
        Format::Text => {
            let (pos, neg) = rep.module_signature();
            format!(
                "module over ({}, {}): dimension {}, scalar product ({pos}, {neg}), variant {:?}, eigenspace form {:?}",
                args.r, args.s, rep.dim(), rep.variant(), rep.eplus()
            )
        }
    };
    match &args.out {
        Some(path) => {
            if let Err(err) = std::fs::write(path, body + "\n") {
                return invalid(format!("cannot write {}: {err}", path.display()));
            }
        }
        None => println!("{body}"),
    }
    0
}

#[derive(Serialize)]
struct AutDimReport {
    schema_version: u32,
    r: u32,
    s: u32,
    p: u32,
    q: u32,
    module_dim: usize,
    computed_dim: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected_group: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected_dim: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matched: Option<bool>,
    engine: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    primes: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    millis: Option<u128>,
}

fn aut_dim(args: AutDimArgs) -> i32 {
    let started = Instant::now();
    let spec = match ModuleSpec::new(args.p, args.q) {
        Ok(spec) => spec,
        Err(err) => return invalid(err),
    };
    let rep = match module_for_spec(args.r, args.s, spec) {
        Ok(rep) => rep,
        Err(err) => return invalid(err),
    };
    let solved = match aut0_dimension(&rep, args.mode.solver(), args.seed) {
        Ok(solved) => solved,
        Err(err) => return invalid(err),
    };
    // a missing formula is not an input error: the dimension still stands
    let group = expected_group(args.r, args.s, spec).ok();
    let report = AutDimReport {
        schema_version: 1,
        r: args.r,
        s: args.s,
        p: args.p,
        q: args.q,
        module_dim: rep.dim(),
        computed_dim: solved.dimension,
        expected_group: group.as_ref().map(|g| g.to_string()),
        expected_dim: group.as_ref().map(|g| g.dimension()),
        matched: group.as_ref().map(|g| g.dimension() == solved.dimension),
        engine: solved.engine,
        primes: solved.primes,
        millis: args.timings.then(|| started.elapsed().as_millis()),
    };
    match args.format {
        Format::Json => emit_json(&report),
        Format::Text => {
            let verdict = match report.matched {
                Some(true) => "match",
                Some(false) => "MISMATCH",
                None => "no stored formula",
            };
            let expected = report
                .expected_group
                .as_ref()
                .map(|g| format!("{g} of dimension {}", report.expected_dim.unwrap()))
                .unwrap_or_else(|| "-".into());
            println!(
                "({}, {}) p={} q={}: computed {}, expected {}, {} [{}]",
                report.r, report.s, report.p, report.q, report.computed_dim, expected, verdict, report.engine
            );
        }
    }
    match report.matched {
        Some(false) => 1,
        _ => 0,
    }
}

fn table_verify(args: TableVerifyArgs) -> i32 {
    let cells = if args.cells.is_empty() {
        None
    } else {
        for &(r, s) in &args.cells {
            if htype_core::catalog::catalog_cell(r, s).is_none() {
                return invalid(format!("({r}, {s}) is not a stored table cell"));
            }
        }
        Some(args.cells.clone())
    };
    let opts = table::TableOptions {
        mode: args.mode.solver(),
        mode_name: args.mode.name().into(),
        seed: args.seed,
        max_dim: args.max_dim,
        cells,
        timings: args.timings,
    };
    let report = table::run(&opts);
    match args.format {
        Format::Json => emit_json(&report),
        Format::Text => print!("{}", table::render_text(&report)),
    }
    if report.summary.mismatch > 0 {
        1
    } else {
        0
    }
}

#[derive(Serialize)]
struct ClassifyReport {
    schema_version: u32,
    source: SideReport,
    target: SideReport,
    verdict: &'static str,
    /// Multiplicities realizing the isomorphism when the target side was
    /// searched rather than given.
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<(u32, u32)>,
}

#[derive(Serialize)]
struct SideReport {
    r: u32,
    s: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<u32>,
}

fn verdict_name(v: &IsoVerdict) -> &'static str {
    match v {
        IsoVerdict::Isomorphic => "isomorphic",
        IsoVerdict::NotIsomorphic => "not_isomorphic",
        IsoVerdict::DimensionMismatch => "dimension_mismatch",
    }
}

/// Every multiplicity pair over (r, s) with the given total number of
/// minimal module copies, second class included only where one exists.
fn target_specs(r: u32, s: u32, total: u32) -> Vec<ModuleSpec> {
    let second = verify::has_two_variants(r, s) || verify::e_form_definite(r, s);
    let mut out = Vec::new();
    for q in 0..=total {
        if q > 0 && !second {
            break;
        }
        if let Ok(spec) = ModuleSpec::new(total - q, q) {
            out.push(spec);
        }
    }
    out
}

fn run_classify(args: ClassifyArgs) -> i32 {
    let source = match ModuleSpec::new(args.p, args.q) {
        Ok(spec) => spec,
        Err(err) => return invalid(err),
    };
    let (tr, ts) = (args.to_r.unwrap_or(args.s), args.to_s.unwrap_or(args.r));
    let (verdict, witness) = if let (Some(tp), Some(tq)) = (args.to_p, args.to_q) {
        let target = match ModuleSpec::new(tp, tq) {
            Ok(spec) => spec,
            Err(err) => return invalid(err),
        };
        match classify(args.r, args.s, source, tr, ts, target) {
            Ok(v) => (v, Some((tp, tq))),
            Err(err) => return invalid(err),
        }
    } else {
        match search_classify(args.r, args.s, source, tr, ts) {
            Ok(pair) => pair,
            Err(err) => return invalid(err),
        }
    };
    let report = ClassifyReport {
        schema_version: 1,
        source: SideReport {
            r: args.r,
            s: args.s,
            p: Some(args.p),
            q: Some(args.q),
        },
        target: SideReport {
            r: tr,
            s: ts,
            p: witness.map(|w| w.0),
            q: witness.map(|w| w.1),
        },
        verdict: verdict_name(&verdict),
        witness,
    };
    match args.format {
        Format::Json => emit_json(&report),
        Format::Text => {
            let tail = match (&verdict, witness) {
                (IsoVerdict::Isomorphic, Some((p, q))) => {
                    format!("isomorphic to the algebra over ({tr}, {ts}) with multiplicities ({p}, {q})")
                }
                (IsoVerdict::DimensionMismatch, _) => {
                    format!("not isomorphic to any algebra over ({tr}, {ts}): module dimensions differ")
                }
                _ => format!("not isomorphic to the matching-dimension algebras over ({tr}, {ts})"),
            };
            println!(
                "algebra over ({}, {}) with multiplicities ({}, {}): {tail}",
                args.r, args.s, args.p, args.q
            );
        }
    }
    0
}

/// Compare against every equal-dimension multiplicity choice at the target
/// signature; the first isomorphism wins.
fn search_classify(
    r: u32,
    s: u32,
    source: ModuleSpec,
    tr: u32,
    ts: u32,
) -> Result<(IsoVerdict, Option<(u32, u32)>), htype_core::HtypeError> {
    let source_dim = u64::from(verify::minimal_dimension(r, s)?) * u64::from(source.total());
    let target_min = u64::from(verify::minimal_dimension(tr, ts)?);
    if source_dim % target_min != 0 {
        return Ok((IsoVerdict::DimensionMismatch, None));
    }
    let total = u32::try_from(source_dim / target_min).expect("module dimensions are small");
    let mut outcome = IsoVerdict::DimensionMismatch;
    for spec in target_specs(tr, ts, total) {
        match classify(r, s, source, tr, ts, spec) {
            Ok(IsoVerdict::Isomorphic) => {
                return Ok((IsoVerdict::Isomorphic, Some((spec.p, spec.q))));
            }
            Ok(IsoVerdict::NotIsomorphic) => outcome = IsoVerdict::NotIsomorphic,
            Ok(IsoVerdict::DimensionMismatch) => {}
            Err(err) => return Err(err),
        }
    }
    Ok((outcome, None))
}

#[derive(Serialize)]
struct IsoDemoReport {
    schema_version: u32,
    source: SideReport,
    target: SideReport,
    module_dim: usize,
    /// Eigenspace coefficients (lambda_1, lambda_2, mu_1, mu_2) of the
    /// module map in the induced complex coordinates.
    coefficients: [String; 4],
    frame_norm: String,
    /// Image index and sign of each center generator.
    center_map: Vec<(usize, i8)>,
    /// The module map as exact rational entries, row by row.
    module_map: Vec<Vec<String>>,
    relations_verified: bool,
    brackets_match: bool,
}

fn iso_demo(format: Format) -> i32 {
    let witness = match swap_witness() {
        Ok(w) => w,
        Err(err) => {
            eprintln!("error: {err}");
            return 1;
        }
    };
    let verified = witness.verify().is_ok();
    let brackets = witness.brackets_match();
    let src = witness.source.signature();
    let tgt = witness.target.signature();
    let report = IsoDemoReport {
        schema_version: 1,
        source: SideReport {
            r: src.r(),
            s: src.s(),
            p: None,
            q: None,
        },
        target: SideReport {
            r: tgt.r(),
            s: tgt.s(),
            p: None,
            q: None,
        },
        module_dim: witness.source.dim(),
        coefficients: {
            let c = &witness.coefficients;
            [c[0].to_string(), c[1].to_string(), c[2].to_string(), c[3].to_string()]
        },
        frame_norm: witness.frame_norm.to_string(),
        center_map: (0..witness.center_map.dim())
            .map(|k| (witness.center_map.target(k), witness.center_map.sign(k)))
            .collect(),
        module_map: (0..witness.module_map.nrows())
            .map(|i| {
                witness
                    .module_map
                    .row(i)
                    .iter()
                    .map(|x| x.to_string())
                    .collect()
            })
            .collect(),
        relations_verified: verified,
        brackets_match: brackets,
    };
    match format {
        Format::Json => emit_json(&report),
        Format::Text => {
            println!(
                "module map ({}, {}) -> ({}, {}), dimension {}",
                report.source.r, report.source.s, report.target.r, report.target.s, report.module_dim
            );
            println!(
                "eigenspace coefficients: lambda = ({}, {}), mu = ({}, {})",
                report.coefficients[0], report.coefficients[1], report.coefficients[2], report.coefficients[3]
            );
            println!("frame norm: {}", report.frame_norm);
            let centers: Vec<String> = report
                .center_map
                .iter()
                .enumerate()
                .map(|(k, (t, sg))| format!("z{} -> {}w{}", k + 1, if *sg < 0 { "-" } else { "" }, t + 1))
                .collect();
            println!("center map: {}", centers.join(", "));
            println!("module map rows:");
            for row in &report.module_map {
                println!("  [{}]", row.join(", "));
            }
            println!(
                "intertwining relations: {}; bracket tables: {}",
                if report.relations_verified { "verified" } else { "FAILED" },
                if report.brackets_match { "match" } else { "MISMATCH" }
            );
        }
    }
    if verified && brackets {
        0
    } else {
        1
    }
}
