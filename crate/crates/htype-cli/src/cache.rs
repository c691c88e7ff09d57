//! On-disk cache for minimal modules, one JSON file per (r, s, variant)
//! under the directory named by HTYPE_CACHE_DIR.  Loaded files re-run the
//! full structural verification, so a stale or hand-edited entry can slow
//! a command down but never corrupt a result.

use std::fs;
use std::path::PathBuf;

use htype_core::build;
use htype_core::rep::{RepWire, Representation, Variant};
use htype_core::HtypeError;

pub const CACHE_ENV: &str = "HTYPE_CACHE_DIR";

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).map(PathBuf::from)
}

fn variant_tag(variant: Variant) -> &'static str {
    match variant {
        Variant::Unique => "unique",
        Variant::Plus => "plus",
        Variant::Minus => "minus",
        Variant::Mixed => "mixed",
    }
}

fn entry_path(dir: &PathBuf, r: u32, s: u32, variant: Variant) -> PathBuf {
    dir.join(format!("rep_{r}_{s}_{}.json", variant_tag(variant)))
}

fn try_load(path: &PathBuf, r: u32, s: u32) -> Option<Representation> {
    let text = fs::read_to_string(path).ok()?;
    let wire: RepWire = serde_json::from_str(&text).ok()?;
    let rep = Representation::from_wire(&wire).ok()?;
    let sig = rep.signature();
    (sig.r() == r && sig.s() == s).then_some(rep)
}

/// A minimal module, from the cache when one is configured and already
/// holds the entry, otherwise freshly built (and stored on the way out).
pub fn minimal_module(r: u32, s: u32, variant: Variant) -> Result<Representation, HtypeError> {
    let Some(dir) = cache_dir() else {
        return build::minimal_module(r, s, variant);
    };
    let path = entry_path(&dir, r, s, variant);
    if let Some(rep) = try_load(&path, r, s) {
        return Ok(rep);
    }
    let rep = build::minimal_module(r, s, variant)?;
    let _ = fs::create_dir_all(&dir);
    if let Ok(text) = serde_json::to_string(&rep.to_wire()) {
        let _ = fs::write(&path, text);
    }
    Ok(rep)
}
