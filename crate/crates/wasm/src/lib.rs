//! Browser bindings for the pattern-freeness toolkit: a grid-editor demo
//! calls three JSON endpoints — pattern classification with witness
//! construction, exact analysis (occurrences, hitting set, verified repair),
//! and the seeded block sampler compared against the exact answer.
//!
//! Payloads are JSON strings to keep the JS side framework-free; the logic
//! lives in plain functions so the endpoints are testable on any target.

use patfree_core::classify::{
    classify, nonremovable_witness, remark_witness_d2plus, witness_property_holds, PatternKind,
};
use patfree_core::exact1d::{deletion_set_1d, distance_exact_1d, hitting_number_1d};
use patfree_core::matcher::find_occurrences_nd;
use patfree_core::ndcombin::{deletion_procedure_nd, hitting_number_nd};
use patfree_core::sampler::{approx_distance_1d, approx_distance_nd, SamplerOptions};
use patfree_core::{Alphabet, Error, NdArray, Pattern};
use serde::Deserialize;
use wasm_bindgen::prelude::wasm_bindgen;

#[derive(Deserialize)]
struct GridPayload {
    dims: Vec<usize>,
    alphabet: u32,
    values: Vec<u16>,
}

fn parse_grid(json: &str) -> Result<NdArray, Error> {
    let g: GridPayload =
        serde_json::from_str(json).map_err(|e| Error::usage(format!("bad grid payload: {e}")))?;
    NdArray::new(g.dims, Alphabet::new(g.alphabet)?, g.values)
}

fn parse_pattern(json: &str) -> Result<Pattern, Error> {
    Pattern::new(parse_grid(json)?)
}

fn grid_json(array: &NdArray) -> serde_json::Value {
    serde_json::json!({
        "dims": array.dims(),
        "alphabet": array.alphabet().size(),
        "values": array.values(),
    })
}

fn err_json(e: Error) -> String {
    serde_json::json!({ "error": e.to_string() }).to_string()
}

const DEMO_CELL_CAP: usize = 64 * 64;

fn classify_pattern_impl(pattern_json: &str) -> Result<serde_json::Value, Error> {
    let pattern = parse_pattern(pattern_json)?;
    let cls = classify(&pattern);
    let kind = match &cls.kind {
        PatternKind::Removable { .. } => "removable",
        PatternKind::NotRemovable { .. } => "not-removable",
        PatternKind::UnknownSmall => "unknown-small",
    };
    let mut out = serde_json::json!({
        "kind": kind,
        "guaranteed": cls.guaranteed,
        "detail": cls,
        "k": pattern.side(),
        "d": pattern.ndim(),
    });
    if matches!(cls.kind, PatternKind::NotRemovable { .. }) {
        let w = nonremovable_witness(&pattern)?;
        let verified = witness_property_holds(&w.host, &pattern, &w.copy_start);
        out["witness"] = serde_json::json!({
            "host": grid_json(&w.host),
            "copy_start": w.copy_start,
            "verified": verified,
        });
    }
    // The stock small-pattern counterexample, for side-by-side display when
    // the guarantee does not apply.
    if matches!(cls.kind, PatternKind::UnknownSmall) && pattern.ndim() >= 2 {
        let (remark_p, remark_m) = remark_witness_d2plus(pattern.ndim())?;
        if remark_p.values() == pattern.values() {
            out["witness"] = serde_json::json!({
                "host": grid_json(&remark_m),
                "copy_start": vec![1; pattern.ndim()],
                "verified": witness_property_holds(&remark_m, &pattern, &vec![1; pattern.ndim()]),
            });
        }
    }
    Ok(out)
}

fn exact_analysis_impl(array_json: &str, pattern_json: &str) -> Result<serde_json::Value, Error> {
    let host = parse_grid(array_json)?;
    let pattern = parse_pattern(pattern_json)?;
    if host.len() > DEMO_CELL_CAP {
        return Err(Error::usage(format!("demo analysis is capped at {DEMO_CELL_CAP} cells")));
    }
    let occ = find_occurrences_nd(&host, &pattern)?;
    let cls = classify(&pattern);
    let mut out = serde_json::json!({
        "occurrences": occ.coords(),
        "kind": match &cls.kind {
            PatternKind::Removable { .. } => "removable",
            PatternKind::NotRemovable { .. } => "not-removable",
            PatternKind::UnknownSmall => "unknown-small",
        },
    });
    if host.ndim() == 1 {
        let bounds = distance_exact_1d(&host, &pattern)?;
        out["distance"] = serde_json::json!({
            "lower": bounds.lower.absolute,
            "upper": bounds.upper.absolute,
            "exact": bounds.is_exact(),
        });
        let (h, cells) = hitting_number_1d(&host, &pattern)?;
        out["hitting"] = serde_json::json!({ "count": h.absolute, "cells": cells });
        if cls.is_removable() {
            let flips = deletion_set_1d(&host, &pattern)?;
            let repaired = host.apply_flips(&flips)?;
            out["repair"] = serde_json::json!({
                "flips": flips.coords_on(&host),
                "repaired": grid_json(&repaired),
                "verified_free": find_occurrences_nd(&repaired, &pattern)?.is_empty(),
            });
        }
    } else {
        let (h, cells) = hitting_number_nd(&host, &pattern)?;
        let cell_coords: Vec<Vec<usize>> = cells.iter().map(|&c| host.coord_of(c)).collect();
        out["hitting"] = serde_json::json!({ "count": h, "cells": cell_coords });
        match deletion_procedure_nd(&host, &pattern) {
            Ok(trace) => {
                let repaired = host.apply_flips(&trace.flips)?;
                out["repair"] = serde_json::json!({
                    "flips": trace.flips.coords_on(&host),
                    "phase1": trace.phase1.len(),
                    "phase2": trace.phase2.len(),
                    "repaired": grid_json(&repaired),
                    "verified_free": find_occurrences_nd(&repaired, &pattern)?.is_empty(),
                });
            }
            Err(Error::NoSafeFlip { start }) => {
                out["repair"] = serde_json::json!({
                    "failed": true,
                    "no_safe_flip_at": start,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn sample_estimate_impl(
    array_json: &str,
    pattern_json: &str,
    tau: f64,
    seed: u64,
) -> Result<serde_json::Value, Error> {
    let host = parse_grid(array_json)?;
    let pattern = parse_pattern(pattern_json)?;
    let opts = SamplerOptions { force: true, threads: Some(1), ..Default::default() };
    let report = if host.ndim() == 1 {
        approx_distance_1d(&host, &pattern, tau, None, seed, &opts)?
    } else {
        approx_distance_nd(&host, &pattern, tau, None, seed, &opts)?
    };
    let mut out = serde_json::to_value(&report).expect("serializable");
    if host.len() <= DEMO_CELL_CAP {
        if host.ndim() == 1 {
            let bounds = distance_exact_1d(&host, &pattern)?;
            out["exact"] = serde_json::json!({
                "value": bounds.lower.absolute,
                "relative": bounds.lower.relative(),
                "is_hitting_number": false,
            });
        } else {
            let (h, _) = hitting_number_nd(&host, &pattern)?;
            out["exact"] = serde_json::json!({
                "value": h,
                "relative": h as f64 / host.len() as f64,
                "is_hitting_number": true,
            });
        }
    }
    Ok(out)
}

/// Classification of the edited pattern, with the non-removability witness
/// when one exists.
#[wasm_bindgen]
pub fn classify_pattern(pattern_json: &str) -> String {
    match classify_pattern_impl(pattern_json) {
        Ok(v) => v.to_string(),
        Err(e) => err_json(e),
    }
}

/// Occurrences, hitting set, exact distance and a verified repair of the
/// edited array.
#[wasm_bindgen]
pub fn exact_analysis(array_json: &str, pattern_json: &str) -> String {
    match exact_analysis_impl(array_json, pattern_json) {
        Ok(v) => v.to_string(),
        Err(e) => err_json(e),
    }
}

/// Seeded block-sampling estimate, with the exact value alongside for
/// demo-sized inputs.
#[wasm_bindgen]
pub fn sample_estimate(array_json: &str, pattern_json: &str, tau: f64, seed: u64) -> String {
    match sample_estimate_impl(array_json, pattern_json, tau, seed) {
        Ok(v) => v.to_string(),
        Err(e) => err_json(e),
    }
}
