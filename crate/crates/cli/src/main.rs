//! `patfree`: distances, testers and experiments for forbidden-pattern
//! freeness of strings and dense d-dimensional arrays.
//!
//! Exit codes: 0 success (or tester accept), 1 tester reject, 2 usage or
//! parse error, 3 exceeded budget / no safe flip.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use patfree_core::classify::{classify, nonremovable_witness, PatternKind};
use patfree_core::exact1d::{deletion_set_1d, distance_exact_1d};
use patfree_core::harness::{
    gen_planted_1d, lb_experiment, lb_probe_set, lb_sample, scaling_bench, BenchOp,
    LbInstanceSpec, LbKind,
};
use patfree_core::matcher::find_occurrences_nd;
use patfree_core::oracle::{
    brute_force_deletion_number, brute_force_hitting_number, exhaustive_removability_1d,
    randomized_removability_nd, BruteForceCount, RemovabilityProbe,
};
use patfree_core::sampler::{
    approx_distance_1d, approx_distance_nd, tolerant_test_1d, tolerant_test_almost_homo_1d,
    tolerant_test_nd, SamplerOptions,
};
use patfree_core::{format, Alphabet, Error, NdArray, Pattern};

#[derive(Parser)]
#[command(name = "patfree", version, about = "Pattern-freeness distances, testers and benchmarks")]
struct Cli {
    /// Output style: human-readable summary or one JSON record per line.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Records,
}

#[derive(Args)]
struct PatternArg {
    /// Pattern file (NDA format, or a raw digit string for 1d).
    #[arg(long)]
    pattern: PathBuf,
    /// Alphabet size for raw digit strings (default 2).
    #[arg(long)]
    alphabet: Option<u32>,
}

#[derive(Args)]
struct InputArg {
    /// Host array file (NDA format, or a raw digit string for 1d).
    #[arg(long)]
    input: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a pattern: removable, not removable, or undetermined.
    Classify {
        #[command(flatten)]
        pattern: PatternArg,
        /// Also construct and verify the non-removability witness.
        #[arg(long)]
        witness: bool,
    },
    /// Exact distance (default) or sublinear approximation.
    Distance {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        pattern: PatternArg,
        /// Force the exact path (the default).
        #[arg(long, conflicts_with = "approx")]
        exact: bool,
        /// Sublinear block-sampling estimate instead of the exact scan.
        #[arg(long)]
        approx: bool,
        #[arg(long, default_value_t = 0.25)]
        tau: f64,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Sample even when the pattern is not classified removable.
        #[arg(long)]
        force: bool,
    },
    /// Compute a verified deletion set and write the repaired array.
    Flipset {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        pattern: PatternArg,
        /// Output file for the repaired array (NDA format).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tolerant test for 1-dimensional inputs: accepts distance <= eps1,
    /// rejects distance >= eps2. Almost-homogeneous patterns dispatch to the
    /// evidence detector (requires eps1 < eps2 / 16).
    Test {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        pattern: PatternArg,
        #[arg(long)]
        eps1: f64,
        #[arg(long)]
        eps2: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        force: bool,
    },
    /// Sublinear hitting-number approximation for d-dimensional arrays.
    ApproxNd {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        pattern: PatternArg,
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        force: bool,
    },
    /// Tolerant test for d-dimensional arrays at deletion-scale eps.
    TestNd {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        pattern: PatternArg,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        force: bool,
    },
    /// Benchmarks and experiments.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Instance generators.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Budget-guarded brute-force references.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Fixed-probe experiment against the planted lower-bound distribution.
    Lowerbound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
        /// Probe-set size (default: floor(1 / (13 eps))).
        #[arg(long)]
        probes: Option<usize>,
        /// Place probes in interval left halves (never see a one).
        #[arg(long)]
        left_half: bool,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Median wall times of the exact-distance paths across input sizes.
    Scaling {
        #[arg(long, value_enum, default_value_t = ScalingOp::Exact)]
        op: ScalingOp,
        /// Comma-separated input sizes.
        #[arg(long, value_delimiter = ',', default_value = "1000000,2000000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        reps: u32,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScalingOp {
    Exact,
    AlmostHomo,
    Window,
}

#[derive(Subcommand)]
enum GenCommand {
    /// String with planted pattern copies and a measured distance.
    Planted {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        pattern: PatternArg,
        #[arg(long)]
        copies: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample from the lower-bound distributions.
    Lb {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum)]
        kind: LbKindArg,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LbKindArg {
    B,
    C,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Brute-force deletion number by iterative deepening.
    Deletion {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        pattern: PatternArg,
        #[arg(long, default_value_t = 4)]
        rmax: u64,
    },
    /// Brute-force hitting number by subset enumeration.
    Hitting {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        pattern: PatternArg,
    },
    /// Removability probe: exhaustive in 1d, randomized in d >= 2.
    Removability {
        #[command(flatten)]
        pattern: PatternArg,
        /// Padding around the template for 1d hosts (default k - 1).
        #[arg(long)]
        pad: Option<usize>,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Usage(_) | Error::Parse { .. } | Error::Infeasible(_) => 2,
                Error::NoSafeFlip { .. }
                | Error::BudgetExceeded(_)
                | Error::IterationCapExceeded { .. }
                | Error::Internal(_) => 3,
            };
            ExitCode::from(code)
        }
    }
}

fn read_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))
}

fn load_array(path: &Path, alphabet: Option<u32>) -> Result<NdArray, Error> {
    let text = read_text(path)?;
    let alphabet = match alphabet {
        Some(size) => Some(Alphabet::new(size)?),
        None => None,
    };
    format::parse_array(&text, alphabet)
}

fn load_pattern(arg: &PatternArg) -> Result<Pattern, Error> {
    Pattern::new(load_array(&arg.pattern, arg.alphabet)?)
}

/// Chosen seed, generated from the clock when absent. Every report echoes
/// it, so any run can be reproduced byte for byte.
fn pick_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0)
    })
}

fn emit(format: Format, value: serde_json::Value, human: &str) {
    match format {
        Format::Records => println!("{value}"),
        Format::Human => println!("{human}"),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let fmt = cli.format;
    match cli.command {
        Command::Classify { pattern, witness } => {
            let p = load_pattern(&pattern)?;
            let cls = classify(&p);
            let kind = match &cls.kind {
                PatternKind::Removable { .. } => "removable",
                PatternKind::NotRemovable { .. } => "not-removable",
                PatternKind::UnknownSmall => "unknown-small",
            };
            let mut value = serde_json::json!({
                "kind": kind,
                "guaranteed": cls.guaranteed,
                "detail": cls,
                "k": p.side(),
                "d": p.ndim(),
            });
            let mut extra = String::new();
            if witness {
                if let PatternKind::NotRemovable { .. } = cls.kind {
                    let w = nonremovable_witness(&p)?;
                    let ok = patfree_core::classify::witness_property_holds(
                        &w.host,
                        &p,
                        &w.copy_start,
                    );
                    value["witness"] = serde_json::json!({
                        "host": format::serialize_nda(&w.host),
                        "copy_start": w.copy_start,
                        "verified": ok,
                    });
                    extra = format!(
                        "\nwitness copy at {:?}, exhaustive check {}",
                        w.copy_start,
                        if ok { "passed" } else { "FAILED" }
                    );
                }
            }
            emit(
                fmt,
                value,
                &format!(
                    "kind={kind} guaranteed={} (k={}, d={}){extra}",
                    cls.guaranteed,
                    p.side(),
                    p.ndim()
                ),
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Distance { input, pattern, exact: _, approx, tau, delta, seed, force } => {
            let host = load_array(&input.input, pattern.alphabet)?;
            let p = load_pattern(&pattern)?;
            if approx {
                let seed = pick_seed(seed);
                let opts = SamplerOptions { force, ..Default::default() };
                let report = if host.ndim() == 1 {
                    approx_distance_1d(&host, &p, tau, delta, seed, &opts)?
                } else {
                    approx_distance_nd(&host, &p, tau, delta, seed, &opts)?
                };
                emit(
                    fmt,
                    serde_json::to_value(&report).expect("serializable"),
                    &format!(
                        "estimate={:.6} queries={} blocks={} block_side={} seed={}",
                        report.estimate, report.queries, report.blocks, report.block_side,
                        report.seed
                    ),
                );
            } else {
                if host.ndim() != 1 {
                    return Err(Error::usage(
                        "exact distance is 1-dimensional; use --approx for d >= 2",
                    ));
                }
                let bounds = distance_exact_1d(&host, &p)?;
                let value = serde_json::json!({
                    "lower": bounds.lower.absolute,
                    "upper": bounds.upper.absolute,
                    "exact": bounds.is_exact(),
                    "relative": bounds.lower.relative(),
                    "cells": bounds.lower.total_cells,
                });
                let human = if bounds.is_exact() {
                    format!(
                        "distance={} relative={:.6}",
                        bounds.lower.absolute,
                        bounds.lower.relative()
                    )
                } else {
                    format!("distance in [{}, {}]", bounds.lower.absolute, bounds.upper.absolute)
                };
                emit(fmt, value, &human);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Flipset { input, pattern, out } => {
            let host = load_array(&input.input, pattern.alphabet)?;
            let p = load_pattern(&pattern)?;
            if host.ndim() != 1 {
                return Err(Error::usage("flipset is 1-dimensional"));
            }
            let flips = deletion_set_1d(&host, &p)?;
            let repaired = host.apply_flips(&flips)?;
            let verified = patfree_core::matcher::find_occurrences_1d(&repaired, &p)?.is_empty();
            if let Some(out) = &out {
                std::fs::write(out, format::serialize_nda(&repaired))
                    .map_err(|e| Error::usage(format!("cannot write {}: {e}", out.display())))?;
            }
            let coords: Vec<(Vec<usize>, u16)> = flips.coords_on(&host);
            emit(
                fmt,
                serde_json::json!({
                    "flips": coords,
                    "count": flips.len(),
                    "verified_free": verified,
                }),
                &format!("flips={} verified_free={verified}", flips.len()),
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Test { input, pattern, eps1, eps2, seed, force } => {
            let host = load_array(&input.input, pattern.alphabet)?;
            let p = load_pattern(&pattern)?;
            let seed = pick_seed(seed);
            let opts = SamplerOptions { force, ..Default::default() };
            let verdict = if classify(&p).is_almost_homogeneous() {
                let c = if eps1 > 0.0 { eps2 / eps1 - 16.0 } else { 16.0 };
                if c <= 0.0 {
                    return Err(Error::usage("almost-homogeneous testing needs eps1 < eps2 / 16"));
                }
                tolerant_test_almost_homo_1d(&host, &p, eps2, c, seed, &opts)?
            } else {
                tolerant_test_1d(&host, &p, eps1, eps2, seed, &opts)?
            };
            emit(
                fmt,
                serde_json::to_value(&verdict).expect("serializable"),
                &format!(
                    "{} estimate={:.6} threshold={:.6} queries={} seed={}",
                    if verdict.accept { "accept" } else { "reject" },
                    verdict.estimate,
                    verdict.threshold,
                    verdict.queries,
                    verdict.seed
                ),
            );
            Ok(if verdict.accept { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::ApproxNd { input, pattern, tau, delta, seed, force } => {
            let host = load_array(&input.input, pattern.alphabet)?;
            let p = load_pattern(&pattern)?;
            let seed = pick_seed(seed);
            let opts = SamplerOptions { force, ..Default::default() };
            let report = approx_distance_nd(&host, &p, tau, delta, seed, &opts)?;
            emit(
                fmt,
                serde_json::to_value(&report).expect("serializable"),
                &format!(
                    "hitting_estimate={:.6} deletion_bracket=[{:.6}, {:.6}] queries={} seed={}",
                    report.estimate,
                    report.deletion_lower,
                    report.deletion_upper,
                    report.queries,
                    report.seed
                ),
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::TestNd { input, pattern, eps, tau, seed, force } => {
            let host = load_array(&input.input, pattern.alphabet)?;
            let p = load_pattern(&pattern)?;
            let seed = pick_seed(seed);
            let opts = SamplerOptions { force, ..Default::default() };
            let verdict = tolerant_test_nd(&host, &p, eps, tau, seed, &opts)?;
            emit(
                fmt,
                serde_json::to_value(&verdict).expect("serializable"),
                &format!(
                    "{} estimate={:.6} threshold={:.6} queries={} seed={}",
                    if verdict.accept { "accept" } else { "reject" },
                    verdict.estimate,
                    verdict.threshold,
                    verdict.queries,
                    verdict.seed
                ),
            );
            Ok(if verdict.accept { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Bench(BenchCommand::Lowerbound { n, k, eps, probes, left_half, trials, seed }) => {
            let spec = LbInstanceSpec { n, k, eps, kind: LbKind::C };
            let size = probes.unwrap_or_else(|| (1.0 / (13.0 * eps)).floor() as usize);
            let probes = lb_probe_set(n, k, size, !left_half);
            let seed = pick_seed(seed);
            let report = lb_experiment(&spec, &probes, trials, seed)?;
            emit(
                fmt,
                serde_json::json!({ "seed": seed, "report": report }),
                &format!(
                    "frequency={:.4} union_bound={:.4} within_bound={} trials={} seed={seed}",
                    report.frequency, report.union_bound, report.within_bound, report.trials
                ),
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench(BenchCommand::Scaling { op, sizes, reps, seed }) => {
            let op = match op {
                ScalingOp::Exact => BenchOp::ExactRemovable,
                ScalingOp::AlmostHomo => BenchOp::ExactAlmostHomo,
                ScalingOp::Window => BenchOp::WindowHitting,
            };
            let seed = pick_seed(seed);
            let rows = scaling_bench(op, &sizes, reps, seed)?;
            let human: Vec<String> = rows
                .iter()
                .map(|r| {
                    format!("n={} median={:.3}ms result={}", r.n, r.median_nanos as f64 / 1e6, r.result)
                })
                .collect();
            emit(fmt, serde_json::json!({ "seed": seed, "rows": rows }), &human.join("\n"));
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen(GenCommand::Planted { n, pattern, copies, seed, out }) => {
            let p = load_pattern(&pattern)?;
            let seed = pick_seed(seed);
            let (host, dist) = gen_planted_1d(n, &p, copies, seed)?;
            std::fs::write(&out, format::serialize_nda(&host))
                .map_err(|e| Error::usage(format!("cannot write {}: {e}", out.display())))?;
            emit(
                fmt,
                serde_json::json!({
                    "seed": seed,
                    "n": n,
                    "copies": copies,
                    "measured_distance": dist.absolute,
                    "relative": dist.relative(),
                    "out": out.display().to_string(),
                }),
                &format!(
                    "wrote {} (measured distance {} = {:.6} relative, seed {seed})",
                    out.display(),
                    dist.absolute,
                    dist.relative()
                ),
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen(GenCommand::Lb { n, k, eps, kind, seed, out }) => {
            let spec = LbInstanceSpec {
                n,
                k,
                eps,
                kind: match kind {
                    LbKindArg::B => LbKind::B,
                    LbKindArg::C => LbKind::C,
                },
            };
            let seed = pick_seed(seed);
            let sample = lb_sample(&spec, seed)?;
            std::fs::write(&out, format::serialize_nda(&sample))
                .map_err(|e| Error::usage(format!("cannot write {}: {e}", out.display())))?;
            let copies = find_occurrences_nd(&sample, &spec.lb_pattern())?.len();
            emit(
                fmt,
                serde_json::json!({
                    "seed": seed,
                    "pattern_copies": copies,
                    "out": out.display().to_string(),
                }),
                &format!("wrote {} ({copies} pattern copies, seed {seed})", out.display()),
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle(OracleCommand::Deletion { input, pattern, rmax }) => {
            let host = load_array(&input.input, pattern.alphabet)?;
            let p = load_pattern(&pattern)?;
            if host.len() > 40 {
                return Err(Error::BudgetExceeded(format!(
                    "oracle deletion is budgeted for at most 40 cells, got {}",
                    host.len()
                )));
            }
            match brute_force_deletion_number(&host, &p, rmax) {
                BruteForceCount::Exact(v) => {
                    emit(
                        fmt,
                        serde_json::json!({ "deletion_number": v }),
                        &format!("deletion_number={v}"),
                    );
                    Ok(ExitCode::SUCCESS)
                }
                BruteForceCount::Exceeded(r) => {
                    Err(Error::BudgetExceeded(format!("no deletion set within {r} changes")))
                }
            }
        }
        Command::Oracle(OracleCommand::Hitting { input, pattern }) => {
            let host = load_array(&input.input, pattern.alphabet)?;
            let p = load_pattern(&pattern)?;
            if host.len() > 144 {
                return Err(Error::BudgetExceeded(format!(
                    "oracle hitting is budgeted for at most 144 cells, got {}",
                    host.len()
                )));
            }
            let h = brute_force_hitting_number(&host, &p);
            emit(fmt, serde_json::json!({ "hitting_number": h }), &format!("hitting_number={h}"));
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle(OracleCommand::Removability { pattern, pad, trials, seed }) => {
            let p = load_pattern(&pattern)?;
            let probe = if p.ndim() == 1 {
                exhaustive_removability_1d(&p, pad)?
            } else {
                randomized_removability_nd(&p, trials, pick_seed(seed))?
            };
            match probe {
                RemovabilityProbe::Pass => {
                    emit(
                        fmt,
                        serde_json::json!({ "removable": true }),
                        "pass: every probed copy admits a safe change",
                    );
                    Ok(ExitCode::SUCCESS)
                }
                RemovabilityProbe::Counterexample { host, start } => {
                    emit(
                        fmt,
                        serde_json::json!({
                            "removable": false,
                            "counterexample": format::serialize_nda(&host),
                            "copy_start": start,
                        }),
                        &format!("counterexample: copy at {start:?} admits no safe change"),
                    );
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
    }
}
