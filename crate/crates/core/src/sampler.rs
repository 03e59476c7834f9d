//! Sublinear distance approximation and tolerant testing.
//!
//! The removable-pattern estimators sample `t` independent cyclic blocks,
//! compute each block's exact hitting number, and average. In one dimension
//! the hitting number equals the deletion number, so the estimate targets
//! the relative distance directly; in d dimensions it targets the relative
//! hitting number, and the report carries the deletion-number bracket
//! `[Y, alpha_d * Y]`.
//!
//! Every sampler reads the host exclusively through a [`CountedView`], so
//! reported query counts are exact: `t * L^d` for the block samplers, where
//! `L` is the block side. Per-block randomness is derived as an independent
//! stream of `(seed, block index)`, so results are byte-stable regardless of
//! the number of worker threads.

use rand::Rng;
use serde::Serialize;

use crate::array::{CountedView, NdArray, Pattern, Symbol};
use crate::classify::canonicalize_almost_homo_1d;
use crate::error::{Error, Result};
use crate::matcher::occurrences_in_extracted_window;
use crate::ndcombin::{alpha_d, hitting_number_of};
use crate::seeds::{param_key, stream_rng};

/// Knobs shared by the samplers.
#[derive(Debug, Clone)]
pub struct SamplerOptions {
    /// Chebyshev constant: block counts are chosen so that
    /// `Var(Y) <= delta^2 / chebyshev_c`, giving failure probability at most
    /// `1 / chebyshev_c`.
    pub chebyshev_c: f64,
    /// Run the sampler even when the pattern is not classified removable
    /// (the estimate then targets the hitting number with no guaranteed
    /// relation to the deletion number).
    pub force: bool,
    /// Worker threads for block evaluation. `None` reads PATFREE_THREADS and
    /// falls back to the hardware count.
    pub threads: Option<usize>,
    /// Budget constant `c'` of the almost-homogeneous detector: each
    /// detector run spends `ceil(c' / epsilon)` queries.
    pub almost_homo_budget: f64,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        SamplerOptions { chebyshev_c: 3.0, force: false, threads: None, almost_homo_budget: 48.0 }
    }
}

fn worker_count(opts: &SamplerOptions, jobs: usize) -> usize {
    let configured = opts.threads.or_else(|| {
        std::env::var("PATFREE_THREADS").ok().and_then(|v| v.parse::<usize>().ok())
    });
    let hw = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    configured.unwrap_or(hw).clamp(1, jobs.max(1))
}

/// Output of a distance-approximation run.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    /// Mean relative per-block hitting number: the distance estimate in one
    /// dimension, the hitting-number estimate in d dimensions.
    pub estimate: f64,
    /// Bracket on the relative deletion number implied by the estimate.
    pub deletion_lower: f64,
    pub deletion_upper: f64,
    pub tau: f64,
    pub delta: f64,
    pub beta: f64,
    /// Side length of each sampled cyclic block.
    pub block_side: usize,
    /// Number of sampled blocks (t).
    pub blocks: u64,
    pub chebyshev_c: f64,
    pub seed: u64,
    /// Exact number of entry reads, equal to `blocks * block_side^d`.
    pub queries: u64,
    /// Wall time; not serialized, so seeded record output stays
    /// byte-for-byte reproducible.
    #[serde(skip)]
    pub wall_nanos: u64,
    /// Per-block absolute hitting counts, in block order.
    pub block_counts: Vec<u64>,
}

/// Verdict of a tolerant tester.
#[derive(Debug, Clone, Serialize)]
pub struct TestVerdict {
    pub accept: bool,
    /// The statistic the decision compares against the threshold: the block
    /// estimate Y, or the detector fire rate for the almost-homogeneous
    /// tester.
    pub estimate: f64,
    pub threshold: f64,
    pub queries: u64,
    pub seed: u64,
    pub blocks: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration: Option<DetectorCalibration>,
}

fn require_removable(pattern: &Pattern, force: bool) -> Result<()> {
    if force || pattern.classification().is_removable() {
        Ok(())
    } else {
        Err(Error::usage(
            "pattern is not classified removable; pass force to sample the hitting number anyway",
        ))
    }
}

/// Evaluates `blocks` independent cyclic blocks of side `block_side` and
/// returns the per-block hitting counts, in block order.
fn sample_block_counts(
    view: &CountedView<'_>,
    pattern: &Pattern,
    block_side: usize,
    blocks: u64,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<Vec<u64>> {
    let host = view.array();
    let d = host.ndim();
    let dims = host.dims().to_vec();
    let t = blocks as usize;
    let workers = worker_count(opts, t);
    let mut counts = vec![0u64; t];
    let eval = |j: usize| -> Result<u64> {
        let mut rng = stream_rng(seed, j as u64);
        let start: Vec<usize> = dims.iter().map(|&n| rng.gen_range(0..n)).collect();
        let window = view.extract_cyclic_window(&start, &vec![block_side; d])?;
        let occ = occurrences_in_extracted_window(&window, pattern)?;
        if d == 1 {
            Ok(crate::exact1d::greedy_hitting_positions(occ.starts(), pattern.side()).len() as u64)
        } else {
            Ok(hitting_number_of(&occ).0)
        }
    };
    if workers <= 1 {
        for (j, slot) in counts.iter_mut().enumerate() {
            *slot = eval(j)?;
        }
    } else {
        let chunk = t.div_ceil(workers);
        let results: Vec<Result<Vec<u64>>> = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for w in 0..workers {
                let lo = w * chunk;
                let hi = ((w + 1) * chunk).min(t);
                let eval_ref = &eval;
                handles.push(scope.spawn(move || (lo..hi).map(eval_ref).collect()));
            }
            handles.into_iter().map(|h| h.join().expect("block worker panicked")).collect()
        });
        let mut j = 0;
        for chunk_counts in results {
            for c in chunk_counts? {
                counts[j] = c;
                j += 1;
            }
        }
    }
    Ok(counts)
}

#[allow(clippy::too_many_arguments)]
fn block_estimate(
    host: &NdArray,
    pattern: &Pattern,
    tau: f64,
    delta: f64,
    beta: f64,
    blocks: u64,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<EstimateReport> {
    let k = pattern.side();
    let d = host.ndim();
    let block_side = (beta * k as f64).ceil() as usize;
    for (axis, &n) in host.dims().iter().enumerate() {
        if n < block_side {
            return Err(Error::usage(format!(
                "host side {n} on axis {axis} is smaller than the sampling block side {block_side}"
            )));
        }
    }
    let timer = crate::seeds::WallTimer::start();
    let view = CountedView::new(host);
    let counts = sample_block_counts(&view, pattern, block_side, blocks, seed, opts)?;
    let block_cells = (block_side as f64).powi(d as i32);
    let estimate = counts.iter().sum::<u64>() as f64 / (blocks as f64 * block_cells);
    let queries = view.queries();
    debug_assert_eq!(queries, blocks * (block_side as u64).pow(d as u32));
    Ok(EstimateReport {
        estimate,
        deletion_lower: estimate,
        deletion_upper: if d == 1 { estimate } else { estimate * alpha_d(d) as f64 },
        tau,
        delta,
        beta,
        block_side,
        blocks,
        chebyshev_c: opts.chebyshev_c,
        seed,
        queries,
        wall_nanos: timer.elapsed_nanos(),
        block_counts: counts,
    })
}

/// Distance approximation for a removable 1-dimensional pattern: with
/// probability at least 2/3 the estimate lies in
/// `[(1 - tau) * dist - delta, dist + delta]`.
///
/// Samples `ceil(c / (k^2 delta^2))` cyclic blocks of length `ceil(3k/tau)`.
pub fn approx_distance_1d(
    host: &NdArray,
    pattern: &Pattern,
    tau: f64,
    delta: Option<f64>,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<EstimateReport> {
    if host.ndim() != 1 || pattern.ndim() != 1 {
        return Err(Error::usage("approx_distance_1d requires 1-dimensional inputs"));
    }
    require_removable(pattern, opts.force)?;
    let k = pattern.side() as f64;
    let delta = delta.unwrap_or(1.0 / (4.0 * k));
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::usage(format!("tau must be in (0, 1), got {tau}")));
    }
    if !(delta > 0.0 && delta < 1.0 / k) {
        return Err(Error::usage(format!("delta must be in (0, 1/k), got {delta}")));
    }
    let beta = 3.0 / tau;
    let blocks = (opts.chebyshev_c / (k * k * delta * delta)).ceil() as u64;
    block_estimate(host, pattern, tau, delta, beta, blocks.max(1), seed, opts)
}

/// Tolerant tester for a removable 1-dimensional pattern: strings at
/// relative distance at most `eps1` are accepted, and at least `eps2`
/// rejected, each with probability at least 2/3. Accepts iff the block
/// estimate stays below `(eps1 + eps2) / 2`.
pub fn tolerant_test_1d(
    host: &NdArray,
    pattern: &Pattern,
    eps1: f64,
    eps2: f64,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<TestVerdict> {
    if host.ndim() != 1 || pattern.ndim() != 1 {
        return Err(Error::usage("tolerant_test_1d requires 1-dimensional inputs"));
    }
    if !(0.0 <= eps1 && eps1 < eps2 && eps2 <= 1.0) {
        return Err(Error::usage(format!("need 0 <= eps1 < eps2 <= 1, got {eps1}, {eps2}")));
    }
    require_removable(pattern, opts.force)?;
    let k = pattern.side() as f64;
    let delta = (eps2 - eps1) / 4.0;
    let tau = (eps2 - eps1) / (4.0 * eps2);
    let beta = 3.0 / tau;
    let blocks = ((opts.chebyshev_c * eps2) / (k * delta * delta)).ceil() as u64;
    let report = block_estimate(host, pattern, tau, delta, beta, blocks.max(1), seed, opts)?;
    let threshold = (eps1 + eps2) / 2.0;
    Ok(TestVerdict {
        accept: report.estimate < threshold,
        estimate: report.estimate,
        threshold,
        queries: report.queries,
        seed,
        blocks: report.blocks,
        calibration: None,
    })
}

/// Hitting-number approximation for a removable d-dimensional pattern: with
/// probability at least 2/3 the estimate lies in
/// `[(1 - tau)^d * h - delta, h + delta]` where `h` is the relative hitting
/// number. The report's deletion bracket applies `h <= dist <= alpha_d * h`.
pub fn approx_distance_nd(
    host: &NdArray,
    pattern: &Pattern,
    tau: f64,
    delta: Option<f64>,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<EstimateReport> {
    require_removable(pattern, opts.force)?;
    let d = host.ndim();
    if pattern.ndim() != d {
        return Err(Error::usage("host and pattern dimensions differ"));
    }
    let k = pattern.side() as f64;
    let kd = k.powi(d as i32);
    let delta = delta.unwrap_or(1.0 / (4.0 * kd));
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::usage(format!("tau must be in (0, 1], got {tau}")));
    }
    if !(delta > 0.0 && delta <= 1.0 / kd) {
        return Err(Error::usage(format!("delta must be in (0, 1/k^d], got {delta}")));
    }
    let beta = 2.0 / tau;
    let blocks = (opts.chebyshev_c / (kd * kd * delta * delta)).ceil() as u64;
    block_estimate(host, pattern, tau, delta, beta, blocks.max(1), seed, opts)
}

/// Tolerant tester for a removable d-dimensional pattern, with hypotheses on
/// the relative deletion-number scale: distance at most
/// `(1 - tau)^d / alpha_d * eps` is accepted and distance at least `eps`
/// rejected, each with probability at least 2/3 for instances matching the
/// sampler's guarantees. Decides against the midpoint of the two
/// corresponding hitting-scale hypotheses.
pub fn tolerant_test_nd(
    host: &NdArray,
    pattern: &Pattern,
    eps: f64,
    tau: f64,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<TestVerdict> {
    require_removable(pattern, opts.force)?;
    let d = host.ndim();
    if pattern.ndim() != d {
        return Err(Error::usage("host and pattern dimensions differ"));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::usage(format!("eps must be in (0, 1], got {eps}")));
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::usage(format!("tau must be in (0, 1], got {tau}")));
    }
    let k = pattern.side() as f64;
    let kd = k.powi(d as i32);
    let eps_hit = eps / alpha_d(d) as f64;
    let close_hit = (1.0 - tau).powi(d as i32) * eps_hit;
    let delta = (eps_hit - close_hit) / 2.0;
    let beta = 2.0 / tau;
    let blocks = ((opts.chebyshev_c * eps_hit) / (kd * delta * delta)).ceil() as u64;
    let report = block_estimate(host, pattern, tau, delta, beta, blocks.max(1), seed, opts)?;
    let threshold = (eps_hit + close_hit) / 2.0;
    Ok(TestVerdict {
        accept: report.estimate < threshold,
        estimate: report.estimate,
        threshold,
        queries: report.queries,
        seed,
        blocks: report.blocks,
        calibration: None,
    })
}

/// Calibration record of the almost-homogeneous detector: Monte-Carlo fire
/// rates on synthetic extremal inputs and the repetition cutoff they imply.
#[derive(Debug, Clone, Serialize)]
pub struct DetectorCalibration {
    /// Highest fire rate observed across close extremal families.
    pub close_rate: f64,
    /// Lowest fire rate observed across far extremal families.
    pub far_rate: f64,
    /// Detector repetitions per decision.
    pub runs: u32,
    /// Reject iff at least this many of the runs fire.
    pub cutoff: u32,
    /// Queries per detector run.
    pub queries_per_run: u64,
}

struct DetectorShape {
    singles: usize,
    blocks: usize,
    block_len: usize,
    k: usize,
}

impl DetectorShape {
    fn new(k: usize, eps: f64, budget: f64) -> Self {
        let m = (budget / eps).ceil();
        DetectorShape {
            singles: (m / 3.0).ceil() as usize,
            blocks: (m / (3.0 * k as f64)).ceil() as usize,
            block_len: 2 * k - 1,
            k,
        }
    }

    fn queries_per_run(&self) -> u64 {
        self.singles as u64 + (self.blocks * self.block_len) as u64
    }

    /// One detector run over canonical cells provided by `read`. Fires iff
    /// some sampled single reads the special symbol strictly left of a
    /// background run of length k-1 fully inside a sampled block.
    fn run(&self, n: usize, read: &mut dyn FnMut(usize) -> Symbol, rng: &mut impl Rng) -> bool {
        let mut min_one: Option<usize> = None;
        for _ in 0..self.singles {
            let i = rng.gen_range(0..n);
            if read(i) == 1 {
                min_one = Some(min_one.map_or(i, |m| m.min(i)));
            }
        }
        let mut max_run: Option<usize> = None;
        for _ in 0..self.blocks {
            let start = rng.gen_range(0..=n - self.block_len);
            let mut zeros = 0usize;
            for off in 0..self.block_len {
                if read(start + off) == 0 {
                    zeros += 1;
                    if zeros >= self.k - 1 {
                        let run_start = start + off + 1 - (self.k - 1);
                        max_run = Some(max_run.map_or(run_start, |m| m.max(run_start)));
                    }
                } else {
                    zeros = 0;
                }
            }
        }
        matches!((min_one, max_run), (Some(one), Some(run)) if one < run)
    }
}

/// Canonical-space synthetic string with `m` isolated evidences spread over
/// `n` cells (special value 1 followed by background zeros).
fn sprinkled_extremal(n: usize, m: usize, k: usize, rng: &mut impl Rng) -> Vec<Symbol> {
    let mut s = vec![0 as Symbol; n];
    if m == 0 {
        return s;
    }
    let stride = (n - 2 * k) / m;
    for i in 0..m {
        let base = i * stride;
        let jitter = rng.gen_range(0..stride.saturating_sub(2 * k).max(1));
        s[base + jitter] = 1;
    }
    s
}

/// Canonical-space synthetic string with `m` packed evidences followed by an
/// all-special tail.
fn packed_extremal(n: usize, m: usize, k: usize) -> Vec<Symbol> {
    let mut s = vec![1 as Symbol; n];
    for i in 0..m {
        for j in 1..k {
            s[i * k + j] = 0;
        }
    }
    s
}

fn calibrate_detector(k: usize, eps: f64, tolerance_c: f64, budget: f64) -> DetectorCalibration {
    // Calibration is deterministic in (k, eps, c, budget); cache it so
    // repeated tester calls pay for it once.
    type CalibrationCache =
        std::sync::Mutex<std::collections::HashMap<(usize, u64, u64, u64), DetectorCalibration>>;
    static CACHE: std::sync::OnceLock<CalibrationCache> = std::sync::OnceLock::new();
    let key = (k, eps.to_bits(), tolerance_c.to_bits(), budget.to_bits());
    if let Some(hit) =
        CACHE.get_or_init(Default::default).lock().unwrap().get(&key).cloned()
    {
        return hit;
    }
    let computed = calibrate_detector_uncached(k, eps, tolerance_c, budget);
    CACHE.get_or_init(Default::default).lock().unwrap().insert(key, computed.clone());
    computed
}

fn calibrate_detector_uncached(
    k: usize,
    eps: f64,
    tolerance_c: f64,
    budget: f64,
) -> DetectorCalibration {
    let shape = DetectorShape::new(k, eps, budget);
    let runs: u32 = 48;
    let trials = 200u64;
    let close_eps = eps / (16.0 + tolerance_c);
    // Enough cells for a few dozen islands on the close side.
    let n = ((48.0 * (16.0 + tolerance_c) / eps).ceil() as usize).max(16 * shape.block_len);
    let cal_seed = param_key(
        "almost-homo-detector-calibration",
        &[k as u64, eps.to_bits(), tolerance_c.to_bits(), budget.to_bits()],
    );
    let rate = |density: f64, packed: bool, family: u64| -> f64 {
        let m = ((density * n as f64).round() as usize).max(1);
        let mut fires = 0u64;
        for trial in 0..trials {
            let mut rng = stream_rng(cal_seed, family * trials + trial);
            let s = if packed {
                packed_extremal(n, m, k)
            } else {
                sprinkled_extremal(n, m, k, &mut rng)
            };
            if shape.run(n, &mut |i| s[i], &mut rng) {
                fires += 1;
            }
        }
        fires as f64 / trials as f64
    };
    let close_rate = rate(close_eps, false, 0).max(rate(close_eps, true, 1));
    let far_rate = rate(eps, false, 2).min(rate(eps, true, 3));
    let mid = (close_rate + far_rate) / 2.0;
    let cutoff = ((mid * runs as f64).ceil() as u32).clamp(1, runs);
    DetectorCalibration { close_rate, far_rate, runs, cutoff, queries_per_run: shape.queries_per_run() }
}

/// Tolerant tester for 1-dimensional almost-homogeneous binary patterns:
/// distinguishes relative distance at most `eps / (16 + c)` from distance at
/// least `eps`, each side with probability at least 2/3, using `O(1/eps)`
/// queries per detector run.
///
/// The detector samples single entries and blocks of length `2k - 1` and
/// fires when a sampled special symbol precedes a background run seen inside
/// a sampled block. The decision repeats the detector and compares the fire
/// count against a cutoff calibrated once per `(k, eps, c)` on synthetic
/// extremal inputs; the calibration is deterministic and echoed in the
/// verdict.
pub fn tolerant_test_almost_homo_1d(
    host: &NdArray,
    pattern: &Pattern,
    eps: f64,
    tolerance_c: f64,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<TestVerdict> {
    if host.ndim() != 1 || pattern.ndim() != 1 {
        return Err(Error::usage("tolerant_test_almost_homo_1d requires 1-dimensional inputs"));
    }
    if !host.alphabet().is_binary() {
        return Err(Error::usage("the almost-homogeneous tester applies to binary strings"));
    }
    let k = pattern.side();
    if !(eps > 0.0 && eps <= 1.0 / k as f64) {
        return Err(Error::usage(format!("eps must be in (0, 1/k], got {eps}")));
    }
    if tolerance_c <= 0.0 {
        return Err(Error::usage("the tolerance constant must be positive"));
    }
    let form = canonicalize_almost_homo_1d(pattern)?;
    let n = host.len();
    let shape = DetectorShape::new(k, eps, opts.almost_homo_budget);
    if n < shape.block_len {
        return Err(Error::usage(format!(
            "host length {n} is smaller than the detector block length {}",
            shape.block_len
        )));
    }
    let calibration = calibrate_detector(k, eps, tolerance_c, opts.almost_homo_budget);
    let view = CountedView::new(host);
    // Reads are translated into canonical space cell by cell, so query
    // accounting charges exactly the sampled cells.
    let mut read = |i: usize| -> Symbol {
        let src = if form.reverse { n - 1 - i } else { i };
        form.value_map[view.get_linear(src) as usize]
    };
    let mut fires = 0u32;
    for run in 0..calibration.runs {
        let mut rng = stream_rng(seed, run as u64);
        if shape.run(n, &mut read, &mut rng) {
            fires += 1;
        }
    }
    let accept = fires < calibration.cutoff;
    Ok(TestVerdict {
        accept,
        estimate: fires as f64 / calibration.runs as f64,
        threshold: calibration.cutoff as f64 / calibration.runs as f64,
        queries: view.queries(),
        seed,
        blocks: calibration.runs as u64,
        calibration: Some(calibration),
    })
}
