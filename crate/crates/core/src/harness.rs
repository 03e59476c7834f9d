//! Synthetic instances with measured distances, the query lower-bound
//! experiment, statistical trial runners and scaling benchmarks.
//!
//! Generators never report assumed distances: every emitted instance carries
//! a distance measured by the exact machinery.

use rand::Rng;
use serde::Serialize;

use crate::array::{DistanceValue, NdArray, Pattern, Symbol};
use crate::classify::{is_homogeneous, PatternKind};
use crate::error::{Error, Result};
use crate::exact1d::{deletion_set_1d, distance_exact_1d};
use crate::sampler::TestVerdict;
use crate::seeds::{param_key, stream_rng};

/// String of length `n` containing `copies` planted pattern copies at
/// pairwise spacing at least `2k`, over a background repaired to be
/// pattern-free. The returned distance is measured by [`distance_exact_1d`],
/// never assumed equal to `copies`.
pub fn gen_planted_1d(
    n: usize,
    pattern: &Pattern,
    copies: usize,
    seed: u64,
) -> Result<(NdArray, DistanceValue)> {
    if pattern.ndim() != 1 {
        return Err(Error::usage("gen_planted_1d requires a 1-dimensional pattern"));
    }
    let k = pattern.side();
    if copies * 2 * k > n {
        return Err(Error::Infeasible(format!(
            "cannot place {copies} copies of side {k} with spacing 2k in {n} cells"
        )));
    }
    let sigma = pattern.alphabet().size() as u16;
    let mut rng = stream_rng(seed, 0);
    let mut values: Vec<Symbol> = match &pattern.classification().kind {
        PatternKind::Removable { .. } => {
            let raw: Vec<Symbol> = (0..n).map(|_| rng.gen_range(0..sigma)).collect();
            let host = NdArray::new(vec![n], pattern.alphabet(), raw)?;
            let repair = deletion_set_1d(&host, pattern)?;
            host.apply_flips(&repair)?.values().to_vec()
        }
        PatternKind::NotRemovable { background, .. } => vec![*background; n],
        PatternKind::UnknownSmall => {
            return Err(Error::usage("1-dimensional patterns are never UnknownSmall"))
        }
    };
    if copies > 0 {
        // Sorted draws plus a fixed 2k stride keep the copies spaced.
        let slack = n - k - (copies - 1) * 2 * k;
        let mut offsets: Vec<usize> = (0..copies).map(|_| rng.gen_range(0..=slack)).collect();
        offsets.sort_unstable();
        for (i, off) in offsets.iter().enumerate() {
            let p = off + i * 2 * k;
            values[p..p + k].copy_from_slice(pattern.values());
        }
    }
    let host = NdArray::new(vec![n], pattern.alphabet(), values)?;
    let bounds = distance_exact_1d(&host, pattern)?;
    let measured = bounds.exact_value().ok_or_else(|| {
        Error::usage("planted generator requires a pattern with exact distance support")
    })?;
    Ok((host, measured))
}

/// d-dimensional analog: `copies` pattern copies stamped at grid anchors
/// spaced `2k` per axis into a constant pattern-free background. Returns the
/// array and its measured absolute hitting number.
pub fn gen_planted_nd(
    dims: &[usize],
    pattern: &Pattern,
    copies: usize,
    seed: u64,
) -> Result<(NdArray, u64)> {
    let d = dims.len();
    if pattern.ndim() != d {
        return Err(Error::usage("pattern dimension must match the requested shape"));
    }
    let k = pattern.side();
    let fill: Symbol = if is_homogeneous(pattern) && pattern.values()[0] == 0 { 1 } else { 0 };
    let grid: Vec<usize> = dims
        .iter()
        .map(|&n| if n < k { 0 } else { (n - k) / (2 * k) + 1 })
        .collect();
    let slots: usize = grid.iter().product();
    if copies > slots {
        return Err(Error::Infeasible(format!(
            "grid of {slots} anchors cannot hold {copies} copies"
        )));
    }
    let mut host = NdArray::filled(dims.to_vec(), pattern.alphabet(), fill)?;
    let mut rng = stream_rng(seed, 0);
    let mut chosen = std::collections::BTreeSet::new();
    while chosen.len() < copies {
        chosen.insert(rng.gen_range(0..slots));
    }
    for slot in chosen {
        let mut rem = slot;
        let mut anchor = vec![0usize; d];
        for axis in (0..d).rev() {
            anchor[axis] = (rem % grid[axis]) * 2 * k;
            rem /= grid[axis];
        }
        for (j, cell) in crate::array::box_indices(dims, &anchor, &vec![k; d]).iter().enumerate() {
            host.values_mut()[*cell] = pattern.values()[j];
        }
    }
    let (hitting, _) = crate::ndcombin::hitting_number_nd(&host, pattern)?;
    Ok((host, hitting))
}

/// Which of the two lower-bound distributions to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LbKind {
    /// The all-background string.
    B,
    /// Background with `2 eps n` planted ones, one in the right half of each
    /// chosen length-k interval.
    C,
}

/// Parameters of the lower-bound construction for the pattern
/// `J = 0^(k/2-1) 1 0^(k/2)`.
#[derive(Debug, Clone, Copy)]
pub struct LbInstanceSpec {
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub kind: LbKind,
}

impl LbInstanceSpec {
    /// Number of planted ones (`2 eps n`), validated to be integral.
    pub fn ones(&self) -> Result<usize> {
        let m = 2.0 * self.eps * self.n as f64;
        if (m - m.round()).abs() > 1e-9 {
            return Err(Error::usage(format!("2 * eps * n = {m} must be an integer")));
        }
        Ok(m.round() as usize)
    }

    pub fn validate(&self) -> Result<usize> {
        if self.k < 2 || !self.k.is_multiple_of(2) {
            return Err(Error::usage(format!("k must be even and at least 2, got {}", self.k)));
        }
        if self.n == 0 || !self.n.is_multiple_of(self.k) {
            return Err(Error::usage(format!("n = {} must be a positive multiple of k", self.n)));
        }
        let m = self.ones()?;
        let intervals = self.n / self.k;
        // A one in the last interval has no room for its trailing zeros, so
        // sampling avoids it; see `lb_pattern`.
        if m + 1 > intervals {
            return Err(Error::usage(format!(
                "need 2 eps n <= n/k - 1 intervals, got {m} ones for {intervals} intervals"
            )));
        }
        Ok(m)
    }

    /// The forbidden pattern of the construction.
    pub fn lb_pattern(&self) -> Pattern {
        let mut v = vec![0 as Symbol; self.k];
        v[self.k / 2 - 1] = 1;
        Pattern::new(NdArray::new(vec![self.k], crate::array::Alphabet::binary(), v).unwrap())
            .unwrap()
    }

    /// Positions of the planted ones for one C-sample: `ones()` distinct
    /// intervals (the last interval excluded), one uniformly chosen position
    /// in each interval's right half.
    pub fn one_positions(&self, seed: u64) -> Result<Vec<usize>> {
        let m = self.validate()?;
        if matches!(self.kind, LbKind::B) {
            return Ok(Vec::new());
        }
        let intervals = self.n / self.k - 1;
        let mut rng = stream_rng(seed, 0);
        let mut chosen = std::collections::BTreeSet::new();
        while chosen.len() < m {
            chosen.insert(rng.gen_range(0..intervals));
        }
        let mut positions = Vec::with_capacity(m);
        for interval in chosen {
            let offset = self.k / 2 + rng.gen_range(0..self.k / 2);
            positions.push(interval * self.k + offset);
        }
        Ok(positions)
    }
}

/// Materializes one sample from the lower-bound distribution.
pub fn lb_sample(spec: &LbInstanceSpec, seed: u64) -> Result<NdArray> {
    spec.validate()?;
    let mut values = vec![0 as Symbol; spec.n];
    for p in spec.one_positions(seed)? {
        values[p] = 1;
    }
    NdArray::new(vec![spec.n], crate::array::Alphabet::binary(), values)
}

/// Outcome of the fixed-probe experiment against the C distribution.
#[derive(Debug, Clone, Serialize)]
pub struct LbExperimentReport {
    pub trials: u64,
    pub hits: u64,
    /// Fraction of C-samples in which some probe read a one.
    pub frequency: f64,
    /// The union bound `4 eps |X|`.
    pub union_bound: f64,
    /// Three binomial standard deviations at the bound.
    pub three_sigma: f64,
    pub within_bound: bool,
    pub probes: usize,
}

/// Samples `trials` C-instances (sparsely, without materializing strings)
/// and reports how often the fixed probe set `probes` sees a one. The
/// frequency must stay below `4 eps |X|` plus binomial noise.
pub fn lb_experiment(
    spec: &LbInstanceSpec,
    probes: &[usize],
    trials: u64,
    seed: u64,
) -> Result<LbExperimentReport> {
    spec.validate()?;
    if probes.iter().any(|&p| p >= spec.n) {
        return Err(Error::usage("probe position out of bounds"));
    }
    let probe_set: std::collections::HashSet<usize> = probes.iter().copied().collect();
    let mut hits = 0u64;
    for trial in 0..trials {
        let trial_seed = param_key("lb-trial", &[seed, trial]);
        let ones = spec.one_positions(trial_seed)?;
        if ones.iter().any(|p| probe_set.contains(p)) {
            hits += 1;
        }
    }
    let frequency = hits as f64 / trials as f64;
    let union_bound = (4.0 * spec.eps * probes.len() as f64).min(1.0);
    let three_sigma = 3.0 * (union_bound * (1.0 - union_bound) / trials as f64).sqrt();
    Ok(LbExperimentReport {
        trials,
        hits,
        frequency,
        union_bound,
        three_sigma,
        within_bound: frequency <= union_bound + three_sigma,
        probes: probes.len(),
    })
}

/// Default probe set: `size` positions spread over distinct intervals, in
/// the right half when `right_half` is set (where the ones live) and the
/// left half otherwise (where a one never lands).
pub fn lb_probe_set(n: usize, k: usize, size: usize, right_half: bool) -> Vec<usize> {
    let intervals = n / k - 1;
    let size = size.min(intervals);
    (0..size)
        .map(|i| {
            let interval = i * intervals / size;
            interval * k + if right_half { k / 2 } else { 0 }
        })
        .collect()
}

/// One randomized-trial record; serialized as one JSON object per line.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub label: String,
    pub accept: bool,
    pub queries: u64,
    pub nanos: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LabelStats {
    pub label: String,
    pub trials: u64,
    pub accepts: u64,
    pub accept_rate: f64,
    pub mean_queries: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialSummary {
    pub per_label: Vec<LabelStats>,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

/// Runs `trials` generate-then-test rounds with per-trial derived seeds and
/// aggregates accept rates and query statistics per instance label.
pub fn run_trials<G, T>(trials: u64, seed: u64, generate: G, test: T) -> Result<TrialSummary>
where
    G: Fn(u64) -> Result<(NdArray, String)>,
    T: Fn(&NdArray, u64) -> Result<TestVerdict>,
{
    let mut records = Vec::with_capacity(trials as usize);
    for trial in 0..trials {
        let trial_seed = param_key("trial", &[seed, trial]);
        let (host, label) = generate(trial_seed)?;
        let timer = crate::seeds::WallTimer::start();
        let verdict = test(&host, trial_seed)?;
        records.push(TrialRecord {
            seed: trial_seed,
            label,
            accept: verdict.accept,
            queries: verdict.queries,
            nanos: timer.elapsed_nanos(),
        });
    }
    let mut labels: Vec<String> = records.iter().map(|r| r.label.clone()).collect();
    labels.sort();
    labels.dedup();
    let per_label = labels
        .into_iter()
        .map(|label| {
            let subset: Vec<&TrialRecord> = records.iter().filter(|r| r.label == label).collect();
            let accepts = subset.iter().filter(|r| r.accept).count() as u64;
            LabelStats {
                trials: subset.len() as u64,
                accepts,
                accept_rate: accepts as f64 / subset.len() as f64,
                mean_queries: subset.iter().map(|r| r.queries as f64).sum::<f64>()
                    / subset.len() as f64,
                label,
            }
        })
        .collect();
    Ok(TrialSummary { per_label, records })
}

/// Writes trial records as line-delimited JSON.
pub fn write_records<W: std::io::Write>(mut out: W, records: &[TrialRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Benchmarked operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchOp {
    /// Exact distance for a removable pattern (hitting-number path).
    ExactRemovable,
    /// Exact distance for an almost-homogeneous pattern (streaming path).
    ExactAlmostHomo,
    /// Hitting number of one sampling block (constant work per call).
    WindowHitting,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub median_nanos: u64,
    /// The measured distance (or block count), pinning the computation.
    pub result: u64,
}

/// Runs the operation over planted instances of the given sizes and reports
/// median wall times. Repetitions interleave the sizes so load drift hits
/// every size alike.
pub fn scaling_bench(op: BenchOp, sizes: &[usize], reps: u32, seed: u64) -> Result<Vec<BenchRow>> {
    let mut instances = Vec::with_capacity(sizes.len());
    for (i, &n) in sizes.iter().enumerate() {
        let instance_seed = param_key("bench", &[seed, i as u64]);
        let pattern = match op {
            BenchOp::ExactRemovable | BenchOp::WindowHitting => Pattern::bits("1001"),
            BenchOp::ExactAlmostHomo => Pattern::bits("1000"),
        };
        let (host, _) = gen_planted_1d(n, &pattern, n / 100, instance_seed)?;
        instances.push((n, host, pattern, instance_seed));
    }
    let mut times = vec![Vec::with_capacity(reps as usize); sizes.len()];
    let mut results = vec![0u64; sizes.len()];
    for rep in 0..reps.max(1) {
        for (i, (n, host, pattern, instance_seed)) in instances.iter().enumerate() {
            let timer = crate::seeds::WallTimer::start();
            results[i] = match op {
                BenchOp::ExactRemovable | BenchOp::ExactAlmostHomo => {
                    distance_exact_1d(host, pattern)?
                        .exact_value()
                        .map(|v| v.absolute)
                        .unwrap_or(0)
                }
                BenchOp::WindowHitting => {
                    let block = (12 * pattern.side()).min(*n);
                    let mut rng = stream_rng(*instance_seed, rep as u64 + 1);
                    let start = rng.gen_range(0..*n);
                    let w = host.extract_cyclic_window(&[start], &[block])?;
                    let occ = crate::matcher::occurrences_in_extracted_window(&w, pattern)?;
                    crate::exact1d::greedy_hitting_positions(occ.starts(), pattern.side()).len()
                        as u64
                }
            };
            times[i].push(timer.elapsed_nanos());
        }
    }
    Ok(instances
        .iter()
        .enumerate()
        .map(|(i, (n, _, _, _))| {
            times[i].sort_unstable();
            BenchRow { n: *n, median_nanos: times[i][times[i].len() / 2], result: results[i] }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact1d::hitting_number_1d;
    use crate::matcher::find_occurrences_1d;

    #[test]
    fn planted_free_when_no_copies() {
        let p = Pattern::bits("101");
        let (host, dist) = gen_planted_1d(80, &p, 0, 1).unwrap();
        assert_eq!(dist.absolute, 0);
        assert!(find_occurrences_1d(&host, &p).unwrap().is_empty());
    }

    #[test]
    fn planted_distance_is_measured() {
        let p = Pattern::bits("101");
        let (host, dist) = gen_planted_1d(60, &p, 3, 2).unwrap();
        assert_eq!(host.len(), 60);
        // Three disjoint planted copies need at least three changes; the
        // measured value is authoritative and pinned for this seed.
        assert!(dist.absolute >= 3);
        assert_eq!(dist.absolute, 3);
    }

    #[test]
    fn planted_respects_infeasible_density() {
        let p = Pattern::bits("101");
        assert!(matches!(gen_planted_1d(10, &p, 3, 1), Err(Error::Infeasible(_))));
    }

    #[test]
    fn planted_almost_homogeneous_background_is_free() {
        let p = Pattern::bits("1000");
        let (host, dist) = gen_planted_1d(200, &p, 5, 3).unwrap();
        assert_eq!(dist.absolute, 5);
        assert_eq!(host.len(), 200);
    }

    #[test]
    fn planted_nd_hitting_equals_copies_for_disjoint_plants() {
        let p = Pattern::new(
            NdArray::new(vec![2, 2], crate::array::Alphabet::binary(), vec![0, 1, 1, 0]).unwrap(),
        )
        .unwrap();
        let (host, h) = gen_planted_nd(&[20, 20], &p, 6, 4).unwrap();
        assert_eq!(h, 6);
        assert_eq!(host.dims(), &[20, 20]);
    }

    #[test]
    fn lb_samples_have_the_advertised_structure() {
        let spec = LbInstanceSpec { n: 400, k: 10, eps: 0.01, kind: LbKind::C };
        let m = spec.validate().unwrap();
        assert_eq!(m, 8);
        let j = spec.lb_pattern();
        assert_eq!(j.values().iter().filter(|&&v| v == 1).count(), 1);
        for seed in 0..50 {
            let sample = lb_sample(&spec, seed).unwrap();
            let ones: Vec<usize> =
                (0..sample.len()).filter(|&i| sample.get_linear(i) == 1).collect();
            assert_eq!(ones.len(), m);
            for &p in &ones {
                let interval = p / spec.k;
                assert!(interval < spec.n / spec.k - 1);
                assert!(p % spec.k >= spec.k / 2, "one at {p} not in a right half");
            }
            // Exactly m copies of J.
            let occ = find_occurrences_1d(&sample, &j).unwrap();
            assert_eq!(occ.len(), m);
            // And the sample is eps-far: J is removable, so distance equals
            // the hitting number.
            let (h, _) = hitting_number_1d(&sample, &j).unwrap();
            assert!(h.absolute as f64 >= spec.eps * spec.n as f64);
        }
        let b = lb_sample(&LbInstanceSpec { kind: LbKind::B, ..spec }, 7).unwrap();
        assert!(b.values().iter().all(|&v| v == 0));
    }

    #[test]
    fn lb_experiment_left_probes_never_hit() {
        let spec = LbInstanceSpec { n: 400, k: 10, eps: 0.01, kind: LbKind::C };
        let left = lb_probe_set(spec.n, spec.k, 8, false);
        let report = lb_experiment(&spec, &left, 300, 5).unwrap();
        assert_eq!(report.hits, 0);
    }

    #[test]
    fn lb_experiment_right_probes_within_union_bound() {
        let spec = LbInstanceSpec { n: 2000, k: 10, eps: 0.005, kind: LbKind::C };
        let right = lb_probe_set(spec.n, spec.k, 15, true);
        let report = lb_experiment(&spec, &right, 2000, 6).unwrap();
        assert!(report.within_bound, "frequency {} bound {}", report.frequency, report.union_bound);
    }

    #[test]
    fn lb_hit_frequency_roughly_doubles_with_eps() {
        // Same probe set, doubled density: the union-bound term is linear in
        // eps, so the hit frequency should roughly double.
        let n = 20_000;
        let k = 10;
        let probes = lb_probe_set(n, k, 15, true);
        let lo = lb_experiment(
            &LbInstanceSpec { n, k, eps: 0.005, kind: LbKind::C },
            &probes,
            6000,
            8,
        )
        .unwrap();
        let hi = lb_experiment(
            &LbInstanceSpec { n, k, eps: 0.01, kind: LbKind::C },
            &probes,
            6000,
            9,
        )
        .unwrap();
        let ratio = hi.frequency / lo.frequency;
        assert!(
            (1.5..=2.5).contains(&ratio),
            "ratio {ratio:.2} ({} vs {})",
            lo.frequency,
            hi.frequency
        );
    }

    #[test]
    fn trial_runner_aggregates_by_label() {
        let p = Pattern::bits("101");
        let summary = run_trials(
            10,
            3,
            |seed| {
                let far = seed % 2 == 0;
                let host = if far {
                    NdArray::bits(&"10".repeat(200))
                } else {
                    NdArray::bits(&"0".repeat(400))
                };
                Ok((host, if far { "far" } else { "free" }.to_string()))
            },
            |host, seed| {
                crate::sampler::tolerant_test_1d(
                    host,
                    &p,
                    0.01,
                    0.1,
                    seed,
                    &crate::sampler::SamplerOptions::default(),
                )
            },
        )
        .unwrap();
        assert_eq!(summary.per_label.len(), 2);
        let free = summary.per_label.iter().find(|l| l.label == "free").unwrap();
        assert_eq!(free.accept_rate, 1.0);
        let mut buf = Vec::new();
        write_records(&mut buf, &summary.records).unwrap();
        assert_eq!(buf.iter().filter(|&&b| b == b'\n').count(), 10);
    }

    #[test]
    fn bench_rows_cover_requested_sizes() {
        let rows = scaling_bench(BenchOp::ExactRemovable, &[2000, 4000], 3, 1).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.result > 0));
    }
}
