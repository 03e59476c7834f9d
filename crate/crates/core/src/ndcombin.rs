//! d-dimensional combinatorics: exact hitting numbers on small instances by
//! branch and bound, safe flips by verified local search, the two-phase
//! deletion procedure bounding the deletion number by `alpha_d = 4^d + 2^d`
//! times the hitting number, and the half-independence helpers used in its
//! analysis.

use std::collections::BTreeSet;

use crate::array::{box_indices, strides, NdArray, OccurrenceSet, Pattern, Symbol};
use crate::error::{Error, Result};
use crate::matcher::find_occurrences_nd;

/// `alpha_d = 4^d + 2^d`: the deletion number is at most `alpha_d` times the
/// hitting number for removable patterns.
pub fn alpha_d(d: usize) -> u64 {
    4u64.pow(d as u32) + 2u64.pow(d as u32)
}

/// Exact minimal hitting set over an explicit occurrence list: greedy upper
/// bound, disjoint-occurrence lower bound, then branch and bound on the
/// cells of a hardest-to-cover occurrence.
pub(crate) fn hitting_of_occurrences(
    dims: &[usize],
    pattern_side: usize,
    starts: &[usize],
) -> (u64, Vec<usize>) {
    if starts.is_empty() {
        return (0, Vec::new());
    }
    let d = dims.len();
    let sides = vec![pattern_side; d];
    let dims_helper = NdArray::filled(dims.to_vec(), crate::array::Alphabet::binary(), 0)
        .expect("shape is valid");
    let occ_cells: Vec<Vec<usize>> = starts
        .iter()
        .map(|&s| box_indices(dims, &dims_helper.coord_of(s), &sides))
        .collect();

    let mut solver = HittingSolver { occ_cells: &occ_cells, best: Vec::new(), best_len: usize::MAX };
    let greedy = solver.greedy_cover();
    solver.best_len = greedy.len();
    solver.best = greedy;
    solver.branch(&mut Vec::new(), &(0..occ_cells.len()).collect::<Vec<_>>());
    let mut cells = solver.best;
    cells.sort_unstable();
    (cells.len() as u64, cells)
}

struct HittingSolver<'a> {
    occ_cells: &'a [Vec<usize>],
    best: Vec<usize>,
    best_len: usize,
}

impl HittingSolver<'_> {
    fn greedy_cover(&self) -> Vec<usize> {
        let mut uncovered: Vec<usize> = (0..self.occ_cells.len()).collect();
        let mut chosen = Vec::new();
        while !uncovered.is_empty() {
            let mut counts: std::collections::HashMap<usize, usize> = Default::default();
            for &o in &uncovered {
                for &c in &self.occ_cells[o] {
                    *counts.entry(c).or_insert(0) += 1;
                }
            }
            let (&cell, _) = counts
                .iter()
                .max_by_key(|&(&cell, &cnt)| (cnt, std::cmp::Reverse(cell)))
                .expect("uncovered occurrences have cells");
            chosen.push(cell);
            uncovered.retain(|&o| !self.occ_cells[o].contains(&cell));
        }
        chosen
    }

    /// Lower bound: greedily packed pairwise-disjoint occurrences each need
    /// their own cell.
    fn disjoint_lower_bound(&self, uncovered: &[usize]) -> usize {
        let mut used: BTreeSet<usize> = BTreeSet::new();
        let mut count = 0;
        for &o in uncovered {
            if self.occ_cells[o].iter().all(|c| !used.contains(c)) {
                used.extend(self.occ_cells[o].iter().copied());
                count += 1;
            }
        }
        count
    }

    fn branch(&mut self, chosen: &mut Vec<usize>, uncovered: &[usize]) {
        if uncovered.is_empty() {
            if chosen.len() < self.best_len {
                self.best_len = chosen.len();
                self.best = chosen.clone();
            }
            return;
        }
        if chosen.len() + self.disjoint_lower_bound(uncovered) >= self.best_len {
            return;
        }
        // Branch on the occurrence whose cells have the least total
        // coverage, trying its cells in descending coverage order.
        let coverage = |cell: usize| {
            uncovered.iter().filter(|&&o| self.occ_cells[o].contains(&cell)).count()
        };
        let &target = uncovered
            .iter()
            .min_by_key(|&&o| self.occ_cells[o].iter().map(|&c| coverage(c)).sum::<usize>())
            .expect("nonempty");
        let mut cells = self.occ_cells[target].clone();
        cells.sort_by_key(|&c| std::cmp::Reverse(coverage(c)));
        for cell in cells {
            chosen.push(cell);
            let remaining: Vec<usize> = uncovered
                .iter()
                .copied()
                .filter(|&o| !self.occ_cells[o].contains(&cell))
                .collect();
            self.branch(chosen, &remaining);
            chosen.pop();
        }
    }
}

/// Exact minimal hitting number of a full array, with a witness set of
/// cells. Intended for small instances and sampler blocks, where the answer
/// is bounded by a constant.
pub fn hitting_number_nd(host: &NdArray, pattern: &Pattern) -> Result<(u64, Vec<usize>)> {
    let occ = find_occurrences_nd(host, pattern)?;
    Ok(hitting_of_occurrences(host.dims(), pattern.side(), occ.starts()))
}

/// Hitting number of an occurrence set reported by the matcher (window-local
/// coordinates allowed).
pub fn hitting_number_of(occ: &OccurrenceSet) -> (u64, Vec<usize>) {
    hitting_of_occurrences(occ.host_dims(), occ.pattern_side(), occ.starts())
}

/// Exact safety check for one candidate change at linear cell `pos`: any new
/// occurrence must contain the changed cell, so only the surrounding box of
/// starts is rescanned.
fn nd_change_is_safe(
    host: &NdArray,
    pattern: &Pattern,
    pos: usize,
    new_value: Symbol,
    destroyed_start: usize,
) -> bool {
    let d = host.ndim();
    let k = pattern.side();
    let host_strides = strides(host.dims());
    let pos_coord = host.coord_of(pos);
    let pv = pattern.values();
    let offsets = box_indices(host.dims(), &vec![0; d], &vec![k; d]);

    let mut lo = vec![0usize; d];
    let mut hi = vec![0usize; d];
    for axis in 0..d {
        lo[axis] = pos_coord[axis].saturating_sub(k - 1);
        hi[axis] = pos_coord[axis].min(host.dims()[axis] - k);
        if lo[axis] > hi[axis] {
            return true; // no candidate start can contain the cell
        }
    }
    let mut coord = lo.clone();
    loop {
        let base: usize = coord.iter().zip(&host_strides).map(|(&c, &s)| c * s).sum();
        if base != destroyed_start {
            let mut now_match = true;
            let mut was_match = true;
            for (j, &off) in offsets.iter().enumerate() {
                let cell = base + off;
                let now = if cell == pos { new_value } else { host.get_linear(cell) };
                if now != pv[j] {
                    now_match = false;
                    break;
                }
                if host.get_linear(cell) != pv[j] {
                    was_match = false;
                }
            }
            if now_match && !was_match {
                return false;
            }
        }
        let mut axis = d;
        loop {
            if axis == 0 {
                // The designated copy must actually be destroyed.
                let start_coord = host.coord_of(destroyed_start);
                let inside = (0..d).all(|a| {
                    pos_coord[a] >= start_coord[a] && pos_coord[a] < start_coord[a] + k
                });
                if inside {
                    let offset: Vec<usize> =
                        (0..d).map(|a| pos_coord[a] - start_coord[a]).collect();
                    let pidx = pattern.array().linear_index(&offset).expect("inside");
                    return pv[pidx] != new_value;
                }
                return true;
            }
            axis -= 1;
            coord[axis] += 1;
            if coord[axis] <= hi[axis] {
                break;
            }
            coord[axis] = lo[axis];
        }
    }
}

/// A `(cell, value)` change inside the copy at `start` that destroys it and
/// creates no new occurrence, found by exhaustive candidate search with a
/// local rescan. Fails with [`Error::NoSafeFlip`] when no candidate is safe,
/// which signals non-removable behaviour.
pub fn safe_flip_nd(host: &NdArray, start: &[usize], pattern: &Pattern) -> Result<(usize, Symbol)> {
    let k = pattern.side();
    let d = host.ndim();
    let start_idx = host.linear_index(start)?;
    let cells = box_indices(host.dims(), start, &vec![k; d]);
    let pv = pattern.values();
    for (j, &cell) in cells.iter().enumerate() {
        if host.get_linear(cell) != pv[j] {
            return Err(Error::usage(format!("no copy of the pattern starts at {start:?}")));
        }
    }
    let sigma = host.alphabet().size() as u16;
    for &cell in &cells {
        let orig = host.get_linear(cell);
        for v in 0..sigma {
            if v == orig {
                continue;
            }
            if nd_change_is_safe(host, pattern, cell, v, start_idx) {
                return Ok((cell, v));
            }
        }
    }
    Err(Error::NoSafeFlip { start: start.to_vec() })
}

/// Trace of the two-phase deletion procedure.
#[derive(Debug, Clone)]
pub struct ProcedureTrace {
    /// Cells flipped in phase 1 (centers of destroyed original copies).
    pub phase1: Vec<(usize, Symbol)>,
    /// Cells flipped in phase 2 (safe flips on copies created by phase 1).
    pub phase2: Vec<(usize, Symbol)>,
    /// Net difference between the original and the final array.
    pub flips: crate::array::FlipSet,
    /// Largest number of new copies recorded for a single phase-1 flip.
    pub max_created_by_one_flip: u64,
}

/// Makes the array pattern-free by the two-phase procedure: phase 1 destroys
/// every original copy by changing the center of the first remaining copy in
/// row-major order, collecting the copies those changes create; phase 2
/// removes the collected copies with verified safe flips, which create
/// nothing. The final array is re-verified to be pattern-free.
///
/// On success `phase2.len() <= 2^d * phase1.len()`: a central change creates
/// at most `2^d` new occurrences.
pub fn deletion_procedure_nd(host: &NdArray, pattern: &Pattern) -> Result<ProcedureTrace> {
    let k = pattern.side();
    let d = host.ndim();
    if host.ndim() != pattern.ndim() {
        return Err(Error::usage("host and pattern dimensions differ"));
    }
    let cap = alpha_d(d).saturating_mul(host.len() as u64);
    let sigma = host.alphabet().size() as u16;
    let mut work = host.clone();
    let occ = find_occurrences_nd(&work, pattern)?;
    let mut originals: BTreeSet<usize> = occ.starts().iter().copied().collect();
    let mut created: BTreeSet<usize> = BTreeSet::new();
    let mut phase1 = Vec::new();
    let mut phase2 = Vec::new();
    let mut max_created = 0u64;
    let host_strides = strides(host.dims());
    let center_offset: usize = (0..d).map(|a| (k / 2) * host_strides[a]).sum();

    let matches_at = |work: &NdArray, start: usize| -> bool {
        let coord = work.coord_of(start);
        let cells = box_indices(work.dims(), &coord, &vec![k; d]);
        cells.iter().zip(pattern.values()).all(|(&c, &p)| work.get_linear(c) == p)
    };
    let starts_containing = |work: &NdArray, cell: usize| -> Vec<usize> {
        let coord = work.coord_of(cell);
        let mut lo = vec![0usize; d];
        let mut hi = vec![0usize; d];
        for axis in 0..d {
            lo[axis] = coord[axis].saturating_sub(k - 1);
            hi[axis] = coord[axis].min(work.dims()[axis] - k);
            if lo[axis] > hi[axis] {
                return Vec::new();
            }
        }
        let mut out = Vec::new();
        let mut c = lo.clone();
        loop {
            out.push(c.iter().zip(&host_strides).map(|(&x, &s)| x * s).sum());
            let mut axis = d;
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                c[axis] += 1;
                if c[axis] <= hi[axis] {
                    break;
                }
                c[axis] = lo[axis];
            }
        }
    };

    // Phase 1.
    while let Some(&start) = originals.iter().next() {
        originals.remove(&start);
        // Entries of remaining originals were never touched: every flip so
        // far removed the copies containing it. Still, keep the procedure
        // total under forced misuse.
        if !matches_at(&work, start) {
            continue;
        }
        let center = start + center_offset;
        let new_value = (0..sigma).find(|&v| v != work.get_linear(center)).expect("sigma >= 2");
        let candidates = starts_containing(&work, center);
        let before: Vec<bool> = candidates.iter().map(|&s| matches_at(&work, s)).collect();
        work.values_mut()[center] = new_value;
        phase1.push((center, new_value));
        let mut created_here = 0u64;
        for (i, &s) in candidates.iter().enumerate() {
            let now = matches_at(&work, s);
            if now && !before[i] {
                created.insert(s);
                created_here += 1;
            }
            if !now {
                originals.remove(&s);
            }
        }
        max_created = max_created.max(created_here);
        if (phase1.len() + phase2.len()) as u64 > cap {
            return Err(Error::IterationCapExceeded {
                flips: (phase1.len() + phase2.len()) as u64,
                cap,
            });
        }
    }

    // Phase 2: safe flips create nothing, so the set only shrinks.
    while let Some(&start) = created.iter().next() {
        created.remove(&start);
        if !matches_at(&work, start) {
            continue;
        }
        let coord = work.coord_of(start);
        let (cell, value) = safe_flip_nd(&work, &coord, pattern)?;
        work.values_mut()[cell] = value;
        phase2.push((cell, value));
        if (phase1.len() + phase2.len()) as u64 > cap {
            return Err(Error::IterationCapExceeded {
                flips: (phase1.len() + phase2.len()) as u64,
                cap,
            });
        }
    }

    if !find_occurrences_nd(&work, pattern)?.is_empty() {
        return Err(Error::Internal("deletion procedure left pattern copies behind".into()));
    }
    let mut flips = crate::array::FlipSet::empty();
    for idx in 0..host.len() {
        if work.get_linear(idx) != host.get_linear(idx) {
            flips.push(idx, work.get_linear(idx));
        }
    }
    Ok(ProcedureTrace { phase1, phase2, flips, max_created_by_one_flip: max_created })
}

/// Checks the procedure's precondition without blocking forced callers.
pub fn deletion_procedure_checked(host: &NdArray, pattern: &Pattern) -> Result<ProcedureTrace> {
    if !pattern.classification().is_removable() {
        return Err(Error::usage(
            "deletion_procedure_nd requires a pattern classified removable; use the unchecked \
             entry point to force",
        ));
    }
    deletion_procedure_nd(host, pattern)
}

/// Two occurrences are half-independent if their starts differ by at least
/// k/2 on some axis.
fn half_independent(a: &[usize], b: &[usize], k: usize) -> bool {
    a.iter().zip(b).any(|(&x, &y)| 2 * x.abs_diff(y) >= k)
}

/// Maximum cardinality of a set of pairwise half-independent occurrences,
/// by exhaustive backtracking. Small instances only.
pub fn max_half_independent_set(host: &NdArray, pattern: &Pattern) -> Result<u64> {
    let occ = find_occurrences_nd(host, pattern)?;
    let coords = occ.coords();
    let k = pattern.side();
    let mut best = 0usize;
    let mut chosen: Vec<usize> = Vec::new();
    fn recurse(
        idx: usize,
        coords: &[Vec<usize>],
        k: usize,
        chosen: &mut Vec<usize>,
        best: &mut usize,
    ) {
        if chosen.len() + (coords.len() - idx) <= *best {
            return;
        }
        if idx == coords.len() {
            *best = (*best).max(chosen.len());
            return;
        }
        if chosen.iter().all(|&c| half_independent(&coords[c], &coords[idx], k)) {
            chosen.push(idx);
            recurse(idx + 1, coords, k, chosen, best);
            chosen.pop();
        }
        recurse(idx + 1, coords, k, chosen, best);
    }
    recurse(0, &coords, k, &mut chosen, &mut best);
    Ok(best as u64)
}

/// Whether the pattern is invariant under translation by `t`: entries whose
/// coordinates differ by an integer multiple of `t` are equal. Zero
/// components impose equality on their axis, and in one dimension this is
/// plain periodicity modulo `|t|`. This is the invariant that two
/// overlapping occurrences at relative offset `t` force on the pattern.
pub fn has_cycle(pattern: &Pattern, t: &[i64]) -> Result<bool> {
    let d = pattern.ndim();
    if t.len() != d {
        return Err(Error::usage(format!("offset vector has {} components, pattern has {d}", t.len())));
    }
    let k = pattern.side() as i64;
    for idx in 0..pattern.len() {
        let coord = pattern.array().coord_of(idx);
        let shifted: Vec<i64> = coord.iter().zip(t).map(|(&c, &ti)| c as i64 + ti).collect();
        if shifted.iter().all(|&c| c >= 0 && c < k) {
            let other: Vec<usize> = shifted.iter().map(|&c| c as usize).collect();
            if pattern.array().get(&other).expect("in bounds") != pattern.values()[idx] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::Alphabet;
    use crate::oracle::{brute_force_deletion_number, brute_force_hitting_number};
    use rand::Rng;

    fn stamp(host: &mut NdArray, pattern: &Pattern, start: &[usize]) {
        let k = pattern.side();
        let cells = box_indices(host.dims(), start, &vec![k; host.ndim()]);
        for (j, &cell) in cells.iter().enumerate() {
            host.values_mut()[cell] = pattern.values()[j];
        }
    }

    fn block_pattern() -> Pattern {
        Pattern::new(NdArray::new(vec![2, 2], Alphabet::binary(), vec![1, 1, 1, 1]).unwrap())
            .unwrap()
    }

    #[test]
    fn hitting_single_and_disjoint_copies() {
        let p = block_pattern();
        let mut host = NdArray::filled(vec![4, 4], Alphabet::binary(), 0).unwrap();
        stamp(&mut host, &p, &[1, 1]);
        assert_eq!(hitting_number_nd(&host, &p).unwrap().0, 1);

        let mut host = NdArray::filled(vec![6, 6], Alphabet::binary(), 0).unwrap();
        stamp(&mut host, &p, &[0, 0]);
        stamp(&mut host, &p, &[4, 4]);
        let (h, cells) = hitting_number_nd(&host, &p).unwrap();
        assert_eq!(h, 2);
        assert_eq!(h, brute_force_hitting_number(&host, &p));
        assert_eq!(cells.len(), 2);
    }

    #[test]
    fn hitting_matches_1d_greedy() {
        let mut rng = crate::seeds::stream_rng(41, 0);
        for _ in 0..1000 {
            let n = rng.gen_range(4..16);
            let k = rng.gen_range(2..5.min(n));
            let host = NdArray::new(
                vec![n],
                Alphabet::binary(),
                (0..n).map(|_| rng.gen_range(0..2)).collect(),
            )
            .unwrap();
            let pattern = Pattern::new(
                NdArray::new(vec![k], Alphabet::binary(), (0..k).map(|_| rng.gen_range(0..2)).collect())
                    .unwrap(),
            )
            .unwrap();
            let (h1d, _) = crate::exact1d::hitting_number_1d(&host, &pattern).unwrap();
            let (hnd, _) = hitting_number_nd(&host, &pattern).unwrap();
            assert_eq!(h1d.absolute, hnd);
        }
    }

    #[test]
    fn hitting_matches_brute_force_on_2d_instances() {
        let mut rng = crate::seeds::stream_rng(42, 0);
        for _ in 0..60 {
            let rows = rng.gen_range(4..6);
            let cols = rng.gen_range(4..6);
            let host = NdArray::new(
                vec![rows, cols],
                Alphabet::binary(),
                (0..rows * cols).map(|_| rng.gen_range(0..2)).collect(),
            )
            .unwrap();
            let p = Pattern::new(
                NdArray::new(
                    vec![2, 2],
                    Alphabet::binary(),
                    (0..4).map(|_| rng.gen_range(0..2)).collect(),
                )
                .unwrap(),
            )
            .unwrap();
            let (h, cells) = hitting_number_nd(&host, &p).unwrap();
            if h <= 4 {
                assert_eq!(h, brute_force_hitting_number(&host, &p));
            }
            // The witness set must actually hit everything.
            let occ = find_occurrences_nd(&host, &p).unwrap();
            for &s in occ.starts() {
                let coord = host.coord_of(s);
                let box_cells = box_indices(host.dims(), &coord, &[2, 2]);
                assert!(cells.iter().any(|c| box_cells.contains(c)));
            }
        }
    }

    #[test]
    fn safe_flip_on_homogeneous_block() {
        let p = Pattern::new(NdArray::new(vec![2, 2], Alphabet::binary(), vec![0; 4]).unwrap())
            .unwrap();
        let host = NdArray::filled(vec![4, 4], Alphabet::binary(), 0).unwrap();
        let (cell, v) = safe_flip_nd(&host, &[1, 1], &p).unwrap();
        let mut changed = host.clone();
        changed.values_mut()[cell] = v;
        let occ = find_occurrences_nd(&changed, &p).unwrap();
        let before = find_occurrences_nd(&host, &p).unwrap();
        assert!(!occ.contains(host.linear_index(&[1, 1]).unwrap()));
        for s in occ.starts() {
            assert!(before.contains(*s));
        }
    }

    #[test]
    fn safe_flip_fails_on_remark_witness() {
        let (p, m) = crate::classify::remark_witness_d2plus(2).unwrap();
        assert!(matches!(
            safe_flip_nd(&m, &[1, 1], &p),
            Err(Error::NoSafeFlip { .. })
        ));
    }

    #[test]
    fn safe_flip_verified_on_random_planted_instances() {
        let mut rng = crate::seeds::stream_rng(43, 0);
        // Removable because symbol 1 never fills the whole 2x2 box.
        let p = Pattern::new(NdArray::new(vec![2, 2], Alphabet::binary(), vec![0, 1, 1, 0]).unwrap())
            .unwrap();
        for _ in 0..200 {
            let mut host = NdArray::new(
                vec![8, 8],
                Alphabet::binary(),
                (0..64).map(|_| rng.gen_range(0..2)).collect(),
            )
            .unwrap();
            let r = rng.gen_range(0..7);
            let c = rng.gen_range(0..7);
            stamp(&mut host, &p, &[r, c]);
            let before = find_occurrences_nd(&host, &p).unwrap();
            let (cell, v) = safe_flip_nd(&host, &[r, c], &p).unwrap();
            let mut changed = host.clone();
            changed.values_mut()[cell] = v;
            let after = find_occurrences_nd(&changed, &p).unwrap();
            assert!(!after.contains(host.linear_index(&[r, c]).unwrap()));
            for s in after.starts() {
                assert!(before.contains(*s), "created {s}");
            }
        }
    }

    #[test]
    fn procedure_empty_on_free_array() {
        let p = block_pattern();
        let host = NdArray::filled(vec![5, 5], Alphabet::binary(), 0).unwrap();
        let trace = deletion_procedure_nd(&host, &p).unwrap();
        assert!(trace.phase1.is_empty());
        assert!(trace.phase2.is_empty());
        assert!(trace.flips.is_empty());
    }

    #[test]
    fn procedure_single_isolated_copy() {
        let p = block_pattern();
        let mut host = NdArray::filled(vec![6, 6], Alphabet::binary(), 0).unwrap();
        stamp(&mut host, &p, &[2, 2]);
        let trace = deletion_procedure_nd(&host, &p).unwrap();
        assert_eq!(trace.phase1.len(), 1);
        assert!(trace.phase2.len() <= 4);
        let freed = host.apply_flips(&trace.flips).unwrap();
        assert!(find_occurrences_nd(&freed, &p).unwrap().is_empty());
    }

    #[test]
    fn procedure_random_instances_free_and_bounded() {
        let mut rng = crate::seeds::stream_rng(44, 0);
        let p = Pattern::new(NdArray::new(vec![2, 2], Alphabet::binary(), vec![0, 1, 1, 0]).unwrap())
            .unwrap();
        for _ in 0..80 {
            let host = NdArray::new(
                vec![10, 10],
                Alphabet::binary(),
                (0..100).map(|_| rng.gen_range(0..2)).collect(),
            )
            .unwrap();
            let trace = deletion_procedure_nd(&host, &p).unwrap();
            let freed = host.apply_flips(&trace.flips).unwrap();
            assert!(find_occurrences_nd(&freed, &p).unwrap().is_empty());
            assert!(trace.flips.len() <= (4 + 1) * trace.phase1.len().max(1));
            assert!(trace.phase2.len() <= 4 * trace.phase1.len());
        }
    }

    #[test]
    fn central_flip_creates_at_most_2_pow_d() {
        let mut rng = crate::seeds::stream_rng(45, 0);
        let mut tried = 0;
        while tried < 10_000 {
            let rows = rng.gen_range(4..9);
            let cols = rng.gen_range(4..9);
            let k = 2usize;
            let host = NdArray::new(
                vec![rows, cols],
                Alphabet::binary(),
                (0..rows * cols).map(|_| rng.gen_range(0..2)).collect(),
            )
            .unwrap();
            let p = Pattern::new(
                NdArray::new(
                    vec![k, k],
                    Alphabet::binary(),
                    (0..k * k).map(|_| rng.gen_range(0..2)).collect(),
                )
                .unwrap(),
            )
            .unwrap();
            let occ = find_occurrences_nd(&host, &p).unwrap();
            if occ.is_empty() {
                continue;
            }
            let start = occ.starts()[rng.gen_range(0..occ.len())];
            let coord = host.coord_of(start);
            let center: Vec<usize> = coord.iter().map(|&c| c + k / 2).collect();
            let mut flipped = host.clone();
            let idx = flipped.linear_index(&center).unwrap();
            flipped.values_mut()[idx] ^= 1;
            let after = find_occurrences_nd(&flipped, &p).unwrap();
            let created = after.starts().iter().filter(|s| !occ.contains(**s)).count();
            assert!(created <= 4, "central flip created {created} copies");
            tried += 1;
        }
    }

    #[test]
    fn half_independence_examples_and_bound() {
        let p = block_pattern();
        let host = NdArray::filled(vec![4, 4], Alphabet::binary(), 0).unwrap();
        assert_eq!(max_half_independent_set(&host, &p).unwrap(), 0);

        // Two copies offset by (k, 0); the mixed pattern avoids accidental
        // merged occurrences.
        let q = Pattern::new(
            NdArray::new(vec![2, 2], Alphabet::binary(), vec![0, 1, 1, 0]).unwrap(),
        )
        .unwrap();
        let mut host = NdArray::filled(vec![6, 6], Alphabet::binary(), 0).unwrap();
        stamp(&mut host, &q, &[0, 0]);
        stamp(&mut host, &q, &[2, 0]);
        assert_eq!(max_half_independent_set(&host, &q).unwrap(), 2);

        let mut rng = crate::seeds::stream_rng(46, 0);
        let q = Pattern::new(
            NdArray::new(vec![2, 2], Alphabet::binary(), vec![0, 1, 1, 0]).unwrap(),
        )
        .unwrap();
        for _ in 0..60 {
            let host = NdArray::new(
                vec![6, 6],
                Alphabet::binary(),
                (0..36).map(|_| rng.gen_range(0..2)).collect(),
            )
            .unwrap();
            let i = max_half_independent_set(&host, &q).unwrap();
            let (h, _) = hitting_number_nd(&host, &q).unwrap();
            assert!(i <= 4 * h, "i={i} h={h}");
        }
    }

    #[test]
    fn cycles() {
        let homo = Pattern::new(NdArray::new(vec![2, 2], Alphabet::binary(), vec![1; 4]).unwrap())
            .unwrap();
        assert!(has_cycle(&homo, &[1, 1]).unwrap());
        assert!(has_cycle(&homo, &[0, 3]).unwrap());

        let p101 = Pattern::bits("101");
        assert!(has_cycle(&p101, &[2]).unwrap());
        assert!(!has_cycle(&p101, &[1]).unwrap());
    }

    #[test]
    fn overlapping_nd_occurrences_imply_cycles() {
        let mut rng = crate::seeds::stream_rng(47, 0);
        for _ in 0..400 {
            let rows = rng.gen_range(3..7);
            let cols = rng.gen_range(3..7);
            let k = 2usize;
            let host = NdArray::new(
                vec![rows, cols],
                Alphabet::binary(),
                (0..rows * cols).map(|_| rng.gen_range(0..2)).collect(),
            )
            .unwrap();
            let p = Pattern::new(
                NdArray::new(
                    vec![k, k],
                    Alphabet::binary(),
                    (0..k * k).map(|_| rng.gen_range(0..2)).collect(),
                )
                .unwrap(),
            )
            .unwrap();
            let occ = find_occurrences_nd(&host, &p).unwrap();
            let coords = occ.coords();
            for i in 0..coords.len() {
                for j in i + 1..coords.len() {
                    let dr = coords[j][0] as i64 - coords[i][0] as i64;
                    let dc = coords[j][1] as i64 - coords[i][1] as i64;
                    if dr.unsigned_abs() < k as u64 && dc.unsigned_abs() < k as u64 {
                        assert!(
                            has_cycle(&p, &[dr, dc]).unwrap(),
                            "pattern {:?} occurrences at {:?} and {:?}",
                            p.values(),
                            coords[i],
                            coords[j]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn sandwich_on_small_random_instances() {
        let mut rng = crate::seeds::stream_rng(48, 0);
        let p = Pattern::new(NdArray::new(vec![2, 2], Alphabet::binary(), vec![0, 1, 1, 0]).unwrap())
            .unwrap();
        let mut checked = 0;
        while checked < 25 {
            let mut host = NdArray::filled(vec![6, 6], Alphabet::binary(), 0).unwrap();
            for _ in 0..rng.gen_range(0..3) {
                let r = rng.gen_range(0..5);
                let c = rng.gen_range(0..5);
                stamp(&mut host, &p, &[r, c]);
            }
            let (h, _) = hitting_number_nd(&host, &p).unwrap();
            let trace = deletion_procedure_nd(&host, &p).unwrap();
            let bf = match brute_force_deletion_number(&host, &p, 4) {
                crate::oracle::BruteForceCount::Exact(v) => v,
                crate::oracle::BruteForceCount::Exceeded(_) => continue,
            };
            assert!(h <= bf);
            assert!(bf <= trace.flips.len() as u64);
            assert!(bf <= alpha_d(2) * h);
            checked += 1;
        }
    }
}
