//! Independent brute-force references, used to validate the combinatorial
//! claims at desk scale. These are deliberately written from the definitions
//! and share no code with the fast paths: occurrence scanning here is a plain
//! nested-loop comparison, and the deletion-number search enumerates subsets
//! of all cells (not just occurrence-covered ones) under iterative deepening.

use rand::Rng;

use crate::array::{NdArray, Pattern, Symbol};
use crate::error::{Error, Result};
use crate::seeds::stream_rng;

/// Outcome of a budgeted exact search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BruteForceCount {
    Exact(u64),
    /// No solution within `r_max` changes.
    Exceeded(u64),
}

impl BruteForceCount {
    pub fn exact(self) -> Option<u64> {
        match self {
            BruteForceCount::Exact(v) => Some(v),
            BruteForceCount::Exceeded(_) => None,
        }
    }
}

/// Plain definitional scan: every valid start, full comparison. The cell
/// offsets of one pattern box are precomputed per call; everything else is
/// direct indexing.
fn naive_occurrences(host: &NdArray, pattern: &Pattern) -> Vec<usize> {
    let d = host.ndim();
    let k = pattern.side();
    if host.dims().iter().any(|&n| n < k) {
        return Vec::new();
    }
    let mut strides = vec![1usize; d];
    for axis in (0..d.saturating_sub(1)).rev() {
        strides[axis] = strides[axis + 1] * host.dims()[axis + 1];
    }
    // Row-major cell offsets of a k^d box at the origin.
    let mut offsets = Vec::with_capacity(pattern.len());
    let mut off = vec![0usize; d];
    'offs: loop {
        offsets.push(off.iter().zip(&strides).map(|(&o, &s)| o * s).sum::<usize>());
        let mut axis = d;
        loop {
            if axis == 0 {
                break 'offs;
            }
            axis -= 1;
            off[axis] += 1;
            if off[axis] < k {
                break;
            }
            off[axis] = 0;
        }
    }
    let hv = host.values();
    let pv = pattern.values();
    let mut out = Vec::new();
    let mut start = vec![0usize; d];
    loop {
        let base: usize = start.iter().zip(&strides).map(|(&c, &s)| c * s).sum();
        if offsets.iter().zip(pv).all(|(&o, &p)| hv[base + o] == p) {
            out.push(base);
        }
        let mut axis = d;
        loop {
            if axis == 0 {
                out.sort_unstable();
                return out;
            }
            axis -= 1;
            start[axis] += 1;
            if start[axis] + k <= host.dims()[axis] {
                break;
            }
            start[axis] = 0;
        }
    }
}

fn is_free(host: &NdArray, pattern: &Pattern) -> bool {
    naive_occurrences(host, pattern).is_empty()
}

/// Smallest `r <= r_max` such that some set of `r` cells with some value
/// reassignment makes `host` pattern-free, by iterative deepening over all
/// r-subsets of all cells and all `(sigma - 1)^r` reassignments.
pub fn brute_force_deletion_number(
    host: &NdArray,
    pattern: &Pattern,
    r_max: u64,
) -> BruteForceCount {
    if is_free(host, pattern) {
        return BruteForceCount::Exact(0);
    }
    let cells = host.len();
    let sigma = host.alphabet().size() as usize;
    let mut scratch = host.clone();
    for r in 1..=r_max.min(cells as u64) {
        let mut subset: Vec<usize> = (0..r as usize).collect();
        loop {
            if reassignment_frees(&mut scratch, host, pattern, &subset, sigma) {
                return BruteForceCount::Exact(r);
            }
            if !next_combination(&mut subset, cells) {
                break;
            }
        }
    }
    BruteForceCount::Exceeded(r_max)
}

/// Tries every reassignment of the subset cells to values different from the
/// original ones; restores the scratch array before returning.
fn reassignment_frees(
    scratch: &mut NdArray,
    original: &NdArray,
    pattern: &Pattern,
    subset: &[usize],
    sigma: usize,
) -> bool {
    let r = subset.len();
    // Odometer over (sigma - 1)^r alternatives: digit v in 0..sigma-1 maps to
    // a value in 0..sigma skipping the original.
    let mut digits = vec![0usize; r];
    loop {
        for (slot, &cell) in subset.iter().enumerate() {
            let orig = original.get_linear(cell) as usize;
            let v = if digits[slot] < orig { digits[slot] } else { digits[slot] + 1 };
            scratch.values_mut()[cell] = v as Symbol;
        }
        if is_free(scratch, pattern) {
            for &cell in subset {
                scratch.values_mut()[cell] = original.get_linear(cell);
            }
            return true;
        }
        let mut slot = r;
        loop {
            if slot == 0 {
                for &cell in subset {
                    scratch.values_mut()[cell] = original.get_linear(cell);
                }
                return false;
            }
            slot -= 1;
            digits[slot] += 1;
            if digits[slot] < sigma - 1 {
                break;
            }
            digits[slot] = 0;
        }
    }
}

fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let r = subset.len();
    let mut i = r;
    loop {
        if i == 0 {
            return false;
        }
        i -= 1;
        if subset[i] < n - (r - i) {
            subset[i] += 1;
            for j in i + 1..r {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
}

/// Exact minimum hitting-set size by subset enumeration over the union of
/// occurrence cells, in increasing cardinality.
pub fn brute_force_hitting_number(host: &NdArray, pattern: &Pattern) -> u64 {
    let occs = naive_occurrences(host, pattern);
    if occs.is_empty() {
        return 0;
    }
    let k = pattern.side();
    let d = host.ndim();
    let occ_cells: Vec<Vec<usize>> = occs
        .iter()
        .map(|&s| {
            let start = host.coord_of(s);
            crate::array::box_indices(host.dims(), &start, &vec![k; d])
        })
        .collect();
    let mut union: Vec<usize> = occ_cells.iter().flatten().copied().collect();
    union.sort_unstable();
    union.dedup();
    let m = union.len();
    for r in 1..=occs.len().min(m) {
        let mut subset: Vec<usize> = (0..r).collect();
        loop {
            let chosen: Vec<usize> = subset.iter().map(|&i| union[i]).collect();
            if occ_cells.iter().all(|cells| cells.iter().any(|c| chosen.contains(c))) {
                return r as u64;
            }
            if !next_combination(&mut subset, m) {
                break;
            }
        }
    }
    occs.len() as u64
}

/// Result of a removability probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RemovabilityProbe {
    Pass,
    /// A host containing a template copy in which no single-entry change is
    /// safe. `start` is the template's start coordinate.
    Counterexample { host: NdArray, start: Vec<usize> },
}

impl RemovabilityProbe {
    pub fn passed(&self) -> bool {
        matches!(self, RemovabilityProbe::Pass)
    }
}

/// Whether some single-entry change of the copy at `start` destroys it
/// without creating any occurrence that was not already there.
pub fn host_has_safe_change(host: &NdArray, pattern: &Pattern, start: &[usize]) -> bool {
    let before = naive_occurrences(host, pattern);
    let start_idx = host.linear_index(start).expect("template start in bounds");
    debug_assert!(before.contains(&start_idx), "template copy must be present");
    let k = pattern.side();
    let cells = crate::array::box_indices(host.dims(), start, &vec![k; host.ndim()]);
    let sigma = host.alphabet().size() as u16;
    let mut scratch = host.clone();
    for &cell in &cells {
        let orig = host.get_linear(cell);
        for v in 0..sigma {
            if v == orig {
                continue;
            }
            scratch.values_mut()[cell] = v;
            let after = naive_occurrences(&scratch, pattern);
            let destroyed = !after.contains(&start_idx);
            let no_new = after.iter().all(|s| before.contains(s));
            if destroyed && no_new {
                scratch.values_mut()[cell] = orig;
                return true;
            }
        }
        scratch.values_mut()[cell] = orig;
    }
    false
}

/// Exhaustive removability check for 1-dimensional patterns: enumerates all
/// binary hosts of length `k + 2 * pad` containing a template copy at
/// position `pad`, and passes iff every host admits a safe single-symbol
/// change inside the template.
///
/// `pad` defaults to `k - 1`, giving hosts of length `3k - 2` — new copies
/// created by a change inside the template always intersect it, so this
/// host length is exhaustive for the property.
pub fn exhaustive_removability_1d(pattern: &Pattern, pad: Option<usize>) -> Result<RemovabilityProbe> {
    if pattern.ndim() != 1 {
        return Err(Error::usage("exhaustive_removability_1d requires a 1-dimensional pattern"));
    }
    if !pattern.alphabet().is_binary() {
        return Err(Error::usage("exhaustive removability probe is binary-only"));
    }
    let k = pattern.side();
    if k > 5 {
        return Err(Error::BudgetExceeded(format!(
            "exhaustive 1d removability is budgeted for k <= 5, got k = {k}"
        )));
    }
    let pad = pad.unwrap_or(k - 1);
    let n = k + 2 * pad;
    let free = 2 * pad;
    for mask in 0u64..(1 << free) {
        let mut values: Vec<Symbol> = Vec::with_capacity(n);
        for i in 0..pad {
            values.push(((mask >> i) & 1) as Symbol);
        }
        values.extend_from_slice(pattern.values());
        for i in pad..free {
            values.push(((mask >> i) & 1) as Symbol);
        }
        let host = NdArray::new(vec![n], pattern.alphabet(), values)?;
        if !host_has_safe_change(&host, pattern, &[pad]) {
            return Ok(RemovabilityProbe::Counterexample { host, start: vec![pad] });
        }
    }
    Ok(RemovabilityProbe::Pass)
}

/// Randomized removability probe for d >= 2: random hosts of side
/// `k + 2(k-1)` with the template planted in the middle. Absence of a
/// counterexample is evidence, not proof.
pub fn randomized_removability_nd(
    pattern: &Pattern,
    trials: u64,
    seed: u64,
) -> Result<RemovabilityProbe> {
    if pattern.ndim() < 2 {
        return Err(Error::usage("randomized_removability_nd requires d >= 2"));
    }
    let k = pattern.side();
    let d = pattern.ndim();
    let side = 3 * k - 2;
    let start = vec![k - 1; d];
    let sigma = pattern.alphabet().size() as u16;
    for trial in 0..trials {
        let mut rng = stream_rng(seed, trial);
        let cells: usize = (0..d).map(|_| side).product();
        let mut values: Vec<Symbol> = (0..cells).map(|_| rng.gen_range(0..sigma)).collect();
        let dims = vec![side; d];
        for (offset_idx, &cell) in crate::array::box_indices(&dims, &start, &vec![k; d])
            .iter()
            .enumerate()
        {
            values[cell] = pattern.values()[offset_idx];
        }
        let host = NdArray::new(dims, pattern.alphabet(), values)?;
        if !host_has_safe_change(&host, pattern, &start) {
            return Ok(RemovabilityProbe::Counterexample { host, start });
        }
    }
    Ok(RemovabilityProbe::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::Alphabet;

    #[test]
    fn deletion_number_examples() {
        let p = Pattern::bits("101");
        assert_eq!(
            brute_force_deletion_number(&NdArray::bits("10101"), &p, 5),
            BruteForceCount::Exact(1)
        );
        assert_eq!(
            brute_force_deletion_number(&NdArray::bits("00000"), &p, 5),
            BruteForceCount::Exact(0)
        );
        assert_eq!(
            brute_force_deletion_number(&NdArray::bits("1010101"), &p, 5),
            BruteForceCount::Exact(2)
        );
    }

    #[test]
    fn deletion_number_respects_budget() {
        let p = Pattern::bits("000");
        assert_eq!(
            brute_force_deletion_number(&NdArray::bits("000000000000"), &p, 1),
            BruteForceCount::Exceeded(1)
        );
    }

    #[test]
    fn hitting_number_examples() {
        let p = Pattern::bits("101");
        // Two disjoint copies.
        assert_eq!(brute_force_hitting_number(&NdArray::bits("10100101"), &p), 2);
        // Chain of overlapping copies sharing cells.
        assert_eq!(brute_force_hitting_number(&NdArray::bits("10101"), &p), 1);
        assert_eq!(brute_force_hitting_number(&NdArray::bits("0000"), &p), 0);
    }

    #[test]
    fn hitting_is_lower_bound_for_deletion() {
        let mut rng = stream_rng(21, 0);
        use rand::Rng;
        for _ in 0..300 {
            let n = rng.gen_range(4..11);
            let k = rng.gen_range(2..4.min(n));
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
            let h = brute_force_hitting_number(&host, &pattern);
            let d = brute_force_deletion_number(&host, &pattern, 8).exact().unwrap();
            assert!(h <= d, "h={h} d={d} host={host:?} pattern={pattern:?}");
        }
    }

    #[test]
    fn removability_1d_examples() {
        assert!(exhaustive_removability_1d(&Pattern::bits("101"), None).unwrap().passed());
        assert!(exhaustive_removability_1d(&Pattern::bits("000"), None).unwrap().passed());
        match exhaustive_removability_1d(&Pattern::bits("100"), None).unwrap() {
            RemovabilityProbe::Counterexample { host, .. } => {
                // The (2k)-witness string is embedded in some failing host.
                assert_eq!(host.len(), 7);
            }
            RemovabilityProbe::Pass => panic!("almost homogeneous pattern must fail"),
        }
    }

    #[test]
    fn removability_1d_budget() {
        let p = Pattern::new(NdArray::bits("101010")).unwrap();
        assert!(matches!(
            exhaustive_removability_1d(&p, None),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn randomized_nd_passes_homogeneous() {
        let p = Pattern::new(NdArray::new(vec![3, 3], Alphabet::binary(), vec![0; 9]).unwrap())
            .unwrap();
        assert!(randomized_removability_nd(&p, 25, 3).unwrap().passed());
    }
}
