//! Exact 1-dimensional machinery: greedy hitting numbers, certified deletion
//! sets, constructive safe flips, and the streaming distance for almost
//! homogeneous patterns.
//!
//! For a removable binary pattern the deletion number equals the hitting
//! number and both are computed in O(n + k) time and O(k) auxiliary space.
//! For binary almost-homogeneous patterns a single O(n) pass over the string
//! counts non-overlapping evidences, which equals the deletion number. For
//! alphabets of size three or more the hitting number is returned as a
//! certified lower bound and the constructed flip set as an upper bound,
//! collapsed to an exact value when they coincide.

use crate::array::{DistanceBounds, DistanceValue, FlipSet, NdArray, Pattern, Symbol};
use crate::classify::{canonicalize_almost_homo_1d, is_homogeneous, PatternKind};
use crate::error::{Error, Result};
use crate::matcher::find_occurrences_1d;

/// Greedy left-to-right hitting set over sorted occurrence starts: take the
/// leftmost remaining copy, add its rightmost cell, discard every copy whose
/// start is not to the right of that cell. The result is exactly minimal
/// because the visited copies are pairwise disjoint.
pub(crate) fn greedy_hitting_positions(starts: &[usize], k: usize) -> Vec<usize> {
    let mut chosen = Vec::new();
    let mut next_free: Option<usize> = None;
    for &s in starts {
        if next_free.is_none_or(|f| s >= f) {
            let h = s + k - 1;
            chosen.push(h);
            next_free = Some(h + 1);
        }
    }
    chosen
}

/// Exact hitting number of a 1-dimensional string together with a minimal
/// hitting set, in O(n + k).
pub fn hitting_number_1d(host: &NdArray, pattern: &Pattern) -> Result<(DistanceValue, Vec<usize>)> {
    if host.ndim() != 1 {
        return Err(Error::usage("hitting_number_1d requires a 1-dimensional host"));
    }
    let occ = find_occurrences_1d(host, pattern)?;
    let set = greedy_hitting_positions(occ.starts(), pattern.side());
    Ok((DistanceValue::new(set.len() as u64, host.len() as u64), set))
}

/// Exact safety check for a single-entry change: a new copy must contain the
/// changed cell, so only starts within k of it need rescanning.
fn change_is_safe(
    values: &[Symbol],
    pattern: &[Symbol],
    pos: usize,
    new_value: Symbol,
    destroyed_start: usize,
) -> bool {
    let k = pattern.len();
    let n = values.len();
    let lo = pos.saturating_sub(k - 1);
    let hi = pos.min(n - k);
    let at = |i: usize| if i == pos { new_value } else { values[i] };
    for s in lo..=hi {
        if s == destroyed_start {
            continue;
        }
        let mut matched = true;
        let mut was_match = true;
        for j in 0..k {
            let now = at(s + j);
            if now != pattern[j] {
                matched = false;
                break;
            }
            if values[s + j] != pattern[j] {
                was_match = false;
            }
        }
        if matched && !was_match {
            return false;
        }
    }
    // The designated copy itself must be destroyed.
    !(destroyed_start <= pos
        && pos < destroyed_start + k
        && pattern[pos - destroyed_start] == new_value)
}

/// Tries every (offset, value) candidate inside the copy and returns the
/// first change that destroys it without creating a new copy anywhere.
fn verified_search_1d(
    values: &[Symbol],
    pattern: &[Symbol],
    copy_start: usize,
    sigma: u16,
) -> Option<(usize, Symbol)> {
    let k = pattern.len();
    for offset in 0..k {
        let pos = copy_start + offset;
        for v in 0..sigma {
            if v == values[pos] {
                continue;
            }
            if change_is_safe(values, pattern, pos, v, copy_start) {
                return Some((pos, v));
            }
        }
    }
    None
}

fn maximal_runs(values: &[Symbol], of: Symbol) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut i = 0;
    while i < values.len() {
        if values[i] == of {
            let start = i;
            while i < values.len() && values[i] == of {
                i += 1;
            }
            runs.push((start, i - start));
        } else {
            i += 1;
        }
    }
    runs
}

/// Offset inside a binary, non-homogeneous, non-almost-homogeneous pattern
/// whose flip destroys any copy without creating a new one. `values` are the
/// pattern entries after the complement normalization that makes the pattern
/// start with a 1.
fn constructive_flip_offset(values: &[Symbol], left_neighbor: Symbol) -> usize {
    let k = values.len();
    debug_assert_eq!(values[0], 1);

    let zero_runs = maximal_runs(values, 0);
    let t = zero_runs.iter().map(|&(_, len)| len).max().expect("non-homogeneous");
    let (i, _) = *zero_runs.iter().find(|&&(_, len)| len == t).expect("exists");
    // The longest zero streak is not at the end: flip the 1 right after it
    // to 0. A new copy would need a zero streak of length t + 1.
    if i + t < k {
        return i + t;
    }

    // Mirrored case under reverse-and-complement: if the rightmost longest
    // 1-streak does not touch the start, flip the 0 right before it to 1.
    let one_runs = maximal_runs(values, 1);
    let r = one_runs.iter().map(|&(_, len)| len).max().expect("has ones");
    let (a, _) = *one_runs.iter().rev().find(|&&(_, len)| len == r).expect("exists");
    if a > 0 {
        return a - 1;
    }

    // The pattern now starts with its unique longest 1-streak and ends with
    // its unique longest 0-streak.
    let s = values.iter().position(|&v| v == 0).expect("non-homogeneous");
    if s + t < k {
        // Not of the form 1^s 0^t: flip the leftmost 0 to 1.
        return s;
    }
    // P = 1^s 0^t. Look at the host cell left of the copy; an absent
    // neighbor cannot complete a 1-run, so it is treated as 0.
    if left_neighbor == 0 {
        1
    } else {
        0
    }
}

/// A single-entry change that destroys the copy at `copy_start` and creates
/// no new copy anywhere in the host.
///
/// For binary removable patterns the change is constructed from the pattern
/// shape; for larger alphabets (and for callers that bypass classification)
/// it falls back to a verified search over all candidates. Every returned
/// change has been checked against the host.
pub fn safe_flip_1d(
    host: &NdArray,
    copy_start: usize,
    pattern: &Pattern,
) -> Result<(usize, Symbol)> {
    if host.ndim() != 1 || pattern.ndim() != 1 {
        return Err(Error::usage("safe_flip_1d requires 1-dimensional inputs"));
    }
    safe_flip_values(host.values(), pattern, copy_start, host.alphabet().size() as u16)
}

fn safe_flip_values(
    values: &[Symbol],
    pattern: &Pattern,
    copy_start: usize,
    sigma: u16,
) -> Result<(usize, Symbol)> {
    let k = pattern.side();
    let pv = pattern.values();
    if copy_start + k > values.len() || values[copy_start..copy_start + k] != *pv {
        return Err(Error::usage(format!("no copy of the pattern starts at {copy_start}")));
    }

    // Homogeneous patterns, and any pattern missing an alphabet symbol:
    // write a missing symbol into the center cell.
    let missing = (0..sigma).find(|&s| !pv.contains(&s));
    if let Some(m) = missing {
        let pos = copy_start + k / 2;
        debug_assert!(change_is_safe(values, pv, pos, m, copy_start));
        return Ok((pos, m));
    }

    if sigma == 2 && !is_homogeneous(pattern) && crate::classify::is_almost_homogeneous(pattern).is_none()
    {
        let c = pv[0] ^ 1; // complement flag making the pattern start with 1
        let normalized: Vec<Symbol> = pv.iter().map(|&v| v ^ c).collect();
        let left = if copy_start == 0 { 0 } else { values[copy_start - 1] ^ c };
        let offset = constructive_flip_offset(&normalized, left);
        let pos = copy_start + offset;
        let new_value = values[pos] ^ 1;
        if change_is_safe(values, pv, pos, new_value, copy_start) {
            return Ok((pos, new_value));
        }
        // The constructive rules are sound for every removable binary
        // pattern; a failed check here means a bug, so surface it loudly in
        // tests and recover by search otherwise.
        debug_assert!(false, "constructive flip failed verification for {pv:?} at {copy_start}");
    }

    verified_search_1d(values, pv, copy_start, sigma)
        .ok_or(Error::NoSafeFlip { start: vec![copy_start] })
}

/// Minimal set of changes making the host pattern-free, per the greedy
/// hitting-set construction: copies are consumed left to right; a copy that
/// intersects a remaining copy to its right is hit at its rightmost cell
/// (shared with every such copy, so the flip cannot create anything); a copy
/// with no live intersections is destroyed by a constructive safe flip.
///
/// For binary removable patterns the result size equals the hitting number,
/// hence the deletion number. The final array is always re-verified to be
/// pattern-free.
pub fn deletion_set_1d(host: &NdArray, pattern: &Pattern) -> Result<FlipSet> {
    if host.ndim() != 1 || pattern.ndim() != 1 {
        return Err(Error::usage("deletion_set_1d requires 1-dimensional inputs"));
    }
    let cls = pattern.classification();
    if cls.is_almost_homogeneous() {
        return Err(Error::usage(
            "deletion_set_1d requires a removable pattern; almost-homogeneous patterns only \
             support distance computation",
        ));
    }
    let k = pattern.side();
    let pv = pattern.values();
    let sigma = host.alphabet().size() as u16;
    let occ = find_occurrences_1d(host, pattern)?;
    let starts = occ.starts();
    let mut values = host.values().to_vec();
    let mut flips = FlipSet::empty();

    let apply = |values: &mut Vec<Symbol>, flips: &mut FlipSet, pos: usize, v: Symbol| {
        debug_assert_ne!(values[pos], v);
        values[pos] = v;
        flips.push(pos, v);
    };

    let mut idx = 0usize;
    while idx < starts.len() {
        let p = starts[idx];
        // Copies still alive all start at or after p; earlier ones were
        // destroyed by earlier flips, which all sit left of p.
        let has_right_companion = starts.get(idx + 1).is_some_and(|&q| q < p + k);
        if has_right_companion {
            // The rightmost cell of the leftmost live copy lies in every
            // live copy intersecting it, so flipping it destroys them all
            // and, sitting in at least two copies, creates nothing.
            let h = p + k - 1;
            let chosen = pick_safe_value(&values, pv, h, p, sigma);
            match chosen {
                Some(v) => {
                    apply(&mut values, &mut flips, h, v);
                    while idx < starts.len() && starts[idx] <= h {
                        idx += 1;
                    }
                }
                None => {
                    // Larger alphabets only: no value at the shared cell is
                    // safe. Destroy the leftmost copy on its own and keep
                    // going; the result is then an upper bound.
                    let (pos, v) = safe_flip_values(&values, pattern, p, sigma)?;
                    apply(&mut values, &mut flips, pos, v);
                    idx += 1;
                }
            }
        } else {
            // No live copy intersects this one. If it intersected an
            // already-destroyed copy on its left, the shared cell still
            // works when verified against the current string; otherwise it
            // was isolated all along and a constructive safe flip exists.
            let was_intersecting = idx > 0 && p - starts[idx - 1] < k;
            let repair = if was_intersecting {
                pick_safe_value(&values, pv, p, p, sigma).map(|v| (p, v))
            } else {
                None
            };
            let (pos, v) = match repair {
                Some(hit) => hit,
                None => safe_flip_values(&values, pattern, p, sigma)?,
            };
            apply(&mut values, &mut flips, pos, v);
            idx += 1;
        }
    }

    // Final scan: certified output, not an assumption.
    let result = NdArray::new(host.dims().to_vec(), host.alphabet(), values)?;
    if !find_occurrences_1d(&result, pattern)?.is_empty() {
        return Err(Error::Internal("deletion set left pattern copies behind".into()));
    }
    Ok(flips)
}

/// First value at `pos` whose write is safe against the current string.
/// Binary strings flip; larger alphabets search all values.
fn pick_safe_value(
    values: &[Symbol],
    pattern: &[Symbol],
    pos: usize,
    destroyed_start: usize,
    sigma: u16,
) -> Option<Symbol> {
    if sigma == 2 {
        let v = values[pos] ^ 1;
        return change_is_safe(values, pattern, pos, v, destroyed_start).then_some(v);
    }
    (0..sigma)
        .filter(|&v| v != values[pos])
        .find(|&v| change_is_safe(values, pattern, pos, v, destroyed_start))
}

/// State of the evidence-counting pass: pending unmarked ones, the current
/// unmarked zero streak, and the number of non-overlapping evidences found.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvidenceScanState {
    pub pending_ones: u64,
    pub zero_run: usize,
    pub evidences: u64,
}

impl EvidenceScanState {
    /// Consumes one canonical symbol (1 = special, 0 = background).
    pub fn step(&mut self, symbol: Symbol, k: usize) {
        if symbol == 1 {
            self.pending_ones += 1;
            // A one interrupts any zero streak.
            self.zero_run = 0;
        } else if self.pending_ones > 0 {
            self.zero_run += 1;
            if self.zero_run == k - 1 {
                self.pending_ones -= 1;
                self.zero_run = 0;
                self.evidences += 1;
            }
        }
    }
}

fn evidence_scan(values: &[Symbol], k: usize) -> u64 {
    let mut state = EvidenceScanState::default();
    for &v in values {
        state.step(v, k);
        debug_assert!(state.zero_run < k - 1);
    }
    state.evidences
}

/// Exact distance to freeness of a 1-dimensional almost-homogeneous binary
/// pattern, in one O(n) pass and O(1) space. The pattern may be in any
/// orientation; host and pattern are canonicalized internally.
pub fn distance_almost_homo_1d(host: &NdArray, pattern: &Pattern) -> Result<DistanceValue> {
    let canonical = canonical_host(host, pattern)?;
    let count = evidence_scan(canonical.values(), pattern.side());
    Ok(DistanceValue::new(count, host.len() as u64))
}

/// Maximal number of pairwise non-overlapping evidences, computed by the
/// same streaming pass. Exposed separately for oracle cross-checks; always
/// equals [`distance_almost_homo_1d`].
pub fn max_nonoverlapping_evidences(host: &NdArray, pattern: &Pattern) -> Result<u64> {
    let canonical = canonical_host(host, pattern)?;
    Ok(evidence_scan(canonical.values(), pattern.side()))
}

fn canonical_host(host: &NdArray, pattern: &Pattern) -> Result<NdArray> {
    if host.ndim() != 1 || pattern.ndim() != 1 {
        return Err(Error::usage("almost-homogeneous distance requires 1-dimensional inputs"));
    }
    if !host.alphabet().is_binary() {
        return Err(Error::usage("the evidence characterization applies to binary strings"));
    }
    if pattern.side() < 2 {
        return Err(Error::usage("almost-homogeneous patterns have side at least 2"));
    }
    let form = canonicalize_almost_homo_1d(pattern)?;
    form.apply(host)
}

/// Exact distance of a string to pattern-freeness, dispatching on the
/// pattern class: removable binary patterns use the hitting number (equal to
/// the deletion number), almost-homogeneous binary patterns use the
/// streaming evidence count, and larger alphabets return certified bounds
/// that collapse to an exact value when they agree.
pub fn distance_exact_1d(host: &NdArray, pattern: &Pattern) -> Result<DistanceBounds> {
    if host.ndim() != 1 || pattern.ndim() != 1 {
        return Err(Error::usage("distance_exact_1d requires 1-dimensional inputs"));
    }
    let cls = pattern.classification();
    match &cls.kind {
        PatternKind::NotRemovable { .. } => {
            Ok(DistanceBounds::exact(distance_almost_homo_1d(host, pattern)?))
        }
        PatternKind::Removable { .. } => {
            let (h, _) = hitting_number_1d(host, pattern)?;
            if host.alphabet().is_binary() {
                Ok(DistanceBounds::exact(h))
            } else {
                let flips = deletion_set_1d(host, pattern)?;
                Ok(DistanceBounds {
                    lower: h,
                    upper: DistanceValue::new(flips.len() as u64, host.len() as u64),
                })
            }
        }
        PatternKind::UnknownSmall => {
            Err(Error::usage("1-dimensional patterns are never classified UnknownSmall"))
        }
    }
}
