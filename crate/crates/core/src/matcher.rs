//! Occurrence enumeration: all (possibly overlapping) exact copies of a
//! pattern in a string or d-dimensional array, over full arrays or cyclic
//! windows.
//!
//! 1-dimensional scanning uses a failure-function automaton in O(n + k) time
//! and O(k) working space, with a word-packed fast path for long binary
//! strings and short patterns. d-dimensional scanning is the direct windowed
//! comparison with early exit; the samplers only ever match inside small
//! blocks, so asymptotics do not bind there.

use crate::array::{box_indices, strides, CyclicWindow, NdArray, OccurrenceSet, Pattern, Symbol};
use crate::error::{Error, Result};

/// All start positions of `pattern` in the 1-dimensional `host`, sorted.
/// A pattern longer than the host yields the empty set.
pub fn find_occurrences_1d(host: &NdArray, pattern: &Pattern) -> Result<OccurrenceSet> {
    if host.ndim() != 1 || pattern.ndim() != 1 {
        return Err(Error::usage("find_occurrences_1d requires 1-dimensional inputs"));
    }
    if host.alphabet() != pattern.alphabet() {
        return Err(Error::usage("host and pattern must share an alphabet"));
    }
    let starts = scan_1d(host.values(), pattern.values(), host.alphabet().is_binary());
    Ok(OccurrenceSet::new(starts, host.dims().to_vec(), pattern.side()))
}

fn scan_1d(host: &[Symbol], pattern: &[Symbol], binary: bool) -> Vec<usize> {
    let n = host.len();
    let k = pattern.len();
    if k == 0 || k > n {
        return Vec::new();
    }
    if binary && k <= 64 && n >= 4096 {
        return scan_1d_packed(host, pattern);
    }
    scan_1d_kmp(host, pattern)
}

fn scan_1d_kmp(host: &[Symbol], pattern: &[Symbol]) -> Vec<usize> {
    let k = pattern.len();
    // Border array: border[q] is the length of the longest proper border of
    // pattern[..=q].
    let mut border = vec![0usize; k];
    let mut b = 0usize;
    for q in 1..k {
        while b > 0 && pattern[b] != pattern[q] {
            b = border[b - 1];
        }
        if pattern[b] == pattern[q] {
            b += 1;
        }
        border[q] = b;
    }
    let mut starts = Vec::new();
    let mut q = 0usize;
    for (i, &s) in host.iter().enumerate() {
        while q > 0 && pattern[q] != s {
            q = border[q - 1];
        }
        if pattern[q] == s {
            q += 1;
        }
        if q == k {
            starts.push(i + 1 - k);
            q = border[q - 1];
        }
    }
    starts
}

/// Word-packed scan for binary hosts with k <= 64: compares k bits per
/// candidate with two shifts.
fn scan_1d_packed(host: &[Symbol], pattern: &[Symbol]) -> Vec<usize> {
    let packed = crate::array::PackedBits::from_symbols(host);
    let k = pattern.len();
    let mut target = 0u64;
    for (j, &v) in pattern.iter().enumerate() {
        target |= u64::from(v) << j;
    }
    let mut starts = Vec::new();
    for i in 0..=host.len() - k {
        if packed.window(i, k) == target {
            starts.push(i);
        }
    }
    starts
}

/// All start coordinates of `pattern` in a d-dimensional `host`, sorted
/// row-major.
pub fn find_occurrences_nd(host: &NdArray, pattern: &Pattern) -> Result<OccurrenceSet> {
    if host.ndim() != pattern.ndim() {
        return Err(Error::usage(format!(
            "host has {} dimensions, pattern has {}",
            host.ndim(),
            pattern.ndim()
        )));
    }
    if host.alphabet() != pattern.alphabet() {
        return Err(Error::usage("host and pattern must share an alphabet"));
    }
    if host.ndim() == 1 {
        return find_occurrences_1d(host, pattern);
    }
    let k = pattern.side();
    if host.dims().iter().any(|&n| n < k) {
        return Ok(OccurrenceSet::new(Vec::new(), host.dims().to_vec(), k));
    }
    let host_strides = strides(host.dims());
    let pattern_offsets = box_indices(host.dims(), &vec![0; host.ndim()], &vec![k; host.ndim()]);
    let pv = pattern.values();
    let hv = host.values();
    let mut starts = Vec::new();
    let mut coord = vec![0usize; host.ndim()];
    'outer: loop {
        let base: usize = coord.iter().zip(&host_strides).map(|(&c, &s)| c * s).sum();
        let mut matched = true;
        for (j, &off) in pattern_offsets.iter().enumerate() {
            if hv[base + off] != pv[j] {
                matched = false;
                break;
            }
        }
        if matched {
            starts.push(base);
        }
        // Odometer over valid starts.
        let mut axis = host.ndim();
        loop {
            if axis == 0 {
                break 'outer;
            }
            axis -= 1;
            coord[axis] += 1;
            if coord[axis] + k <= host.dims()[axis] {
                break;
            }
            coord[axis] = 0;
        }
    }
    starts.sort_unstable();
    Ok(OccurrenceSet::new(starts, host.dims().to_vec(), k))
}

/// Occurrences of `pattern` inside the cyclic window of `host` starting at
/// `start` with the given `sides`, reported in window-local coordinates.
///
/// Only genuine host-array copies are reported: a window position whose
/// source cells wrap the seam on any axis is excluded, because it does not
/// correspond to a contiguous box of the host.
pub fn occurrences_in_window(
    host: &NdArray,
    start: &[usize],
    sides: &[usize],
    pattern: &Pattern,
) -> Result<OccurrenceSet> {
    let k = pattern.side();
    if sides.iter().any(|&s| s < k) {
        return Err(Error::usage(format!(
            "window sides {sides:?} must be at least the pattern side {k}"
        )));
    }
    let window = host.extract_cyclic_window(start, sides)?;
    occurrences_in_extracted_window(&window, pattern)
}

/// Same as [`occurrences_in_window`] but operating on a window that has
/// already been extracted (e.g. through a counting view).
pub fn occurrences_in_extracted_window(
    window: &CyclicWindow,
    pattern: &Pattern,
) -> Result<OccurrenceSet> {
    let occs = find_occurrences_nd(&window.array, pattern)?;
    let k = pattern.side();
    let dims = window.array.dims().to_vec();
    let st = strides(&dims);
    let keep: Vec<usize> = occs
        .starts()
        .iter()
        .copied()
        .filter(|&s| {
            window.seams.iter().enumerate().all(|(axis, seam)| match *seam {
                None => true,
                Some(seam) => {
                    let c = (s / st[axis]) % dims[axis];
                    // The span [c, c+k) must not cross the seam offset.
                    c >= seam || c + k <= seam
                }
            })
        })
        .collect();
    Ok(OccurrenceSet::new(keep, dims, k))
}
