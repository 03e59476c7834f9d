//! Property tests for the cross-module invariants: flip-set involution,
//! format round-trips, window extraction, matcher-versus-naive equality and
//! the three-way evidence-count agreement.

use proptest::prelude::*;

use patfree_core::exact1d::{distance_almost_homo_1d, max_nonoverlapping_evidences};
use patfree_core::oracle::brute_force_deletion_number;
use patfree_core::{format, Alphabet, FlipSet, NdArray, Pattern};

fn small_array(sigma: u32) -> impl Strategy<Value = NdArray> {
    (1usize..=3, 1usize..=5).prop_flat_map(move |(d, side)| {
        let dims: Vec<usize> = vec![side; d];
        let cells: usize = dims.iter().product();
        proptest::collection::vec(0..sigma as u16, cells).prop_map(move |values| {
            NdArray::new(dims.clone(), Alphabet::new(sigma).unwrap(), values).unwrap()
        })
    })
}

fn binary_string(max_n: usize) -> impl Strategy<Value = NdArray> {
    (1usize..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(0u16..2, n)
            .prop_map(|values| NdArray::new(vec![values.len()], Alphabet::binary(), values).unwrap())
    })
}

/// Definition-level evidence oracle: enumerates subsets of background-run
/// starts, requires pairwise spacing at least k-1, and matches each chosen
/// run with a distinct special symbol strictly to its left.
fn brute_force_max_evidences(s: &[u16], k: usize) -> u64 {
    let n = s.len();
    if n < k {
        return 0;
    }
    let run_ok = |j: usize| (j..j + k - 1).all(|l| s[l] == 0);
    let candidates: Vec<usize> = (0..=n - (k - 1)).filter(|&j| j >= 1 && run_ok(j)).collect();
    let ones_before: Vec<usize> = {
        let mut acc = vec![0usize; n + 1];
        for i in 0..n {
            acc[i + 1] = acc[i] + usize::from(s[i] == 1);
        }
        acc
    };
    fn recurse(
        idx: usize,
        taken: usize,
        last_end: Option<usize>,
        candidates: &[usize],
        ones_before: &[usize],
        k: usize,
        best: &mut usize,
    ) {
        if taken + (candidates.len() - idx) <= *best {
            return;
        }
        if idx == candidates.len() {
            *best = (*best).max(taken);
            return;
        }
        let j = candidates[idx];
        let spaced = last_end.is_none_or(|e| j >= e);
        // Distinct special symbols: the s-th chosen run needs at least s
        // ones strictly before it (any matching assigns leftmost first).
        if spaced && ones_before[j] > taken {
            recurse(idx + 1, taken + 1, Some(j + k - 1), candidates, ones_before, k, best);
        }
        recurse(idx + 1, taken, last_end, candidates, ones_before, k, best);
    }
    let mut best = 0;
    recurse(0, 0, None, &candidates, &ones_before, k, &mut best);
    best as u64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn flips_then_inverse_restore_the_array(
        array in small_array(3),
        picks in proptest::collection::vec((any::<proptest::sample::Index>(), 0u16..3), 0..6),
    ) {
        let mut entries = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (idx, v) in picks {
            let cell = idx.index(array.len());
            let new = if array.get_linear(cell) == v { (v + 1) % 3 } else { v };
            if seen.insert(cell) {
                entries.push((cell, new));
            }
        }
        let flips = FlipSet::for_array(&array, entries).unwrap();
        let inverse = flips.inverse_on(&array);
        let there = array.apply_flips(&flips).unwrap();
        let back = there.apply_flips(&inverse).unwrap();
        prop_assert_eq!(back, array);
    }

    #[test]
    fn nda_roundtrip(array in small_array(5)) {
        let text = format::serialize_nda(&array);
        prop_assert_eq!(format::parse_nda(&text).unwrap(), array);
    }

    #[test]
    fn nowrap_window_equals_plain_subbox(host in binary_string(24)) {
        let n = host.len();
        let side = 1 + n / 2;
        let start = n - side; // no wrap
        let w = host.extract_cyclic_window(&[start], &[side]).unwrap();
        prop_assert_eq!(w.seams, vec![None]);
        prop_assert_eq!(w.array.values(), &host.values()[start..start + side]);
    }

    #[test]
    fn occurrences_match_naive_scan(
        host in binary_string(40),
        pattern in proptest::collection::vec(0u16..2, 1..6),
    ) {
        let p = Pattern::new(
            NdArray::new(vec![pattern.len()], Alphabet::binary(), pattern.clone()).unwrap(),
        ).unwrap();
        let fast = patfree_core::matcher::find_occurrences_1d(&host, &p).unwrap();
        let mut naive = Vec::new();
        if pattern.len() <= host.len() {
            for i in 0..=host.len() - pattern.len() {
                if host.values()[i..i + pattern.len()] == pattern[..] {
                    naive.push(i);
                }
            }
        }
        prop_assert_eq!(fast.starts(), &naive[..]);
    }

    #[test]
    fn evidence_counts_agree_three_ways(host in binary_string(12), k in 3usize..5) {
        let mut pv = vec![0u16; k];
        pv[0] = 1;
        let p = Pattern::new(NdArray::new(vec![k], Alphabet::binary(), pv).unwrap()).unwrap();
        let streamed = distance_almost_homo_1d(&host, &p).unwrap().absolute;
        let exposed = max_nonoverlapping_evidences(&host, &p).unwrap();
        let subsets = brute_force_max_evidences(host.values(), k);
        let deletion = brute_force_deletion_number(&host, &p, 12).exact().unwrap();
        prop_assert_eq!(streamed, exposed);
        prop_assert_eq!(streamed, subsets);
        prop_assert_eq!(streamed, deletion);
    }
}
