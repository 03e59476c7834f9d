//! Pattern classification: removable, not removable (binary almost
//! homogeneous), or too small for the guarantee to apply — plus the
//! constructions that witness the negative cases and the canonical form used
//! by the almost-homogeneous machinery.
//!
//! A pattern is *removable* if any copy of it, in any host, can be destroyed
//! by changing a single entry without creating a new copy. A pattern is
//! *almost homogeneous* if all entries but one are equal and the deviating
//! entry sits at a corner.

use crate::array::{box_indices, NdArray, Pattern, Symbol};
use crate::error::{Error, Result};

/// Why a pattern is removable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum RemovableReason {
    /// All entries equal; changing any copy entry to another symbol cannot
    /// create a copy.
    Homogeneous,
    /// Some alphabet symbol does not occur in the pattern; changing an entry
    /// to it cannot create a copy.
    MissingSymbol(Symbol),
    /// One-dimensional and not almost homogeneous.
    OneDimensional,
    /// d >= 2 with side k >= 3 * 2^d.
    LargeEnough,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum PatternKind {
    Removable { reason: RemovableReason },
    /// Binary almost homogeneous: the witness array construction applies.
    NotRemovable { corner: Vec<usize>, special: Symbol, background: Symbol },
    /// d >= 2, side below 3 * 2^d, uses the full alphabet and is not almost
    /// homogeneous: removability is undetermined.
    UnknownSmall,
}

/// Classification outcome. `guaranteed` records whether the classification
/// is covered by a theorem (false exactly for [`PatternKind::UnknownSmall`]).
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Classification {
    pub kind: PatternKind,
    pub guaranteed: bool,
}

impl Classification {
    pub fn is_removable(&self) -> bool {
        matches!(self.kind, PatternKind::Removable { .. })
    }

    pub fn is_almost_homogeneous(&self) -> bool {
        matches!(self.kind, PatternKind::NotRemovable { .. })
    }
}

pub fn is_homogeneous(pattern: &Pattern) -> bool {
    let v = pattern.values();
    v.iter().all(|&s| s == v[0])
}

/// The unique deviating corner and the (special, background) values, iff
/// exactly one entry differs from all others and it sits at a corner.
///
/// For two-cell patterns both entries are corners and either may be read as
/// the deviation; the larger symbol is designated special for determinism.
pub fn is_almost_homogeneous(pattern: &Pattern) -> Option<(Vec<usize>, Symbol, Symbol)> {
    let values = pattern.values();
    if values.len() < 2 {
        return None;
    }
    let mut distinct: Vec<(Symbol, usize)> = Vec::new();
    for &v in values {
        match distinct.iter_mut().find(|(s, _)| *s == v) {
            Some((_, c)) => *c += 1,
            None => distinct.push((v, 1)),
        }
    }
    if distinct.len() != 2 {
        return None;
    }
    let (a, ca) = distinct[0];
    let (b, cb) = distinct[1];
    let (special, background) = if ca == 1 && cb == 1 {
        (a.max(b), a.min(b))
    } else if ca == 1 {
        (a, b)
    } else if cb == 1 {
        (b, a)
    } else {
        return None;
    };
    let pos = values.iter().position(|&v| v == special).expect("special occurs");
    let corner = pattern.array().coord_of(pos);
    let k = pattern.side();
    if corner.iter().all(|&c| c == 0 || c == k - 1) {
        Some((corner, special, background))
    } else {
        None
    }
}

/// Classifies a pattern per the modification-lemma decision table.
pub fn classify(pattern: &Pattern) -> Classification {
    let sigma = pattern.alphabet().size();
    let k = pattern.side();
    let d = pattern.ndim();

    let mut present = vec![false; sigma as usize];
    for &v in pattern.values() {
        present[v as usize] = true;
    }
    let missing = present.iter().position(|&p| !p);

    if let Some(m) = missing {
        let reason = if is_homogeneous(pattern) {
            RemovableReason::Homogeneous
        } else {
            RemovableReason::MissingSymbol(m as Symbol)
        };
        return Classification { kind: PatternKind::Removable { reason }, guaranteed: true };
    }

    // All alphabet symbols occur in the pattern from here on.
    if sigma == 2 {
        if let Some((corner, special, background)) = is_almost_homogeneous(pattern) {
            return Classification {
                kind: PatternKind::NotRemovable { corner, special, background },
                guaranteed: true,
            };
        }
    }

    if d == 1 {
        return Classification {
            kind: PatternKind::Removable { reason: RemovableReason::OneDimensional },
            guaranteed: true,
        };
    }

    let threshold = 3usize.checked_mul(1usize << d);
    let large_enough = threshold.is_some_and(|t| k >= t);
    if large_enough {
        Classification {
            kind: PatternKind::Removable { reason: RemovableReason::LargeEnough },
            guaranteed: true,
        }
    } else {
        Classification { kind: PatternKind::UnknownSmall, guaranteed: false }
    }
}

/// Transform mapping a 1-dimensional almost-homogeneous pattern to the form
/// `special . background^(k-1)` with special relabeled to 1 and background
/// to 0. The same transform applies to host strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub reverse: bool,
    /// Value permutation on the alphabet: `value_map[s]` is the canonical
    /// symbol for `s`.
    pub value_map: Vec<Symbol>,
    pub pattern: Pattern,
}

impl CanonicalForm {
    pub fn is_identity(&self) -> bool {
        !self.reverse && self.value_map.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    /// Applies the transform to a 1-dimensional array.
    pub fn apply(&self, array: &NdArray) -> Result<NdArray> {
        if array.ndim() != 1 {
            return Err(Error::usage("canonical transforms apply to 1-dimensional arrays"));
        }
        let mut values: Vec<Symbol> =
            array.values().iter().map(|&v| self.value_map[v as usize]).collect();
        if self.reverse {
            values.reverse();
        }
        NdArray::new(array.dims().to_vec(), array.alphabet(), values)
    }

    /// Inverse transform: `unapply(apply(x)) == x`.
    pub fn unapply(&self, array: &NdArray) -> Result<NdArray> {
        if array.ndim() != 1 {
            return Err(Error::usage("canonical transforms apply to 1-dimensional arrays"));
        }
        let mut inverse = vec![0 as Symbol; self.value_map.len()];
        for (s, &c) in self.value_map.iter().enumerate() {
            inverse[c as usize] = s as Symbol;
        }
        let mut values: Vec<Symbol> = array.values().to_vec();
        if self.reverse {
            values.reverse();
        }
        for v in &mut values {
            *v = inverse[*v as usize];
        }
        NdArray::new(array.dims().to_vec(), array.alphabet(), values)
    }
}

/// Canonicalizes a 1-dimensional almost-homogeneous pattern: reversal if the
/// special corner is on the right, and a value permutation sending special
/// to 1 and background to 0.
pub fn canonicalize_almost_homo_1d(pattern: &Pattern) -> Result<CanonicalForm> {
    if pattern.ndim() != 1 {
        return Err(Error::usage("canonicalize_almost_homo_1d requires a 1-dimensional pattern"));
    }
    let (corner, special, background) = is_almost_homogeneous(pattern)
        .ok_or_else(|| Error::usage("pattern is not almost homogeneous"))?;
    let k = pattern.side();
    let reverse = corner[0] == k - 1;
    let sigma = pattern.alphabet().size() as usize;
    let mut value_map = vec![Symbol::MAX; sigma];
    value_map[special as usize] = 1;
    value_map[background as usize] = 0;
    let mut next = 2 as Symbol;
    for slot in value_map.iter_mut() {
        if *slot == Symbol::MAX {
            *slot = next;
            next += 1;
        }
    }
    let form = CanonicalForm { reverse, value_map, pattern: pattern.clone() };
    let transformed = form.apply(pattern.array())?;
    debug_assert_eq!(transformed.get_linear(0), 1);
    debug_assert!(transformed.values()[1..].iter().all(|&v| v == 0));
    Ok(CanonicalForm { pattern: Pattern::new(transformed)?, ..form })
}

/// Witness that a binary almost-homogeneous pattern is not removable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonRemovableWitness {
    pub host: NdArray,
    /// Start of the designated copy: every single-entry change inside it
    /// creates a new copy.
    pub copy_start: Vec<usize>,
}

/// Builds the `(2k)^d` witness host for a binary almost-homogeneous pattern:
/// all background except the special value at the outermost corner cell and
/// at the cell diagonally inside it; the designated copy starts at the inner
/// cell. Orientation follows the pattern's own special corner.
pub fn nonremovable_witness(pattern: &Pattern) -> Result<NonRemovableWitness> {
    if !pattern.alphabet().is_binary() {
        return Err(Error::usage("the non-removability witness is binary-only"));
    }
    let (corner, special, background) = is_almost_homogeneous(pattern)
        .ok_or_else(|| Error::usage("pattern is not almost homogeneous"))?;
    let k = pattern.side();
    let d = pattern.ndim();
    let side = 2 * k;
    let dims = vec![side; d];
    let reflect: Vec<bool> = corner.iter().map(|&c| c == k - 1).collect();
    let place = |normalized: &[usize]| -> Vec<usize> {
        normalized
            .iter()
            .zip(&reflect)
            .map(|(&c, &r)| if r { side - 1 - c } else { c })
            .collect()
    };
    let mut host = NdArray::filled(dims, pattern.alphabet(), background)?;
    for cell in [vec![0usize; d], vec![1usize; d]] {
        let coord = place(&cell);
        let idx = host.linear_index(&coord)?;
        host.values_mut()[idx] = special;
    }
    // Box [1, k] in normalized space; its start after reflection.
    let copy_start: Vec<usize> =
        reflect.iter().map(|&r| if r { k - 1 } else { 1 }).collect();
    debug_assert!({
        let occ = crate::matcher::find_occurrences_nd(&host, pattern).unwrap();
        occ.contains(host.linear_index(&copy_start).unwrap())
    });
    Ok(NonRemovableWitness { host, copy_start })
}

/// The small-pattern counterexample for d >= 2: a `2 x ... x 2` binary
/// pattern that is not almost homogeneous yet not removable, together with
/// the `4 x ... x 4` host in which flipping any entry of the designated copy
/// (starting at `(1, ..., 1)`) creates a new copy at `(2 * floor(x_i / 2))_i`.
pub fn remark_witness_d2plus(d: usize) -> Result<(Pattern, NdArray)> {
    if d < 2 {
        return Err(Error::usage("the small-pattern witness requires d >= 2"));
    }
    let alphabet = crate::array::Alphabet::binary();
    let pattern_dims = vec![2usize; d];
    let pattern_cells: usize = 1 << d;
    let mut pv = vec![0 as Symbol; pattern_cells];
    {
        let shape = NdArray::filled(pattern_dims.clone(), alphabet, 0)?;
        for (idx, value) in pv.iter_mut().enumerate() {
            let coord = shape.coord_of(idx);
            *value = if coord[0] == 0 { 0 } else { 1 };
        }
    }
    let pattern = Pattern::new(NdArray::new(pattern_dims, alphabet, pv)?)?;

    let host_dims = vec![4usize; d];
    let host_cells: usize = host_dims.iter().product();
    let shape = NdArray::filled(host_dims.clone(), alphabet, 0)?;
    let mut hv = vec![0 as Symbol; host_cells];
    for (idx, value) in hv.iter_mut().enumerate() {
        let x = shape.coord_of(idx);
        let zero = x[0] == 0
            || (x[0] == 1 && x[1..].iter().all(|&c| c == 1 || c == 2))
            || (x[0] == 2 && x[1..].iter().any(|&c| c == 0 || c == 3));
        *value = if zero { 0 } else { 1 };
    }
    let host = NdArray::new(host_dims, alphabet, hv)?;
    debug_assert!({
        let occ = crate::matcher::find_occurrences_nd(&host, &pattern).unwrap();
        occ.contains(host.linear_index(&vec![1; d]).unwrap())
    });
    Ok((pattern, host))
}

/// Exhaustive witness property check: every single-entry change of the
/// designated copy leaves some copy other than the designated one. Used by
/// tests and the demo; `k^d * (sigma - 1)` cases.
pub fn witness_property_holds(host: &NdArray, pattern: &Pattern, copy_start: &[usize]) -> bool {
    let k = pattern.side();
    let d = host.ndim();
    let start_idx = match host.linear_index(copy_start) {
        Ok(i) => i,
        Err(_) => return false,
    };
    let cells = box_indices(host.dims(), copy_start, &vec![k; d]);
    let sigma = host.alphabet().size() as u16;
    let mut scratch = host.clone();
    for &cell in &cells {
        let orig = host.get_linear(cell);
        for v in 0..sigma {
            if v == orig {
                continue;
            }
            scratch.values_mut()[cell] = v;
            let occ = crate::matcher::find_occurrences_nd(&scratch, pattern)
                .expect("same alphabet and dimension");
            let other = occ.starts().iter().any(|&s| s != start_idx);
            scratch.values_mut()[cell] = orig;
            if !other {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::Alphabet;

    #[test]
    fn almost_homogeneous_detection() {
        let (corner, special, background) =
            is_almost_homogeneous(&Pattern::bits("100")).unwrap();
        assert_eq!((corner, special, background), (vec![0], 1, 0));

        assert!(is_almost_homogeneous(&Pattern::bits("101")).is_none());

        let p = Pattern::new(
            NdArray::new(vec![2, 2], Alphabet::binary(), vec![1, 0, 0, 0]).unwrap(),
        )
        .unwrap();
        let (corner, special, background) = is_almost_homogeneous(&p).unwrap();
        assert_eq!((corner, special, background), (vec![0, 0], 1, 0));
    }

    #[test]
    fn deviation_in_the_middle_is_not_almost_homogeneous() {
        // 3x3 with the deviating entry at the center.
        let mut v = vec![0 as Symbol; 9];
        v[4] = 1;
        let p = Pattern::new(NdArray::new(vec![3, 3], Alphabet::binary(), v).unwrap()).unwrap();
        assert!(is_almost_homogeneous(&p).is_none());
    }

    #[test]
    fn classify_decision_table() {
        assert!(classify(&Pattern::bits("101")).is_removable());
        assert!(matches!(
            classify(&Pattern::bits("1000")).kind,
            PatternKind::NotRemovable { .. }
        ));
        let (remark, _) = remark_witness_d2plus(2).unwrap();
        let c = classify(&remark);
        assert_eq!(c.kind, PatternKind::UnknownSmall);
        assert!(!c.guaranteed);

        // k = 1 is always removable.
        assert!(classify(&Pattern::bits("0")).is_removable());
        // k = 2 binary table.
        assert!(matches!(classify(&Pattern::bits("01")).kind, PatternKind::NotRemovable { .. }));
        assert!(matches!(classify(&Pattern::bits("10")).kind, PatternKind::NotRemovable { .. }));
        assert!(classify(&Pattern::bits("00")).is_removable());
        assert!(classify(&Pattern::bits("11")).is_removable());
    }

    #[test]
    fn classify_larger_alphabets() {
        let a3 = Alphabet::new(3).unwrap();
        // Symbol 2 missing: removable by the missing-symbol rule.
        let p = Pattern::from_digits("100", a3).unwrap();
        assert!(matches!(
            classify(&p).kind,
            PatternKind::Removable { reason: RemovableReason::MissingSymbol(2) }
        ));
        // All three symbols present in 1d: removable.
        let p = Pattern::from_digits("012", a3).unwrap();
        assert!(matches!(
            classify(&p).kind,
            PatternKind::Removable { reason: RemovableReason::OneDimensional }
        ));
        // All symbols present in 2d below the size threshold: unknown.
        let p = Pattern::new(
            NdArray::new(vec![2, 2], a3, vec![0, 1, 2, 0]).unwrap(),
        )
        .unwrap();
        assert_eq!(classify(&p).kind, PatternKind::UnknownSmall);
    }

    #[test]
    fn classify_matches_exhaustive_probe_for_small_k() {
        for k in 2..=5usize {
            for bits in 0..(1u32 << k) {
                let values: Vec<Symbol> =
                    (0..k).map(|i| ((bits >> i) & 1) as Symbol).collect();
                let p =
                    Pattern::new(NdArray::new(vec![k], Alphabet::binary(), values).unwrap())
                        .unwrap();
                let removable = classify(&p).is_removable();
                let probe = crate::oracle::exhaustive_removability_1d(&p, None).unwrap();
                assert_eq!(removable, probe.passed(), "pattern {p:?}");
            }
        }
    }

    #[test]
    fn canonical_transforms() {
        let id = canonicalize_almost_homo_1d(&Pattern::bits("1000")).unwrap();
        assert!(id.is_identity());
        assert_eq!(id.pattern.values(), &[1, 0, 0, 0]);

        let rev = canonicalize_almost_homo_1d(&Pattern::bits("0001")).unwrap();
        assert!(rev.reverse);
        assert_eq!(rev.value_map, vec![0, 1]);
        assert_eq!(rev.pattern.values(), &[1, 0, 0, 0]);

        let swap = canonicalize_almost_homo_1d(&Pattern::bits("0111")).unwrap();
        assert!(!swap.reverse);
        assert_eq!(swap.value_map, vec![1, 0]);
        assert_eq!(swap.pattern.values(), &[1, 0, 0, 0]);

        assert!(canonicalize_almost_homo_1d(&Pattern::bits("101")).is_err());
    }

    #[test]
    fn canonicalize_roundtrip_on_hosts() {
        let form = canonicalize_almost_homo_1d(&Pattern::bits("0001")).unwrap();
        let host = NdArray::bits("0100111000101");
        let there = form.apply(&host).unwrap();
        let back = form.unapply(&there).unwrap();
        assert_eq!(back, host);
    }

    #[test]
    fn witness_for_100() {
        let w = nonremovable_witness(&Pattern::bits("100")).unwrap();
        assert_eq!(w.host, NdArray::bits("110000"));
        assert_eq!(w.copy_start, vec![1]);
        assert!(witness_property_holds(&w.host, &Pattern::bits("100"), &w.copy_start));
    }

    #[test]
    fn witness_for_1000() {
        let w = nonremovable_witness(&Pattern::bits("1000")).unwrap();
        assert_eq!(w.host.len(), 8);
        assert!(witness_property_holds(&w.host, &Pattern::bits("1000"), &w.copy_start));
    }

    #[test]
    fn witness_respects_orientation() {
        // Special corner on the right, special value 0.
        let p = Pattern::bits("1110");
        let w = nonremovable_witness(&p).unwrap();
        assert!(witness_property_holds(&w.host, &p, &w.copy_start));
    }

    #[test]
    fn witness_2d_almost_homogeneous() {
        let mut v = vec![0 as Symbol; 9];
        v[0] = 1;
        let p = Pattern::new(NdArray::new(vec![3, 3], Alphabet::binary(), v).unwrap()).unwrap();
        let w = nonremovable_witness(&p).unwrap();
        assert_eq!(w.host.dims(), &[6, 6]);
        assert_eq!(w.copy_start, vec![1, 1]);
        assert!(witness_property_holds(&w.host, &p, &w.copy_start));
    }

    #[test]
    fn remark_witness_2d() {
        let (p, m) = remark_witness_d2plus(2).unwrap();
        assert_eq!(p.values(), &[0, 0, 1, 1]);
        let rows: Vec<Vec<Symbol>> =
            (0..4).map(|r| (0..4).map(|c| m.get(&[r, c]).unwrap()).collect()).collect();
        assert_eq!(rows[0], vec![0, 0, 0, 0]);
        assert_eq!(rows[1], vec![1, 0, 0, 1]);
        assert_eq!(rows[2], vec![0, 1, 1, 0]);
        assert_eq!(rows[3], vec![1, 1, 1, 1]);
        assert!(witness_property_holds(&m, &p, &[1, 1]));

        // Flipping cell x creates a copy at (2 * floor(x_i / 2))_i.
        for cell in [[1usize, 1], [1, 2], [2, 1], [2, 2]] {
            let mut flipped = m.clone();
            let idx = flipped.linear_index(&cell).unwrap();
            let v = flipped.get_linear(idx);
            flipped.values_mut()[idx] = 1 - v;
            let expected = [2 * (cell[0] / 2), 2 * (cell[1] / 2)];
            let occ = crate::matcher::find_occurrences_nd(&flipped, &p).unwrap();
            assert!(occ.contains(flipped.linear_index(&expected).unwrap()));
        }
    }

    #[test]
    fn remark_witness_3d() {
        let (p, m) = remark_witness_d2plus(3).unwrap();
        assert!(witness_property_holds(&m, &p, &[1, 1, 1]));
    }
}
