//! Dense d-dimensional arrays over a finite alphabet, plus the small carrier
//! types used throughout the crate: flip sets, occurrence sets, distance
//! values and a query-counting read view.
//!
//! Coordinates are row-major linearized internally; public constructors and
//! accessors speak per-axis components.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use crate::error::{Error, Result};

/// Symbols are small unsigned integers; alphabets beyond `u16` are out of
/// scope.
pub type Symbol = u16;

/// A finite alphabet `{0, 1, ..., size-1}` with `size >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    size: u32,
}

impl Alphabet {
    pub fn new(size: u32) -> Result<Self> {
        if size < 2 {
            return Err(Error::usage(format!("alphabet size must be at least 2, got {size}")));
        }
        if size > u32::from(u16::MAX) + 1 {
            return Err(Error::usage(format!("alphabet size {size} exceeds the 2^16 symbol cap")));
        }
        Ok(Alphabet { size })
    }

    pub fn binary() -> Self {
        Alphabet { size: 2 }
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn contains(&self, s: Symbol) -> bool {
        u32::from(s) < self.size
    }

    pub fn is_binary(&self) -> bool {
        self.size == 2
    }

    /// Symbols in ascending order.
    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.size as u16).map(|s| s as Symbol)
    }
}

/// Dense d-dimensional array over an [`Alphabet`], stored row-major.
///
/// Host arrays may be rectangular; only patterns are required to be cubic.
/// Arrays are immutable after construction as far as the public API is
/// concerned; every mutation in the crate happens on a fresh copy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NdArray {
    dims: Vec<usize>,
    alphabet: Alphabet,
    values: Vec<Symbol>,
}

impl NdArray {
    pub fn new(dims: Vec<usize>, alphabet: Alphabet, values: Vec<Symbol>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::usage("array must have at least one dimension"));
        }
        if dims.contains(&0) {
            return Err(Error::usage(format!("all side lengths must be positive, got {dims:?}")));
        }
        let cells = dims.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n));
        let cells = cells.ok_or_else(|| Error::usage("array size overflows usize"))?;
        if values.len() != cells {
            return Err(Error::usage(format!(
                "value count {} does not match the {} cells implied by dims {dims:?}",
                values.len(),
                cells
            )));
        }
        if let Some(&bad) = values.iter().find(|&&v| !alphabet.contains(v)) {
            return Err(Error::usage(format!(
                "symbol {bad} is outside the alphabet of size {}",
                alphabet.size()
            )));
        }
        Ok(NdArray { dims, alphabet, values })
    }

    /// A 1-dimensional binary string from ASCII `'0'`/`'1'` (or any digits
    /// below the alphabet size).
    pub fn from_digits(text: &str, alphabet: Alphabet) -> Result<Self> {
        let mut values = Vec::with_capacity(text.len());
        for ch in text.chars() {
            let v = ch
                .to_digit(10)
                .ok_or_else(|| Error::usage(format!("non-digit symbol {ch:?} in raw string")))?;
            values.push(v as Symbol);
        }
        NdArray::new(vec![values.len()], alphabet, values)
    }

    /// Shorthand for binary strings in tests and fixtures.
    pub fn bits(text: &str) -> Self {
        NdArray::from_digits(text, Alphabet::binary()).expect("valid binary string")
    }

    pub fn filled(dims: Vec<usize>, alphabet: Alphabet, value: Symbol) -> Result<Self> {
        let cells = dims.iter().product();
        NdArray::new(dims, alphabet, vec![value; cells])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Symbol] {
        &self.values
    }

    /// Entry at a per-axis coordinate. Out-of-bounds coordinates are a usage
    /// error.
    pub fn get(&self, coord: &[usize]) -> Result<Symbol> {
        let idx = self.linear_index(coord)?;
        Ok(self.values[idx])
    }

    pub fn get_linear(&self, idx: usize) -> Symbol {
        self.values[idx]
    }

    pub fn linear_index(&self, coord: &[usize]) -> Result<usize> {
        if coord.len() != self.dims.len() {
            return Err(Error::usage(format!(
                "coordinate {coord:?} has {} components, array has {} dimensions",
                coord.len(),
                self.dims.len()
            )));
        }
        let mut idx = 0usize;
        for (&c, &n) in coord.iter().zip(&self.dims) {
            if c >= n {
                return Err(Error::usage(format!(
                    "coordinate {coord:?} is out of bounds for dims {:?}",
                    self.dims
                )));
            }
            idx = idx * n + c;
        }
        Ok(idx)
    }

    pub fn coord_of(&self, mut idx: usize) -> Vec<usize> {
        let mut coord = vec![0usize; self.dims.len()];
        for axis in (0..self.dims.len()).rev() {
            coord[axis] = idx % self.dims[axis];
            idx /= self.dims[axis];
        }
        coord
    }

    /// Returns a copy of the array with the flips applied. The receiver is
    /// unchanged. Duplicate coordinates in the flip set are a usage error.
    pub fn apply_flips(&self, flips: &FlipSet) -> Result<NdArray> {
        let mut seen = std::collections::HashSet::with_capacity(flips.len());
        let mut out = self.clone();
        for &(idx, value) in flips.entries() {
            if idx >= self.values.len() {
                return Err(Error::usage(format!("flip index {idx} out of bounds")));
            }
            if !seen.insert(idx) {
                return Err(Error::usage(format!(
                    "duplicate coordinate {:?} in flip set",
                    self.coord_of(idx)
                )));
            }
            if !self.alphabet.contains(value) {
                return Err(Error::usage(format!("flip value {value} outside alphabet")));
            }
            out.values[idx] = value;
        }
        Ok(out)
    }

    /// Box of the given sides starting at `start`, with coordinates taken
    /// modulo the host side length on each axis. Records, per axis, the
    /// window-local offset at which source coordinates wrap (the seam).
    pub fn extract_cyclic_window(&self, start: &[usize], sides: &[usize]) -> Result<CyclicWindow> {
        let counter = AtomicU64::new(0);
        let w = extract_cyclic(self, start, sides, &counter, None)?;
        Ok(w)
    }

    /// Bit-packed view of a binary array, for word-at-a-time scanning.
    pub fn packed_bits(&self) -> Option<PackedBits> {
        if !self.alphabet.is_binary() {
            return None;
        }
        Some(PackedBits::from_symbols(&self.values))
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Symbol] {
        &mut self.values
    }
}

/// Cubic pattern: a d-dimensional array whose sides are all equal. Carries
/// its classification, computed on first use.
#[derive(Debug, Clone)]
pub struct Pattern {
    array: NdArray,
    side: usize,
    classification: std::sync::OnceLock<crate::classify::Classification>,
}

impl PartialEq for Pattern {
    fn eq(&self, other: &Self) -> bool {
        self.array == other.array
    }
}

impl Eq for Pattern {}

impl Pattern {
    pub fn new(array: NdArray) -> Result<Self> {
        let side = array.dims()[0];
        if array.dims().iter().any(|&n| n != side) {
            return Err(Error::usage(format!(
                "patterns must be cubic, got dims {:?}",
                array.dims()
            )));
        }
        Ok(Pattern { array, side, classification: std::sync::OnceLock::new() })
    }

    /// Cached classification of this pattern.
    pub fn classification(&self) -> &crate::classify::Classification {
        self.classification.get_or_init(|| crate::classify::classify(self))
    }

    pub fn from_digits(text: &str, alphabet: Alphabet) -> Result<Self> {
        Pattern::new(NdArray::from_digits(text, alphabet)?)
    }

    pub fn bits(text: &str) -> Self {
        Pattern::new(NdArray::bits(text)).expect("1d patterns are always cubic")
    }

    pub fn array(&self) -> &NdArray {
        &self.array
    }

    /// Side length k.
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn ndim(&self) -> usize {
        self.array.ndim()
    }

    pub fn alphabet(&self) -> Alphabet {
        self.array.alphabet()
    }

    pub fn values(&self) -> &[Symbol] {
        self.array.values()
    }

    pub fn len(&self) -> usize {
        self.array.len()
    }

    pub fn is_empty(&self) -> bool {
        self.array.is_empty()
    }
}

/// Sorted start positions (row-major linear) of pattern copies in a host
/// array, together with the shape context needed to interpret them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccurrenceSet {
    starts: Vec<usize>,
    host_dims: Vec<usize>,
    pattern_side: usize,
}

impl OccurrenceSet {
    pub(crate) fn new(starts: Vec<usize>, host_dims: Vec<usize>, pattern_side: usize) -> Self {
        debug_assert!(starts.windows(2).all(|w| w[0] < w[1]), "starts must be strictly sorted");
        OccurrenceSet { starts, host_dims, pattern_side }
    }

    pub fn starts(&self) -> &[usize] {
        &self.starts
    }

    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }

    pub fn host_dims(&self) -> &[usize] {
        &self.host_dims
    }

    pub fn pattern_side(&self) -> usize {
        self.pattern_side
    }

    pub fn coords(&self) -> Vec<Vec<usize>> {
        let helper = shape_helper(&self.host_dims);
        self.starts.iter().map(|&s| helper.coord_of(s)).collect()
    }

    pub fn contains(&self, start: usize) -> bool {
        self.starts.binary_search(&start).is_ok()
    }
}

/// A set of `(cell, new value)` modifications. Doubles as a deletion-set
/// certificate: applying it to the host array must change exactly these
/// cells.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlipSet {
    entries: Vec<(usize, Symbol)>,
}

impl FlipSet {
    pub fn empty() -> Self {
        FlipSet { entries: Vec::new() }
    }

    /// Builds a flip set for a specific array, validating that coordinates
    /// are distinct and that every new value differs from the current one.
    pub fn for_array(array: &NdArray, entries: Vec<(usize, Symbol)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::with_capacity(entries.len());
        for &(idx, value) in &entries {
            if idx >= array.len() {
                return Err(Error::usage(format!("flip index {idx} out of bounds")));
            }
            if !seen.insert(idx) {
                return Err(Error::usage(format!(
                    "duplicate coordinate {:?} in flip set",
                    array.coord_of(idx)
                )));
            }
            if array.get_linear(idx) == value {
                return Err(Error::usage(format!(
                    "flip at {:?} does not change the stored value {value}",
                    array.coord_of(idx)
                )));
            }
        }
        Ok(FlipSet { entries })
    }

    pub(crate) fn push(&mut self, idx: usize, value: Symbol) {
        self.entries.push((idx, value));
    }

    pub fn entries(&self) -> &[(usize, Symbol)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The flip set that undoes `self` on `array` (which must be the array
    /// `self` was built for).
    pub fn inverse_on(&self, array: &NdArray) -> FlipSet {
        FlipSet {
            entries: self.entries.iter().map(|&(idx, _)| (idx, array.get_linear(idx))).collect(),
        }
    }

    pub fn coords_on(&self, array: &NdArray) -> Vec<(Vec<usize>, Symbol)> {
        self.entries.iter().map(|&(idx, v)| (array.coord_of(idx), v)).collect()
    }
}

/// Absolute and relative distance (or hitting) value for an array of a known
/// size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct DistanceValue {
    pub absolute: u64,
    pub total_cells: u64,
}

impl DistanceValue {
    pub fn new(absolute: u64, total_cells: u64) -> Self {
        debug_assert!(absolute <= total_cells);
        DistanceValue { absolute, total_cells }
    }

    pub fn relative(&self) -> f64 {
        if self.total_cells == 0 {
            0.0
        } else {
            self.absolute as f64 / self.total_cells as f64
        }
    }
}

/// Lower and upper bounds on a distance; equal bounds mean the value is
/// exact. The 1-dimensional binary paths always return exact values; larger
/// alphabets may return a genuine interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct DistanceBounds {
    pub lower: DistanceValue,
    pub upper: DistanceValue,
}

impl DistanceBounds {
    pub fn exact(value: DistanceValue) -> Self {
        DistanceBounds { lower: value, upper: value }
    }

    pub fn exact_value(&self) -> Option<DistanceValue> {
        (self.lower == self.upper).then_some(self.lower)
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Read view over an array that counts every entry access, including
/// repeated reads of the same cell. Counters are atomic so block evaluations
/// may run concurrently.
pub struct CountedView<'a> {
    array: &'a NdArray,
    count: AtomicU64,
    touched: Option<Mutex<std::collections::BTreeSet<usize>>>,
}

impl<'a> CountedView<'a> {
    pub fn new(array: &'a NdArray) -> Self {
        CountedView { array, count: AtomicU64::new(0), touched: None }
    }

    /// Also record the set of distinct cells read.
    pub fn with_touch_tracking(array: &'a NdArray) -> Self {
        CountedView {
            array,
            count: AtomicU64::new(0),
            touched: Some(Mutex::new(std::collections::BTreeSet::new())),
        }
    }

    pub fn array(&self) -> &NdArray {
        self.array
    }

    pub fn get(&self, coord: &[usize]) -> Result<Symbol> {
        let idx = self.array.linear_index(coord)?;
        Ok(self.get_linear(idx))
    }

    pub fn get_linear(&self, idx: usize) -> Symbol {
        self.count.fetch_add(1, Ordering::Relaxed);
        if let Some(touched) = &self.touched {
            touched.lock().unwrap().insert(idx);
        }
        self.array.get_linear(idx)
    }

    /// Number of entry reads made through this view since creation.
    pub fn queries(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    pub fn touched(&self) -> Option<Vec<usize>> {
        self.touched.as_ref().map(|t| t.lock().unwrap().iter().copied().collect())
    }

    pub fn extract_cyclic_window(&self, start: &[usize], sides: &[usize]) -> Result<CyclicWindow> {
        extract_cyclic(self.array, start, sides, &self.count, self.touched.as_ref())
    }
}

/// A window extracted with cyclic (wrap-around) indexing, as a fresh
/// linear-indexed array plus the per-axis seam offsets.
///
/// `seams[i] = Some(off)` means window offsets `< off` on axis `i` came from
/// the tail of the host array and offsets `>= off` wrapped to its head; a box
/// whose axis-`i` span crosses `off` does not correspond to a contiguous box
/// of the host.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicWindow {
    pub array: NdArray,
    pub start: Vec<usize>,
    pub seams: Vec<Option<usize>>,
}

fn extract_cyclic(
    host: &NdArray,
    start: &[usize],
    sides: &[usize],
    counter: &AtomicU64,
    touched: Option<&Mutex<std::collections::BTreeSet<usize>>>,
) -> Result<CyclicWindow> {
    let d = host.ndim();
    if start.len() != d || sides.len() != d {
        return Err(Error::usage(format!(
            "window start {start:?} / sides {sides:?} do not match array dimension {d}"
        )));
    }
    for axis in 0..d {
        if sides[axis] == 0 || sides[axis] > host.dims()[axis] {
            return Err(Error::usage(format!(
                "window side {} on axis {axis} must be in 1..={}",
                sides[axis],
                host.dims()[axis]
            )));
        }
        if start[axis] >= host.dims()[axis] {
            return Err(Error::usage(format!("window start {start:?} out of bounds")));
        }
    }
    let cells: usize = sides.iter().product();
    let mut values = Vec::with_capacity(cells);
    let mut offset = vec![0usize; d];
    let mut src = vec![0usize; d];
    loop {
        for axis in 0..d {
            let s = start[axis] + offset[axis];
            let n = host.dims()[axis];
            src[axis] = if s >= n { s - n } else { s };
        }
        let idx = host.linear_index(&src).expect("in bounds by construction");
        counter.fetch_add(1, Ordering::Relaxed);
        if let Some(touched) = touched {
            touched.lock().unwrap().insert(idx);
        }
        values.push(host.get_linear(idx));
        // Row-major odometer over the window offsets.
        let mut axis = d;
        loop {
            if axis == 0 {
                let seams = (0..d)
                    .map(|i| {
                        let wrap = start[i] + sides[i] > host.dims()[i];
                        wrap.then(|| host.dims()[i] - start[i])
                    })
                    .collect();
                let array = NdArray::new(sides.to_vec(), host.alphabet(), values)
                    .expect("window shape is valid");
                return Ok(CyclicWindow { array, start: start.to_vec(), seams });
            }
            axis -= 1;
            offset[axis] += 1;
            if offset[axis] < sides[axis] {
                break;
            }
            offset[axis] = 0;
        }
    }
}

/// Bit-packed binary values, least significant bit first within each word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedBits {
    words: Vec<u64>,
    len: usize,
}

impl PackedBits {
    pub fn from_symbols(values: &[Symbol]) -> Self {
        let mut words = vec![0u64; values.len().div_ceil(64)];
        for (i, &v) in values.iter().enumerate() {
            debug_assert!(v <= 1);
            if v == 1 {
                words[i / 64] |= 1u64 << (i % 64);
            }
        }
        PackedBits { words, len: values.len() }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> Symbol {
        debug_assert!(i < self.len);
        ((self.words[i / 64] >> (i % 64)) & 1) as Symbol
    }

    /// `width <= 64` bits starting at `i`, packed into the low bits of the
    /// return value. Bits past the end of the data read as zero.
    pub fn window(&self, i: usize, width: usize) -> u64 {
        debug_assert!((1..=64).contains(&width));
        let q = i / 64;
        let r = i % 64;
        let mut out = self.words[q] >> r;
        if r != 0 && q + 1 < self.words.len() {
            out |= self.words[q + 1] << (64 - r);
        }
        if width < 64 {
            out &= (1u64 << width) - 1;
        }
        out
    }
}

struct ShapeHelper {
    dims: Vec<usize>,
}

fn shape_helper(dims: &[usize]) -> ShapeHelper {
    ShapeHelper { dims: dims.to_vec() }
}

impl ShapeHelper {
    fn coord_of(&self, mut idx: usize) -> Vec<usize> {
        let mut coord = vec![0usize; self.dims.len()];
        for axis in (0..self.dims.len()).rev() {
            coord[axis] = idx % self.dims[axis];
            idx /= self.dims[axis];
        }
        coord
    }
}

/// Row-major strides for a shape.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for axis in (0..dims.len().saturating_sub(1)).rev() {
        strides[axis] = strides[axis + 1] * dims[axis + 1];
    }
    strides
}

/// Iterates the linear indices of the axis-aligned box `start + [0, sides)`
/// inside an array of shape `dims`, in row-major order.
pub(crate) fn box_indices(dims: &[usize], start: &[usize], sides: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut base = 0usize;
    for axis in 0..dims.len() {
        base += start[axis] * st[axis];
    }
    let mut out = Vec::with_capacity(sides.iter().product());
    let mut offset = vec![0usize; dims.len()];
    'outer: loop {
        let mut idx = base;
        for axis in 0..dims.len() {
            idx += offset[axis] * st[axis];
        }
        out.push(idx);
        let mut axis = dims.len();
        loop {
            if axis == 0 {
                break 'outer;
            }
            axis -= 1;
            offset[axis] += 1;
            if offset[axis] < sides[axis] {
                break;
            }
            offset[axis] = 0;
        }
    }
    out
}
