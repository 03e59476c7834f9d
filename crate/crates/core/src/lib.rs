//! Distance to forbidden-pattern freeness for strings and dense d-dimensional
//! arrays: exact computation where a linear-time algorithm exists, certified
//! bounds elsewhere, and seeded sublinear estimators and tolerant testers on
//! top of both.
//!
//! The crate is organized around a small set of primitives:
//!
//! * [`mod@array`] — dense arrays over a finite alphabet, flip sets, occurrence
//!   sets and a query-counting read view used by every sampler.
//! * [`classify`] — decides whether a pattern is removable (every copy can be
//!   destroyed by one entry change without creating another), almost
//!   homogeneous, or too small for the guarantee to apply, and constructs the
//!   witness arrays behind the negative cases.
//! * [`matcher`] — occurrence enumeration, full-array and windowed.
//! * [`exact1d`] — linear-time exact distance machinery for strings: greedy
//!   hitting sets, certified deletion sets, constructive safe flips, and the
//!   streaming pass for almost-homogeneous patterns.
//! * [`ndcombin`] — exact hitting numbers on small blocks, safe flips and the
//!   two-phase deletion procedure in d dimensions.
//! * [`sampler`] — seeded block samplers: distance approximation and tolerant
//!   testing with exact query accounting.
//! * [`oracle`] — independent brute-force references used by the test suites;
//!   deliberately shares no code with the fast paths.
//! * [`harness`] — planted-instance generators with measured distances, the
//!   query lower-bound experiment, trial runners and scaling benchmarks.
//! * [`mod@format`] — the NDA text format and raw-string parsing/serialization.

pub mod array;
pub mod classify;
pub mod exact1d;
pub mod format;
pub mod harness;
pub mod matcher;
pub mod ndcombin;
pub mod oracle;
pub mod sampler;
pub mod seeds;

mod error;

pub use array::{Alphabet, CountedView, DistanceValue, FlipSet, NdArray, OccurrenceSet, Pattern};
pub use error::{Error, Result};
