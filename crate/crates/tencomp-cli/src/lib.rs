//! File formats and report serialization for the tencomp toolkit.
//!
//! The canonical tensor interchange format is JSON with 1-based indices:
//!
//! ```json
//! { "order": 3, "dim": 2, "entries": [ { "idx": [1, 1, 1], "val": 1.0 } ] }
//! ```
//!
//! Unspecified tuples are zero; duplicate tuples are a load error. Writing
//! is canonical (entries in ascending lexicographic order, fixed layout), so
//! generate → load → re-emit is byte-identical.
//!
//! Reports are 1-based as well: solution supports, witness vectors, and
//! verdict certificates all serialize with the same index convention as the
//! tensor files.

pub mod formats;
pub mod reports;

pub use formats::{load_tensor, parse_tensor, tensor_to_canonical_json, FormatError};
