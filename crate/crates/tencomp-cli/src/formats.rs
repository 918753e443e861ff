//! Loading and canonical writing of the tensor JSON format.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tencomp_core::tensor::{Tensor, TensorError};

#[derive(Debug)]
pub enum FormatError {
    Io {
        path: String,
        source: std::io::Error,
    },
    /// JSON syntax/type errors, with serde's line/column position.
    Json {
        path: String,
        source: serde_json::Error,
    },
    /// Index tuples are 1-based; zero or out-of-range components are
    /// rejected with their entry position.
    Index {
        path: String,
        entry: usize,
        detail: String,
    },
    Tensor {
        path: String,
        source: TensorError,
    },
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::Io { path, source } => write!(f, "{path}: {source}"),
            FormatError::Json { path, source } => write!(f, "{path}: {source}"),
            FormatError::Index {
                path,
                entry,
                detail,
            } => {
                write!(f, "{path}: entries[{entry}]: {detail}")
            }
            FormatError::Tensor { path, source } => write!(f, "{path}: {source}"),
        }
    }
}

impl std::error::Error for FormatError {}

#[derive(Debug, Serialize, Deserialize)]
struct TensorFile {
    order: usize,
    dim: usize,
    entries: Vec<TensorEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TensorEntry {
    idx: Vec<usize>,
    val: f64,
}

/// Parses the canonical JSON format (1-based indices) into a tensor.
pub fn parse_tensor(text: &str, path: &str) -> Result<Tensor, FormatError> {
    let file: TensorFile = serde_json::from_str(text).map_err(|source| FormatError::Json {
        path: path.to_string(),
        source,
    })?;
    let mut entries = Vec::with_capacity(file.entries.len());
    for (position, entry) in file.entries.iter().enumerate() {
        if entry.idx.len() != file.order {
            return Err(FormatError::Index {
                path: path.to_string(),
                entry: position,
                detail: format!(
                    "tuple has {} components, expected {}",
                    entry.idx.len(),
                    file.order
                ),
            });
        }
        let mut tuple = Vec::with_capacity(file.order);
        for &component in &entry.idx {
            if component == 0 || component > file.dim {
                return Err(FormatError::Index {
                    path: path.to_string(),
                    entry: position,
                    detail: format!(
                        "index {component} out of range 1..={} (indices are 1-based)",
                        file.dim
                    ),
                });
            }
            tuple.push(component - 1);
        }
        entries.push((tuple, entry.val));
    }
    Tensor::from_entries(file.order, file.dim, &entries).map_err(|source| FormatError::Tensor {
        path: path.to_string(),
        source,
    })
}

/// Reads and parses a tensor file.
pub fn load_tensor(path: &Path) -> Result<Tensor, FormatError> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: shown.clone(),
        source,
    })?;
    parse_tensor(&text, &shown)
}

/// Canonical serialization: 1-based indices, entries in ascending
/// lexicographic order, two-space indentation, trailing newline.
pub fn tensor_to_canonical_json(tensor: &Tensor) -> String {
    let entries: Vec<TensorEntry> = tensor
        .entries()
        .map(|(tuple, val)| TensorEntry {
            idx: tuple.iter().map(|&i| i as usize + 1).collect(),
            val,
        })
        .collect();
    let file = TensorFile {
        order: tensor.order(),
        dim: tensor.dim(),
        entries,
    };
    let mut text = serde_json::to_string_pretty(&file).expect("serialization cannot fail");
    text.push('\n');
    text
}
