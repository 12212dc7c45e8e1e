//! The on-disk model format.
//!
//! A model file is a JSON document with the dimension count `n`, one kind
//! per dimension (`"shift"` or `"derivative"`), and an `n x n` grid of real
//! blocks, each an array of rows:
//!
//! ```json
//! {
//!   "name": "s1",
//!   "n": 2,
//!   "kinds": ["shift", "shift"],
//!   "blocks": [[[[0.5]], [[0.3]]],
//!              [[[0.3]], [[0.5]]]]
//! }
//! ```
//!
//! `blocks[i][j]` couples dimension `j` into dimension `i` and must be
//! `k_i x k_j`, where `k_i` is the row count of the diagonal block
//! `blocks[i][i]`. One format covers 2D and nD models alike.

use roesser::linalg::ComplexMatrix;
use roesser::model::{DimensionKind, NdRoesserModel, RoesserModel};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RawModelFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    n: usize,
    kinds: Vec<String>,
    blocks: Vec<Vec<Vec<Vec<f64>>>>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelFileError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

fn field_err(path: impl Into<String>, message: impl Into<String>) -> ModelFileError {
    ModelFileError::Field {
        path: path.into(),
        message: message.into(),
    }
}

/// A parsed and dimension-checked model file.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub name: Option<String>,
    pub kinds: Vec<DimensionKind>,
    pub blocks: Vec<Vec<Vec<Vec<f64>>>>,
}

/// What a model file loads into.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedModel {
    TwoD(RoesserModel),
    Nd(NdRoesserModel),
}

impl LoadedModel {
    pub fn n(&self) -> usize {
        match self {
            LoadedModel::TwoD(_) => 2,
            LoadedModel::Nd(m) => m.n(),
        }
    }
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self, ModelFileError> {
        let raw: RawModelFile =
            serde_json::from_str(text).map_err(|e| ModelFileError::Json(e.to_string()))?;
        if raw.n < 2 {
            return Err(field_err("n", format!("dimension count must be >= 2, got {}", raw.n)));
        }
        if raw.kinds.len() != raw.n {
            return Err(field_err(
                "kinds",
                format!("expected {} entries, got {}", raw.n, raw.kinds.len()),
            ));
        }
        let mut kinds = Vec::with_capacity(raw.n);
        for (i, k) in raw.kinds.iter().enumerate() {
            let kind = match k.as_str() {
                "shift" => DimensionKind::Shift,
                "derivative" => DimensionKind::Derivative,
                other => {
                    return Err(field_err(
                        format!("kinds[{i}]"),
                        format!("expected \"shift\" or \"derivative\", got \"{other}\""),
                    ))
                }
            };
            kinds.push(kind);
        }
        if raw.blocks.len() != raw.n {
            return Err(field_err(
                "blocks",
                format!("expected {} block rows, got {}", raw.n, raw.blocks.len()),
            ));
        }
        for (i, row) in raw.blocks.iter().enumerate() {
            if row.len() != raw.n {
                return Err(field_err(
                    format!("blocks[{i}]"),
                    format!("expected {} blocks, got {}", raw.n, row.len()),
                ));
            }
        }
        // Diagonal blocks fix the state dimensions.
        let mut dims = Vec::with_capacity(raw.n);
        for i in 0..raw.n {
            let d = raw.blocks[i][i].len();
            if d == 0 {
                return Err(field_err(format!("blocks[{i}][{i}]"), "diagonal block is empty"));
            }
            dims.push(d);
        }
        for i in 0..raw.n {
            for j in 0..raw.n {
                let b = &raw.blocks[i][j];
                if b.len() != dims[i] {
                    return Err(field_err(
                        format!("blocks[{i}][{j}]"),
                        format!("expected {} rows, got {}", dims[i], b.len()),
                    ));
                }
                for (r, rowv) in b.iter().enumerate() {
                    if rowv.len() != dims[j] {
                        return Err(field_err(
                            format!("blocks[{i}][{j}][{r}]"),
                            format!("expected {} columns, got {}", dims[j], rowv.len()),
                        ));
                    }
                    for (c, v) in rowv.iter().enumerate() {
                        if !v.is_finite() {
                            return Err(field_err(
                                format!("blocks[{i}][{j}][{r}][{c}]"),
                                "entry is not a finite number",
                            ));
                        }
                    }
                }
            }
        }
        Ok(ModelFile {
            name: raw.name,
            kinds,
            blocks: raw.blocks,
        })
    }

    pub fn n(&self) -> usize {
        self.kinds.len()
    }

    /// Full-precision JSON rendering; numeric values survive a round-trip
    /// exactly.
    pub fn to_json_string(&self) -> String {
        let raw = RawModelFile {
            name: self.name.clone(),
            n: self.n(),
            kinds: self
                .kinds
                .iter()
                .map(|k| {
                    match k {
                        DimensionKind::Shift => "shift",
                        DimensionKind::Derivative => "derivative",
                    }
                    .to_string()
                })
                .collect(),
            blocks: self.blocks.clone(),
        };
        serde_json::to_string_pretty(&raw).expect("serialization cannot fail")
    }

    fn block_matrix(&self, i: usize, j: usize) -> ComplexMatrix {
        let b = &self.blocks[i][j];
        let rows: Vec<&[f64]> = b.iter().map(|r| r.as_slice()).collect();
        ComplexMatrix::from_real_rows(&rows)
    }

    pub fn to_model(&self) -> Result<LoadedModel, ModelFileError> {
        let n = self.n();
        if n == 2 {
            let m = RoesserModel::new(
                self.block_matrix(0, 0),
                self.block_matrix(0, 1),
                self.block_matrix(1, 0),
                self.block_matrix(1, 1),
                self.kinds[0],
                self.kinds[1],
            )
            .map_err(|e| field_err("blocks", e.to_string()))?;
            Ok(LoadedModel::TwoD(m))
        } else {
            let grid: Vec<Vec<ComplexMatrix>> = (0..n)
                .map(|i| (0..n).map(|j| self.block_matrix(i, j)).collect())
                .collect();
            let m = NdRoesserModel::new(grid, self.kinds.clone())
                .map_err(|e| field_err("blocks", e.to_string()))?;
            Ok(LoadedModel::Nd(m))
        }
    }
}
