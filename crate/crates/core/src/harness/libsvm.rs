//! Sparse `label idx:val idx:val …` text datasets, the standard format the
//! public regression benchmarks ship in.

use std::io::BufRead;

use super::ParseError;
use crate::error::Result;
use crate::olo::HilbertVector;

/// One labeled sparse example; indices are 1-based and strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseExample {
    pub label: f64,
    pub features: Vec<(u32, f64)>,
}

impl SparseExample {
    pub fn l2_norm(&self) -> f64 {
        self.features.iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    /// Dense vector of dimension `dim` (1-based feature index i lands in
    /// coordinate i−1).
    pub fn to_dense(&self, dim: usize) -> HilbertVector {
        let mut v = vec![0.0; dim.max(1)];
        for &(idx, val) in &self.features {
            let slot = (idx - 1) as usize;
            assert!(
                slot < v.len(),
                "feature index {idx} exceeds dimension {dim}"
            );
            v[slot] = val;
        }
        HilbertVector::new(v).expect("finite by construction")
    }
}

/// Parses the whole stream. Blank lines are skipped; CRLF is accepted.
/// Malformed tokens, non-numeric values, and non-increasing feature indices
/// are reported with their line number.
pub fn parse_libsvm<R: BufRead>(reader: R) -> Result<Vec<SparseExample>> {
    let mut examples = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line_number = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let label_token = tokens.next().expect("nonempty after trim");
        let label: f64 = label_token.parse().map_err(|_| ParseError {
            line: line_number,
            message: format!("label `{label_token}` is not a number"),
        })?;
        if !label.is_finite() {
            return Err(ParseError {
                line: line_number,
                message: format!("label `{label_token}` is not finite"),
            }
            .into());
        }
        let mut features = Vec::new();
        let mut previous_index = 0u32;
        for token in tokens {
            let (idx_str, val_str) = token.split_once(':').ok_or_else(|| ParseError {
                line: line_number,
                message: format!("feature token `{token}` is not idx:val"),
            })?;
            let idx: u32 = idx_str.parse().map_err(|_| ParseError {
                line: line_number,
                message: format!("feature index `{idx_str}` is not a positive integer"),
            })?;
            if idx == 0 {
                return Err(ParseError {
                    line: line_number,
                    message: "feature indices start at 1".to_string(),
                }
                .into());
            }
            if idx <= previous_index {
                return Err(ParseError {
                    line: line_number,
                    message: format!("feature index {idx} does not increase past {previous_index}"),
                }
                .into());
            }
            let val: f64 = val_str.parse().map_err(|_| ParseError {
                line: line_number,
                message: format!("feature value `{val_str}` is not a number"),
            })?;
            if !val.is_finite() {
                return Err(ParseError {
                    line: line_number,
                    message: format!("feature value `{val_str}` is not finite"),
                }
                .into());
            }
            previous_index = idx;
            features.push((idx, val));
        }
        examples.push(SparseExample { label, features });
    }
    Ok(examples)
}

/// Rescales the features to unit L2 norm; the label is untouched. All-zero
/// examples have no direction and are dropped (`None`).
pub fn normalize_l2(example: &SparseExample) -> Option<SparseExample> {
    let norm = example.l2_norm();
    if norm == 0.0 {
        return None;
    }
    Some(SparseExample {
        label: example.label,
        features: example
            .features
            .iter()
            .map(|&(idx, val)| (idx, val / norm))
            .collect(),
    })
}

/// Normalizes a whole dataset, returning the kept examples and how many
/// all-zero ones were dropped.
pub fn normalize_dataset(examples: &[SparseExample]) -> (Vec<SparseExample>, usize) {
    let mut kept = Vec::with_capacity(examples.len());
    let mut dropped = 0usize;
    for example in examples {
        match normalize_l2(example) {
            Some(normalized) => kept.push(normalized),
            None => dropped += 1,
        }
    }
    (kept, dropped)
}

/// Largest feature index across the dataset (0 when no features appear):
/// the dense dimension the single online pass will run in.
pub fn max_feature_index(examples: &[SparseExample]) -> usize {
    examples
        .iter()
        .flat_map(|e| e.features.iter().map(|&(idx, _)| idx as usize))
        .max()
        .unwrap_or(0)
}
