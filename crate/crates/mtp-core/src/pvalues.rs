//! Observed p-values, held as exact rationals.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::MtpError;
use crate::weight::{parse_rational, rational_from_f64};

/// A vector of exact p-values in `[0, 1]`, indexed like the graph nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PValues(Vec<BigRational>);

impl PValues {
    pub fn new(values: Vec<BigRational>) -> Result<Self, MtpError> {
        for (i, p) in values.iter().enumerate() {
            if p < &BigRational::zero() || p > &BigRational::one() {
                return Err(MtpError::Usage(format!(
                    "p-value {} for hypothesis {} lies outside [0, 1]",
                    p,
                    i + 1
                )));
            }
        }
        Ok(PValues(values))
    }

    /// Exact conversion from floats, clamped into `[0, 1]`.
    pub fn from_f64s(values: &[f64]) -> Self {
        PValues(
            values
                .iter()
                .map(|&x| {
                    let r = rational_from_f64(x.clamp(0.0, 1.0));
                    r.min(BigRational::one()).max(BigRational::zero())
                })
                .collect(),
        )
    }

    pub fn parse_strs(values: &[&str]) -> Result<Self, MtpError> {
        PValues::new(
            values
                .iter()
                .map(|s| parse_rational(s))
                .collect::<Result<Vec<_>, _>>()?,
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> &BigRational {
        &self.0[i]
    }

    pub fn values(&self) -> &[BigRational] {
        &self.0
    }
}

/// Parses a `node,p` CSV document ordered against the given node labels.
/// Every label must appear exactly once; p-values parse exactly from
/// fraction or decimal text.
pub fn parse_pvalue_csv(text: &str, labels: &[String]) -> Result<PValues, MtpError> {
    let mut by_label = std::collections::HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if lineno == 0 && line.to_ascii_lowercase().starts_with("node,") {
            continue;
        }
        let (node, p) = line.split_once(',').ok_or_else(|| MtpError::Parse {
            file: "p-value file".into(),
            message: format!("line {}: expected 'node,p'", lineno + 1),
        })?;
        let value = parse_rational(p).map_err(|e| MtpError::Parse {
            file: "p-value file".into(),
            message: format!("line {}: {}", lineno + 1, e),
        })?;
        if by_label.insert(node.trim().to_string(), value).is_some() {
            return Err(MtpError::Parse {
                file: "p-value file".into(),
                message: format!("duplicate entry for '{}'", node.trim()),
            });
        }
    }
    let mut values = Vec::with_capacity(labels.len());
    for label in labels {
        match by_label.remove(label) {
            Some(v) => values.push(v),
            None => {
                return Err(MtpError::Parse {
                    file: "p-value file".into(),
                    message: format!("missing p-value for '{label}'"),
                })
            }
        }
    }
    if let Some(extra) = by_label.keys().next() {
        return Err(MtpError::Parse {
            file: "p-value file".into(),
            message: format!("'{extra}' does not name a graph node"),
        });
    }
    PValues::new(values)
}
