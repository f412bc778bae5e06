//! Text formats for subsets of `F_q`.
//!
//! A set file holds either one element per line as a coefficient tuple
//! (`3`, `1 2`, `1,2` or `(1, 2)`, constant term first) or a JSON list whose
//! entries are element indices or coefficient lists. Blank lines and lines
//! starting with `#` are skipped.

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeSet;

fn element_from_coeffs(field: &FieldSpec, coeffs: Vec<u64>) -> Result<usize> {
    if coeffs.len() > field.k() {
        return Err(Error::ElementOutOfField);
    }
    let mut coeffs = coeffs;
    coeffs.resize(field.k(), 0);
    field.index_of(&FieldElement { coeffs })
}

fn parse_tuple(line: &str) -> Result<Vec<u64>> {
    let inner = line.trim().trim_start_matches('(').trim_end_matches(')');
    inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().map_err(|_| Error::Parse(format!("'{t}' is not a coefficient"))))
        .collect()
}

fn from_json(field: &FieldSpec, v: &Value) -> Result<usize> {
    match v {
        Value::Number(n) => {
            let i = n.as_u64().ok_or_else(|| Error::Parse(format!("{n} is not an element index")))? as usize;
            if i >= field.q() {
                return Err(Error::ElementOutOfField);
            }
            Ok(i)
        }
        Value::Array(items) => {
            let coeffs = items
                .iter()
                .map(|c| c.as_u64().ok_or_else(|| Error::Parse(format!("{c} is not a coefficient"))))
                .collect::<Result<Vec<_>>>()?;
            element_from_coeffs(field, coeffs)
        }
        other => Err(Error::Parse(format!("unexpected set entry {other}"))),
    }
}

/// Sorted, deduplicated element indices.
pub fn parse_set_text(field: &FieldSpec, text: &str) -> Result<Vec<usize>> {
    let trimmed = text.trim_start();
    let mut out = BTreeSet::new();
    if trimmed.starts_with('[') {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("set JSON: {e}")))?;
        let items = v.as_array().ok_or_else(|| Error::Parse("set JSON must be a list".into()))?;
        for item in items {
            out.insert(from_json(field, item)?);
        }
    } else {
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            out.insert(element_from_coeffs(field, parse_tuple(line)?)?);
        }
    }
    Ok(out.into_iter().collect())
}

/// Where a set comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SetSource {
    File { path: String },
    Random { density: f64, seed: Option<u64> },
    Explicit { elements: Vec<usize> },
    Full,
    Empty,
}

impl std::str::FromStr for SetSource {
    type Err = Error;
    /// `file:PATH`, `random:DENSITY[:seedN]`, `explicit:0,1,3`, `full`, `empty`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        match head {
            "full" => Ok(SetSource::Full),
            "empty" => Ok(SetSource::Empty),
            "file" if !rest.is_empty() => Ok(SetSource::File { path: rest.to_string() }),
            "explicit" => {
                let elements = rest
                    .split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse().map_err(|_| Error::Parse(format!("'{t}' is not an element index"))))
                    .collect::<Result<_>>()?;
                Ok(SetSource::Explicit { elements })
            }
            "random" => {
                let (d, seed) = rest.split_once(':').map_or((rest, None), |(d, s)| (d, Some(s)));
                let density: f64 = d.parse().map_err(|_| Error::Parse(format!("'{d}' is not a density")))?;
                if !(0.0..=1.0).contains(&density) {
                    return Err(Error::InvalidRange(format!("density {density} must lie in [0, 1]")));
                }
                let seed = seed
                    .map(|s| s.trim_start_matches("seed").parse().map_err(|_| Error::Parse(format!("'{s}' is not a seed"))))
                    .transpose()?;
                Ok(SetSource::Random { density, seed })
            }
            _ => Err(Error::Parse(format!("unknown set source '{s}' (expected file:, random:, explicit:, full or empty)"))),
        }
    }
}

impl SetSource {
    /// Element indices. A random source without its own seed uses `seed`.
    pub fn resolve(&self, field: &FieldSpec, seed: u64) -> Result<Vec<usize>> {
        match self {
            SetSource::Full => Ok((0..field.q()).collect()),
            SetSource::Empty => Ok(vec![]),
            SetSource::Explicit { elements } => {
                let set: BTreeSet<usize> = elements.iter().copied().collect();
                if set.iter().any(|&e| e >= field.q()) {
                    return Err(Error::ElementOutOfField);
                }
                Ok(set.into_iter().collect())
            }
            SetSource::File { path } => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
                parse_set_text(field, &text)
            }
            SetSource::Random { density, seed: own } => {
                let mut r = rng::seeded(own.unwrap_or(seed));
                Ok(rng::bernoulli_subset(&mut r, field.q(), *density))
            }
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            SetSource::Random { seed, .. } => *seed,
            _ => None,
        }
    }
}
