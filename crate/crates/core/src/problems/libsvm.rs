//! LIBSVM / SVMlight sparse text format.
//!
//! One sample per line: `label idx:val idx:val ...` with 1-based, strictly
//! increasing feature indices. Labels must be `+1`/`-1`; `0` is accepted
//! and read as `-1`. Blank lines and `#` comments are ignored.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::{Matrix, Vector};

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub label: f64,
    /// Zero-based feature indices, strictly increasing.
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl Sample {
    pub fn dot(&self, theta: &Vector) -> f64 {
        self.indices
            .iter()
            .zip(&self.values)
            .map(|(&i, &x)| x * theta[i])
            .sum()
    }
}

/// Labelled sparse samples of a fixed feature dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledData {
    pub dim: usize,
    pub samples: Vec<Sample>,
}

impl LabeledData {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Row-per-sample dense feature matrix.
    pub fn dense_features(&self) -> Matrix {
        let mut x = Matrix::zeros(self.samples.len(), self.dim);
        for (r, s) in self.samples.iter().enumerate() {
            for (&i, &v) in s.indices.iter().zip(&s.values) {
                x[(r, i)] = v;
            }
        }
        x
    }

    pub fn labels(&self) -> Vector {
        Vector::from_iterator(self.samples.len(), self.samples.iter().map(|s| s.label))
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_label(tok: &str, line: usize) -> Result<f64> {
    let value: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("bad label `{tok}`")))?;
    if value == 1.0 {
        Ok(1.0)
    } else if value == -1.0 || value == 0.0 {
        Ok(-1.0)
    } else {
        Err(parse_err(line, format!("label must be +1, -1 or 0, got `{tok}`")))
    }
}

/// Parses LIBSVM text. With `dim = None` the dimension is the largest
/// index seen; otherwise any index above `dim` is an error.
pub fn parse_libsvm<R: BufRead>(reader: R, dim: Option<usize>) -> Result<LabeledData> {
    let mut samples = Vec::new();
    let mut max_index = 0;
    for (n, line) in reader.lines().enumerate() {
        let lineno = n + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label = parse_label(tokens.next().expect("nonempty line"), lineno)?;
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(lineno, format!("expected idx:val, got `{tok}`")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad feature index `{idx}`")))?;
            if idx == 0 {
                return Err(parse_err(lineno, "feature indices are 1-based"));
            }
            if let Some(&last) = indices.last() {
                if idx - 1 <= last {
                    return Err(parse_err(
                        lineno,
                        format!("feature index {idx} is not strictly increasing"),
                    ));
                }
            }
            if let Some(d) = dim {
                if idx > d {
                    return Err(parse_err(
                        lineno,
                        format!("feature index {idx} exceeds dimension {d}"),
                    ));
                }
            }
            let val: f64 = val
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad feature value `{val}`")))?;
            if !val.is_finite() {
                return Err(parse_err(lineno, format!("non-finite feature value `{val}`")));
            }
            max_index = max_index.max(idx);
            indices.push(idx - 1);
            values.push(val);
        }
        samples.push(Sample {
            label,
            indices,
            values,
        });
    }
    Ok(LabeledData {
        dim: dim.unwrap_or(max_index),
        samples,
    })
}

pub fn load_libsvm(path: impl AsRef<Path>, dim: Option<usize>) -> Result<LabeledData> {
    parse_libsvm(BufReader::new(File::open(path)?), dim)
}

/// Writes `data` in LIBSVM format. Floats use the shortest representation
/// that parses back to the same value.
pub fn write_libsvm<W: Write>(data: &LabeledData, mut out: W) -> Result<()> {
    for s in &data.samples {
        write!(out, "{}", if s.label > 0.0 { "+1" } else { "-1" })?;
        for (&i, &v) in s.indices.iter().zip(&s.values) {
            write!(out, " {}:{:?}", i + 1, v)?;
        }
        writeln!(out)?;
    }
    Ok(())
}
