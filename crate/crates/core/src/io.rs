//! CSV datasets: one sample per row, one column per component, with
//! `#`-prefixed comment lines for metadata.
//!
//! Metadata lines of the form `# key=value key2=value2` are collected into
//! [`Dataset::meta`]. Paired datasets declare `x_cols` and `theta_cols`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::nn::PairedDataset;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub rows: Vec<Vec<f64>>,
    pub meta: BTreeMap<String, String>,
}

impl Dataset {
    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// First column of every row; errors unless the data are one-dimensional.
    pub fn scalars(&self) -> Result<Vec<f64>> {
        if self.dim() != 1 {
            return Err(Error::InvalidInput(format!(
                "expected a single column, found {}",
                self.dim()
            )));
        }
        Ok(self.rows.iter().map(|r| r[0]).collect())
    }

    pub fn meta_usize(&self, key: &str) -> Result<Option<usize>> {
        self.meta
            .get(key)
            .map(|v| {
                v.parse().map_err(|_| {
                    Error::InvalidInput(format!("header field {key}={v:?} is not a count"))
                })
            })
            .transpose()
    }
}

pub fn parse_csv(text: &str) -> Result<Dataset> {
    let mut data = Dataset::default();
    for line in text.lines() {
        if let Some(comment) = line.trim_start().strip_prefix('#') {
            for token in comment.split_whitespace() {
                if let Some((k, v)) = token.split_once('=') {
                    data.meta.insert(k.to_string(), v.to_string());
                }
            }
        }
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("cannot read {field:?} as a number"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(v) = row.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parse {
                line,
                message: format!("non-finite value {v}"),
            });
        }
        if let Some(first) = data.rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {} columns, found {}", first.len(), row.len()),
                });
            }
        }
        data.rows.push(row);
    }
    Ok(data)
}

pub fn read_csv(path: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_csv(&text)
}

/// Renders rows with `{}` formatting, which round-trips `f64` exactly.
pub fn format_csv(rows: &[Vec<f64>], meta: &[(&str, String)], comment: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(c) = comment {
        out.push_str(&format!("# {c}\n"));
    }
    if !meta.is_empty() {
        let fields: Vec<String> = meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("# {}\n", fields.join(" ")));
    }
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(
    path: &Path,
    rows: &[Vec<f64>],
    meta: &[(&str, String)],
    comment: Option<&str>,
) -> Result<()> {
    fs::write(path, format_csv(rows, meta, comment))?;
    Ok(())
}

/// Splits each row into X columns then θ columns, as declared in the header.
pub fn paired_from_dataset(data: &Dataset) -> Result<PairedDataset> {
    let x_cols = data
        .meta_usize("x_cols")?
        .ok_or_else(|| Error::InvalidInput("paired dataset header must declare x_cols".into()))?;
    let theta_cols = data.meta_usize("theta_cols")?.ok_or_else(|| {
        Error::InvalidInput("paired dataset header must declare theta_cols".into())
    })?;
    if x_cols == 0 || theta_cols == 0 {
        return Err(Error::InvalidInput(
            "x_cols and theta_cols must be positive".into(),
        ));
    }
    if !data.rows.is_empty() && data.dim() != x_cols + theta_cols {
        return Err(Error::InvalidInput(format!(
            "header declares {} columns but rows have {}",
            x_cols + theta_cols,
            data.dim()
        )));
    }
    let xs = data.rows.iter().map(|r| r[..x_cols].to_vec()).collect();
    let thetas = data.rows.iter().map(|r| r[x_cols..].to_vec()).collect();
    PairedDataset::new(xs, thetas)
}

pub fn read_paired(path: &Path) -> Result<PairedDataset> {
    paired_from_dataset(&read_csv(path)?)
}
