//! Point files: one point per row, coordinates separated by whitespace or
//! commas, `#` lines ignored.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use geomed::PointSet;

use crate::error::{CliError, CliResult};

/// Where point weights come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightsSpec {
    None,
    /// The last column of the point file.
    LastColumn,
    /// A separate file with one weight per row.
    File(PathBuf),
}

impl FromStr for WeightsSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(WeightsSpec::None),
            "last_column" => Ok(WeightsSpec::LastColumn),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(WeightsSpec::File(PathBuf::from(p))),
                _ => Err(format!("expected none, last_column or file:<path>, got {s:?}")),
            },
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Numeric rows of `text` with their 1-based line numbers.
fn numeric_rows(text: &str, path: &Path) -> CliResult<Vec<(usize, Vec<f64>)>> {
    let mut out = Vec::new();
    let mut width = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |msg: String| CliError::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut vals = Vec::new();
        for tok in trimmed.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let v: f64 = tok.parse().map_err(|_| err(format!("not a number: {tok:?}")))?;
            if !v.is_finite() {
                return Err(err(format!("non-finite value: {tok:?}")));
            }
            vals.push(v);
        }
        match width {
            None => width = Some(vals.len()),
            Some(w) if w != vals.len() => {
                return Err(err(format!("expected {w} columns, found {}", vals.len())));
            }
            _ => {}
        }
        out.push((line, vals));
    }
    if out.is_empty() {
        return Err(CliError::Input {
            path: path.to_path_buf(),
            msg: "no data rows".into(),
        });
    }
    Ok(out)
}

/// Parses point-file text; `path` is used for diagnostics and to resolve nothing else.
pub fn parse_points_str(text: &str, path: &Path, weights: &WeightsSpec) -> CliResult<PointSet<f64>> {
    let rows = numeric_rows(text, path)?;
    let cols = rows[0].1.len();
    let input_err = |msg: String| CliError::Input {
        path: path.to_path_buf(),
        msg,
    };
    let (d, w) = match weights {
        WeightsSpec::None => (cols, None),
        WeightsSpec::LastColumn => {
            if cols < 2 {
                return Err(input_err("last_column weights need at least two columns".into()));
            }
            (cols - 1, Some(rows.iter().map(|(_, r)| r[cols - 1]).collect::<Vec<_>>()))
        }
        WeightsSpec::File(wpath) => {
            let wrows = numeric_rows(&read(wpath)?, wpath)?;
            if let Some((line, r)) = wrows.iter().find(|(_, r)| r.len() != 1) {
                return Err(CliError::Parse {
                    path: wpath.clone(),
                    line: *line,
                    msg: format!("expected one weight per row, found {}", r.len()),
                });
            }
            if wrows.len() != rows.len() {
                return Err(CliError::Input {
                    path: wpath.clone(),
                    msg: format!("{} weights for {} points", wrows.len(), rows.len()),
                });
            }
            (cols, Some(wrows.iter().map(|(_, r)| r[0]).collect()))
        }
    };
    let coords = rows.iter().flat_map(|(_, r)| r[..d].iter().copied()).collect();
    let ps = PointSet::new(coords, d).map_err(|e| input_err(e.to_string()))?;
    match w {
        None => Ok(ps),
        Some(w) => ps.with_weights(w).map_err(|e| input_err(e.to_string())),
    }
}

pub fn parse_points(path: &Path, weights: &WeightsSpec) -> CliResult<PointSet<f64>> {
    parse_points_str(&read(path)?, path, weights)
}
