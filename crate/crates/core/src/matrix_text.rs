//! Plain-text complex matrix format shared by frames and cloner unitaries.
//!
//! One row per line; each entry is written as `re,im` and entries are
//! separated by a single space. Floats use the shortest representation that
//! round-trips exactly. Blank lines and lines starting with `#` are ignored
//! when parsing.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub fn format_entry(z: Complex64) -> String {
    format!("{},{}", z.re, z.im)
}

pub fn format_rows<'a, I>(rows: I) -> String
where
    I: IntoIterator<Item = &'a [Complex64]>,
{
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().map(|z| format_entry(*z)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

fn parse_entry(token: &str, line: usize) -> Result<Complex64> {
    let (re, im) = token.split_once(',').ok_or_else(|| Error::Parse {
        line,
        message: format!("expected `re,im`, got `{token}`"),
    })?;
    let parse = |s: &str| {
        s.trim().parse::<f64>().map_err(|e| Error::Parse {
            line,
            message: format!("bad float `{s}`: {e}"),
        })
    };
    Ok(Complex64::new(parse(re)?, parse(im)?))
}

/// Parses rows of complex entries. All rows must have the same length.
pub fn parse_rows(text: &str) -> Result<Vec<Vec<Complex64>>> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| parse_entry(tok, idx + 1))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("row has {} entries, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    Ok(rows)
}
