//! Matrix Market coordinate format.
//!
//! Reads `real` and `integer` fields in `general` or `symmetric` storage;
//! writes `real general` with 17 significant digits, which round-trips every
//! finite `f64` bit for bit.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

use super::sparse::SparseMatrix;

/// Largest row or column count accepted from a file.
pub const MAX_DIM: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_header(line: &str) -> Result<Symmetry> {
    let mut words = line.split_whitespace().map(str::to_ascii_lowercase);
    let expect = |w: Option<String>, want: &str| -> Result<()> {
        match w {
            Some(ref v) if v == want => Ok(()),
            Some(v) => Err(parse_err(1, format!("expected `{want}` in header, found `{v}`"))),
            None => Err(parse_err(1, format!("header ends before `{want}`"))),
        }
    };
    expect(words.next(), "%%matrixmarket")?;
    expect(words.next(), "matrix")?;
    match words.next().as_deref() {
        Some("coordinate") => {}
        Some(other) => return Err(parse_err(1, format!("unsupported format `{other}` (only coordinate)"))),
        None => return Err(parse_err(1, "header ends before the format")),
    }
    match words.next().as_deref() {
        Some("real") | Some("integer") => {}
        Some(other) => return Err(parse_err(1, format!("unsupported field `{other}`"))),
        None => return Err(parse_err(1, "header ends before the field")),
    }
    let symmetry = match words.next().as_deref() {
        Some("general") => Symmetry::General,
        Some("symmetric") => Symmetry::Symmetric,
        Some(other) => return Err(parse_err(1, format!("unsupported symmetry `{other}`"))),
        None => return Err(parse_err(1, "header ends before the symmetry")),
    };
    if words.next().is_some() {
        return Err(parse_err(1, "trailing words in header"));
    }
    Ok(symmetry)
}

/// Parses a Matrix Market document held in memory.
pub fn read_matrix_market_str(text: &str) -> Result<SparseMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let symmetry = match lines.next() {
        Some((_, header)) => parse_header(header)?,
        None => return Err(parse_err(1, "empty input")),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut entries = 0usize;
    for (lineno, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let mut fields = line.split_whitespace();
        match size {
            None => {
                let mut next_count = |what: &str| -> Result<usize> {
                    fields
                        .next()
                        .ok_or_else(|| parse_err(lineno, format!("size line is missing {what}")))?
                        .parse::<usize>()
                        .map_err(|e| parse_err(lineno, format!("bad {what}: {e}")))
                };
                let m = next_count("the row count")?;
                let n = next_count("the column count")?;
                let nnz = next_count("the entry count")?;
                if fields.next().is_some() {
                    return Err(parse_err(lineno, "trailing fields on size line"));
                }
                if m > MAX_DIM || n > MAX_DIM {
                    return Err(parse_err(lineno, format!("dimensions {m}x{n} exceed {MAX_DIM}")));
                }
                if m.checked_mul(n).is_some_and(|cap| nnz > cap) {
                    return Err(parse_err(lineno, format!("{nnz} entries cannot fit a {m}x{n} matrix")));
                }
                if symmetry == Symmetry::Symmetric && m != n {
                    return Err(parse_err(lineno, "symmetric storage needs a square matrix"));
                }
                size = Some((m, n, nnz));
            }
            Some((m, n, nnz)) => {
                if entries == nnz {
                    return Err(parse_err(lineno, format!("more than the declared {nnz} entries")));
                }
                let mut index = |what: &str, bound: usize| -> Result<usize> {
                    let i = fields
                        .next()
                        .ok_or_else(|| parse_err(lineno, format!("entry is missing the {what} index")))?
                        .parse::<usize>()
                        .map_err(|e| parse_err(lineno, format!("bad {what} index: {e}")))?;
                    if i == 0 || i > bound {
                        return Err(parse_err(lineno, format!("{what} index {i} outside 1..={bound}")));
                    }
                    Ok(i - 1)
                };
                let i = index("row", m)?;
                let j = index("column", n)?;
                let v = fields
                    .next()
                    .ok_or_else(|| parse_err(lineno, "entry is missing its value"))?
                    .parse::<f64>()
                    .map_err(|e| parse_err(lineno, format!("bad value: {e}")))?;
                if !v.is_finite() {
                    return Err(parse_err(lineno, format!("non-finite value {v}")));
                }
                if fields.next().is_some() {
                    return Err(parse_err(lineno, "trailing fields on entry line"));
                }
                triplets.push((i, j, v));
                if symmetry == Symmetry::Symmetric {
                    if j > i {
                        return Err(parse_err(lineno, "symmetric storage holds the lower triangle only"));
                    }
                    if i != j {
                        triplets.push((j, i, v));
                    }
                }
                entries += 1;
            }
        }
    }
    let (m, n, nnz) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    if entries != nnz {
        return Err(parse_err(0, format!("declared {nnz} entries, found {entries}")));
    }
    let a = SparseMatrix::from_triplets(m, n, &triplets)?;
    if a.nnz() != triplets.len() {
        return Err(parse_err(0, "duplicate entries"));
    }
    Ok(a)
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    read_matrix_market_str(&fs::read_to_string(path)?)
}

pub fn write_matrix_market_to(a: &SparseMatrix, out: &mut impl Write) -> Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
    for (i, j, v) in a.triplets() {
        writeln!(out, "{} {} {:.16e}", i + 1, j + 1, v)?;
    }
    Ok(())
}

pub fn write_matrix_market(a: &SparseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_matrix_market_to(a, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

/// A column vector as an `n x 1` coordinate matrix (every entry stored).
pub fn column_matrix(v: &[f64]) -> Result<SparseMatrix> {
    let triplets: Vec<_> = v.iter().enumerate().map(|(i, &x)| (i, 0, x)).collect();
    SparseMatrix::from_triplets(v.len(), 1, &triplets)
}

/// Inverse of [`column_matrix`]; missing entries read as zero.
pub fn column_vector(a: &SparseMatrix) -> Result<Vec<f64>> {
    if a.ncols() != 1 {
        return Err(Error::dims(format!(
            "expected a column vector, got {} columns",
            a.ncols()
        )));
    }
    let mut v = vec![0.0; a.nrows()];
    for (i, _, x) in a.triplets() {
        v[i] = x;
    }
    Ok(v)
}
