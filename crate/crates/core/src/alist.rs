//! MacKay alist reader and writer.
//!
//! Layout: `N M`, `max_col_deg max_row_deg`, the N column degrees, the M row
//! degrees, then one line of 1-based row indices per column and one line of
//! 1-based column indices per row. Zero entries pad short lines and are
//! ignored on input.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::ParityCheckMatrix;

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    /// Next non-blank line as (1-based line number, integers).
    fn next_ints(&mut self, section: &str) -> Result<(usize, Vec<usize>)> {
        for (idx, line) in self.inner.by_ref() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let ints = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| {
                        Error::parse(
                            idx + 1,
                            format!("{section}: '{tok}' is not a non-negative integer"),
                        )
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok((idx + 1, ints));
        }
        Err(Error::parse(
            0,
            format!("unexpected end of file, missing {section}"),
        ))
    }
}

fn expect_len(line: usize, section: &str, got: &[usize], want: usize) -> Result<()> {
    if got.len() != want {
        return Err(Error::parse(
            line,
            format!("{section}: expected {want} values, found {}", got.len()),
        ));
    }
    Ok(())
}

/// Parses alist text into a matrix.
pub fn parse_alist(text: &str) -> Result<ParityCheckMatrix> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };

    let (ln, dims) = lines.next_ints("dimensions")?;
    expect_len(ln, "dimensions", &dims, 2)?;
    let (n, m) = (dims[0], dims[1]);
    if n == 0 || m == 0 {
        return Err(Error::parse(ln, "dimensions must be positive"));
    }

    let (ln, maxdeg) = lines.next_ints("maximum degrees")?;
    expect_len(ln, "maximum degrees", &maxdeg, 2)?;
    let (max_col, max_row) = (maxdeg[0], maxdeg[1]);

    let (ln, col_deg) = lines.next_ints("column degrees")?;
    expect_len(ln, "column degrees", &col_deg, n)?;
    if col_deg.iter().any(|&d| d > max_col) {
        return Err(Error::parse(ln, "column degree exceeds declared maximum"));
    }
    let (ln, row_deg) = lines.next_ints("row degrees")?;
    expect_len(ln, "row degrees", &row_deg, m)?;
    if row_deg.iter().any(|&d| d > max_row) {
        return Err(Error::parse(ln, "row degree exceeds declared maximum"));
    }

    let mut cols = Vec::with_capacity(n);
    for (j, &deg) in col_deg.iter().enumerate() {
        let section = format!("column {} index list", j + 1);
        let (ln, entries) = lines.next_ints(&section)?;
        let idx = nonzero_indices(ln, &section, &entries, m, deg)?;
        cols.push((ln, idx));
    }

    let mut rows = Vec::with_capacity(m);
    for (i, &deg) in row_deg.iter().enumerate() {
        let section = format!("row {} index list", i + 1);
        let (ln, entries) = lines.next_ints(&section)?;
        rows.push((ln, nonzero_indices(ln, &section, &entries, n, deg)?));
    }

    let h = ParityCheckMatrix::from_rows(n, rows.iter().map(|(_, r)| r.clone()).collect())
        .map_err(|e| {
            let line = rows.first().map_or(0, |(ln, _)| *ln);
            Error::parse(line, e)
        })?;

    for (j, (ln, col)) in cols.into_iter().enumerate() {
        let mut col = col;
        col.sort_unstable();
        if col.as_slice() != h.col(j) {
            return Err(Error::parse(
                ln,
                format!("column {} disagrees with the row lists", j + 1),
            ));
        }
    }
    Ok(h)
}

fn nonzero_indices(
    line: usize,
    section: &str,
    entries: &[usize],
    bound: usize,
    degree: usize,
) -> Result<Vec<usize>> {
    let idx: Vec<usize> = entries.iter().copied().filter(|&e| e != 0).collect();
    if idx.len() != degree {
        return Err(Error::parse(
            line,
            format!(
                "{section}: declared degree {degree}, found {} indices",
                idx.len()
            ),
        ));
    }
    if let Some(&bad) = idx.iter().find(|&&e| e > bound) {
        return Err(Error::parse(
            line,
            format!("{section}: index {bad} out of range 1..={bound}"),
        ));
    }
    Ok(idx.into_iter().map(|e| e - 1).collect())
}

/// Writes a matrix as alist text, zero-padding lines to the maximum degree.
pub fn serialize_alist(h: &ParityCheckMatrix) -> String {
    let max_col = h.col_degrees().max().unwrap_or(0);
    let max_row = h.row_degrees().max().unwrap_or(0);
    let mut out = String::new();
    let join = |it: &mut dyn Iterator<Item = usize>| {
        it.map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
    };
    let _ = writeln!(out, "{} {}", h.n(), h.m());
    let _ = writeln!(out, "{max_col} {max_row}");
    let _ = writeln!(out, "{}", join(&mut h.col_degrees()));
    let _ = writeln!(out, "{}", join(&mut h.row_degrees()));
    for col in h.cols() {
        let mut it = col
            .iter()
            .map(|i| i + 1)
            .chain(std::iter::repeat(0))
            .take(max_col);
        let _ = writeln!(out, "{}", join(&mut it));
    }
    for row in h.rows() {
        let mut it = row
            .iter()
            .map(|j| j + 1)
            .chain(std::iter::repeat(0))
            .take(max_row);
        let _ = writeln!(out, "{}", join(&mut it));
    }
    out
}

pub fn read_alist(path: impl AsRef<Path>) -> Result<ParityCheckMatrix> {
    parse_alist(&std::fs::read_to_string(path)?)
}
