//! Plain-text matrix format.
//!
//! ```text
//! # optional comment lines
//! 4
//! 1    3    1/3  1/2
//! 1/3  1    1/6  2
//! 3    6    1    1
//! 2    1/2  1    1
//! ```
//!
//! The first non-comment line holds the order `n`, followed by `n` rows of
//! `n` whitespace-separated tokens. A token is a decimal (`0.4759`, `2`) or a
//! fraction `p/q`. Integers and fractions are exact; a decimal with `d`
//! fractional digits is recorded as a rounding of width `0.5 * 10^-d`, which
//! [`ReciprocityMode::ReconcileRounded`](crate::ReciprocityMode) uses.

use crate::error::{Error, Result};
use crate::matrix::{PCMatrix, RawMatrix, ReciprocityPolicy};

/// Parses one numeric token, returning its value and rounding half-width.
pub fn parse_token(token: &str) -> Option<(f64, f64)> {
    if let Some((p, q)) = token.split_once('/') {
        let p: f64 = p.trim().parse().ok()?;
        let q: f64 = q.trim().parse().ok()?;
        if q == 0.0 {
            return None;
        }
        return Some((p / q, 0.0));
    }
    let value: f64 = token.parse().ok()?;
    if !value.is_finite() {
        return None;
    }
    let mantissa = token.split(['e', 'E']).next().unwrap_or(token);
    let half_width = match mantissa.split_once('.') {
        Some((_, frac)) if !frac.is_empty() => 0.5 * 10f64.powi(-(frac.len() as i32)),
        _ => 0.0,
    };
    Some((value, half_width))
}

/// Parses the matrix text format into an unvalidated matrix.
pub fn parse_raw_matrix(text: &str) -> Result<RawMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line_no, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        message: "missing matrix order".into(),
    })?;
    let n: usize = header.parse().map_err(|_| Error::Parse {
        line: line_no,
        message: format!("expected matrix order, found {header:?}"),
    })?;

    let mut entries = Vec::with_capacity(n * n);
    let mut half_widths = Vec::with_capacity(n * n);
    for row in 0..n {
        let (line_no, line) = lines.next().ok_or(Error::Parse {
            line: 0,
            message: format!("expected {n} rows, found {row}"),
        })?;
        let before = entries.len();
        for token in line.split_whitespace() {
            let (value, hw) = parse_token(token).ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("invalid number {token:?}"),
            })?;
            entries.push(value);
            half_widths.push(hw);
        }
        let found = entries.len() - before;
        if found != n {
            return Err(Error::NonSquare {
                row,
                len: found,
                expected: n,
            });
        }
    }
    if let Some((line_no, extra)) = lines.next() {
        return Err(Error::Parse {
            line: line_no,
            message: format!("unexpected trailing content {extra:?}"),
        });
    }
    RawMatrix::with_half_widths(n, entries, half_widths)
}

/// Parses and validates a matrix file.
pub fn parse_matrix(text: &str, policy: ReciprocityPolicy) -> Result<PCMatrix> {
    parse_raw_matrix(text)?.validate(policy)
}

/// Writes a matrix in the text format with shortest round-trip decimals.
pub fn format_matrix(matrix: &PCMatrix) -> String {
    matrix.to_string()
}
