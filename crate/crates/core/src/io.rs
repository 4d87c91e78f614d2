//! Plain-text tensor and matrix files.
//!
//! `.t3`: a header line `t3 p1 p2 p3`, then `p1` lines each holding one row
//! of the mode-1 matricization (`p2 * p3` numbers, index `j * p3 + k`).
//! `.mat`: a header line `mat rows cols`, then `rows` lines of `cols`
//! numbers. Numbers are written with 17 significant digits so a round trip
//! is exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::{Matrix, Tensor3};

fn write_row(out: &mut String, row: &[f64]) {
    for (idx, v) in row.iter().enumerate() {
        if idx > 0 {
            out.push(' ');
        }
        write!(out, "{v:.16e}").expect("writing to a String");
    }
    out.push('\n');
}

pub fn format_t3(x: &Tensor3) -> String {
    let [p1, p2, p3] = x.dims();
    let mut out = format!("t3 {p1} {p2} {p3}\n");
    for row in x.as_slice().chunks(p2 * p3) {
        write_row(&mut out, row);
    }
    out
}

pub fn format_mat(m: &Matrix) -> String {
    let mut out = format!("mat {} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        write_row(&mut out, m.row(i));
    }
    out
}

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

fn parse_header<const N: usize>(line: Option<&str>, tag: &str) -> Result<[usize; N]> {
    let Some(line) = line else {
        return parse_err(1, "empty file");
    };
    let mut fields = line.split_whitespace();
    if fields.next() != Some(tag) {
        return parse_err(1, format!("expected header starting with `{tag}`"));
    }
    let mut dims = [0usize; N];
    for d in dims.iter_mut() {
        *d = match fields.next().map(str::parse::<usize>) {
            Some(Ok(v)) if v > 0 => v,
            _ => return parse_err(1, format!("header needs {N} positive dimensions")),
        };
    }
    if fields.next().is_some() {
        return parse_err(1, "trailing fields in header");
    }
    Ok(dims)
}

fn parse_rows<'a>(
    lines: impl Iterator<Item = &'a str>,
    rows: usize,
    cols: usize,
) -> Result<Vec<f64>> {
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        if line.trim().is_empty() {
            continue;
        }
        if seen == rows {
            return parse_err(lineno, "more rows than the header declares");
        }
        let before = data.len();
        for tok in line.split_whitespace() {
            match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => data.push(v),
                _ => return parse_err(lineno, format!("bad number `{tok}`")),
            }
        }
        if data.len() - before != cols {
            return parse_err(lineno, format!("expected {cols} values, found {}", data.len() - before));
        }
        seen += 1;
    }
    if seen != rows {
        return parse_err(rows + 1, format!("expected {rows} rows, found {seen}"));
    }
    Ok(data)
}

pub fn parse_t3(text: &str) -> Result<Tensor3> {
    let mut lines = text.lines();
    let [p1, p2, p3] = parse_header::<3>(lines.next(), "t3")?;
    let data = parse_rows(lines, p1, p2 * p3)?;
    Tensor3::new([p1, p2, p3], data)
}

pub fn parse_mat(text: &str) -> Result<Matrix> {
    let mut lines = text.lines();
    let [rows, cols] = parse_header::<2>(lines.next(), "mat")?;
    let data = parse_rows(lines, rows, cols)?;
    Matrix::new(rows, cols, data)
}

pub fn read_t3(path: impl AsRef<Path>) -> Result<Tensor3> {
    parse_t3(&fs::read_to_string(path)?)
}

pub fn write_t3(path: impl AsRef<Path>, x: &Tensor3) -> Result<()> {
    Ok(fs::write(path, format_t3(x))?)
}

pub fn read_mat(path: impl AsRef<Path>) -> Result<Matrix> {
    parse_mat(&fs::read_to_string(path)?)
}

pub fn write_mat(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    Ok(fs::write(path, format_mat(m))?)
}
