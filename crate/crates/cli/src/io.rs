//! CSV input and output.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

use esgop_core::model::Dataset;
use esgop_core::numkit::{DenseMatrix, DenseVector};

/// Parses a numeric table. Every row must have the same number of columns.
/// Row numbers in errors are 1-based file lines.
pub fn parse_table<R: Read>(reader: R, header: bool) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    let mut width = None;
    for rec in rdr.records() {
        let rec = rec.context("reading CSV")?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let w = *width.get_or_insert(rec.len());
        if rec.len() != w {
            bail!("row {line}: expected {w} columns, found {}", rec.len());
        }
        let mut row = Vec::with_capacity(w);
        for (c, field) in rec.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| anyhow!("row {line}, column {}: '{field}' is not a number", c + 1))?;
            if !v.is_finite() {
                bail!("row {line}, column {}: non-finite value '{field}'", c + 1);
            }
            row.push(v);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("CSV contains no data rows");
    }
    Ok(rows)
}

/// Labeled data: `d + 1` columns with the response last.
pub fn parse_dataset<R: Read>(reader: R, header: bool) -> Result<Dataset> {
    let rows = parse_table(reader, header)?;
    let w = rows[0].len();
    if w < 2 {
        bail!("labeled data needs at least 2 columns (covariates then response), found {w}");
    }
    let y: Vec<f64> = rows.iter().map(|r| r[w - 1]).collect();
    let x: Vec<Vec<f64>> = rows.into_iter().map(|mut r| {
        r.pop();
        r
    }).collect();
    Ok(Dataset::new(DenseMatrix::from_rows(&x)?, DenseVector::from(y))?)
}

pub fn read_dataset(path: &Path, header: bool) -> Result<Dataset> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    parse_dataset(f, header).with_context(|| format!("in {}", path.display()))
}

pub fn read_matrix(path: &Path, header: bool) -> Result<DenseMatrix> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let rows = parse_table(f, header).with_context(|| format!("in {}", path.display()))?;
    Ok(DenseMatrix::from_rows(&rows)?)
}

/// One line per matrix row, shortest round-trip float formatting.
pub fn matrix_csv(m: &DenseMatrix) -> String {
    let mut s = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v}")).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

pub fn write_string(path: &Path, text: &str) -> Result<()> {
    let mut f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_string(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_and_without_header() {
        let d = parse_dataset("1,2,3\n4,5,6\n".as_bytes(), false).unwrap();
        assert_eq!((d.n(), d.d()), (2, 2));
        assert_eq!(&d.y()[..], &[3.0, 6.0]);
        let d = parse_dataset("x1,x2,y\n1,2,3\n".as_bytes(), true).unwrap();
        assert_eq!(d.n(), 1);
    }

    #[test]
    fn bad_cells_are_located() {
        let e = parse_dataset("1,2,3\n4,NaN,6\n".as_bytes(), false).unwrap_err().to_string();
        assert!(e.contains("row 2, column 2"), "{e}");
        let e = parse_dataset("1,2,3\n4,abc,6\n".as_bytes(), false).unwrap_err().to_string();
        assert!(e.contains("row 2, column 2") && e.contains("abc"), "{e}");
        let e = parse_dataset("h\n1,2,3\n4,5\n".as_bytes(), true).unwrap_err().to_string();
        assert!(e.contains("row 3"), "{e}");
        assert!(parse_dataset("".as_bytes(), false).is_err());
        assert!(parse_dataset("1\n2\n".as_bytes(), false).is_err());
    }

    #[test]
    fn matrix_round_trip() {
        let m = DenseMatrix::from_rows(&[vec![0.1, -2.5e-17], vec![1.0 / 3.0, 7.0]]).unwrap();
        let back = DenseMatrix::from_rows(&parse_table(matrix_csv(&m).as_bytes(), false).unwrap()).unwrap();
        assert_eq!(m, back);
    }
}
