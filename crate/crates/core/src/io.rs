//! CSV inputs: square matrices, point samples (one point per row) and 0/1
//! label columns. Lines starting with `#` and blank lines are skipped.

use std::fs;
use std::path::Path;

use crate::builders::{LabelVector, Sample};
use crate::error::{Error, Result};
use crate::matrix::{CoefficientMatrix, SymmetryClass};

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

/// Parses numeric rows, keeping 1-based source line numbers.
pub fn parse_rows(path: &Path, text: &str) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let values = trimmed
            .split(',')
            .map(|field| {
                let f = field.trim();
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        path: path.to_path_buf(),
                        line: line_no,
                        msg: format!("'{f}' is not a finite number"),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((line_no, values));
    }
    Ok(rows)
}

/// Narrowest symmetry class the entries satisfy exactly.
pub fn infer_class(n: usize, data: &[f64]) -> SymmetryClass {
    let at = |i: usize, j: usize| data[i * n + j];
    let symmetric = (0..n).all(|i| (i + 1..n).all(|j| at(i, j) == at(j, i)));
    if symmetric {
        return SymmetryClass::Symmetric;
    }
    let antisymmetric = (0..n).all(|i| (i..n).all(|j| at(i, j) == -at(j, i)));
    if antisymmetric {
        SymmetryClass::Antisymmetric
    } else {
        SymmetryClass::General
    }
}

pub fn parse_matrix(path: &Path, text: &str) -> Result<CoefficientMatrix> {
    let rows = parse_rows(path, text)?;
    let n = rows.len();
    if n < 2 {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: rows.first().map_or(1, |r| r.0),
            msg: format!("matrix needs at least 2 rows, found {n}"),
        });
    }
    let mut data = Vec::with_capacity(n * n);
    for (line, values) in rows {
        if values.len() != n {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                msg: format!("expected {n} values, found {}", values.len()),
            });
        }
        data.extend(values);
    }
    let class = infer_class(n, &data);
    let hollow = (0..n).all(|i| data[i * n + i] == 0.0);
    CoefficientMatrix::from_row_major(n, data, class, hollow)
}

pub fn read_matrix(path: &Path) -> Result<CoefficientMatrix> {
    parse_matrix(path, &read_text(path)?)
}

pub fn parse_sample(path: &Path, text: &str) -> Result<Sample> {
    let rows = parse_rows(path, text)?;
    if let Some(first) = rows.first() {
        let d = first.1.len();
        if let Some((line, values)) = rows.iter().find(|(_, v)| v.len() != d) {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: *line,
                msg: format!("expected {d} coordinates, found {}", values.len()),
            });
        }
    }
    Sample::new(rows.into_iter().map(|(_, v)| v).collect())
}

pub fn read_sample(path: &Path) -> Result<Sample> {
    parse_sample(path, &read_text(path)?)
}

pub fn parse_labels(path: &Path, text: &str) -> Result<LabelVector> {
    let mut labels = Vec::new();
    for (line, values) in parse_rows(path, text)? {
        let bad = || Error::Parse {
            path: path.to_path_buf(),
            line,
            msg: "expected a single 0 or 1".into(),
        };
        match values.as_slice() {
            [v] if *v == 0.0 => labels.push(0),
            [v] if *v == 1.0 => labels.push(1),
            _ => return Err(bad()),
        }
    }
    LabelVector::new(labels)
}

pub fn read_labels(path: &Path) -> Result<LabelVector> {
    parse_labels(path, &read_text(path)?)
}

/// Writes a matrix in the CSV input format.
pub fn matrix_to_csv(a: &CoefficientMatrix) -> String {
    let mut out = String::new();
    for i in 0..a.n() {
        let row: Vec<String> = a.row(i).iter().map(|x| format!("{x:?}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("test.csv")
    }

    #[test]
    fn matrix_with_header() {
        let m = parse_matrix(p(), "# a matrix\n0,1,2\n1,0,3\n2,3,0\n").unwrap();
        assert_eq!(m.symmetry_class(), SymmetryClass::Symmetric);
        assert!(m.is_hollow());
        assert_eq!(m.get(1, 2), 3.0);
        let w = parse_matrix(p(), "0,-1\n1,0\n").unwrap();
        assert_eq!(w.symmetry_class(), SymmetryClass::Antisymmetric);
        let g = parse_matrix(p(), "1,2\n3,4\n").unwrap();
        assert_eq!(g.symmetry_class(), SymmetryClass::General);
        assert!(!g.is_hollow());
        assert_eq!(parse_matrix(p(), &matrix_to_csv(&g)).unwrap(), g);
    }

    #[test]
    fn malformed_reports_line() {
        let err = parse_matrix(p(), "# h\n0,1\n1,x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_matrix(p(), "0,1,2\n1,0\n2,0,0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_sample(p(), "1,2\n3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_labels(p(), "0\n1\n2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn samples_and_labels() {
        let s = parse_sample(p(), "# x,y\n0,0\n1,1\n2,0.5\n").unwrap();
        assert_eq!((s.len(), s.dim()), (3, 2));
        let l = parse_labels(p(), "#g\n0\n1\n1\n").unwrap();
        assert_eq!((l.m(), l.n_count()), (1, 2));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            read_matrix(Path::new("/nonexistent/m.csv")),
            Err(Error::Io { .. })
        ));
    }
}
