//! Gram matrices AᵀA from data files: LIBSVM sparse rows ("label idx:val …",
//! 1-based feature indices) or any readable Matrix Market file. Labels are
//! discarded; only the design matrix matters.

use std::fmt;
use std::fs;
use std::path::Path;

use pinv_core::DenseMatrix;

use crate::mm;

#[derive(Debug)]
pub enum GramError {
    Io(std::io::Error),
    Mm(mm::MmError),
    Parse { line: usize, message: String },
}

impl fmt::Display for GramError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GramError::Io(e) => write!(f, "io error: {e}"),
            GramError::Mm(e) => write!(f, "{e}"),
            GramError::Parse { line, message } => write!(f, "line {line}: {message}"),
        }
    }
}

impl std::error::Error for GramError {}

fn parse_err(line: usize, message: impl Into<String>) -> GramError {
    GramError::Parse {
        line,
        message: message.into(),
    }
}

/// Reads a design matrix and returns AᵀA (d×d, symmetric PSD by
/// construction). Matrix Market input is detected by its header.
pub fn gen_gram(path: impl AsRef<Path>) -> Result<DenseMatrix, GramError> {
    let text = fs::read_to_string(path).map_err(GramError::Io)?;
    let a = if text.trim_start().to_lowercase().starts_with("%%matrixmarket") {
        mm::read_matrix_market_str(&text).map_err(GramError::Mm)?
    } else {
        read_libsvm_str(&text)?
    };
    Ok(a.tr_mul(&a).symmetrize())
}

/// Parses LIBSVM sparse rows into a dense N×d design matrix.
pub fn read_libsvm_str(text: &str) -> Result<DenseMatrix, GramError> {
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut d = 0usize;
    for (no, line) in text.lines().enumerate() {
        let lineno = no + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut parts = t.split_whitespace();
        // first token is the label, ignored
        let _label = parts
            .next()
            .ok_or_else(|| parse_err(lineno, "empty row"))?;
        let mut row = Vec::new();
        for pair in parts {
            let (idx, val) = pair
                .split_once(':')
                .ok_or_else(|| parse_err(lineno, format!("expected index:value, got '{pair}'")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad feature index '{idx}'")))?;
            if idx == 0 {
                return Err(parse_err(lineno, "feature indices are 1-based"));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad feature value '{val}'")))?;
            if !val.is_finite() {
                return Err(parse_err(lineno, "non-finite feature value"));
            }
            d = d.max(idx);
            row.push((idx - 1, val));
        }
        rows.push(row);
    }
    if rows.is_empty() || d == 0 {
        return Err(parse_err(0, "no data rows"));
    }
    if rows.len().saturating_mul(d) > mm::DENSE_ENTRY_CAP {
        return Err(parse_err(0, "design matrix too large to densify"));
    }
    let mut a = DenseMatrix::zeros(rows.len(), d);
    for (i, row) in rows.iter().enumerate() {
        for &(j, v) in row {
            a.set(i, j, v);
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pinv_core::pinv::{lambda_min_plus, DEFAULT_REL_TOL};
    use std::io::Write;

    fn write_temp(name: &str, content: &str) -> std::path::PathBuf {
        let path = std::env::temp_dir().join(name);
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

    #[test]
    fn identity_rows_give_identity_gram() {
        let p = write_temp("gram_id.libsvm", "1 1:1\n-1 2:1\n");
        let g = gen_gram(&p).unwrap();
        assert_eq!(g, DenseMatrix::identity(2));
    }

    #[test]
    fn single_row_outer_product() {
        let p = write_temp("gram_outer.libsvm", "0 1:1 2:2\n");
        let g = gen_gram(&p).unwrap();
        let expect = DenseMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert_eq!(g, expect);
    }

    #[test]
    fn gram_is_psd() {
        let p = write_temp(
            "gram_psd.libsvm",
            "1 1:0.5 3:-2\n0 2:1.5\n1 1:-1 2:0.25 3:3\n",
        );
        let g = gen_gram(&p).unwrap();
        assert!(g.is_symmetric(1e-14));
        // PSD: every eigenvalue above -1e-10
        let eig = pinv_core::decomp::sym_eig(&g).unwrap();
        assert!(eig.values.iter().all(|&l| l >= -1e-10));
        assert!(lambda_min_plus(&g, DEFAULT_REL_TOL).unwrap() > 0.0);
    }

    #[test]
    fn matrix_market_input_detected() {
        let p = write_temp(
            "gram_mm.mtx",
            "%%MatrixMarket matrix array real general\n2 2\n1\n0\n0\n1\n",
        );
        let g = gen_gram(&p).unwrap();
        assert_eq!(g, DenseMatrix::identity(2));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let p = write_temp("gram_bad.libsvm", "1 1:1\n1 nope\n");
        match gen_gram(&p).unwrap_err() {
            GramError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected: {other}"),
        }
    }
}
