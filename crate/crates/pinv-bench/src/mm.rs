//! Matrix Market exchange format: coordinate and array layouts, real or
//! integer fields, general or symmetric storage. Parsing densifies into a
//! [`DenseMatrix`] and reports errors with 1-based line numbers.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use pinv_core::DenseMatrix;

/// Refuse to densify anything bigger than this many entries.
pub const DENSE_ENTRY_CAP: usize = 40_000_000;

#[derive(Debug)]
pub enum MmError {
    Io(std::io::Error),
    /// Message plus the 1-based line it was found on (0 = header missing).
    Parse { line: usize, message: String },
}

impl fmt::Display for MmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MmError::Io(e) => write!(f, "io error: {e}"),
            MmError::Parse { line, message } => write!(f, "line {line}: {message}"),
        }
    }
}

impl std::error::Error for MmError {}

impl From<std::io::Error> for MmError {
    fn from(e: std::io::Error) -> Self {
        MmError::Io(e)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> MmError {
    MmError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<DenseMatrix, MmError> {
    let text = fs::read_to_string(path)?;
    read_matrix_market_str(&text)
}

pub fn read_matrix_market_str(text: &str) -> Result<DenseMatrix, MmError> {
    let mut lines = text.lines().enumerate();

    let (header_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(0, "empty file"))?;
    let header_line = header_no + 1;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(
            header_line,
            "expected header '%%MatrixMarket matrix <layout> <field> <symmetry>'",
        ));
    }
    let layout = match tokens[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(parse_err(header_line, format!("unsupported layout: {other}"))),
    };
    match tokens[3].as_str() {
        "real" | "integer" => {}
        other => return Err(parse_err(header_line, format!("unsupported field: {other}"))),
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => {
            return Err(parse_err(
                header_line,
                format!("unsupported symmetry: {other}"),
            ))
        }
    };

    // skip comments and blank lines up to the size line
    let (size_no, size_line) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('%'))
        .ok_or_else(|| parse_err(header_line, "missing size line"))?;
    let size_lineno = size_no + 1;
    let dims: Vec<&str> = size_line.split_whitespace().collect();

    match layout {
        Layout::Coordinate => {
            if dims.len() != 3 {
                return Err(parse_err(size_lineno, "coordinate size line needs 'rows cols nnz'"));
            }
            let rows: usize = dims[0]
                .parse()
                .map_err(|_| parse_err(size_lineno, "bad row count"))?;
            let cols: usize = dims[1]
                .parse()
                .map_err(|_| parse_err(size_lineno, "bad column count"))?;
            let nnz: usize = dims[2]
                .parse()
                .map_err(|_| parse_err(size_lineno, "bad nonzero count"))?;
            check_cap(rows, cols, size_lineno)?;
            if symmetry == Symmetry::Symmetric && rows != cols {
                return Err(parse_err(size_lineno, "symmetric matrix must be square"));
            }
            let mut a = DenseMatrix::zeros(rows, cols);
            let mut seen = 0usize;
            for (no, l) in lines {
                let lineno = no + 1;
                let t = l.trim();
                if t.is_empty() || t.starts_with('%') {
                    continue;
                }
                let parts: Vec<&str> = t.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(parse_err(lineno, "expected 'row col value'"));
                }
                let i: usize = parts[0].parse().map_err(|_| parse_err(lineno, "bad row index"))?;
                let j: usize = parts[1]
                    .parse()
                    .map_err(|_| parse_err(lineno, "bad column index"))?;
                let v: f64 = parts[2].parse().map_err(|_| parse_err(lineno, "bad value"))?;
                if !v.is_finite() {
                    return Err(parse_err(lineno, "non-finite value"));
                }
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(parse_err(lineno, "index out of range"));
                }
                a.set(i - 1, j - 1, v);
                if symmetry == Symmetry::Symmetric {
                    a.set(j - 1, i - 1, v);
                }
                seen += 1;
            }
            if seen != nnz {
                return Err(parse_err(size_lineno, format!("expected {nnz} entries, found {seen}")));
            }
            Ok(a)
        }
        Layout::Array => {
            if dims.len() != 2 {
                return Err(parse_err(size_lineno, "array size line needs 'rows cols'"));
            }
            let rows: usize = dims[0]
                .parse()
                .map_err(|_| parse_err(size_lineno, "bad row count"))?;
            let cols: usize = dims[1]
                .parse()
                .map_err(|_| parse_err(size_lineno, "bad column count"))?;
            check_cap(rows, cols, size_lineno)?;
            if symmetry == Symmetry::Symmetric && rows != cols {
                return Err(parse_err(size_lineno, "symmetric matrix must be square"));
            }
            // column-major; symmetric storage walks the lower triangle
            let mut coords: Vec<(usize, usize)> = Vec::new();
            for j in 0..cols {
                let start = if symmetry == Symmetry::Symmetric { j } else { 0 };
                for i in start..rows {
                    coords.push((i, j));
                }
            }
            let mut a = DenseMatrix::zeros(rows, cols);
            let mut next = 0usize;
            let mut last_line = size_lineno;
            for (no, l) in lines {
                let lineno = no + 1;
                last_line = lineno;
                let t = l.trim();
                if t.is_empty() || t.starts_with('%') {
                    continue;
                }
                for tok in t.split_whitespace() {
                    if next >= coords.len() {
                        return Err(parse_err(lineno, "too many values"));
                    }
                    let v: f64 = tok.parse().map_err(|_| parse_err(lineno, "bad value"))?;
                    if !v.is_finite() {
                        return Err(parse_err(lineno, "non-finite value"));
                    }
                    let (i, j) = coords[next];
                    a.set(i, j, v);
                    if symmetry == Symmetry::Symmetric {
                        a.set(j, i, v);
                    }
                    next += 1;
                }
            }
            if next != coords.len() {
                return Err(parse_err(
                    last_line,
                    format!("expected {} values, found {next}", coords.len()),
                ));
            }
            Ok(a)
        }
    }
}

fn check_cap(rows: usize, cols: usize, lineno: usize) -> Result<(), MmError> {
    if rows == 0 || cols == 0 {
        return Err(parse_err(lineno, "empty matrix"));
    }
    if rows.saturating_mul(cols) > DENSE_ENTRY_CAP {
        return Err(parse_err(
            lineno,
            format!("matrix too large to densify: {rows}x{cols} exceeds {DENSE_ENTRY_CAP} entries"),
        ));
    }
    Ok(())
}

/// Writes the array-format general layout in full precision. The default
/// float formatting emits the shortest string that parses back to the same
/// binary64 value, so a write/read round-trip is bit-exact.
pub fn write_matrix_market_array(w: &mut impl Write, a: &DenseMatrix) -> std::io::Result<()> {
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} {}", a.rows(), a.cols())?;
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            writeln!(w, "{}", a.get(i, j))?;
        }
    }
    Ok(())
}
