//! Dense matrix and vector serialization in the MatrixMarket array format.
//!
//! Text, column-major, one entry per line, written with 17 significant
//! digits so that save/load round-trips are exact for `f64`.

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use krt_core::numerics::DenseMatrix;

const HEADER: &str = "%%MatrixMarket matrix array real general";

#[derive(Debug)]
pub enum MmError {
    Io(io::Error),
    /// Malformed content, with the 1-based line number.
    Parse {
        line: usize,
        message: String,
    },
}

impl fmt::Display for MmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MmError::Io(e) => write!(f, "io error: {e}"),
            MmError::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
        }
    }
}

impl std::error::Error for MmError {}

impl From<io::Error> for MmError {
    fn from(e: io::Error) -> Self {
        MmError::Io(e)
    }
}

pub fn write_matrix(w: &mut impl Write, m: &DenseMatrix) -> io::Result<()> {
    writeln!(w, "{HEADER}")?;
    writeln!(w, "{} {}", m.rows(), m.cols())?;
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            writeln!(w, "{:.16e}", m[(i, j)])?;
        }
    }
    Ok(())
}

pub fn read_matrix(r: impl BufRead) -> Result<DenseMatrix, MmError> {
    let mut lines = r.lines().enumerate();
    let first = match lines.next() {
        Some((_, line)) => line.map_err(MmError::Io)?,
        None => return Err(parse_err(1, "empty file")),
    };
    let expected: Vec<&str> = HEADER.split_whitespace().collect();
    let got: Vec<String> = first.split_whitespace().map(str::to_lowercase).collect();
    if got.len() != expected.len()
        || !got
            .iter()
            .zip(&expected)
            .all(|(g, e)| g == &e.to_lowercase())
    {
        return Err(parse_err(
            1,
            &format!("expected header `{HEADER}`, got `{first}`"),
        ));
    }

    // Size line, after any % comments.
    let (mut rows, mut cols) = (0usize, 0usize);
    let mut size_line = 0usize;
    for (idx, line) in lines.by_ref() {
        let (no, text) = (idx, line.map_err(MmError::Io)?);
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        rows = parse_usize(parts.next(), no + 1, "row count")?;
        cols = parse_usize(parts.next(), no + 1, "column count")?;
        if parts.next().is_some() {
            return Err(parse_err(no + 1, "trailing tokens after dimensions"));
        }
        size_line = no + 1;
        break;
    }
    if size_line == 0 {
        return Err(parse_err(2, "missing size line"));
    }
    if rows == 0 || cols == 0 {
        return Err(parse_err(size_line, "dimensions must be positive"));
    }

    let mut data = vec![0.0f64; rows * cols];
    let mut filled = 0usize;
    for (idx, line) in lines {
        let text = line.map_err(MmError::Io)?;
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        if filled >= rows * cols {
            return Err(parse_err(idx + 1, "more entries than rows * cols"));
        }
        let value: f64 = trimmed
            .parse()
            .map_err(|e| parse_err(idx + 1, &format!("bad entry `{trimmed}`: {e}")))?;
        // Column-major order.
        let j = filled / rows;
        let i = filled % rows;
        data[i * cols + j] = value;
        filled += 1;
    }
    if filled != rows * cols {
        return Err(parse_err(
            size_line,
            &format!("expected {} entries, found {filled}", rows * cols),
        ));
    }
    Ok(DenseMatrix::from_fn(rows, cols, |i, j| data[i * cols + j]))
}

pub fn save_matrix(path: &Path, m: &DenseMatrix) -> Result<(), MmError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix(&mut w, m)?;
    w.flush()?;
    Ok(())
}

pub fn load_matrix(path: &Path) -> Result<DenseMatrix, MmError> {
    read_matrix(BufReader::new(File::open(path)?))
}

/// A vector is stored as an `n x 1` array.
pub fn save_vector(path: &Path, v: &[f64]) -> Result<(), MmError> {
    let m = DenseMatrix::from_fn(v.len(), 1, |i, _| v[i]);
    save_matrix(path, &m)
}

pub fn load_vector(path: &Path) -> Result<Vec<f64>, MmError> {
    let m = load_matrix(path)?;
    if m.cols() != 1 {
        return Err(MmError::Parse {
            line: 2,
            message: format!("expected a single column, found {}", m.cols()),
        });
    }
    Ok((0..m.rows()).map(|i| m[(i, 0)]).collect())
}

fn parse_err(line: usize, message: &str) -> MmError {
    MmError::Parse {
        line,
        message: message.to_string(),
    }
}

fn parse_usize(tok: Option<&str>, line: usize, what: &str) -> Result<usize, MmError> {
    tok.ok_or_else(|| parse_err(line, &format!("missing {what}")))?
        .parse()
        .map_err(|e| parse_err(line, &format!("bad {what}: {e}")))
}
