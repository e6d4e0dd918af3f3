//! MatrixMarket coordinate files. Values are written with the shortest
//! representation that parses back to the same `f64`, so a write/read cycle
//! is bit-exact.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{MorError, Result};
use crate::sparse::CscMatrix;

pub fn parse_mtx(text: &str, origin: &Path) -> Result<CscMatrix> {
    let fail = |line: usize, msg: &str| MorError::format(origin, format!("line {line}: {msg}"));
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| fail(1, "empty file"))?;
    let words: Vec<String> = header.split_whitespace().map(|w| w.to_ascii_lowercase()).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(fail(1, "missing '%%MatrixMarket matrix' banner"));
    }
    if words[2] != "coordinate" {
        return Err(fail(1, "only the coordinate format is supported"));
    }
    if words[3] != "real" && words[3] != "integer" {
        return Err(fail(1, "only real or integer fields are supported"));
    }
    let symmetric = match words[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(fail(1, &format!("unsupported symmetry '{other}'"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                if f.len() != 3 {
                    return Err(fail(lineno, "size line needs 'rows cols entries'"));
                }
                let p = |s: &str| s.parse::<usize>().map_err(|_| fail(lineno, "bad size field"));
                size = Some((p(f[0])?, p(f[1])?, p(f[2])?));
                triplets.reserve(size.unwrap().2);
            }
            Some((nr, nc, _)) => {
                if f.len() != 3 {
                    return Err(fail(lineno, "entry needs 'row col value'"));
                }
                let i: usize = f[0].parse().map_err(|_| fail(lineno, "bad row index"))?;
                let j: usize = f[1].parse().map_err(|_| fail(lineno, "bad column index"))?;
                let v: f64 = f[2].parse().map_err(|_| fail(lineno, "bad value"))?;
                if i == 0 || j == 0 || i > nr || j > nc {
                    return Err(fail(lineno, "index out of range"));
                }
                if symmetric && j > i {
                    return Err(fail(lineno, "symmetric files store the lower triangle only"));
                }
                triplets.push((i - 1, j - 1, v));
                if symmetric && i != j {
                    triplets.push((j - 1, i - 1, v));
                }
            }
        }
    }
    let (nr, nc, nnz) = size.ok_or_else(|| fail(1, "missing size line"))?;
    let stored = if symmetric {
        triplets.iter().filter(|t| t.0 >= t.1).count()
    } else {
        triplets.len()
    };
    if stored != nnz {
        return Err(fail(1, &format!("declared {nnz} entries, found {stored}")));
    }
    Ok(CscMatrix::from_triplets(nr, nc, &triplets))
}

pub fn read_mtx(path: &Path) -> Result<CscMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| MorError::io(path, e))?;
    parse_mtx(&text, path)
}

/// Renders a sparse matrix. With `symmetric` only the lower triangle is
/// written; the caller is responsible for the matrix actually being
/// symmetric.
pub fn format_mtx(m: &CscMatrix, symmetric: bool) -> String {
    let entries: Vec<_> = m.triplets().filter(|&(i, j, _)| !symmetric || i >= j).collect();
    let mut s = String::with_capacity(64 + 32 * entries.len());
    let _ = writeln!(
        s,
        "%%MatrixMarket matrix coordinate real {}",
        if symmetric { "symmetric" } else { "general" }
    );
    let _ = writeln!(s, "{} {} {}", m.nrows(), m.ncols(), entries.len());
    for (i, j, v) in entries {
        let _ = writeln!(s, "{} {} {:e}", i + 1, j + 1, v);
    }
    s
}

/// Renders every entry of a dense matrix, zeros included.
pub fn format_dense_mtx(m: &DMatrix<f64>) -> String {
    let mut s = String::with_capacity(64 + 32 * m.len());
    let _ = writeln!(s, "%%MatrixMarket matrix coordinate real general");
    let _ = writeln!(s, "{} {} {}", m.nrows(), m.ncols(), m.len());
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let _ = writeln!(s, "{} {} {:e}", i + 1, j + 1, m[(i, j)]);
        }
    }
    s
}

pub fn write_mtx(path: &Path, m: &CscMatrix, symmetric: bool) -> Result<()> {
    std::fs::write(path, format_mtx(m, symmetric)).map_err(|e| MorError::io(path, e))
}

pub fn write_dense_mtx(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    std::fs::write(path, format_dense_mtx(m)).map_err(|e| MorError::io(path, e))
}
