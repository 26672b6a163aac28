//! Matrix Market reader and writer (coordinate and array formats, real
//! values, general or symmetric storage).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matsource::{MatrixSource, StorageView};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MmFormat {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MmSymmetry {
    General,
    Symmetric,
}

fn format_err(origin: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Format {
        origin: origin.to_string(),
        line,
        msg: msg.into(),
    }
}

/// Load a Matrix Market file. Symmetric storage is expanded to full storage.
pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<MatrixSource> {
    let path = path.as_ref();
    let origin = path.display().to_string();
    let file = File::open(path)?;
    read_matrix_market(BufReader::new(file), &origin)
}

/// Parse a Matrix Market document from any reader; `origin` labels errors.
pub fn read_matrix_market(reader: impl BufRead, origin: &str) -> Result<MatrixSource> {
    let mut lines = reader.lines().enumerate();

    let (header_no, header) = loop {
        match lines.next() {
            Some((no, line)) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break (no + 1, line);
                }
            }
            None => return Err(format_err(origin, 1, "empty file")),
        }
    };
    let tokens: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(format_err(
            origin,
            header_no,
            "expected header '%%MatrixMarket matrix <format> <field> <symmetry>'",
        ));
    }
    if tokens[1] != "matrix" {
        return Err(format_err(
            origin,
            header_no,
            format!("unsupported object '{}'", tokens[1]),
        ));
    }
    let format = match tokens[2].as_str() {
        "coordinate" => MmFormat::Coordinate,
        "array" => MmFormat::Array,
        other => {
            return Err(format_err(
                origin,
                header_no,
                format!("unsupported format '{other}'"),
            ))
        }
    };
    match tokens[3].as_str() {
        "real" | "integer" => {}
        "complex" => {
            return Err(format_err(
                origin,
                header_no,
                "complex field is not supported",
            ))
        }
        other => {
            return Err(format_err(
                origin,
                header_no,
                format!("unsupported field '{other}'"),
            ))
        }
    }
    let symmetry = match tokens[4].as_str() {
        "general" => MmSymmetry::General,
        "symmetric" => MmSymmetry::Symmetric,
        other => {
            return Err(format_err(
                origin,
                header_no,
                format!("unsupported symmetry '{other}'"),
            ))
        }
    };

    // size line: first non-comment, non-blank line
    let (size_no, size_line) = loop {
        match lines.next() {
            Some((no, line)) => {
                let line = line?;
                let t = line.trim();
                if t.is_empty() || t.starts_with('%') {
                    continue;
                }
                break (no + 1, line);
            }
            None => return Err(format_err(origin, header_no, "missing size line")),
        }
    };
    let size: Vec<&str> = size_line.split_whitespace().collect();

    match format {
        MmFormat::Coordinate => {
            if size.len() != 3 {
                return Err(format_err(origin, size_no, "expected 'm n nnz'"));
            }
            let m: usize = parse_num(size[0], origin, size_no)?;
            let n: usize = parse_num(size[1], origin, size_no)?;
            let nnz: usize = parse_num(size[2], origin, size_no)?;
            if symmetry == MmSymmetry::Symmetric && m != n {
                return Err(format_err(
                    origin,
                    size_no,
                    "symmetric matrix must be square",
                ));
            }
            let mut triplets = Vec::with_capacity(nnz * 2);
            let mut read = 0usize;
            for (no, line) in lines {
                let line = line?;
                let t = line.trim();
                if t.is_empty() || t.starts_with('%') {
                    continue;
                }
                let no = no + 1;
                let parts: Vec<&str> = t.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(format_err(origin, no, "expected 'i j value'"));
                }
                let i: usize = parse_num(parts[0], origin, no)?;
                let j: usize = parse_num(parts[1], origin, no)?;
                let v: f64 = parse_num(parts[2], origin, no)?;
                if i < 1 || i > m || j < 1 || j > n {
                    return Err(format_err(
                        origin,
                        no,
                        format!("index ({i}, {j}) out of range for {m}x{n}"),
                    ));
                }
                triplets.push((i - 1, j - 1, v));
                if symmetry == MmSymmetry::Symmetric && i != j {
                    triplets.push((j - 1, i - 1, v));
                }
                read += 1;
            }
            if read != nnz {
                return Err(format_err(
                    origin,
                    size_no,
                    format!("size line promises {nnz} entries, found {read}"),
                ));
            }
            MatrixSource::from_triplets(m, n, &triplets)
        }
        MmFormat::Array => {
            if size.len() != 2 {
                return Err(format_err(origin, size_no, "expected 'm n'"));
            }
            let m: usize = parse_num(size[0], origin, size_no)?;
            let n: usize = parse_num(size[1], origin, size_no)?;
            if symmetry == MmSymmetry::Symmetric && m != n {
                return Err(format_err(
                    origin,
                    size_no,
                    "symmetric matrix must be square",
                ));
            }
            if m == 0 || n == 0 {
                return Err(format_err(origin, size_no, "matrix must be nonempty"));
            }
            let expected = match symmetry {
                MmSymmetry::General => m * n,
                MmSymmetry::Symmetric => n * (n + 1) / 2,
            };
            let mut values = Vec::with_capacity(expected);
            let mut last_no = size_no;
            for (no, line) in lines {
                let line = line?;
                let t = line.trim();
                if t.is_empty() || t.starts_with('%') {
                    continue;
                }
                last_no = no + 1;
                for tok in t.split_whitespace() {
                    let v: f64 = parse_num(tok, origin, no + 1)?;
                    values.push(v);
                }
            }
            if values.len() != expected {
                return Err(format_err(
                    origin,
                    last_no,
                    format!("expected {expected} array values, found {}", values.len()),
                ));
            }
            let mut a = DMatrix::<f64>::zeros(m, n);
            match symmetry {
                MmSymmetry::General => {
                    // column-major order
                    let mut k = 0;
                    for j in 0..n {
                        for i in 0..m {
                            a[(i, j)] = values[k];
                            k += 1;
                        }
                    }
                }
                MmSymmetry::Symmetric => {
                    // lower triangle, column-major
                    let mut k = 0;
                    for j in 0..n {
                        for i in j..m {
                            a[(i, j)] = values[k];
                            a[(j, i)] = values[k];
                            k += 1;
                        }
                    }
                }
            }
            MatrixSource::from_dense(a)
        }
    }
}

fn parse_num<T: std::str::FromStr>(tok: &str, origin: &str, line: usize) -> Result<T> {
    tok.parse()
        .map_err(|_| format_err(origin, line, format!("cannot parse '{tok}'")))
}

/// Write a source with explicit storage: coordinate format for sparse
/// storage, array format for dense storage.
pub fn write_matrix_market(src: &MatrixSource, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path.as_ref())?;
    let mut w = BufWriter::new(file);
    match src.storage_view() {
        StorageView::Dense(a) => {
            writeln!(w, "%%MatrixMarket matrix array real general")?;
            writeln!(w, "{} {}", a.nrows(), a.ncols())?;
            for j in 0..a.ncols() {
                for i in 0..a.nrows() {
                    writeln!(w, "{:.17e}", a[(i, j)])?;
                }
            }
        }
        StorageView::Sparse(c) => {
            writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
            writeln!(w, "{} {} {}", src.nrows(), src.ncols(), c.values.len())?;
            for j in 0..src.ncols() {
                for k in c.col_ptr[j]..c.col_ptr[j + 1] {
                    writeln!(w, "{} {} {:.17e}", c.row_idx[k] + 1, j + 1, c.values[k])?;
                }
            }
        }
        StorageView::Oracle => {
            return Err(Error::InvalidParameter(
                "cannot write an oracle-backed source without explicit storage".into(),
            ))
        }
    }
    w.flush()?;
    Ok(())
}

/// Write an arbitrary dense matrix in array format.
pub fn write_dense_matrix_market(a: &DMatrix<f64>, path: impl AsRef<Path>) -> Result<()> {
    let src = MatrixSource::from_dense(a.clone())?;
    write_matrix_market(&src, path)
}
