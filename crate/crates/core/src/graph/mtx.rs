//! Matrix Market coordinate reader and a minimal writer.

use std::io::{BufRead, Write};

use crate::error::{ParseError, Result};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Pattern,
    Real,
    Integer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

/// Parses a Matrix Market `coordinate` stream.
///
/// Symmetric storage is expanded to the full pattern. Numeric duplicates are
/// summed, pattern duplicates collapse, and explicit zeros stay structural.
pub fn parse_matrix_market<R: BufRead>(reader: R) -> Result<SparseMatrix> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (line_no, banner) = match lines.next() {
        Some((n, l)) => (n, l?),
        None => return Err(ParseError::MalformedBanner { line: 1 }.into()),
    };
    let (field, symmetry) = parse_banner(&banner, line_no)?;

    // size line: first non-comment, non-blank line
    let mut size = None;
    let mut last_line = line_no;
    for (n, l) in lines.by_ref() {
        let l = l?;
        last_line = n;
        let t = l.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        size = Some((n, t.to_string()));
        break;
    }
    let (size_line, size_text) = size.ok_or(ParseError::MalformedSize { line: last_line + 1 })?;
    let dims: Vec<usize> = size_text
        .split_whitespace()
        .map(|s| s.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| ParseError::MalformedSize { line: size_line })?;
    let [nrows, ncols, declared] = dims[..] else {
        return Err(ParseError::MalformedSize { line: size_line }.into());
    };
    if symmetry == Symmetry::Symmetric && nrows != ncols {
        return Err(ParseError::MalformedSize { line: size_line }.into());
    }

    let mut pattern: Vec<(usize, usize)> = Vec::new();
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut found = 0usize;
    last_line = size_line;
    for (n, l) in lines {
        let l = l?;
        last_line = n;
        let t = l.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        if found == declared {
            return Err(ParseError::MalformedEntry { line: n }.into());
        }
        let mut parts = t.split_whitespace();
        let mut index = || -> std::result::Result<usize, ParseError> {
            parts
                .next()
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or(ParseError::MalformedEntry { line: n })
        };
        let (r, c) = (index()?, index()?);
        if r == 0 || c == 0 || r > nrows || c > ncols {
            return Err(ParseError::IndexOutOfRange {
                line: n,
                row: r,
                col: c,
                nrows,
                ncols,
            }
            .into());
        }
        let (r, c) = (r - 1, c - 1);
        match field {
            Field::Pattern => {
                pattern.push((r, c));
                if symmetry == Symmetry::Symmetric && r != c {
                    pattern.push((c, r));
                }
            }
            Field::Real | Field::Integer => {
                let v: f64 = parts
                    .next()
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or(ParseError::MalformedEntry { line: n })?;
                if field == Field::Integer && v.fract() != 0.0 {
                    return Err(ParseError::MalformedEntry { line: n }.into());
                }
                triplets.push((r, c, v));
                if symmetry == Symmetry::Symmetric && r != c {
                    triplets.push((c, r, v));
                }
            }
        }
        found += 1;
    }
    if found < declared {
        return Err(ParseError::Truncated {
            line: last_line + 1,
            expected: declared,
            found,
        }
        .into());
    }

    Ok(match field {
        Field::Pattern => SparseMatrix::from_pattern(nrows, ncols, &pattern),
        _ => SparseMatrix::from_triplets(nrows, ncols, &triplets),
    })
}

fn parse_banner(banner: &str, line: usize) -> std::result::Result<(Field, Symmetry), ParseError> {
    let tokens: Vec<String> = banner.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(ParseError::MalformedBanner { line });
    }
    if tokens[2] != "coordinate" {
        return Err(ParseError::UnsupportedFormat {
            line,
            what: tokens[2].clone(),
        });
    }
    let field = match tokens[3].as_str() {
        "pattern" => Field::Pattern,
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        other => {
            return Err(ParseError::UnsupportedQualifier {
                line,
                what: other.to_string(),
            })
        }
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => {
            return Err(ParseError::UnsupportedQualifier {
                line,
                what: other.to_string(),
            })
        }
    };
    Ok((field, symmetry))
}

/// Writes the strict lower triangle of a symmetric pattern as
/// `coordinate pattern symmetric`.
pub fn write_symmetric_pattern<W: Write>(m: &SparseMatrix, mut out: W) -> Result<()> {
    let lower: usize = (0..m.nrows()).map(|i| m.row_cols(i).iter().filter(|&&j| j < i).count()).sum();
    writeln!(out, "%%MatrixMarket matrix coordinate pattern symmetric")?;
    writeln!(out, "{} {} {}", m.nrows(), m.ncols(), lower)?;
    for i in 0..m.nrows() {
        for &j in m.row_cols(i).iter().filter(|&&j| j < i) {
            writeln!(out, "{} {}", i + 1, j + 1)?;
        }
    }
    Ok(())
}

/// Writes every stored entry as `coordinate real general`.
pub fn write_general_real<W: Write>(m: &SparseMatrix, mut out: W) -> Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for i in 0..m.nrows() {
        for (j, v) in m.row(i) {
            writeln!(out, "{} {} {:e}", i + 1, j + 1, v)?;
        }
    }
    Ok(())
}
