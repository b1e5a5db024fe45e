//! Deterministic CSV output with shortest-form significant-digit numbers,
//! and the matching reader.
//!
//! Formatting is idempotent through a parse/emit cycle, so repeated runs of
//! the same experiment produce byte-identical files.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("empty csv input")]
    Empty,
    #[error("line {line} has a different field count than the header")]
    Ragged { line: usize },
    #[error("line {line}: cannot parse {token:?} as a number")]
    BadNumber { line: usize, token: String },
}

/// Renders `x` with `sig` significant digits, choosing the shorter of plain
/// and scientific notation (plain wins ties). Zero prints as `0`; non-finite
/// values print as `inf`, `-inf`, or `nan`.
pub fn format_sig(x: f64, sig: usize) -> String {
    let sig = sig.max(1);
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let formatted = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp_part) = formatted.split_once('e').expect("exponential format");
    let exp: i32 = exp_part.parse().expect("exponent");
    let neg = mantissa.starts_with('-');
    let all_digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = all_digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };

    let mut sci = String::new();
    if neg {
        sci.push('-');
    }
    sci.push_str(&digits[..1]);
    if digits.len() > 1 {
        sci.push('.');
        sci.push_str(&digits[1..]);
    }
    sci.push('e');
    sci.push_str(&exp.to_string());

    let plain = build_plain(neg, digits, exp);
    if plain.len() <= sci.len() {
        plain
    } else {
        sci
    }
}

/// Positional expansion of `d1 d2 ... dn * 10^exp` with the point after the
/// first digit.
fn build_plain(neg: bool, digits: &str, exp: i32) -> String {
    let n = digits.len() as i32;
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    let int_len = exp + 1;
    if int_len <= 0 {
        s.push_str("0.");
        for _ in 0..-int_len {
            s.push('0');
        }
        s.push_str(digits);
    } else if int_len >= n {
        s.push_str(digits);
        for _ in 0..int_len - n {
            s.push('0');
        }
    } else {
        s.push_str(&digits[..int_len as usize]);
        s.push('.');
        s.push_str(&digits[int_len as usize..]);
    }
    s
}

/// Builds a CSV document: header line, then one line per row, LF endings,
/// trailing newline. All cells are numeric.
pub fn emit_csv(header: &[&str], rows: &[Vec<f64>], sig: usize) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            out.push_str(&format_sig(*v, sig));
            first = false;
        }
        out.push('\n');
    }
    out
}

/// Parses a document produced by [`emit_csv`]: returns the header names and
/// the numeric rows.
#[allow(clippy::type_complexity)]
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), CsvError> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or(CsvError::Empty)?
        .split(',')
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let line_no = idx + 2;
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != header.len() {
            return Err(CsvError::Ragged { line: line_no });
        }
        let mut row = Vec::with_capacity(cells.len());
        for cell in cells {
            let v: f64 = cell.parse().map_err(|_| CsvError::BadNumber {
                line: line_no,
                token: cell.to_string(),
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    Ok((header, rows))
}
