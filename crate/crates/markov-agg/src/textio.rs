//! Text formats: matrices, partitions, state legends, and significant-digit
//! number formatting shared by the CLI.

use crate::chain::StochasticMatrix;
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Formats `x` with the given number of significant digits, using positional
/// notation for moderate exponents and scientific notation otherwise.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let formatted = format!("{:.*e}", digits - 1, x);
    let (mantissa, exponent) = formatted.split_once('e').expect("exponent marker");
    let exp: i32 = exponent.parse().expect("exponent digits");
    if !(-4..digits as i32).contains(&exp) {
        return formatted;
    }
    // re-render positionally from the already-rounded mantissa digits
    let sign = if mantissa.starts_with('-') { "-" } else { "" };
    let digit_chars: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let mut out = if exp >= 0 {
        let split = (exp + 1) as usize;
        format!("{sign}{}.{}", &digit_chars[..split], &digit_chars[split..])
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("{sign}0.{zeros}{digit_chars}")
    };
    while out.ends_with('0') {
        out.pop();
    }
    if out.ends_with('.') {
        out.pop();
    }
    out
}

/// Display formatting: 12 significant digits.
pub fn fmt_display(x: f64) -> String {
    fmt_sig(x, 12)
}

/// File formatting: 17 significant digits, losslessly round-tripping f64.
pub fn fmt_file(x: f64) -> String {
    fmt_sig(x, 17)
}

/// Serializes a matrix: the dimension line, then one line per row with
/// 17-significant-digit entries.
pub fn write_matrix(matrix: &StochasticMatrix) -> String {
    let mut out = String::new();
    out.push_str(&format!("{}\n", matrix.n()));
    for row in matrix.rows() {
        let cells: Vec<String> = row.iter().map(|&v| fmt_file(v)).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

/// Parses the matrix text format: `#` comment lines, the dimension, then
/// n rows of n whitespace-separated decimals.
pub fn parse_matrix(text: &str, renormalize: bool) -> Result<StochasticMatrix> {
    let mut data_lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (lineno, first) = data_lines
        .next()
        .ok_or(Error::Parse { line: 0, message: "empty matrix file".into() })?;
    let n: usize = first.parse().map_err(|e| Error::Parse {
        line: lineno,
        message: format!("bad dimension {first}: {e}"),
    })?;
    if n == 0 {
        return Err(Error::Parse { line: lineno, message: "dimension must be positive".into() });
    }
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let (lineno, line) = data_lines.next().ok_or(Error::Parse {
            line: 0,
            message: format!("expected {n} matrix rows"),
        })?;
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|e| Error::Parse {
                    line: lineno,
                    message: format!("bad number {tok}: {e}"),
                })
            })
            .collect::<Result<_>>()?;
        if row.len() != n {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected {n} entries, found {}", row.len()),
            });
        }
        rows.push(row);
    }
    StochasticMatrix::new(rows, renormalize)
}

/// Serializes a partition as one line of labels.
pub fn write_partition(g: &Partition) -> String {
    format!("{g}\n")
}

/// Parses the partition text format: `#` comments and one data line of
/// whitespace-separated labels; canonical form is enforced on read.
pub fn parse_partition(text: &str) -> Result<Partition> {
    let (lineno, line) = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .find(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .ok_or(Error::Parse { line: 0, message: "empty partition file".into() })?;
    let labels: Vec<usize> = line
        .split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|e| Error::Parse {
                line: lineno,
                message: format!("bad label {tok}: {e}"),
            })
        })
        .collect::<Result<_>>()?;
    Partition::canonicalize(&labels)
}

/// Parses a fixed-set file: `#` comments, whitespace-separated 1-based state
/// indices.
pub fn parse_fixed_set(text: &str, n: usize) -> Result<Vec<usize>> {
    let mut states = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for tok in line.split_whitespace() {
            let idx: usize = tok.parse().map_err(|e| Error::Parse {
                line: lineno + 1,
                message: format!("bad state index {tok}: {e}"),
            })?;
            if idx == 0 || idx > n {
                return Err(Error::InvalidFixedSet { n });
            }
            states.push(idx - 1);
        }
    }
    if states.is_empty() {
        return Err(Error::InvalidFixedSet { n });
    }
    states.sort_unstable();
    states.dedup();
    Ok(states)
}

/// Serializes a fixed set as 1-based indices on one line.
pub fn write_fixed_set(states: &[usize]) -> String {
    let cells: Vec<String> = states.iter().map(|s| (s + 1).to_string()).collect();
    format!("{}\n", cells.join(" "))
}

/// State legend: one line per state, `index<TAB>name=count,...`.
pub fn write_legend(species: &[String], states: &[Vec<u64>]) -> String {
    let mut out = String::new();
    for (idx, state) in states.iter().enumerate() {
        let cells: Vec<String> = species
            .iter()
            .zip(state)
            .map(|(name, count)| format!("{name}={count}"))
            .collect();
        out.push_str(&format!("{}\t{}\n", idx + 1, cells.join(",")));
    }
    out
}
