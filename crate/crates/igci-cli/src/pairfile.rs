//! Two-column pair files: comma-separated or whitespace-separated, with an
//! optional single header line (auto-detected by a non-numeric first row).

use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairFormat {
    CsvTwoCol,
    WhitespaceTwoCol,
}

impl fmt::Display for PairFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairFormat::CsvTwoCol => write!(f, "csv_two_col"),
            PairFormat::WhitespaceTwoCol => write!(f, "whitespace_two_col"),
        }
    }
}

/// A parsed pair file; `lines` carries the 1-based source line of each row
/// so diagnostics can point at the offending input.
#[derive(Debug, Clone)]
pub struct PairFile {
    pub format: PairFormat,
    pub header: bool,
    pub rows: Vec<(f64, f64)>,
    pub lines: Vec<usize>,
}

#[derive(Debug)]
pub struct ParseError {
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for ParseError {}

fn row_error(line: usize, what: impl fmt::Display) -> ParseError {
    ParseError {
        message: format!("line {line}: {what}"),
    }
}

fn split_row(line: &str, format: PairFormat) -> Vec<&str> {
    match format {
        PairFormat::CsvTwoCol => line.split(',').map(str::trim).collect(),
        PairFormat::WhitespaceTwoCol => line.split_whitespace().collect(),
    }
}

pub fn parse_str(text: &str) -> Result<PairFile, ParseError> {
    let numbered: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let Some(&(first_line, first)) = numbered.first() else {
        return Err(ParseError {
            message: "empty file".into(),
        });
    };
    let format = if first.contains(',') {
        PairFormat::CsvTwoCol
    } else {
        PairFormat::WhitespaceTwoCol
    };
    // A non-numeric first row is a header.
    let header = split_row(first, format)
        .iter()
        .any(|field| field.parse::<f64>().is_err());
    let data = if header { &numbered[1..] } else { &numbered[..] };

    let mut rows = Vec::with_capacity(data.len());
    let mut lines = Vec::with_capacity(data.len());
    for &(line, raw) in data {
        let fields = split_row(raw, format);
        if fields.len() != 2 {
            return Err(row_error(
                line,
                format!("expected 2 columns, found {}", fields.len()),
            ));
        }
        let mut values = [0.0f64; 2];
        for (slot, field) in values.iter_mut().zip(&fields) {
            let v: f64 = field
                .parse()
                .map_err(|_| row_error(line, format!("cannot parse number from {field:?}")))?;
            if !v.is_finite() {
                return Err(row_error(line, format!("non-finite value {field}")));
            }
            *slot = v;
        }
        rows.push((values[0], values[1]));
        lines.push(line);
    }
    if rows.len() < 3 {
        return Err(ParseError {
            message: format!("need at least 3 data rows, found {} (line {first_line} on)", rows.len()),
        });
    }
    Ok(PairFile {
        format,
        header,
        rows,
        lines,
    })
}

pub fn parse_path(path: &Path) -> Result<PairFile, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|e| ParseError {
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_str(&text)
}

/// Write rows in the given format; `{}` formatting of f64 round-trips
/// exactly, so a written file re-reads to identical values.
pub fn write_rows(rows: &[(f64, f64)], format: PairFormat) -> String {
    let mut out = String::new();
    for &(x, y) in rows {
        match format {
            PairFormat::CsvTwoCol => out.push_str(&format!("{x},{y}\n")),
            PairFormat::WhitespaceTwoCol => out.push_str(&format!("{x} {y}\n")),
        }
    }
    out
}

/// First duplicated value along an axis, reported as (value, first line,
/// second line).
pub fn find_duplicate(
    rows: &[(f64, f64)],
    lines: &[usize],
    pick_x: bool,
) -> Option<(f64, usize, usize)> {
    let mut seen: Vec<(f64, usize)> = rows
        .iter()
        .zip(lines)
        .map(|(&(x, y), &line)| (if pick_x { x } else { y }, line))
        .collect();
    seen.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for w in seen.windows(2) {
        if w[0].0 == w[1].0 {
            return Some((w[0].0, w[0].1.min(w[1].1), w[0].1.max(w[1].1)));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_whitespace_and_csv() {
        let ws = parse_str("0.1 0.2\n0.3 0.4\n0.5 0.6\n").unwrap();
        assert_eq!(ws.format, PairFormat::WhitespaceTwoCol);
        assert!(!ws.header);
        assert_eq!(ws.rows.len(), 3);

        let csv = parse_str("x,y\n0.1,0.2\n0.3,0.4\n0.5,0.6\n").unwrap();
        assert_eq!(csv.format, PairFormat::CsvTwoCol);
        assert!(csv.header);
        assert_eq!(csv.rows, vec![(0.1, 0.2), (0.3, 0.4), (0.5, 0.6)]);
        assert_eq!(csv.lines, vec![2, 3, 4]);
    }

    #[test]
    fn rejects_bad_rows_with_line_numbers() {
        let err = parse_str("0.1 0.2\nfoo bar\n0.5 0.6\n").unwrap_err();
        assert!(err.message.contains("line 2"), "{}", err.message);
        let err = parse_str("0.1 0.2 0.3\n0.4 0.5 0.6\n0.7 0.8 0.9\n").unwrap_err();
        assert!(err.message.contains("expected 2 columns"), "{}", err.message);
        let err = parse_str("0.1,0.2\n0.3,inf\n0.5,0.6\n").unwrap_err();
        assert!(err.message.contains("line 2") && err.message.contains("non-finite"));
        let err = parse_str("0.1 0.2\n0.3 0.4\n").unwrap_err();
        assert!(err.message.contains("at least 3"));
    }

    #[test]
    fn round_trips_exact_values() {
        let rows = vec![
            (0.1234567890123456, 0.9876543210987654),
            (1.0 / 3.0, 2.0 / 7.0),
            (5e-324, 1.7976931348623157e308),
        ];
        for format in [PairFormat::WhitespaceTwoCol, PairFormat::CsvTwoCol] {
            let text = write_rows(&rows, format);
            let parsed = parse_str(&text).unwrap();
            assert_eq!(parsed.rows, rows);
        }
    }

    #[test]
    fn reports_duplicates_with_line_numbers() {
        let f = parse_str("0.5 0.1\n0.2 0.3\n0.5 0.4\n").unwrap();
        let (value, first, second) = find_duplicate(&f.rows, &f.lines, true).unwrap();
        assert_eq!(value, 0.5);
        assert_eq!((first, second), (1, 3));
        assert!(find_duplicate(&f.rows, &f.lines, false).is_none());
    }
}
