//! CSV ingestion with Persian/Arabic-Indic digit normalization.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::series::{Dataset, TimeSeries};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestOptions {
    /// Column holding the integer year. `None` means the first column.
    pub period_column: Option<String>,
    pub normalize_digits: bool,
    pub delimiter: u8,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            period_column: None,
            normalize_digits: true,
            delimiter: b',',
        }
    }
}

/// Maps Eastern-Arabic and Persian digit glyphs to ASCII digits, the Arabic
/// decimal separator and a `/` between digits to `.`, and strips Arabic
/// thousands separators. Idempotent.
pub fn normalize_digits(text: &str) -> String {
    let chars: Vec<char> = text.trim().chars().map(ascii_digit).collect();
    let mut out = String::with_capacity(chars.len());
    for (i, &c) in chars.iter().enumerate() {
        match c {
            '/' | '\u{066B}' => {
                let prev_digit = i > 0 && chars[i - 1].is_ascii_digit();
                let next_digit = chars.get(i + 1).is_some_and(|n| n.is_ascii_digit());
                if prev_digit && next_digit || c == '\u{066B}' {
                    out.push('.');
                } else {
                    out.push(c);
                }
            }
            '\u{066C}' | '\u{200E}' | '\u{200F}' => {}
            '\u{2212}' => out.push('-'),
            _ => out.push(c),
        }
    }
    out
}

fn ascii_digit(c: char) -> char {
    match c {
        '\u{0660}'..='\u{0669}' => char::from(b'0' + (c as u32 - 0x0660) as u8),
        '\u{06F0}'..='\u{06F9}' => char::from(b'0' + (c as u32 - 0x06F0) as u8),
        _ => c,
    }
}

fn parse_cell(raw: &str, normalize: bool) -> Option<f64> {
    let text = if normalize {
        normalize_digits(raw)
    } else {
        raw.trim().to_string()
    };
    text.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn load_csv(path: impl AsRef<Path>, opts: &IngestOptions) -> Result<Dataset<f64>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Ingest(format!("cannot open {}: {e}", path.display())))?;
    read_csv(file, opts)
}

/// Parses CSV text from any reader; rows are sorted by period.
pub fn read_csv<R: Read>(reader: R, opts: &IngestOptions) -> Result<Dataset<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Ingest(format!("unreadable header: {e}")))?
        .iter()
        .map(|h| h.trim_start_matches('\u{FEFF}').to_string())
        .collect();
    let period_idx = match &opts.period_column {
        Some(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Ingest(format!("period column `{name}` not in header")))?,
        None => 0,
    };
    let value_cols: Vec<usize> = (0..headers.len()).filter(|&i| i != period_idx).collect();
    if value_cols.is_empty() {
        return Err(Error::Ingest("no value columns".into()));
    }

    let mut rows: BTreeMap<i32, Vec<f64>> = BTreeMap::new();
    for (line, record) in rdr.records().enumerate() {
        // header is line 1
        let row_no = line + 2;
        let record = record.map_err(|e| Error::Ingest(format!("row {row_no}: {e}")))?;
        let raw_period = record.get(period_idx).unwrap_or("");
        let period_text = if opts.normalize_digits {
            normalize_digits(raw_period)
        } else {
            raw_period.trim().to_string()
        };
        if period_text.is_empty() {
            return Err(Error::Ingest(format!("row {row_no}: missing period")));
        }
        let period: i32 = period_text.parse().map_err(|_| {
            Error::Ingest(format!("row {row_no}: period `{raw_period}` is not an integer year"))
        })?;
        let mut values = Vec::with_capacity(value_cols.len());
        for &c in &value_cols {
            let raw = record.get(c).unwrap_or("");
            let v = parse_cell(raw, opts.normalize_digits).ok_or_else(|| {
                Error::Ingest(format!(
                    "row {row_no}, column `{}`: `{raw}` is not numeric",
                    headers[c]
                ))
            })?;
            values.push(v);
        }
        if rows.insert(period, values).is_some() {
            return Err(Error::Ingest(format!("duplicate period {period}")));
        }
    }
    let (&first, _) = rows
        .first_key_value()
        .ok_or_else(|| Error::Ingest("no data rows".into()))?;
    for (i, &p) in rows.keys().enumerate() {
        let expected = first + i as i32;
        if p != expected {
            return Err(Error::Ingest(format!("gap in periods: {expected} missing")));
        }
    }
    let series = value_cols
        .iter()
        .enumerate()
        .map(|(j, &c)| TimeSeries::new(headers[c].clone(), first, rows.values().map(|r| r[j]).collect()))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(text: &str) -> Result<Dataset<f64>> {
        read_csv(text.as_bytes(), &IngestOptions::default())
    }

    #[test]
    fn simple_csv() {
        let ds = parse("year,y\n1379,10\n1380,20").unwrap();
        let y = ds.get("y").unwrap();
        assert_eq!(y.values(), &[10.0, 20.0]);
        assert_eq!(y.start_period(), 1379);
    }

    #[test]
    fn persian_numerals() {
        assert_eq!(normalize_digits("۲/۴۵"), "2.45");
        assert_eq!(normalize_digits("-۵.۵۸۹۹۳۲"), "-5.589932");
        assert_eq!(normalize_digits("٣٫٦٣"), "3.63");
        let ds = parse("year,f\n۱۳۷۹,۲/۴۵\n۱۳۸۰,۳/۶۳").unwrap();
        assert_eq!(ds.get("f").unwrap().values(), &[2.45, 3.63]);
        assert_eq!(ds.start(), 1379);
    }

    #[test]
    fn rows_are_sorted() {
        let ds = parse("year,y\n1381,3\n1379,1\n1380,2").unwrap();
        assert_eq!(ds.get("y").unwrap().values(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn gap_is_error() {
        assert!(matches!(parse("year,y\n1379,1\n1381,2"), Err(Error::Ingest(_))));
    }

    #[test]
    fn duplicate_period_is_error() {
        let err = parse("year,y\n1379,1\n1379,2").unwrap_err();
        assert!(err.to_string().contains("duplicate"));
    }

    #[test]
    fn non_numeric_cell_reports_location() {
        let err = parse("year,y,x\n1379,1,2\n1380,abc,3").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 3") && msg.contains("`y`"), "{msg}");
    }

    #[test]
    fn missing_cell_is_error() {
        assert!(parse("year,y\n1379,1\n1380,").is_err());
    }

    #[test]
    fn named_period_column() {
        let opts = IngestOptions {
            period_column: Some("yr".into()),
            ..IngestOptions::default()
        };
        let ds = read_csv("a,yr\n5,2001\n6,2002".as_bytes(), &opts).unwrap();
        assert_eq!(ds.get("a").unwrap().values(), &[5.0, 6.0]);
        assert_eq!(ds.start(), 2001);
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent(s in "[0-9۰-۹٠-٩/٫., a-z-]{0,16}") {
            let once = normalize_digits(&s);
            prop_assert_eq!(normalize_digits(&once), once);
        }
    }
}
