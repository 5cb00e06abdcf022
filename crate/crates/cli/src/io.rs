//! Series files and number formatting.

use std::fs;
use std::path::Path;

use warpath::TimeSeries;

use crate::CliError;

/// Loads every series in `path`.
///
/// `.json` files hold an array of 2-D arrays (one per series) or a single
/// 2-D array. Anything else is read as CSV: one row per time step, one
/// column per dimension, no header, `#` comment lines allowed.
pub fn load_series_file(path: &Path) -> Result<Vec<TimeSeries>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    let is_json = path
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("json"));
    if is_json {
        parse_series_json(&text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
    } else {
        parse_series_csv(&text)
            .map(|s| vec![s])
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
    }
}

pub fn load_all(paths: &[impl AsRef<Path>]) -> Result<Vec<TimeSeries>, CliError> {
    let mut all = Vec::new();
    for p in paths {
        all.extend(load_series_file(p.as_ref())?);
    }
    Ok(all)
}

pub fn parse_series_json(text: &str) -> Result<Vec<TimeSeries>, String> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let nested: Vec<Vec<Vec<f64>>> =
        match serde_json::from_value::<Vec<Vec<Vec<f64>>>>(value.clone()) {
            Ok(many) => many,
            Err(_) => vec![serde_json::from_value::<Vec<Vec<f64>>>(value).map_err(|_| {
                "expected an array of 2-D numeric arrays or one 2-D numeric array".to_string()
            })?],
        };
    nested
        .into_iter()
        .enumerate()
        .map(|(k, rows)| TimeSeries::new(rows).map_err(|e| format!("series {}: {e}", k + 1)))
        .collect()
}

pub fn parse_series_csv(text: &str) -> Result<TimeSeries, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| e.to_string())?;
        let line = record
            .position()
            .map_or(rows.len() + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                cell.parse::<f64>().map_err(|_| {
                    format!(
                        "row {line}, column {}: cannot parse {cell:?} as a number",
                        c + 1
                    )
                })
            })
            .collect::<Result<Vec<f64>, String>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(format!(
                    "row {line} has {} columns, expected {}",
                    row.len(),
                    first.len()
                ));
            }
        }
        if let Some(c) = row.iter().position(|v| !v.is_finite()) {
            return Err(format!("row {line}, column {}: non-finite value", c + 1));
        }
        rows.push(row);
    }
    TimeSeries::new(rows).map_err(|e| e.to_string())
}

/// One integer label per non-empty line.
pub fn load_labels(path: &Path) -> Result<Vec<u32>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(k, l)| {
            l.trim().parse::<u32>().map_err(|_| {
                CliError::Runtime(format!(
                    "{}: line {}: invalid label {l:?}",
                    path.display(),
                    k + 1
                ))
            })
        })
        .collect()
}

/// Shortest representation that parses back to the same `f64`; integral
/// values carry no decimal point.
pub fn fmt_num(v: f64) -> String {
    format!("{v}")
}

pub fn series_csv(series: &TimeSeries) -> String {
    let mut out = String::new();
    for row in series.iter() {
        let cells: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip_and_comments() {
        let s = parse_series_csv("# header\n1,2\n3.5,-4\n\n").unwrap();
        assert_eq!(s.rows(), vec![vec![1.0, 2.0], vec![3.5, -4.0]]);
        assert_eq!(series_csv(&s), "1,2\n3.5,-4\n");
    }

    #[test]
    fn csv_errors_name_the_row() {
        let err = parse_series_csv("1,2\n3\n").unwrap_err();
        assert!(err.contains("row 2"), "{err}");
        let err = parse_series_csv("1\n2\nabc\n").unwrap_err();
        assert!(err.contains("row 3") && err.contains("abc"), "{err}");
        let err = parse_series_csv("1\nNaN\n").unwrap_err();
        assert!(err.contains("row 2"), "{err}");
        assert!(parse_series_csv("").is_err());
    }

    #[test]
    fn json_forms() {
        let many = parse_series_json("[[[1],[2]], [[3],[4],[5]]]").unwrap();
        assert_eq!(many.len(), 2);
        assert_eq!(many[1].len(), 3);
        let one = parse_series_json("[[1, 2], [3, 4]]").unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].dim(), 2);
        assert!(parse_series_json("[[1, 2], [3]]").is_err());
        assert!(parse_series_json("{\"a\": 1}").is_err());
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(3.0), "3");
        assert_eq!(fmt_num(-0.1), "-0.1");
        let v = 0.1 + 0.2;
        assert_eq!(fmt_num(v).parse::<f64>().unwrap(), v);
    }
}
