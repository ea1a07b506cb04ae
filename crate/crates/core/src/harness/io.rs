//! Series CSV files: a `value` column, optionally preceded by `t`.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

fn is_missing(field: &str) -> bool {
    field.is_empty() || field.eq_ignore_ascii_case("na") || field.eq_ignore_ascii_case("nan")
}

/// Reads a series with header `value` or `t,value`. Empty, `NA` or `NaN`
/// cells are errors unless `fill_missing` is set, in which case each gap
/// takes the mean of the nearest observed values on either side (or the one
/// side that exists).
pub fn read_series(reader: impl Read, fill_missing: bool) -> Result<TimeSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let parse_err = |line: usize, e: csv::Error| Error::Parse {
        line,
        message: e.to_string(),
    };
    let header = match records.next() {
        Some(r) => r.map_err(|e| parse_err(1, e))?,
        None => return Err(Error::EmptySeries),
    };
    let col = match header.iter().collect::<Vec<_>>().as_slice() {
        ["value"] => 0,
        ["t", "value"] => 1,
        other => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `value` or `t,value`, got `{}`", other.join(",")),
            })
        }
    };
    let mut values: Vec<Option<f64>> = Vec::new();
    for (i, rec) in records.enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| parse_err(line, e))?;
        if rec.len() != col + 1 {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, got {}", col + 1, rec.len()),
            });
        }
        let field = &rec[col];
        if is_missing(field) {
            if !fill_missing {
                return Err(Error::Parse {
                    line,
                    message: "missing value".into(),
                });
            }
            values.push(None);
            continue;
        }
        let v: f64 = field.parse().map_err(|_| Error::Parse {
            line,
            message: format!("`{field}` is not a number"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                line,
                message: format!("`{field}` is not finite"),
            });
        }
        values.push(Some(v));
    }
    TimeSeries::new(fill_gaps(&values)?)
}

fn fill_gaps(values: &[Option<f64>]) -> Result<Vec<f64>> {
    if !values.is_empty() && values.iter().all(Option::is_none) {
        return Err(Error::InvalidArgument("every value is missing".into()));
    }
    let mut prev = vec![None; values.len()];
    let mut last = None;
    for (i, v) in values.iter().enumerate() {
        last = v.or(last);
        prev[i] = last;
    }
    let mut next = None;
    let mut out = vec![0.0; values.len()];
    for i in (0..values.len()).rev() {
        next = values[i].or(next);
        out[i] = match (values[i], prev[i], next) {
            (Some(v), _, _) => v,
            (None, Some(a), Some(b)) => 0.5 * (a + b),
            (None, Some(a), None) | (None, None, Some(a)) => a,
            (None, None, None) => unreachable!("checked above"),
        };
    }
    Ok(out)
}

pub fn read_series_csv(path: impl AsRef<Path>, fill_missing: bool) -> Result<TimeSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_series(file, fill_missing)
}

/// Writes `t,value` rows with `t` counted from 0.
pub fn write_series_csv<W: Write>(values: &[f64], mut out: W) -> std::io::Result<()> {
    writeln!(out, "t,value")?;
    for (t, v) in values.iter().enumerate() {
        writeln!(out, "{t},{v}")?;
    }
    Ok(())
}
