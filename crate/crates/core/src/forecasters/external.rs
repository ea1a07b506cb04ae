//! Path forecasts produced elsewhere (e.g. by a neural network), one group of
//! rows per evaluation window.

use std::io::Read;
use std::path::Path;

use super::PathForecast;
use crate::error::{Error, Result};

/// Reads a `window,h,point` CSV into one [`PathForecast`] per window.
pub fn load_external_forecasts(path: impl AsRef<Path>) -> Result<Vec<PathForecast>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_external_forecasts(file)
}

/// As [`load_external_forecasts`], from any reader.
///
/// Windows must be contiguous from 0 and each window's `h` contiguous from 1.
/// Every window must have the same horizon as window 0.
pub fn parse_external_forecasts(reader: impl Read) -> Result<Vec<PathForecast>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out: Vec<PathForecast> = Vec::new();
    let mut saw_header = false;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if !saw_header {
            let fields: Vec<&str> = rec.iter().collect();
            if fields != ["window", "h", "point"] {
                return Err(Error::Parse {
                    line,
                    message: format!("expected header `window,h,point`, found `{}`", fields.join(",")),
                });
            }
            saw_header = true;
            continue;
        }
        if rec.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 fields, found {}", rec.len()),
            });
        }
        let parse_err = |what: &str, v: &str| Error::Parse {
            line,
            message: format!("invalid {what} `{v}`"),
        };
        let window: usize = rec[0].parse().map_err(|_| parse_err("window", &rec[0]))?;
        let h: usize = rec[1].parse().map_err(|_| parse_err("h", &rec[1]))?;
        let point: f64 = rec[2].parse().map_err(|_| parse_err("point", &rec[2]))?;
        if !point.is_finite() {
            return Err(parse_err("point", &rec[2]));
        }
        if window == out.len() {
            close_window(&out)?;
            out.push(PathForecast::new(Vec::new()));
        } else if window + 1 != out.len() {
            return Err(Error::Parse {
                line,
                message: format!("window {window} out of order; expected {} or {}", out.len().saturating_sub(1), out.len()),
            });
        }
        let current = out.last_mut().expect("window opened above");
        if h != current.point.len() + 1 {
            return Err(Error::Parse {
                line,
                message: format!("window {window}: h = {h}, expected {}", current.point.len() + 1),
            });
        }
        current.point.push(point);
    }
    close_window(&out)?;
    Ok(out)
}

/// Checks that the last window in `out` has the same horizon as the first.
fn close_window(out: &[PathForecast]) -> Result<()> {
    if let (Some(first), Some(last)) = (out.first(), out.last()) {
        if last.horizon() != first.horizon() {
            return Err(Error::InconsistentHorizon {
                window: out.len() - 1,
                expected: first.horizon(),
                got: last.horizon(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Vec<PathForecast>> {
        parse_external_forecasts(s.as_bytes())
    }

    #[test]
    fn one_window() {
        let mut s = String::from("window,h,point\n");
        for h in 1..=6 {
            s.push_str(&format!("0,{h},{}.5\n", h * 10));
        }
        let f = parse(&s).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].horizon(), 6);
        assert_eq!(f[0].point[2], 30.5);
        assert!(f[0].sigma.is_none());
    }

    #[test]
    fn ragged_horizon() {
        let s = "window,h,point\n0,1,1\n0,2,2\n1,1,3\n2,1,4\n2,2,5\n";
        assert!(matches!(
            parse(s),
            Err(Error::InconsistentHorizon { window: 1, expected: 2, got: 1 })
        ));
        let s = "window,h,point\n0,1,1\n0,2,2\n1,1,3\n";
        assert!(matches!(parse(s), Err(Error::InconsistentHorizon { .. })));
    }

    #[test]
    fn empty_file() {
        assert!(parse("").unwrap().is_empty());
        assert!(parse("window,h,point\n").unwrap().is_empty());
    }

    #[test]
    fn parse_errors_carry_line() {
        match parse("window,h,point\n0,1,1\n0,2,abc\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("a,b,c\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse("window,h,point\n0,2,1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse("window,h,point\n1,1,1\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn loads_from_disk() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        std::fs::write(&p, "window,h,point\n0,1,2.5\n1,1,3.5\n").unwrap();
        let f = load_external_forecasts(&p).unwrap();
        assert_eq!(f.len(), 2);
        assert!(matches!(
            load_external_forecasts(dir.path().join("missing.csv")),
            Err(Error::Io { .. })
        ));
    }
}
