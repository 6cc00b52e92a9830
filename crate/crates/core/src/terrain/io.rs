//! Plain-text grid files.
//!
//! ```text
//! resolution 0.02
//! origin 0 0
//! size 3 2
//! 0.0 0.0 nan
//! 0.1 0.1 0.1
//! ```
//!
//! Rows are written from `iy = 0` upwards, `w` whitespace-separated values
//! each; `nan` marks an unknown cell. Blank lines and `#` comments are ignored.

use std::fmt::Write as _;
use std::path::Path;

use super::HeightMap;
use crate::error::MapFileError;
use crate::geometry::Point2;
use crate::grid::GridSpec;

/// Parsed contents of a grid file.
#[derive(Clone, Debug, PartialEq)]
pub struct GridText {
    pub spec: GridSpec,
    /// Row-major values, NaN for unknown.
    pub values: Vec<f64>,
}

pub fn parse_grid_text(text: &str) -> Result<GridText, MapFileError> {
    let mut resolution = None;
    let mut origin = None;
    let mut size: Option<(usize, usize)> = None;
    let mut values = Vec::new();
    let mut rows = 0usize;

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let head = toks.next().unwrap_or_default();
        let parse_err = |message: String| MapFileError::Parse { line: line_no, message };
        match head {
            "resolution" | "origin" | "size" if size.is_some() && rows > 0 => {
                return Err(parse_err(format!("header key `{head}` after grid rows")));
            }
            "resolution" => {
                let v = header_numbers::<f64>(&mut toks, 1).map_err(parse_err)?;
                resolution = Some(v[0]);
            }
            "origin" => {
                let v = header_numbers::<f64>(&mut toks, 2).map_err(parse_err)?;
                origin = Some(Point2::new(v[0], v[1]));
            }
            "size" => {
                let v = header_numbers::<usize>(&mut toks, 2).map_err(parse_err)?;
                size = Some((v[0], v[1]));
            }
            _ => {
                let Some((w, h)) = size else {
                    return Err(parse_err("grid row before `size` header".into()));
                };
                if resolution.is_none() || origin.is_none() {
                    return Err(parse_err("grid row before `resolution`/`origin` headers".into()));
                }
                if rows == h {
                    return Err(parse_err(format!("more than {h} rows")));
                }
                let row: Vec<&str> = line.split_whitespace().collect();
                if row.len() != w {
                    return Err(parse_err(format!("expected {w} values, found {}", row.len())));
                }
                for (col, tok) in row.iter().enumerate() {
                    let v = parse_value(tok).map_err(|message| MapFileError::Cell {
                        line: line_no,
                        column: col + 1,
                        message,
                    })?;
                    values.push(v);
                }
                rows += 1;
            }
        }
    }

    let line = text.lines().count();
    let (w, h) = size.ok_or(MapFileError::Parse { line, message: "missing `size` header".into() })?;
    let resolution = resolution.ok_or(MapFileError::Parse { line, message: "missing `resolution` header".into() })?;
    let origin = origin.ok_or(MapFileError::Parse { line, message: "missing `origin` header".into() })?;
    if rows != h {
        return Err(MapFileError::Parse { line, message: format!("expected {h} rows, found {rows}") });
    }
    let spec = GridSpec::new(origin, resolution, w, h)?;
    Ok(GridText { spec, values })
}

fn header_numbers<T: std::str::FromStr>(toks: &mut std::str::SplitWhitespace<'_>, n: usize) -> Result<Vec<T>, String> {
    let out: Vec<&str> = toks.collect();
    if out.len() != n {
        return Err(format!("expected {n} header values, found {}", out.len()));
    }
    out.iter().map(|t| t.parse::<T>().map_err(|_| format!("invalid header value `{t}`"))).collect()
}

fn parse_value(tok: &str) -> Result<f64, String> {
    if tok.eq_ignore_ascii_case("nan") {
        return Ok(f64::NAN);
    }
    let v: f64 = tok.parse().map_err(|_| format!("invalid number `{tok}`"))?;
    if !v.is_finite() {
        return Err(format!("non-finite value `{tok}`"));
    }
    Ok(v)
}

/// Renders a grid in the text format. `value(ix, iy)` returns `None` for unknown.
pub fn write_grid_file(spec: &GridSpec, value: impl Fn(usize, usize) -> Option<f64>) -> String {
    let mut s = String::with_capacity(spec.len() * 6 + 64);
    let _ = writeln!(s, "resolution {}", spec.resolution);
    let _ = writeln!(s, "origin {} {}", spec.origin.x, spec.origin.y);
    let _ = writeln!(s, "size {} {}", spec.width, spec.height);
    for iy in 0..spec.height {
        for ix in 0..spec.width {
            if ix > 0 {
                s.push(' ');
            }
            match value(ix, iy) {
                Some(v) => {
                    let _ = write!(s, "{v}");
                }
                None => s.push_str("nan"),
            }
        }
        s.push('\n');
    }
    s
}

pub fn load_heightmap(path: impl AsRef<Path>) -> Result<HeightMap, MapFileError> {
    let text = std::fs::read_to_string(path)?;
    let g = parse_grid_text(&text)?;
    Ok(HeightMap::from_values(g.spec, g.values)?)
}

pub fn save_heightmap(hm: &HeightMap, path: impl AsRef<Path>) -> Result<(), MapFileError> {
    std::fs::write(path, write_grid_file(hm.spec(), |ix, iy| hm.elevation(ix, iy)))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_flat_3x3() {
        let text = "resolution 0.02\norigin 0 0\nsize 3 3\n0.0 0.0 0.0\n0.0 0.0 0.0\n0.0 0.0 0.0\n";
        let g = parse_grid_text(text).unwrap();
        let hm = HeightMap::from_values(g.spec, g.values).unwrap();
        assert_eq!(hm.known_count(), 9);
        assert_eq!(hm.spec().resolution, 0.02);
        assert!(hm.raw().iter().all(|&z| z == 0.0));
    }

    #[test]
    fn nan_marks_unknown() {
        let text = "resolution 0.02\norigin 0 0\nsize 2 1\n0.5 nan\n";
        let g = parse_grid_text(text).unwrap();
        let hm = HeightMap::from_values(g.spec, g.values).unwrap();
        assert_eq!(hm.elevation(0, 0), Some(0.5));
        assert_eq!(hm.elevation(1, 0), None);
    }

    #[test]
    fn ragged_row_names_line() {
        let text = "resolution 0.02\norigin 0 0\nsize 2 2\n0 0\n0\n";
        match parse_grid_text(text) {
            Err(MapFileError::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn infinite_value_names_cell() {
        let text = "resolution 0.02\norigin 0 0\nsize 2 1\n0 inf\n";
        match parse_grid_text(text) {
            Err(MapFileError::Cell { line, column, .. }) => assert_eq!((line, column), (4, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_header() {
        assert!(parse_grid_text("resolution x\norigin 0 0\nsize 1 1\n0\n").is_err());
        assert!(parse_grid_text("origin 0 0\nsize 1 1\n0\n").is_err());
        assert!(parse_grid_text("resolution 0.02\norigin 0 0\nsize 1 2\n0\n").is_err());
        assert!(parse_grid_text("resolution -1\norigin 0 0\nsize 1 1\n0\n").is_err());
    }
}
