//! Loading point sets from text files.
//!
//! One point per line, coordinates separated by whitespace. A coordinate
//! is a decimal literal (`0.625`) or a rational (`5/8`), and must lie in
//! `[0, 1)`. Lines whose first non-blank character is `#` are comments;
//! blank lines are skipped. Every diagnostic carries the file path and
//! 1-based line number of the offending token.

use equilens_core::error::{Error, Result};
use equilens_core::points::{Coord, Point};

/// Reads and parses a points file.
pub fn load_points(path: &str) -> Result<Vec<Point>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::argument(format!("cannot read points file `{path}`: {e}")))?;
    parse_points(&text, path)
}

/// Parses point-file text; `origin` names the source in diagnostics.
pub fn parse_points(text: &str, origin: &str) -> Result<Vec<Point>> {
    let mut points = Vec::new();
    let mut dim: Option<usize> = None;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut coords = Vec::new();
        for token in line.split_whitespace() {
            let coord = Coord::parse(token).map_err(|e| located(origin, lineno, e))?;
            coords.push(coord);
        }
        match dim {
            None => dim = Some(coords.len()),
            Some(d) if d != coords.len() => {
                return Err(Error::argument(format!(
                    "points file `{origin}` line {lineno}: \
                     {} coordinates but earlier points have {d}",
                    coords.len()
                )));
            }
            Some(_) => {}
        }
        points.push(Point::new(coords).map_err(|e| located(origin, lineno, e))?);
    }
    if points.is_empty() {
        return Err(Error::argument(format!(
            "points file `{origin}` contains no points"
        )));
    }
    Ok(points)
}

fn located(origin: &str, lineno: usize, err: Error) -> Error {
    match err {
        Error::Argument(msg) => {
            Error::argument(format!("points file `{origin}` line {lineno}: {msg}"))
        }
        other => other,
    }
}
