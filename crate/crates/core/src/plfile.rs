//! Text format for piecewise-linear circle maps.
//!
//! ```text
//! # comments and blank lines are ignored
//! winding 0
//! 0      0
//! 1/8    3/8
//! ```
//!
//! Each data line is an `x y` pair; numbers are decimals or `p/q` fractions.
//! The `winding` line is optional and defaults to 0.

use crate::error::{Error, Result};
use crate::homeo::{CircleMap, MapKind};

fn parse_number(tok: &str, line: usize) -> Result<f64> {
    let err = || Error::Parse {
        line,
        message: format!("not a number: {tok:?}"),
    };
    let v = match tok.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| err())?;
            let q: f64 = q.trim().parse().map_err(|_| err())?;
            if q == 0.0 {
                return Err(err());
            }
            p / q
        }
        None => tok.parse().map_err(|_| err())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(err())
    }
}

pub fn parse_pl(text: &str) -> Result<CircleMap> {
    let mut winding = 0i64;
    let mut knots = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
        match toks.as_slice() {
            ["winding", w] | ["winding", "=", w] => {
                winding = w.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("winding must be an integer, got {w:?}"),
                })?;
            }
            [x, y] => knots.push((parse_number(x, line)?, parse_number(y, line)?)),
            _ => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected `x y` or `winding n`, got {body:?}"),
                })
            }
        }
    }
    CircleMap::piecewise_linear(&knots, winding).map_err(|e| Error::Parse {
        line: 0,
        message: e.to_string(),
    })
}

/// Serializes a piecewise-linear map; `None` for other kinds.
pub fn write_pl(map: &CircleMap) -> Option<String> {
    let MapKind::PiecewiseLinear(pl) = map.kind() else {
        return None;
    };
    let mut out = format!("winding {}\n", pl.winding());
    for (x, y) in pl.knots() {
        out.push_str(&format!("{x} {y}\n"));
    }
    Some(out)
}
