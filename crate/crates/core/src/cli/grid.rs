//! Numeric flag values: counts in scientific notation and parameter grids.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

/// A non-negative integer that may be written as `1000000` or `1e6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Count(pub u64);

impl FromStr for Count {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if let Ok(v) = s.parse::<u64>() {
            return Ok(Count(v));
        }
        let x: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
        if !(x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64) {
            return Err(format!("{s:?} is not a non-negative integer"));
        }
        Ok(Count(x as u64))
    }
}

impl Serialize for Count {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(self.0)
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Real values as a comma list (`0.5,0.9`) or an inclusive range with a step
/// (`0.1..0.9:0.2`).
#[derive(Debug, Clone, PartialEq)]
pub struct FloatGrid(pub Vec<f64>);

/// Integer values as a comma list, an inclusive range `0..3`, or a range with
/// a step `0..10:2`. Items may mix both forms: `0..3,10,20`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntGrid(pub Vec<u64>);

/// Grid points are rounded to 12 significant digits so `0.1..0.3:0.1` gives
/// `0.3`, not `0.30000000000000004`.
fn tidy(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn parse_float(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("{s:?} is not a number"))?;
    if !x.is_finite() {
        return Err(format!("{s:?} is not finite"));
    }
    Ok(x)
}

fn split_range(item: &str) -> Option<(&str, &str, Option<&str>)> {
    let (a, rest) = item.split_once("..")?;
    match rest.split_once(':') {
        Some((b, step)) => Some((a, b, Some(step))),
        None => Some((a, rest, None)),
    }
}

impl FromStr for FloatGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            match split_range(item) {
                Some((a, b, step)) => {
                    let (a, b) = (parse_float(a)?, parse_float(b)?);
                    let step =
                        parse_float(step.ok_or_else(|| format!("real range {item:?} needs a step, as in a..b:step"))?)?;
                    if step <= 0.0 || b < a {
                        return Err(format!("range {item:?} needs a <= b and a positive step"));
                    }
                    let count = ((b - a) / step + 1e-9).floor() as u64;
                    if count > 1_000_000 {
                        return Err(format!("range {item:?} has more than a million points"));
                    }
                    out.extend((0..=count).map(|i| tidy(a + i as f64 * step)));
                }
                None => out.push(parse_float(item)?),
            }
        }
        if out.is_empty() {
            return Err("empty grid".into());
        }
        Ok(FloatGrid(out))
    }
}

impl FromStr for IntGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            match split_range(item) {
                Some((a, b, step)) => {
                    let (a, b) = (a.parse::<Count>()?.0, b.parse::<Count>()?.0);
                    let step = match step {
                        Some(st) => st.parse::<Count>()?.0,
                        None => 1,
                    };
                    if step == 0 || b < a {
                        return Err(format!("range {item:?} needs a <= b and a positive step"));
                    }
                    if (b - a) / step > 10_000_000 {
                        return Err(format!("range {item:?} has too many points"));
                    }
                    out.extend((a..=b).step_by(step as usize));
                }
                None => out.push(item.parse::<Count>()?.0),
            }
        }
        if out.is_empty() {
            return Err("empty grid".into());
        }
        Ok(IntGrid(out))
    }
}

impl Serialize for FloatGrid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl Serialize for IntGrid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}
