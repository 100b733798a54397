//! Angles written either as rational multiples of π (`pi/3`, `2pi/3`,
//! `-pi/2`, `3*pi/4`) or as plain radians. The symbolic spelling is kept and
//! is what gets printed and serialized, so a value read back from a report is
//! the same exact fraction.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle {
    radians: f64,
    /// `(numerator, denominator)` of the multiple of π, in lowest terms with
    /// a positive denominator.
    fraction: Option<(i64, i64)>,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Angle {
    pub const ZERO: Angle = Angle {
        radians: 0.0,
        fraction: Some((0, 1)),
    };

    pub fn radians(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidAngle(value.to_string()));
        }
        Ok(Self {
            radians: value,
            fraction: None,
        })
    }

    /// `numerator/denominator · π`.
    pub fn pi_fraction(numerator: i64, denominator: i64) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::InvalidAngle(format!("{numerator}pi/0")));
        }
        let g = gcd(numerator, denominator).max(1);
        let sign = denominator.signum();
        let (n, d) = (sign * numerator / g, sign * denominator / g);
        Ok(Self {
            radians: n as f64 * PI / d as f64,
            fraction: Some((n, d)),
        })
    }

    pub fn value(&self) -> f64 {
        self.radians
    }

    pub fn is_symbolic(&self) -> bool {
        self.fraction.is_some()
    }

    /// True within 1e-12 rad.
    pub fn approx_eq(&self, other: f64) -> bool {
        (self.radians - other).abs() < 1e-12
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.fraction {
            Some((0, _)) => write!(f, "0"),
            Some((n, d)) => {
                let head = match n {
                    1 => "pi".to_string(),
                    -1 => "-pi".to_string(),
                    _ => format!("{n}pi"),
                };
                if d == 1 {
                    write!(f, "{head}")
                } else {
                    write!(f, "{head}/{d}")
                }
            }
            None => write!(f, "{}", self.radians),
        }
    }
}

impl FromStr for Angle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidAngle(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
        if compact.is_empty() {
            return Err(bad());
        }
        let compact = compact.replace('π', "pi");
        if let Some(pos) = compact.find("pi") {
            let (head, rest) = compact.split_at(pos);
            let tail = &rest[2..];
            let head = head.strip_suffix('*').unwrap_or(head);
            let numerator = match head {
                "" | "+" => 1,
                "-" => -1,
                h => h.parse::<i64>().map_err(|_| bad())?,
            };
            let denominator = match tail {
                "" => 1,
                t => t.strip_prefix('/').ok_or_else(bad)?.parse::<i64>().map_err(|_| bad())?,
            };
            if denominator == 0 {
                return Err(bad());
            }
            return Self::pi_fraction(numerator, denominator);
        }
        let value: f64 = compact.parse().map_err(|_| bad())?;
        if value == 0.0 {
            return Ok(Self::ZERO);
        }
        Self::radians(value).map_err(|_| bad())
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.fraction {
            Some(_) => serializer.serialize_str(&self.to_string()),
            None => serializer.serialize_f64(self.radians),
        }
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(v) => Angle::radians(v).map_err(serde::de::Error::custom),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_symbolic_forms() {
        for (text, value, canon) in [
            ("pi/3", PI / 3.0, "pi/3"),
            ("2pi/3", 2.0 * PI / 3.0, "2pi/3"),
            ("-pi/2", -PI / 2.0, "-pi/2"),
            ("2*pi/4", PI / 2.0, "pi/2"),
            ("PI", PI, "pi"),
            ("0", 0.0, "0"),
            ("0pi/7", 0.0, "0"),
            ("π/2", PI / 2.0, "pi/2"),
        ] {
            let a: Angle = text.parse().unwrap();
            assert!(a.approx_eq(value), "{text}");
            assert_eq!(a.to_string(), canon);
        }
    }

    #[test]
    fn parses_decimals() {
        let a: Angle = "1.0471975511965976".parse().unwrap();
        assert!(a.approx_eq(PI / 3.0));
        assert!(!a.is_symbolic());
    }

    #[test]
    fn rejects_garbage() {
        for text in ["", "pie", "pi/0", "pi/x", "abc", "nan", "inf", "2pi3"] {
            assert!(text.parse::<Angle>().is_err(), "{text}");
        }
    }

    #[test]
    fn serde_keeps_the_fraction() {
        let a: Angle = "pi/3".parse().unwrap();
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, "\"pi/3\"");
        assert_eq!(serde_json::from_str::<Angle>(&json).unwrap(), a);
        let b: Angle = serde_json::from_str("0.25").unwrap();
        assert_eq!(b.value(), 0.25);
        assert_eq!(serde_json::to_string(&b).unwrap(), "0.25");
    }
}
