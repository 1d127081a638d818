use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Exact currency amount held in minor units (hundredths).
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Money(i64);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid amount {0:?}")]
pub struct MoneyParseError(pub String);

impl Money {
    pub const ZERO: Money = Money(0);

    pub fn from_minor(minor: i64) -> Self {
        Money(minor)
    }

    pub fn from_units(units: i64) -> Self {
        Money(units * 100)
    }

    pub fn minor(self) -> i64 {
        self.0
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    /// Value in whole currency units as a float, for feature encoding and comparisons.
    pub fn as_units(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:02}", abs / 100, abs % 100)
    }
}

impl FromStr for Money {
    type Err = MoneyParseError;

    /// Accepts `123`, `123.4`, `123.45`, an optional leading `-`, and `,` digit
    /// grouping (`3,76,402.50`). More than two decimals is rejected rather than rounded.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || MoneyParseError(s.to_string());
        let t = s.trim();
        let (negative, t) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t),
        };
        let cleaned: String = t.chars().filter(|c| *c != ',').collect();
        let (whole, frac) = match cleaned.split_once('.') {
            Some((w, f)) => (w, f),
            None => (cleaned.as_str(), ""),
        };
        if whole.is_empty() && frac.is_empty() {
            return Err(err());
        }
        if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        if frac.len() > 2 {
            return Err(err());
        }
        let units: i64 = if whole.is_empty() {
            0
        } else {
            whole.parse().map_err(|_| err())?
        };
        let cents: i64 = match frac.len() {
            0 => 0,
            1 => frac.parse::<i64>().map_err(|_| err())? * 10,
            _ => frac.parse().map_err(|_| err())?,
        };
        let minor = units
            .checked_mul(100)
            .and_then(|v| v.checked_add(cents))
            .ok_or_else(err)?;
        Ok(Money(if negative { -minor } else { minor }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!("1234".parse::<Money>().unwrap().minor(), 123_400);
        assert_eq!("1234.5".parse::<Money>().unwrap().minor(), 123_450);
        assert_eq!("1234.05".parse::<Money>().unwrap().minor(), 123_405);
        assert_eq!(
            "10,00,000".parse::<Money>().unwrap(),
            Money::from_units(1_000_000)
        );
        assert_eq!("-3.10".parse::<Money>().unwrap().minor(), -310);
        assert_eq!(".5".parse::<Money>().unwrap().minor(), 50);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "abc", "1.234", "1e5", "--1", "."] {
            assert!(bad.parse::<Money>().is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        for minor in [0, 5, 99, 100, 123_456, -42] {
            let m = Money::from_minor(minor);
            assert_eq!(m.to_string().parse::<Money>().unwrap(), m);
        }
        assert_eq!(Money::from_minor(-5).to_string(), "-0.05");
    }
}
