use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

/// A calendar month, ordered chronologically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct YearMonth {
    year: i32,
    month: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid year-month {0:?}, expected YYYY-MM")]
pub struct YearMonthParseError(pub String);

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Option<Self> {
        (1..=12).contains(&month).then_some(Self { year, month })
    }

    pub fn of(date: NaiveDate) -> Self {
        Self {
            year: date.year(),
            month: date.month(),
        }
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u32 {
        self.month
    }

    pub fn first_day(self) -> NaiveDate {
        NaiveDate::from_ymd_opt(self.year, self.month, 1).expect("valid month")
    }

    pub fn last_day(self) -> NaiveDate {
        self.succ().first_day().pred_opt().expect("date in range")
    }

    pub fn days(self) -> u32 {
        self.last_day().day()
    }

    pub fn succ(self) -> Self {
        if self.month == 12 {
            Self {
                year: self.year + 1,
                month: 1,
            }
        } else {
            Self {
                year: self.year,
                month: self.month + 1,
            }
        }
    }

    pub fn pred(self) -> Self {
        if self.month == 1 {
            Self {
                year: self.year - 1,
                month: 12,
            }
        } else {
            Self {
                year: self.year,
                month: self.month - 1,
            }
        }
    }

    /// Number of months from `self` to `other` (negative when `other` is earlier).
    pub fn months_until(self, other: YearMonth) -> i64 {
        (other.year as i64 - self.year as i64) * 12 + other.month as i64 - self.month as i64
    }

    pub fn contains(self, date: NaiveDate) -> bool {
        date.year() == self.year && date.month() == self.month
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = YearMonthParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || YearMonthParseError(s.to_string());
        let (y, m) = s.trim().split_once('-').ok_or_else(err)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(err());
        }
        let year = y.parse().map_err(|_| err())?;
        let month = m.parse().map_err(|_| err())?;
        YearMonth::new(year, month).ok_or_else(err)
    }
}

impl TryFrom<String> for YearMonth {
    type Error = YearMonthParseError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<YearMonth> for String {
    fn from(value: YearMonth) -> Self {
        value.to_string()
    }
}

/// Inclusive range of months. Empty when `from > to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonthRange {
    pub from: YearMonth,
    pub to: YearMonth,
}

impl MonthRange {
    pub fn new(from: YearMonth, to: YearMonth) -> Self {
        Self { from, to }
    }

    pub fn is_empty(&self) -> bool {
        self.from > self.to
    }

    pub fn len(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.from.months_until(self.to) as usize + 1
        }
    }

    pub fn contains(&self, month: YearMonth) -> bool {
        self.from <= month && month <= self.to
    }

    pub fn months(&self) -> impl Iterator<Item = YearMonth> {
        let to = self.to;
        let mut next = (!self.is_empty()).then_some(self.from);
        std::iter::from_fn(move || {
            let current = next?;
            next = (current < to).then(|| current.succ());
            Some(current)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let m: YearMonth = "2020-08".parse().unwrap();
        assert_eq!(m, YearMonth::new(2020, 8).unwrap());
        assert_eq!(m.to_string(), "2020-08");
        assert!("2020-13".parse::<YearMonth>().is_err());
        assert!("2020-8".parse::<YearMonth>().is_err());
        assert!("Aug-20".parse::<YearMonth>().is_err());
    }

    #[test]
    fn month_arithmetic() {
        let dec = YearMonth::new(2019, 12).unwrap();
        assert_eq!(dec.succ(), YearMonth::new(2020, 1).unwrap());
        assert_eq!(dec.succ().pred(), dec);
        assert_eq!(YearMonth::new(2020, 2).unwrap().days(), 29);
        assert_eq!(dec.months_until(YearMonth::new(2020, 8).unwrap()), 8);
    }

    #[test]
    fn range_iteration() {
        let r = MonthRange::new("2019-08".parse().unwrap(), "2020-08".parse().unwrap());
        assert_eq!(r.months().count(), 13);
        assert_eq!(r.len(), 13);
        let single = MonthRange::new(r.to, r.to);
        assert_eq!(single.months().collect::<Vec<_>>(), vec![r.to]);
        let empty = MonthRange::new(r.to, r.from);
        assert!(empty.is_empty());
        assert_eq!(empty.months().count(), 0);
    }
}
