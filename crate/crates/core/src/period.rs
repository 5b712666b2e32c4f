use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A calendar month, the native period of CPI observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    year: i32,
    month: u8,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PeriodError {
    #[error("month {0} out of range 1..=12")]
    MonthOutOfRange(u32),
    #[error("invalid period `{0}`, expected YYYY-MM")]
    Malformed(String),
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Result<Self, PeriodError> {
        if !(1..=12).contains(&month) {
            return Err(PeriodError::MonthOutOfRange(month));
        }
        Ok(YearMonth {
            year,
            month: month as u8,
        })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u32 {
        self.month as u32
    }

    fn ordinal(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    fn from_ordinal(ordinal: i64) -> Self {
        YearMonth {
            year: ordinal.div_euclid(12) as i32,
            month: (ordinal.rem_euclid(12) + 1) as u8,
        }
    }

    pub fn add_months(self, months: i64) -> Self {
        Self::from_ordinal(self.ordinal() + months)
    }

    /// Signed number of months from `self` to `later`.
    pub fn months_until(self, later: YearMonth) -> i64 {
        later.ordinal() - self.ordinal()
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = PeriodError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || PeriodError::Malformed(s.to_string());
        let (y, m) = s.trim().split_once('-').ok_or_else(malformed)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(malformed());
        }
        let year: i32 = y.parse().map_err(|_| malformed())?;
        let month: u32 = m.parse().map_err(|_| malformed())?;
        YearMonth::new(year, month)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn month_arithmetic_wraps_years() {
        let p: YearMonth = "1990-11".parse().unwrap();
        assert_eq!(p.add_months(2).to_string(), "1991-01");
        assert_eq!(p.add_months(-11).to_string(), "1989-12");
        assert_eq!(p.months_until(p.add_months(300)), 300);
    }

    #[test]
    fn parse_rejects_bad_forms() {
        assert!("1990-13".parse::<YearMonth>().is_err());
        assert!("1990/01".parse::<YearMonth>().is_err());
        assert!("90-01".parse::<YearMonth>().is_err());
        assert!("1990-1".parse::<YearMonth>().is_err());
    }
}
