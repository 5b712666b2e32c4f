use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::money::Money;

use super::LedgerError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LoanClass {
    Mortgage,
    Government,
    CorporateUnsecured,
}

impl LoanClass {
    pub const ALL: [LoanClass; 3] = [
        LoanClass::Mortgage,
        LoanClass::Government,
        LoanClass::CorporateUnsecured,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LoanClass::Mortgage => "mortgage",
            LoanClass::Government => "government",
            LoanClass::CorporateUnsecured => "corporate",
        }
    }
}

impl fmt::Display for LoanClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LoanClass {
    type Err = LedgerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LoanClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| LedgerError::UnknownLoanClass(s.to_string()))
    }
}

/// Reserve and capital rules applied to bank operations.
#[derive(Debug, Clone, PartialEq)]
pub struct RegulatoryConfig {
    /// Required reserves as a fraction of deposit liabilities.
    pub reserve_ratio: f64,
    /// Minimum capital over risk-weighted assets.
    pub capital_ratio: f64,
    pub risk_weights: BTreeMap<LoanClass, f64>,
    /// Reject loans that would leave reserves short of the requirement.
    pub enforce_reserves: bool,
    /// After lending, move cash into central bank reserves to cover any
    /// shortfall (as far as cash allows).
    pub top_up_reserves: bool,
    /// Share of recognized income set aside as a loan-loss allowance.
    pub loss_provision: f64,
}

impl Default for RegulatoryConfig {
    fn default() -> Self {
        RegulatoryConfig {
            reserve_ratio: 0.20,
            capital_ratio: 0.08,
            risk_weights: BTreeMap::from([
                (LoanClass::Mortgage, 0.5),
                (LoanClass::Government, 0.0),
                (LoanClass::CorporateUnsecured, 1.0),
            ]),
            enforce_reserves: false,
            top_up_reserves: false,
            loss_provision: 0.0,
        }
    }
}

pub(crate) fn check_fraction(value: f64) -> Result<f64, LedgerError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(LedgerError::InvalidFraction(value))
    }
}

impl RegulatoryConfig {
    pub fn validate(&self) -> Result<(), LedgerError> {
        check_fraction(self.reserve_ratio)?;
        check_fraction(self.capital_ratio)?;
        check_fraction(self.loss_provision)?;
        for &w in self.risk_weights.values() {
            check_fraction(w)?;
        }
        Ok(())
    }

    pub fn risk_weight(&self, class: LoanClass) -> f64 {
        self.risk_weights.get(&class).copied().unwrap_or(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CapitalRatio {
    Ratio(f64),
    /// No risk-weighted assets: any capital satisfies the requirement.
    Unbounded,
}

impl CapitalRatio {
    pub fn satisfies(self, minimum: f64) -> bool {
        match self {
            CapitalRatio::Ratio(r) => r >= minimum,
            CapitalRatio::Unbounded => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReserveStatus {
    Satisfied,
    Shortfall(Money),
}
