use std::str::FromStr;

use crate::ledger::{IndexationTreatment, RegulatoryConfig};
use crate::money::Money;

use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LendingPolicy {
    /// No net new lending: principal repaid beyond indexation collected in
    /// cash is lent again, so the loan book is only ever replaced.
    #[default]
    None,
    /// Each period lend the largest amount that passes the capital check.
    CapitalConstrainedMax,
}

impl LendingPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            LendingPolicy::None => "none",
            LendingPolicy::CapitalConstrainedMax => "capital-constrained-max",
        }
    }
}

impl FromStr for LendingPolicy {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(LendingPolicy::None),
            "capital-constrained-max" => Ok(LendingPolicy::CapitalConstrainedMax),
            other => Err(SimError::Config(format!(
                "unknown lending policy `{other}`"
            ))),
        }
    }
}

/// Transaction quantity `Q` over time.
#[derive(Debug, Clone, PartialEq)]
pub enum QPath {
    /// Constant; `None` picks the initial money supply so that `P_0 = 1`.
    Constant(Option<f64>),
    /// Falls geometrically at an annual rate, raising `P` at that rate for a
    /// fixed money supply.
    Declining {
        start: Option<f64>,
        annual_rate: f64,
    },
    /// Explicit values for periods `0..`; the last value repeats.
    Explicit(Vec<f64>),
}

impl Default for QPath {
    fn default() -> Self {
        QPath::Constant(None)
    }
}

impl QPath {
    pub(crate) fn value(&self, period: u32, initial_money: f64, periods_per_year: u32) -> f64 {
        match self {
            QPath::Constant(q) => q.unwrap_or(initial_money),
            QPath::Declining { start, annual_rate } => {
                let q0 = start.unwrap_or(initial_money);
                q0 * (1.0 + annual_rate).powf(-(period as f64) / periods_per_year as f64)
            }
            QPath::Explicit(values) => {
                let i = (period as usize).min(values.len() - 1);
                values[i]
            }
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        let bad = |v: f64| v <= 0.0 || !v.is_finite();
        match self {
            QPath::Constant(Some(q)) if bad(*q) => {
                Err(SimError::Config("Q must be positive".into()))
            }
            QPath::Declining { start: Some(q), .. } if bad(*q) => {
                Err(SimError::Config("Q must be positive".into()))
            }
            QPath::Declining { annual_rate, .. }
                if annual_rate.is_nan() || *annual_rate <= -1.0 =>
            {
                Err(SimError::Config("Q decline rate must exceed -1".into()))
            }
            QPath::Explicit(values) if values.is_empty() || values.iter().any(|&v| bad(v)) => Err(
                SimError::Config("explicit Q path must be non-empty and positive".into()),
            ),
            _ => Ok(()),
        }
    }
}

/// Starting economy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialState {
    /// Banks A and B, each with mortgage loans 10000, reserves 20, cash 980,
    /// capital 1000 and two customers holding 5000 each. The first customer
    /// of each bank is the borrower.
    #[default]
    TwoBankDesk,
}

impl InitialState {
    pub fn as_str(self) -> &'static str {
        match self {
            InitialState::TwoBankDesk => "two-bank-desk",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub periods: u32,
    pub treatment: IndexationTreatment,
    /// Absolute limit on total capital across banks.
    pub capital_cap: Option<Money>,
    pub lending: LendingPolicy,
    /// Share of recognized income kept as capital.
    pub retention: f64,
    pub q_path: QPath,
    /// Periods between recognitions of non-cash income.
    pub recognition_interval: u32,
    pub periods_per_year: u32,
    /// Annual CPI inflation over the month before the run starts.
    pub initial_inflation: f64,
    pub loan_years: u32,
    pub base_rate: f64,
    pub regulatory: RegulatoryConfig,
    pub initial_state: InitialState,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            periods: 120,
            treatment: IndexationTreatment::NonCashIncome,
            capital_cap: None,
            lending: LendingPolicy::None,
            retention: 0.10,
            q_path: QPath::default(),
            recognition_interval: 12,
            periods_per_year: 12,
            initial_inflation: 0.054,
            loan_years: 25,
            base_rate: 0.04,
            regulatory: RegulatoryConfig::default(),
            initial_state: InitialState::TwoBankDesk,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let fail = |msg: &str| Err(SimError::Config(msg.to_string()));
        if self.periods == 0 {
            return fail("periods must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.retention) {
            return fail("retention must be in [0, 1]");
        }
        if self.recognition_interval == 0 {
            return fail("recognition_interval must be at least 1");
        }
        if self.periods_per_year != 12 {
            return fail("periods_per_year must be 12 (the simulation is monthly)");
        }
        if self.initial_inflation <= -1.0 || !self.initial_inflation.is_finite() {
            return fail("initial_inflation must exceed -1");
        }
        if self.loan_years == 0 || self.loan_years > 50 {
            return fail("loan_years must be 1..=50");
        }
        if self.base_rate < 0.0 || !self.base_rate.is_finite() {
            return fail("base_rate must be non-negative");
        }
        if let Some(cap) = self.capital_cap {
            if cap.is_negative() {
                return fail("capital_cap must be non-negative");
            }
        }
        self.q_path.validate()?;
        self.regulatory
            .validate()
            .map_err(|e| SimError::Config(e.to_string()))
    }

    /// Parses flat `key = value` text. Blank lines and `#` comments are
    /// ignored; unknown keys are errors. Missing keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self, SimError> {
        let mut config = SimConfig::default();
        let mut q: Option<f64> = None;
        let mut q_decline: Option<f64> = None;
        let mut q_explicit: Option<Vec<f64>> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                SimError::Config(format!("line {}: expected key=value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| -> Result<f64, SimError> {
                v.parse::<f64>().map_err(|_| {
                    SimError::Config(format!("line {}: `{key}` expects a number", lineno + 1))
                })
            };
            let int = |v: &str| -> Result<u32, SimError> {
                v.parse::<u32>().map_err(|_| {
                    SimError::Config(format!(
                        "line {}: `{key}` expects a non-negative integer",
                        lineno + 1
                    ))
                })
            };
            match key {
                "periods" => config.periods = int(value)?,
                "treatment" => {
                    config.treatment = value.parse().map_err(|e: crate::ledger::LedgerError| {
                        SimError::Config(format!("line {}: {e}", lineno + 1))
                    })?
                }
                "capital_cap" => {
                    config.capital_cap =
                        if value == "none" {
                            None
                        } else {
                            Some(value.parse::<Money>().map_err(|e| {
                                SimError::Config(format!("line {}: {e}", lineno + 1))
                            })?)
                        }
                }
                "lending_policy" => config.lending = value.parse()?,
                "retention" => config.retention = num(value)?,
                "q" => q = Some(num(value)?),
                "q_annual_decline" => q_decline = Some(num(value)?),
                "q_path" => {
                    q_explicit = Some(
                        value
                            .split(',')
                            .map(|v| num(v.trim()))
                            .collect::<Result<Vec<_>, _>>()?,
                    )
                }
                "recognition_interval" => config.recognition_interval = int(value)?,
                "initial_inflation" => config.initial_inflation = num(value)?,
                "loan_years" => config.loan_years = int(value)?,
                "base_rate" => config.base_rate = num(value)?,
                "reserve_ratio" => config.regulatory.reserve_ratio = num(value)?,
                "capital_ratio" => config.regulatory.capital_ratio = num(value)?,
                "loss_provision" => config.regulatory.loss_provision = num(value)?,
                "initial_state" => {
                    config.initial_state = match value {
                        "two-bank-desk" => InitialState::TwoBankDesk,
                        other => {
                            return Err(SimError::Config(format!(
                                "line {}: unknown initial_state `{other}`",
                                lineno + 1
                            )))
                        }
                    }
                }
                other => {
                    return Err(SimError::Config(format!(
                        "line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        config.q_path = match (q_explicit, q_decline) {
            (Some(_), Some(_)) => {
                return Err(SimError::Config(
                    "q_path and q_annual_decline are exclusive".into(),
                ))
            }
            (Some(values), None) => QPath::Explicit(values),
            (None, Some(annual_rate)) => QPath::Declining {
                start: q,
                annual_rate,
            },
            (None, None) => QPath::Constant(q),
        };
        config.validate()?;
        Ok(config)
    }
}
