//! Closed-loop simulation: indexed loans booked through bank ledgers, money
//! supply `M`, price level `P = M / Q`, and a CPI that follows `P` with a
//! one-period lag.

mod config;
mod economy;

pub use config::{InitialState, LendingPolicy, QPath, SimConfig};
pub use economy::{run, ActiveLoan, EconomyState, PeriodRecord, SimRun};

use std::ops::Range;

use thiserror::Error;

use crate::indexation::IndexationError;
use crate::ledger::LedgerError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("config: {0}")]
    Config(String),
    #[error("initial state: {0}")]
    Setup(#[source] LedgerError),
    #[error("period {period}: {source}")]
    Ledger {
        period: u32,
        #[source]
        source: LedgerError,
    },
    #[error("period {period}: bank {bank} insolvent (negative capital)")]
    Insolvent { period: u32, bank: usize },
    #[error("CPI: {0}")]
    Indexation(#[source] IndexationError),
    #[error("expansion window {start}..{end} is empty or outside a series of length {len}")]
    EmptyWindow {
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("money supply must be positive at the start of the window")]
    NonPositiveMoney,
}

impl SimError {
    fn setup(e: LedgerError) -> Self {
        SimError::Setup(e)
    }

    fn ledger(period: u32, source: LedgerError) -> Self {
        SimError::Ledger { period, source }
    }
}

/// Geometric annualized growth of `money` from index `window.start` to
/// `window.end`, with `periods_per_year` series steps per year.
pub fn expansion_rate(
    money: &[f64],
    window: Range<usize>,
    periods_per_year: u32,
) -> Result<f64, SimError> {
    let Range { start, end } = window;
    if end <= start || end >= money.len() {
        return Err(SimError::EmptyWindow {
            start,
            end,
            len: money.len(),
        });
    }
    let (from, to) = (money[start], money[end]);
    if from.is_nan() || from <= 0.0 {
        return Err(SimError::NonPositiveMoney);
    }
    let years = (end - start) as f64 / periods_per_year as f64;
    Ok((to / from).powf(1.0 / years) - 1.0)
}
