//! Shared inputs for the criterion benches.

use indexlink_core::indexation::CpiSeries;
use indexlink_core::loan_engine::{LoanForm, LoanSpec};
use indexlink_core::sim::{QPath, SimConfig};
use indexlink_core::YearMonth;

pub fn origination() -> YearMonth {
    YearMonth::new(2000, 1).expect("valid month")
}

/// 20,000,000 over `years` at 4%, monthly.
pub fn reference_loan(form: LoanForm, years: u32) -> LoanSpec {
    LoanSpec::monthly(form, 20_000_000.0, years, 0.04, origination()).expect("valid spec")
}

/// Constant annual inflation covering a 40-year monthly loan.
pub fn reference_series(annual_inflation: f64) -> CpiSeries {
    CpiSeries::constant_annual(origination(), 480, 100.0, annual_inflation).expect("valid series")
}

pub fn simulation_config(periods: u32) -> SimConfig {
    SimConfig {
        periods,
        q_path: QPath::Declining {
            start: None,
            annual_rate: 0.054,
        },
        ..SimConfig::default()
    }
}
