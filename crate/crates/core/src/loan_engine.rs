//! Repayment schedules for index-linked loans in both of their forms, plus the
//! conventional fixed-rate annuity used as the comparison baseline.
//!
//! Notation in the docs below: `X0` initial principal, `N` number of periods,
//! `r` per-period base rate, `F_t = CPI_t / CPI_0` the cumulative index factor
//! and `pi_t = F_t / F_{t-1} - 1`.
//!
//! Fixed amortization (real terms):
//!
//! ```text
//! A_t^r = X0 / N            A_t^n = A_t^r * F_t
//! X_t^r = X0 (1 - t/N)      X_t^n = X_t^r * F_t
//! I_t^n = r (1 + pi_t) X_{t-1}^n
//! P_t   = A_t^n + I_t^n
//! ```
//!
//! Fixed payment (annuity in real terms):
//!
//! ```text
//! P^r   = X0 r / (1 - (1 + r)^-N)
//! P_t^n = P^r * F_t
//! I_t^n = r (1 + pi_t) X_{t-1}^n
//! A_t^n = P_t^n - I_t^n
//! X_t^n = (1 + pi_t) X_{t-1}^n - A_t^n
//! ```
//!
//! Two printed variants of these identities are not used: an annuity factor
//! written as `(r / X0) / (1 - (1 + r)^-N)`, which has the wrong dimension, and
//! a fixed-payment interest line `r (0 + pi_t) X_{t-1}^n`. The standard annuity
//! and the interest line of the fixed-amortization form are used instead.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::indexation::{CpiSeries, IndexationError};
use crate::period::YearMonth;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LoanError {
    #[error("invalid loan: {0}")]
    InvalidSpec(String),
    #[error("CPI series does not cover the loan term: {0}")]
    Coverage(#[source] IndexationError),
    #[error("schedule generator for {expected} called with a {actual} loan")]
    FormMismatch {
        expected: LoanForm,
        actual: LoanForm,
    },
    #[error("threshold search: {0}")]
    Threshold(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LoanForm {
    FixedAmortization,
    FixedPayment,
    FixedRate,
}

impl LoanForm {
    pub const ALL: [LoanForm; 3] = [
        LoanForm::FixedAmortization,
        LoanForm::FixedPayment,
        LoanForm::FixedRate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LoanForm::FixedAmortization => "fixed-amortization",
            LoanForm::FixedPayment => "fixed-payment",
            LoanForm::FixedRate => "fixed-rate",
        }
    }

    pub fn is_indexed(self) -> bool {
        !matches!(self, LoanForm::FixedRate)
    }
}

impl fmt::Display for LoanForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LoanForm {
    type Err = LoanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LoanForm::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| LoanError::InvalidSpec(format!("unknown loan form `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PaymentFrequency {
    #[default]
    Monthly,
    Annual,
}

impl PaymentFrequency {
    pub fn periods_per_year(self) -> u32 {
        match self {
            PaymentFrequency::Monthly => 12,
            PaymentFrequency::Annual => 1,
        }
    }

    pub fn months_per_period(self) -> i64 {
        12 / self.periods_per_year() as i64
    }
}

/// Terms of a single loan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoanSpec {
    principal: f64,
    periods: u32,
    annual_rate: f64,
    form: LoanForm,
    frequency: PaymentFrequency,
    origination: YearMonth,
}

impl LoanSpec {
    pub fn new(
        form: LoanForm,
        principal: f64,
        periods: u32,
        annual_rate: f64,
        frequency: PaymentFrequency,
        origination: YearMonth,
    ) -> Result<Self, LoanError> {
        if principal <= 0.0 || !principal.is_finite() {
            return Err(LoanError::InvalidSpec(format!(
                "principal must be positive, got {principal}"
            )));
        }
        if periods == 0 {
            return Err(LoanError::InvalidSpec(
                "term must be at least one period".into(),
            ));
        }
        if annual_rate < 0.0 || !annual_rate.is_finite() {
            return Err(LoanError::InvalidSpec(format!(
                "base rate must be non-negative, got {annual_rate}"
            )));
        }
        Ok(LoanSpec {
            principal,
            periods,
            annual_rate,
            form,
            frequency,
            origination,
        })
    }

    /// Monthly loan over `years` years.
    pub fn monthly(
        form: LoanForm,
        principal: f64,
        years: u32,
        annual_rate: f64,
        origination: YearMonth,
    ) -> Result<Self, LoanError> {
        Self::new(
            form,
            principal,
            years * 12,
            annual_rate,
            PaymentFrequency::Monthly,
            origination,
        )
    }

    pub fn principal(&self) -> f64 {
        self.principal
    }

    pub fn periods(&self) -> u32 {
        self.periods
    }

    pub fn annual_rate(&self) -> f64 {
        self.annual_rate
    }

    /// Annual rate divided by the number of payments per year.
    pub fn period_rate(&self) -> f64 {
        self.annual_rate / self.frequency.periods_per_year() as f64
    }

    pub fn form(&self) -> LoanForm {
        self.form
    }

    pub fn frequency(&self) -> PaymentFrequency {
        self.frequency
    }

    pub fn origination(&self) -> YearMonth {
        self.origination
    }

    /// Calendar month of the end of period `t`.
    pub fn period_end(&self, t: u32) -> YearMonth {
        self.origination
            .add_months(t as i64 * self.frequency.months_per_period())
    }

    pub fn with_form(mut self, form: LoanForm) -> Self {
        self.form = form;
        self
    }
}

/// Level payment that retires `principal` over `periods` at `rate` per period.
pub fn annuity_payment(principal: f64, rate: f64, periods: u32) -> f64 {
    if rate == 0.0 {
        principal / periods as f64
    } else {
        principal * rate / (1.0 - (1.0 + rate).powi(-(periods as i32)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleRow {
    pub t: u32,
    pub period: YearMonth,
    /// Inflation over the period, `pi_t`.
    pub inflation: f64,
    /// Cumulative index factor `F_t`.
    pub index_factor: f64,
    pub amortization_real: f64,
    pub amortization_nominal: f64,
    pub interest_real: f64,
    pub interest_nominal: f64,
    pub payment: f64,
    pub principal_real: f64,
    pub principal_nominal: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    spec: LoanSpec,
    rows: Vec<ScheduleRow>,
    factors: Vec<f64>,
}

impl Schedule {
    pub fn spec(&self) -> &LoanSpec {
        &self.spec
    }

    pub fn rows(&self) -> &[ScheduleRow] {
        &self.rows
    }

    /// Index factors `F_0..=F_N` the schedule was built from.
    pub fn index_factors(&self) -> &[f64] {
        &self.factors
    }

    /// Nominal principal before period `t` (t = 1 gives `X0`).
    pub fn opening_principal(&self, t: u32) -> f64 {
        if t <= 1 {
            self.spec.principal
        } else {
            self.rows[t as usize - 2].principal_nominal
        }
    }

    /// Periods in which nominal principal grew.
    pub fn negative_amortization_periods(&self) -> Vec<u32> {
        self.rows
            .iter()
            .filter(|row| row.principal_nominal > self.opening_principal(row.t))
            .map(|row| row.t)
            .collect()
    }
}

/// Index factors `F_0..=F_N` for the loan's payment dates.
fn index_factors(spec: &LoanSpec, series: &CpiSeries) -> Result<Vec<f64>, LoanError> {
    let base = series
        .value(spec.origination)
        .map_err(LoanError::Coverage)?;
    (0..=spec.periods)
        .map(|t| {
            series
                .value(spec.period_end(t))
                .map(|v| v / base)
                .map_err(LoanError::Coverage)
        })
        .collect()
}

fn check_form(spec: &LoanSpec, expected: LoanForm) -> Result<(), LoanError> {
    if spec.form != expected {
        return Err(LoanError::FormMismatch {
            expected,
            actual: spec.form,
        });
    }
    Ok(())
}

/// Schedule for an indexed loan with constant real amortization.
pub fn fixed_amortization_schedule(
    spec: &LoanSpec,
    series: &CpiSeries,
) -> Result<Schedule, LoanError> {
    check_form(spec, LoanForm::FixedAmortization)?;
    let factors = index_factors(spec, series)?;
    let n = spec.periods as f64;
    let x0 = spec.principal;
    let r = spec.period_rate();
    let amortization_real = x0 / n;

    let mut rows = Vec::with_capacity(spec.periods as usize);
    for t in 1..=spec.periods {
        let f = factors[t as usize];
        let f_prev = factors[t as usize - 1];
        let inflation = f / f_prev - 1.0;
        let opening_real = x0 * (1.0 - (t - 1) as f64 / n);
        let opening_nominal = opening_real * f_prev;
        // Exactly zero at t = N.
        let principal_real = if t == spec.periods {
            0.0
        } else {
            x0 * (1.0 - t as f64 / n)
        };
        let amortization_nominal = amortization_real * f;
        let interest_nominal = r * (1.0 + inflation) * opening_nominal;
        rows.push(ScheduleRow {
            t,
            period: spec.period_end(t),
            inflation,
            index_factor: f,
            amortization_real,
            amortization_nominal,
            interest_real: r * opening_real,
            interest_nominal,
            payment: amortization_nominal + interest_nominal,
            principal_real,
            principal_nominal: principal_real * f,
        });
    }
    Ok(Schedule {
        spec: *spec,
        rows,
        factors,
    })
}

/// Nominal principal of a fixed-amortization loan computed period by period:
/// index the opening balance, then subtract the nominal amortization.
pub fn fixed_amortization_principal_by_recursion(
    spec: &LoanSpec,
    series: &CpiSeries,
) -> Result<Vec<f64>, LoanError> {
    let factors = index_factors(spec, series)?;
    let step = spec.principal / spec.periods as f64;
    let mut balance = spec.principal;
    let mut out = Vec::with_capacity(spec.periods as usize);
    for t in 1..=spec.periods as usize {
        let growth = factors[t] / factors[t - 1];
        balance = growth * balance - step * factors[t];
        out.push(balance);
    }
    Ok(out)
}

/// Real-annuity loan whose nominal payment tracks the index.
///
/// The final payment absorbs floating-point residue so that the closing
/// nominal principal is exactly zero.
pub fn fixed_payment_schedule(spec: &LoanSpec, series: &CpiSeries) -> Result<Schedule, LoanError> {
    check_form(spec, LoanForm::FixedPayment)?;
    let factors = index_factors(spec, series)?;
    Ok(annuity_rows(spec, factors))
}

/// Conventional level-payment loan with no indexation.
pub fn fixed_rate_schedule(spec: &LoanSpec) -> Result<Schedule, LoanError> {
    check_form(spec, LoanForm::FixedRate)?;
    let factors = vec![1.0; spec.periods as usize + 1];
    Ok(annuity_rows(spec, factors))
}

fn annuity_rows(spec: &LoanSpec, factors: Vec<f64>) -> Schedule {
    let r = spec.period_rate();
    let payment_real = annuity_payment(spec.principal, r, spec.periods);
    let mut opening = spec.principal;
    let mut rows = Vec::with_capacity(spec.periods as usize);
    for t in 1..=spec.periods {
        let f = factors[t as usize];
        let inflation = f / factors[t as usize - 1] - 1.0;
        let indexed_opening = (1.0 + inflation) * opening;
        let interest_nominal = r * indexed_opening;
        let (payment, amortization_nominal, closing) = if t == spec.periods {
            (indexed_opening + interest_nominal, indexed_opening, 0.0)
        } else {
            let payment = payment_real * f;
            let amortization = payment - interest_nominal;
            (payment, amortization, indexed_opening - amortization)
        };
        rows.push(ScheduleRow {
            t,
            period: spec.period_end(t),
            inflation,
            index_factor: f,
            amortization_real: amortization_nominal / f,
            amortization_nominal,
            interest_real: interest_nominal / f,
            interest_nominal,
            payment,
            principal_real: closing / f,
            principal_nominal: closing,
        });
        opening = closing;
    }
    Schedule {
        spec: *spec,
        rows,
        factors,
    }
}

/// Dispatches on the loan form. Fixed-rate loans ignore the series.
pub fn schedule(spec: &LoanSpec, series: &CpiSeries) -> Result<Schedule, LoanError> {
    match spec.form {
        LoanForm::FixedAmortization => fixed_amortization_schedule(spec, series),
        LoanForm::FixedPayment => fixed_payment_schedule(spec, series),
        LoanForm::FixedRate => fixed_rate_schedule(spec),
    }
}

/// Sum of nominal payments.
pub fn total_cost(schedule: &Schedule) -> f64 {
    schedule.rows.iter().map(|row| row.payment).sum()
}

/// Period and value of the largest closing nominal principal, earliest on ties.
pub fn principal_peak(schedule: &Schedule) -> Option<(u32, f64)> {
    schedule.rows.iter().fold(None, |best, row| match best {
        Some((_, value)) if row.principal_nominal <= value => best,
        _ => Some((row.t, row.principal_nominal)),
    })
}

/// Resolution of [`negative_amortization_threshold`], one basis point.
pub const THRESHOLD_RESOLUTION: f64 = 1e-4;

/// Whether a monthly fixed-payment loan of `term_years` at `annual_rate`,
/// under constant annual CPI inflation `inflation`, ever carries a nominal
/// principal above its initial principal.
pub fn principal_ever_exceeds_initial(
    term_years: u32,
    annual_rate: f64,
    inflation: f64,
) -> Result<bool, LoanError> {
    let origination = YearMonth::new(2000, 1).expect("valid month");
    let spec = LoanSpec::monthly(
        LoanForm::FixedPayment,
        1.0,
        term_years,
        annual_rate,
        origination,
    )?;
    let series = CpiSeries::constant_annual(origination, spec.periods() as usize, 100.0, inflation)
        .map_err(LoanError::Coverage)?;
    let schedule = fixed_payment_schedule(&spec, &series)?;
    Ok(schedule
        .rows()
        .iter()
        .any(|row| row.principal_nominal > spec.principal()))
}

/// Smallest constant annual CPI inflation at which a monthly fixed-payment
/// loan's nominal principal ever rises above the amount borrowed, found by
/// bisection to [`THRESHOLD_RESOLUTION`]. The returned value is the upper end
/// of the final bracket, so the principal does exceed `X0` at that rate.
pub fn negative_amortization_threshold(
    term_years: u32,
    annual_rate: f64,
) -> Result<f64, LoanError> {
    if !(1..=50).contains(&term_years) {
        return Err(LoanError::InvalidSpec(format!(
            "term must be 1..=50 years, got {term_years}"
        )));
    }
    let exceeds = |pi: f64| principal_ever_exceeds_initial(term_years, annual_rate, pi);
    let mut lo = 0.0;
    if exceeds(lo)? {
        return Err(LoanError::Threshold(
            "principal grows even without inflation".into(),
        ));
    }
    let mut hi = 0.01;
    while !exceeds(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 100.0 {
            return Err(LoanError::Threshold(
                "no inflation rate below 10000% grows the principal".into(),
            ));
        }
    }
    while hi - lo > THRESHOLD_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if exceeds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
