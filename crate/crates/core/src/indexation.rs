//! CPI series, per-period inflation, cumulative index factors and the applied
//! indexation index.

use thiserror::Error;

use crate::period::YearMonth;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndexationError {
    #[error("CPI series is empty")]
    Empty,
    #[error("CPI observation for {period} is not positive ({value})")]
    NonPositive { period: YearMonth, value: f64 },
    #[error("CPI periods not strictly ascending at {0}")]
    NotAscending(YearMonth),
    #[error("no CPI observation for {0}")]
    MissingPeriod(YearMonth),
    #[error("index factor requested backwards in time ({from} after {to})")]
    Backwards { from: YearMonth, to: YearMonth },
    #[error("applied index needs at least two observations, series has {0}")]
    InsufficientHistory(usize),
    #[error("trailing window must be at least one month")]
    InvalidWindow,
}

/// Dated consumer price index observations.
///
/// Observations are strictly ascending by month and every value is positive.
/// Gaps are allowed; operations that need a missing month report it.
#[derive(Debug, Clone, PartialEq)]
pub struct CpiSeries {
    observations: Vec<(YearMonth, f64)>,
    base: YearMonth,
}

impl CpiSeries {
    /// Builds a series whose base period is the first observation.
    pub fn new(observations: Vec<(YearMonth, f64)>) -> Result<Self, IndexationError> {
        let base = observations.first().ok_or(IndexationError::Empty)?.0;
        Self::with_base(observations, base)
    }

    pub fn with_base(
        observations: Vec<(YearMonth, f64)>,
        base: YearMonth,
    ) -> Result<Self, IndexationError> {
        if observations.is_empty() {
            return Err(IndexationError::Empty);
        }
        for (i, &(period, value)) in observations.iter().enumerate() {
            // NaN fails this test too.
            if value <= 0.0 || !value.is_finite() {
                return Err(IndexationError::NonPositive { period, value });
            }
            if i > 0 && observations[i - 1].0 >= period {
                return Err(IndexationError::NotAscending(period));
            }
        }
        let series = CpiSeries { observations, base };
        series.value(base)?;
        Ok(series)
    }

    /// Monthly series starting at `start` with value `start_value`, growing at a
    /// constant annual rate compounded geometrically over twelve months.
    pub fn constant_annual(
        start: YearMonth,
        months: usize,
        start_value: f64,
        annual_rate: f64,
    ) -> Result<Self, IndexationError> {
        let monthly = (1.0 + annual_rate).powf(1.0 / 12.0) - 1.0;
        Self::from_monthly_rates(start, start_value, std::iter::repeat_n(monthly, months))
    }

    /// Monthly series starting at `start`, then one observation per supplied
    /// per-month inflation fraction.
    pub fn from_monthly_rates(
        start: YearMonth,
        start_value: f64,
        rates: impl IntoIterator<Item = f64>,
    ) -> Result<Self, IndexationError> {
        let mut observations = vec![(start, start_value)];
        let mut value = start_value;
        let mut period = start;
        for rate in rates {
            value *= 1.0 + rate;
            period = period.add_months(1);
            observations.push((period, value));
        }
        Self::new(observations)
    }

    pub fn base(&self) -> YearMonth {
        self.base
    }

    pub fn observations(&self) -> &[(YearMonth, f64)] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn first(&self) -> (YearMonth, f64) {
        self.observations[0]
    }

    pub fn last(&self) -> (YearMonth, f64) {
        self.observations[self.observations.len() - 1]
    }

    pub fn value(&self, period: YearMonth) -> Result<f64, IndexationError> {
        self.observations
            .binary_search_by_key(&period, |&(p, _)| p)
            .map(|i| self.observations[i].1)
            .map_err(|_| IndexationError::MissingPeriod(period))
    }

    /// Appends the next monthly observation.
    pub fn push_next(&mut self, value: f64) -> Result<(), IndexationError> {
        let period = self.last().0.add_months(1);
        if value <= 0.0 || !value.is_finite() {
            return Err(IndexationError::NonPositive { period, value });
        }
        self.observations.push((period, value));
        Ok(())
    }

    /// `(CPI_t - CPI_{t-1}) / CPI_{t-1}` where `t - 1` is the preceding month.
    pub fn inflation_rate(&self, t: YearMonth) -> Result<f64, IndexationError> {
        let current = self.value(t)?;
        let previous = self.value(t.add_months(-1))?;
        Ok((current - previous) / previous)
    }

    /// `CPI_t / CPI_{t0}`.
    pub fn index_factor(&self, t0: YearMonth, t: YearMonth) -> Result<f64, IndexationError> {
        if t < t0 {
            return Err(IndexationError::Backwards { from: t0, to: t });
        }
        Ok(self.value(t)? / self.value(t0)?)
    }

    /// The same factor as [`index_factor`](Self::index_factor), accumulated as
    /// the product of `(1 + pi_j)` over every month in `(t0, t]`.
    pub fn compounded_factor(&self, t0: YearMonth, t: YearMonth) -> Result<f64, IndexationError> {
        if t < t0 {
            return Err(IndexationError::Backwards { from: t0, to: t });
        }
        self.value(t0)?;
        let mut factor = 1.0;
        let mut period = t0;
        while period < t {
            period = period.add_months(1);
            factor *= 1.0 + self.inflation_rate(period)?;
        }
        Ok(factor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IndexationMode {
    /// The supplied series is already the published indexation index.
    #[default]
    DirectSeries,
    /// Smoothed index built from trailing realized inflation and a naive
    /// forecast. An approximation for synthetic experiments only; it is not
    /// the official weighting rule.
    SynthesizedJanus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ForecastMethod {
    #[default]
    RepeatLast,
    TrailingAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexationPolicy {
    pub mode: IndexationMode,
    pub trailing_window: u32,
    pub forecast: ForecastMethod,
}

impl Default for IndexationPolicy {
    fn default() -> Self {
        IndexationPolicy {
            mode: IndexationMode::DirectSeries,
            trailing_window: 12,
            forecast: ForecastMethod::RepeatLast,
        }
    }
}

impl IndexationPolicy {
    pub fn synthesized(trailing_window: u32, forecast: ForecastMethod) -> Self {
        IndexationPolicy {
            mode: IndexationMode::SynthesizedJanus,
            trailing_window,
            forecast,
        }
    }
}

/// Index level applied to loan principal at `t`.
///
/// In direct-series mode this is the series value itself. In synthesized mode
/// each month's applied inflation is the equal-weight mean of the trailing
/// realized mean (over at most `trailing_window` months, fewer near the start
/// of the series) and the forecast, chained from the first observation.
pub fn applied_index(
    series: &CpiSeries,
    policy: &IndexationPolicy,
    t: YearMonth,
) -> Result<f64, IndexationError> {
    if series.len() < 2 {
        return Err(IndexationError::InsufficientHistory(series.len()));
    }
    if policy.trailing_window == 0 {
        return Err(IndexationError::InvalidWindow);
    }
    match policy.mode {
        IndexationMode::DirectSeries => series.value(t),
        IndexationMode::SynthesizedJanus => {
            let (start, start_value) = series.first();
            if t < start {
                return Err(IndexationError::MissingPeriod(t));
            }
            let window = policy.trailing_window as usize;
            let mut realized: Vec<f64> = Vec::new();
            let mut level = start_value;
            let mut period = start;
            while period < t {
                period = period.add_months(1);
                let raw = series.inflation_rate(period)?;
                realized.push(raw);
                let tail = &realized[realized.len().saturating_sub(window)..];
                let trailing_mean = tail.iter().sum::<f64>() / tail.len() as f64;
                let forecast = match policy.forecast {
                    ForecastMethod::RepeatLast => raw,
                    ForecastMethod::TrailingAverage => trailing_mean,
                };
                level *= 1.0 + 0.5 * (trailing_mean + forecast);
            }
            Ok(level)
        }
    }
}
