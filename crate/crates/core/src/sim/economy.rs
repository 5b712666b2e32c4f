use crate::indexation::CpiSeries;
use crate::ledger::{
    BankState, BankingSystem, IncomeSource, IndexationTreatment, LedgerError, LoanClass,
    OpeningBalances,
};
use crate::loan_engine::annuity_payment;
use crate::money::Money;
use crate::period::YearMonth;

use super::config::{InitialState, LendingPolicy, SimConfig};
use super::{expansion_rate, SimError};

/// An indexed fixed-payment mortgage held by a bank, stepped one month at a
/// time with the same identities as the schedule generator.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveLoan {
    pub bank: usize,
    pub borrower: String,
    pub periods: u32,
    pub period_rate: f64,
    pub age: u32,
    /// Level real payment at origination prices.
    pub payment_real: f64,
    /// Index factor accumulated since origination.
    pub factor: f64,
    pub outstanding: Money,
}

impl ActiveLoan {
    fn new(bank: usize, borrower: &str, principal: Money, years: u32, annual_rate: f64) -> Self {
        let periods = years * 12;
        let period_rate = annual_rate / 12.0;
        ActiveLoan {
            bank,
            borrower: borrower.to_string(),
            periods,
            period_rate,
            age: 0,
            payment_real: annuity_payment(principal.to_f64(), period_rate, periods),
            factor: 1.0,
            outstanding: principal,
        }
    }

    fn is_open(&self) -> bool {
        self.age < self.periods && self.outstanding.is_positive()
    }
}

/// Full economy: banks, central bank, loan book and the endogenous CPI.
#[derive(Debug, Clone, PartialEq)]
pub struct EconomyState {
    pub system: BankingSystem,
    pub cpi: CpiSeries,
    pub loans: Vec<ActiveLoan>,
    /// Per bank, the customer who borrows and receives bank expenses.
    pub borrowers: Vec<String>,
    pub period: u32,
    pub money_supply: Money,
    pub transaction_quantity: f64,
    pub price_level: f64,
    initial_money: f64,
    money_history: Vec<f64>,
}

/// One closed period of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodRecord {
    pub period: u32,
    pub money_supply: Money,
    pub price_level: f64,
    pub cpi: f64,
    pub inflation: f64,
    pub capital_total: Money,
    pub capital_by_bank: Vec<Money>,
    /// Loans net of contra balances, across banks.
    pub loans_total: Money,
    /// Nominal principal outstanding on tracked indexed loans.
    pub outstanding_principal: Money,
    pub non_cash_income: Money,
    /// Annualized growth of `M` over the trailing year (or the whole run so
    /// far when shorter).
    pub expansion_rate_annual: f64,
}

impl EconomyState {
    pub fn new(config: &SimConfig) -> Result<Self, SimError> {
        config.validate()?;
        let (banks, borrowers) = match config.initial_state {
            InitialState::TwoBankDesk => desk_banks(),
        };
        let loans = banks
            .iter()
            .enumerate()
            .map(|(i, bank)| {
                ActiveLoan::new(
                    i,
                    &borrowers[i],
                    bank.loans(LoanClass::Mortgage),
                    config.loan_years,
                    config.base_rate,
                )
            })
            .collect();
        let system =
            BankingSystem::new(banks, config.regulatory.clone()).map_err(SimError::setup)?;
        let money_supply = system.money_supply();
        let initial_money = money_supply.to_f64();
        let q = config
            .q_path
            .value(0, initial_money, config.periods_per_year);
        let price_level = initial_money / q;
        let start = YearMonth::new(2000, 1).expect("valid month");
        let monthly = (1.0 + config.initial_inflation).powf(1.0 / config.periods_per_year as f64);
        let cpi = CpiSeries::new(vec![
            (start.add_months(-1), 100.0 / monthly),
            (start, 100.0),
        ])
        .map_err(SimError::Indexation)?;
        Ok(EconomyState {
            system,
            cpi,
            loans,
            borrowers,
            period: 0,
            money_supply,
            transaction_quantity: q,
            price_level,
            initial_money,
            money_history: vec![initial_money],
        })
    }

    pub fn money_history(&self) -> &[f64] {
        &self.money_history
    }

    pub fn capital_total(&self) -> Money {
        self.system.banks.iter().map(BankState::capital).sum()
    }

    pub fn outstanding_principal(&self) -> Money {
        self.loans.iter().map(|l| l.outstanding).sum()
    }

    fn bank_mut(&mut self, index: usize) -> &mut BankState {
        &mut self.system.banks[index]
    }

    /// Advances one period:
    ///
    /// 1. inflation from the last two CPI observations;
    /// 2. indexation of every open loan, `pi * outstanding`;
    /// 3. scheduled interest and amortization, with indexation paid in cash
    ///    moved from non-cash to interest income;
    /// 4. recognition of non-cash income every `recognition_interval`
    ///    periods, and payout of interest income as bank expenses;
    /// 5. new lending per policy, within the capital requirement;
    /// 6. `M` recomputed, `P = M / Q`, and the CPI extended in proportion to
    ///    `P`, to be used by the next period.
    pub fn step(&mut self, config: &SimConfig) -> Result<PeriodRecord, SimError> {
        let period = self.period + 1;
        let (last_month, last_cpi) = self.cpi.last();
        let inflation = self
            .cpi
            .inflation_rate(last_month)
            .map_err(SimError::Indexation)?;
        let treatment = config.treatment;
        let mut replacement = vec![Money::ZERO; self.system.banks.len()];

        for i in 0..self.loans.len() {
            if !self.loans[i].is_open() {
                continue;
            }
            let bank = self.loans[i].bank;
            let borrower = self.loans[i].borrower.clone();
            let opening = self.loans[i].outstanding;

            // Indexation.
            let indexation = opening.scale(inflation);
            if indexation.is_positive() {
                self.bank_mut(bank)
                    .apply_indexation(indexation, treatment)
                    .map_err(|e| SimError::ledger(period, e))?;
            } else if indexation.is_negative() {
                self.bank_mut(bank)
                    .reverse_indexation(-indexation, treatment)
                    .map_err(|e| insolvency_or(period, bank, e))?;
            }
            let indexed = opening + indexation;

            // Scheduled payment.
            let loan = &mut self.loans[i];
            loan.factor *= 1.0 + inflation;
            loan.age += 1;
            let interest = indexed.scale(loan.period_rate);
            let amortization = if loan.age >= loan.periods {
                indexed
            } else {
                (Money::from_f64(loan.payment_real * loan.factor) - interest)
                    .max(Money::ZERO)
                    .min(indexed)
            };
            loan.outstanding = indexed - amortization;

            let state = self.bank_mut(bank);
            if interest.is_positive() {
                state
                    .pay_interest(&borrower, interest)
                    .map_err(|e| SimError::ledger(period, e))?;
            }
            if amortization.is_positive() {
                state
                    .repay_principal(&borrower, amortization, LoanClass::Mortgage)
                    .map_err(|e| SimError::ledger(period, e))?;
            }
            let collected = match treatment {
                IndexationTreatment::NonCashIncome => amortization.min(indexation.max(Money::ZERO)),
                IndexationTreatment::ContraAsset => Money::ZERO,
            };
            if collected.is_positive() {
                state
                    .realize_non_cash_income(collected)
                    .map_err(|e| SimError::ledger(period, e))?;
            }
            replacement[bank] += amortization - collected;
        }

        if period.is_multiple_of(config.recognition_interval) {
            self.recognize_non_cash_income(period, config)?;
        }
        for bank in 0..self.system.banks.len() {
            let borrower = self.borrowers[bank].clone();
            let state = self.bank_mut(bank);
            let interest = state.interest_income();
            if interest.is_positive() {
                state
                    .recognize(IncomeSource::InterestIncome, interest, &borrower, 0.0, 0.0)
                    .map_err(|e| SimError::ledger(period, e))?;
            }
        }

        for (bank, &owed) in replacement.iter().enumerate() {
            let capacity = self.system.banks[bank]
                .lending_capacity(LoanClass::Mortgage, &config.regulatory)
                .unwrap_or(Money::from_minor(i64::MAX / 4));
            let amount = match config.lending {
                LendingPolicy::None => owed.min(capacity),
                LendingPolicy::CapitalConstrainedMax => capacity,
            };
            if amount.is_positive() {
                let borrower = self.borrowers[bank].clone();
                let name = self.system.banks[bank].name().to_string();
                self.system
                    .make_loan(&name, &borrower, amount, LoanClass::Mortgage)
                    .map_err(|e| SimError::ledger(period, e))?;
                self.loans.push(ActiveLoan::new(
                    bank,
                    &borrower,
                    amount,
                    config.loan_years,
                    config.base_rate,
                ));
            }
        }
        self.loans.retain(ActiveLoan::is_open);

        for (i, bank) in self.system.banks.iter().enumerate() {
            if bank.capital().is_negative() {
                return Err(SimError::Insolvent { period, bank: i });
            }
        }
        debug_assert!(self.system.is_balanced());

        self.money_supply = self.system.money_supply();
        let m = self.money_supply.to_f64();
        let q = config
            .q_path
            .value(period, self.initial_money, config.periods_per_year);
        let price_level = m / q;
        let cpi = last_cpi * price_level / self.price_level;
        self.cpi.push_next(cpi).map_err(SimError::Indexation)?;
        self.price_level = price_level;
        self.transaction_quantity = q;
        self.period = period;
        self.money_history.push(m);

        let start = self.money_history.len().saturating_sub(13);
        let end = self.money_history.len() - 1;
        let expansion = expansion_rate(&self.money_history, start..end, config.periods_per_year)?;
        Ok(PeriodRecord {
            period,
            money_supply: self.money_supply,
            price_level,
            cpi,
            inflation,
            capital_total: self.capital_total(),
            capital_by_bank: self.system.banks.iter().map(BankState::capital).collect(),
            loans_total: self.system.banks.iter().map(BankState::net_loans).sum(),
            outstanding_principal: self.outstanding_principal(),
            non_cash_income: self
                .system
                .banks
                .iter()
                .map(BankState::non_cash_income)
                .sum(),
            expansion_rate_annual: expansion,
        })
    }

    /// Recognizes each bank's non-cash income. With a capital cap the amount
    /// is limited so that the retained share keeps total capital within the
    /// cap; the rest stays unrecognized.
    fn recognize_non_cash_income(
        &mut self,
        period: u32,
        config: &SimConfig,
    ) -> Result<(), SimError> {
        let provision = config.regulatory.loss_provision;
        let retained_share = config.retention * (1.0 - provision);
        for bank in 0..self.system.banks.len() {
            let available = self.system.banks[bank].non_cash_income();
            let amount = match config.capital_cap {
                Some(cap) if retained_share > 0.0 => {
                    let headroom = (cap - self.capital_total()).max(Money::ZERO);
                    // Largest amount whose rounded retained share fits.
                    let mut limit = Money::from_minor(
                        (headroom.minor() as f64 / retained_share).floor() as i64,
                    );
                    while limit.is_positive()
                        && recognition_retains(limit, provision, config.retention) > headroom
                    {
                        limit -= Money::from_minor(1);
                    }
                    available.min(limit)
                }
                _ => available,
            };
            if amount.is_positive() {
                let borrower = self.borrowers[bank].clone();
                self.system.banks[bank]
                    .recognize(
                        IncomeSource::NonCashIncome,
                        amount,
                        &borrower,
                        config.retention,
                        provision,
                    )
                    .map_err(|e| SimError::ledger(period, e))?;
            }
        }
        Ok(())
    }
}

fn recognition_retains(amount: Money, provision: f64, retention: f64) -> Money {
    (amount - amount.scale(provision)).scale(retention)
}

fn insolvency_or(period: u32, bank: usize, error: LedgerError) -> SimError {
    match &error {
        LedgerError::NegativeBalance(account) if account == "capital" => {
            SimError::Insolvent { period, bank }
        }
        _ => SimError::ledger(period, error),
    }
}

fn desk_banks() -> (Vec<BankState>, Vec<String>) {
    let bank = |name: &str, customers: [&str; 2]| {
        let opening = OpeningBalances {
            loans: vec![(LoanClass::Mortgage, Money::from_units(10_000))],
            reserves: Money::from_units(20),
            cash: Money::from_units(980),
            deposits: customers
                .iter()
                .map(|c| (c.to_string(), Money::from_units(5_000)))
                .collect(),
            capital: Money::from_units(1_000),
        };
        BankState::with_opening(name, &opening).expect("desk bank balances")
    };
    (
        vec![bank("A", ["C1", "C2"]), bank("B", ["C3", "C4"])],
        vec!["C1".to_string(), "C3".to_string()],
    )
}

/// Result of a full run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRun {
    pub initial_money_supply: Money,
    pub records: Vec<PeriodRecord>,
}

impl SimRun {
    /// `M_0, M_1, ..., M_T` in currency units.
    pub fn money_series(&self) -> Vec<f64> {
        std::iter::once(self.initial_money_supply.to_f64())
            .chain(self.records.iter().map(|r| r.money_supply.to_f64()))
            .collect()
    }
}

pub fn run(config: &SimConfig) -> Result<SimRun, SimError> {
    let mut state = EconomyState::new(config)?;
    let initial_money_supply = state.money_supply;
    let mut records = Vec::with_capacity(config.periods as usize);
    for _ in 0..config.periods {
        records.push(state.step(config)?);
    }
    Ok(SimRun {
        initial_money_supply,
        records,
    })
}
