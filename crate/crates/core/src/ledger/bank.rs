use crate::money::Money;

use super::account::{Account, AccountKind, JournalEntry, Ledger, Posting, Side};
use super::regulatory::{check_fraction, CapitalRatio, LoanClass, RegulatoryConfig, ReserveStatus};
use super::LedgerError;

/// How the balancing entry for indexation growth of a loan is booked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndexationTreatment {
    /// Credit a non-cash income liability, later recognizable as income.
    NonCashIncome,
    /// Credit an asset-side contra account; no income arises.
    ContraAsset,
}

impl IndexationTreatment {
    pub fn as_str(self) -> &'static str {
        match self {
            IndexationTreatment::NonCashIncome => "non-cash-income",
            IndexationTreatment::ContraAsset => "contra-asset",
        }
    }
}

impl std::str::FromStr for IndexationTreatment {
    type Err = LedgerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "non-cash-income" => Ok(IndexationTreatment::NonCashIncome),
            "contra-asset" => Ok(IndexationTreatment::ContraAsset),
            other => Err(LedgerError::UnknownTreatment(other.to_string())),
        }
    }
}

/// Liability accounts whose balance can be recognized as income.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncomeSource {
    NonCashIncome,
    InterestIncome,
}

impl IncomeSource {
    fn kind(self) -> AccountKind {
        match self {
            IncomeSource::NonCashIncome => AccountKind::NonCashIncome,
            IncomeSource::InterestIncome => AccountKind::InterestIncome,
        }
    }
}

/// How a recognized amount was split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Recognition {
    pub provisioned: Money,
    pub retained: Money,
    pub paid_out: Money,
}

/// Opening position of a commercial bank.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OpeningBalances {
    pub loans: Vec<(LoanClass, Money)>,
    pub reserves: Money,
    pub cash: Money,
    pub deposits: Vec<(String, Money)>,
    pub capital: Money,
}

/// Ledgers of one commercial bank.
///
/// Every operation validates first and then commits its postings, so a failed
/// operation leaves the state untouched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BankState {
    name: String,
    ledger: Ledger,
}

fn standard_accounts() -> Vec<AccountKind> {
    vec![
        AccountKind::Loans(LoanClass::Mortgage),
        AccountKind::Reserves,
        AccountKind::Cash,
        AccountKind::NonCashIncome,
        AccountKind::InterestIncome,
        AccountKind::Capital,
        AccountKind::IndexationContra,
        AccountKind::LoanLossAllowance,
    ]
}

impl BankState {
    pub fn new(name: impl Into<String>) -> Self {
        let mut ledger = Ledger::new();
        for kind in standard_accounts() {
            ledger.ensure(kind);
        }
        BankState {
            name: name.into(),
            ledger,
        }
    }

    pub fn with_opening(
        name: impl Into<String>,
        opening: &OpeningBalances,
    ) -> Result<Self, LedgerError> {
        let mut bank = Self::new(name);
        for (class, amount) in &opening.loans {
            bank.ledger
                .set_opening(AccountKind::Loans(*class), *amount)?;
        }
        bank.ledger
            .set_opening(AccountKind::Reserves, opening.reserves)?;
        bank.ledger.set_opening(AccountKind::Cash, opening.cash)?;
        for (customer, amount) in &opening.deposits {
            bank.ledger
                .set_opening(AccountKind::Deposit(customer.clone()), *amount)?;
        }
        bank.ledger
            .set_opening(AccountKind::Capital, opening.capital)?;
        let gap = bank.ledger.accounting_gap();
        if gap != Money::ZERO {
            return Err(LedgerError::Unbalanced(gap));
        }
        Ok(bank)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    pub fn accounts(&self) -> impl Iterator<Item = &Account> {
        self.ledger.accounts()
    }

    pub fn journal(&self) -> &[JournalEntry] {
        self.ledger.journal()
    }

    pub fn balance(&self, kind: &AccountKind) -> Money {
        self.ledger.balance_or_zero(kind)
    }

    pub fn open_deposit(&mut self, customer: &str) -> Result<(), LedgerError> {
        self.ledger.open(AccountKind::Deposit(customer.to_string()))
    }

    pub fn customers(&self) -> Vec<String> {
        self.ledger
            .accounts()
            .filter_map(|a| match &a.kind {
                AccountKind::Deposit(c) => Some(c.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn deposit(&self, customer: &str) -> Result<Money, LedgerError> {
        self.ledger
            .balance(&AccountKind::Deposit(customer.to_string()).name())
            .map_err(|_| LedgerError::UnknownCustomer(customer.to_string()))
    }

    /// Sum of customer deposit balances.
    pub fn deposits_total(&self) -> Money {
        self.ledger
            .accounts()
            .filter(|a| matches!(a.kind, AccountKind::Deposit(_)))
            .map(|a| a.balance)
            .sum()
    }

    pub fn loans(&self, class: LoanClass) -> Money {
        self.balance(&AccountKind::Loans(class))
    }

    pub fn loans_total(&self) -> Money {
        LoanClass::ALL.iter().map(|&c| self.loans(c)).sum()
    }

    /// Loans net of the indexation contra and loss allowance.
    pub fn net_loans(&self) -> Money {
        self.loans_total()
            - self.balance(&AccountKind::IndexationContra)
            - self.balance(&AccountKind::LoanLossAllowance)
    }

    pub fn capital(&self) -> Money {
        self.balance(&AccountKind::Capital)
    }

    pub fn non_cash_income(&self) -> Money {
        self.balance(&AccountKind::NonCashIncome)
    }

    pub fn interest_income(&self) -> Money {
        self.balance(&AccountKind::InterestIncome)
    }

    pub fn total(&self, side: Side) -> Money {
        self.ledger.total(side)
    }

    pub fn accounting_gap(&self) -> Money {
        self.ledger.accounting_gap()
    }

    /// Commits a raw posting.
    pub fn post(&mut self, posting: Posting) -> Result<(), LedgerError> {
        self.ledger.post(posting)
    }

    /// Re-applies postings in order, stopping at the first failure.
    pub fn replay<'a>(
        &mut self,
        postings: impl IntoIterator<Item = &'a Posting>,
    ) -> Result<(), LedgerError> {
        for posting in postings {
            self.post(posting.clone())?;
        }
        Ok(())
    }

    fn require_positive(amount: Money) -> Result<(), LedgerError> {
        if amount.is_positive() {
            Ok(())
        } else {
            Err(LedgerError::NonPositiveAmount(amount))
        }
    }

    fn require_deposit(&self, customer: &str, amount: Money) -> Result<(), LedgerError> {
        let balance = self.deposit(customer)?;
        if balance < amount {
            return Err(LedgerError::InsufficientDeposit {
                customer: customer.to_string(),
                balance,
                requested: amount,
            });
        }
        Ok(())
    }

    /// Risk-weighted assets in currency units. Contra balances offset
    /// mortgage loans at the mortgage weight.
    pub fn risk_weighted_assets(&self, config: &RegulatoryConfig) -> f64 {
        let gross: f64 = LoanClass::ALL
            .iter()
            .map(|&c| config.risk_weight(c) * self.loans(c).to_f64())
            .sum();
        let offsets = self.balance(&AccountKind::IndexationContra)
            + self.balance(&AccountKind::LoanLossAllowance);
        gross - config.risk_weight(LoanClass::Mortgage) * offsets.to_f64()
    }

    /// Capital over risk-weighted assets.
    pub fn capital_ratio(&self, config: &RegulatoryConfig) -> CapitalRatio {
        Self::ratio(self.capital().to_f64(), self.risk_weighted_assets(config))
    }

    fn ratio(capital: f64, rwa: f64) -> CapitalRatio {
        if rwa <= 0.0 {
            CapitalRatio::Unbounded
        } else {
            CapitalRatio::Ratio(capital / rwa)
        }
    }

    fn ratio_after_loan(
        &self,
        class: LoanClass,
        amount: Money,
        config: &RegulatoryConfig,
    ) -> CapitalRatio {
        let rwa = self.risk_weighted_assets(config) + config.risk_weight(class) * amount.to_f64();
        Self::ratio(self.capital().to_f64(), rwa)
    }

    /// Largest new loan of `class` that keeps the capital ratio at or above
    /// the minimum, or `None` when the class carries no risk weight.
    pub fn lending_capacity(&self, class: LoanClass, config: &RegulatoryConfig) -> Option<Money> {
        let weight = config.risk_weight(class);
        if weight <= 0.0 {
            return None;
        }
        if config.capital_ratio <= 0.0 {
            return Some(Money::from_minor(i64::MAX / 4));
        }
        let passes = |m: i64| {
            self.ratio_after_loan(class, Money::from_minor(m), config)
                .satisfies(config.capital_ratio)
        };
        let room =
            self.capital().to_f64() / config.capital_ratio - self.risk_weighted_assets(config);
        let mut minor = ((room / weight) * crate::money::MINOR_PER_UNIT as f64)
            .floor()
            .max(0.0) as i64;
        while minor > 0 && !passes(minor) {
            minor -= 1;
        }
        while passes(minor + 1) {
            minor += 1;
        }
        if minor == 0 && !passes(0) {
            return Some(Money::ZERO);
        }
        Some(Money::from_minor(minor))
    }

    /// Reserves against `ratio * deposit liabilities`.
    pub fn reserve_check(&self, config: &RegulatoryConfig) -> ReserveStatus {
        self.reserve_status_with(self.deposits_total(), config)
    }

    fn reserve_status_with(&self, deposits: Money, config: &RegulatoryConfig) -> ReserveStatus {
        let required = deposits.scale(config.reserve_ratio);
        let reserves = self.balance(&AccountKind::Reserves);
        if reserves >= required {
            ReserveStatus::Satisfied
        } else {
            ReserveStatus::Shortfall(required - reserves)
        }
    }

    /// Lends `amount` to `customer`: loans and the customer's deposit both
    /// grow, creating deposit money.
    pub fn make_loan(
        &mut self,
        customer: &str,
        amount: Money,
        class: LoanClass,
        config: &RegulatoryConfig,
    ) -> Result<ReserveStatus, LedgerError> {
        Self::require_positive(amount)?;
        self.deposit(customer)?;
        let after = self.ratio_after_loan(class, amount, config);
        if !after.satisfies(config.capital_ratio) {
            let ratio = match after {
                CapitalRatio::Ratio(r) => r,
                CapitalRatio::Unbounded => f64::INFINITY,
            };
            return Err(LedgerError::CapitalLimit {
                ratio,
                minimum: config.capital_ratio,
            });
        }
        let status = self.reserve_status_with(self.deposits_total() + amount, config);
        if let (true, ReserveStatus::Shortfall(short)) = (config.enforce_reserves, status) {
            return Err(LedgerError::ReserveShortfall(short));
        }
        self.ledger.ensure(AccountKind::Loans(class));
        self.post(Posting::new(
            AccountKind::Deposit(customer.to_string()).name(),
            AccountKind::Loans(class).name(),
            amount,
            format!("loan to {customer}"),
        ))?;
        Ok(status)
    }

    /// Customer repays principal from their deposit, destroying deposit money.
    pub fn repay_principal(
        &mut self,
        customer: &str,
        amount: Money,
        class: LoanClass,
    ) -> Result<(), LedgerError> {
        Self::require_positive(amount)?;
        self.require_deposit(customer, amount)?;
        let outstanding = self.loans(class);
        if outstanding < amount {
            return Err(LedgerError::OverRepayment {
                outstanding,
                requested: amount,
            });
        }
        self.post(Posting::new(
            AccountKind::Loans(class).name(),
            AccountKind::Deposit(customer.to_string()).name(),
            amount,
            format!("principal repayment by {customer}"),
        ))
    }

    /// Customer pays interest: deposit down, interest income up.
    pub fn pay_interest(&mut self, customer: &str, amount: Money) -> Result<(), LedgerError> {
        Self::require_positive(amount)?;
        self.require_deposit(customer, amount)?;
        self.post(Posting::new(
            AccountKind::InterestIncome.name(),
            AccountKind::Deposit(customer.to_string()).name(),
            amount,
            format!("interest paid by {customer}"),
        ))
    }

    /// Books indexation growth of mortgage principal.
    pub fn apply_indexation(
        &mut self,
        amount: Money,
        treatment: IndexationTreatment,
    ) -> Result<(), LedgerError> {
        Self::require_positive(amount)?;
        let credit = match treatment {
            IndexationTreatment::NonCashIncome => AccountKind::NonCashIncome,
            IndexationTreatment::ContraAsset => AccountKind::IndexationContra,
        };
        self.post(Posting::new(
            credit.name(),
            AccountKind::Loans(LoanClass::Mortgage).name(),
            amount,
            format!("indexation ({})", treatment.as_str()),
        ))
    }

    /// Books a fall in indexed mortgage principal (deflation). The balancing
    /// account of `treatment` absorbs as much as it holds and capital takes the
    /// rest, which is returned as the loss.
    pub fn reverse_indexation(
        &mut self,
        amount: Money,
        treatment: IndexationTreatment,
    ) -> Result<Money, LedgerError> {
        Self::require_positive(amount)?;
        let outstanding = self.loans(LoanClass::Mortgage);
        if outstanding < amount {
            return Err(LedgerError::OverRepayment {
                outstanding,
                requested: amount,
            });
        }
        let offset = match treatment {
            IndexationTreatment::NonCashIncome => AccountKind::NonCashIncome,
            IndexationTreatment::ContraAsset => AccountKind::IndexationContra,
        };
        let absorbed = amount.min(self.balance(&offset));
        let loss = amount - absorbed;
        if self.capital() < loss {
            return Err(LedgerError::NegativeBalance(AccountKind::Capital.name()));
        }
        let loans = AccountKind::Loans(LoanClass::Mortgage).name();
        if absorbed.is_positive() {
            self.post(Posting::new(
                loans.clone(),
                offset.name(),
                absorbed,
                "deflation of indexed principal",
            ))?;
        }
        if loss.is_positive() {
            self.post(Posting::new(
                loans,
                AccountKind::Capital.name(),
                loss,
                "deflation loss",
            ))?;
        }
        Ok(loss)
    }

    /// Recognizes accrued non-cash income: a provision share goes to the loss
    /// allowance, `retention` of the rest to capital and the remainder is paid
    /// into `destination`'s deposit, where it becomes money.
    pub fn recognize_income(
        &mut self,
        amount: Money,
        destination: &str,
        retention: f64,
        config: &RegulatoryConfig,
    ) -> Result<Recognition, LedgerError> {
        self.recognize(
            IncomeSource::NonCashIncome,
            amount,
            destination,
            retention,
            config.loss_provision,
        )
    }

    /// Shared recognition path for non-cash and interest income.
    pub fn recognize(
        &mut self,
        source: IncomeSource,
        amount: Money,
        destination: &str,
        retention: f64,
        provision: f64,
    ) -> Result<Recognition, LedgerError> {
        Self::require_positive(amount)?;
        check_fraction(retention)?;
        check_fraction(provision)?;
        self.deposit(destination)?;
        let available = self.balance(&source.kind());
        if available < amount {
            return Err(LedgerError::InsufficientIncome {
                available,
                requested: amount,
            });
        }
        let provisioned = amount.scale(provision);
        let remaining = amount - provisioned;
        let retained = remaining.scale(retention);
        let paid_out = remaining - retained;
        let from = source.kind().name();
        let legs = [
            (
                AccountKind::LoanLossAllowance.name(),
                provisioned,
                "loss provision",
            ),
            (AccountKind::Capital.name(), retained, "retained earnings"),
            (
                AccountKind::Deposit(destination.to_string()).name(),
                paid_out,
                "income paid out",
            ),
        ];
        for (credit, leg, memo) in legs {
            if leg.is_positive() {
                self.post(Posting::new(credit, from.clone(), leg, memo))?;
            }
        }
        Ok(Recognition {
            provisioned,
            retained,
            paid_out,
        })
    }

    /// Moves non-cash income to interest income, e.g. once a borrower has
    /// paid the indexed amount in cash.
    pub fn realize_non_cash_income(&mut self, amount: Money) -> Result<(), LedgerError> {
        Self::require_positive(amount)?;
        self.post(Posting::new(
            AccountKind::InterestIncome.name(),
            AccountKind::NonCashIncome.name(),
            amount,
            "indexation collected in cash",
        ))
    }

    pub(crate) fn transfer_cash_to_reserves(&mut self, amount: Money) -> Result<(), LedgerError> {
        self.post(Posting::new(
            AccountKind::Cash.name(),
            AccountKind::Reserves.name(),
            amount,
            "cash to central bank reserves",
        ))
    }
}

/// Deposit money held across banks: customer deposits plus interest income
/// awaiting payout. Non-cash income, capital and reserves are excluded.
pub fn money_supply<'a>(banks: impl IntoIterator<Item = &'a BankState>) -> Money {
    banks
        .into_iter()
        .map(|b| b.deposits_total() + b.interest_income())
        .sum()
}
