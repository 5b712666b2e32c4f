use std::collections::BTreeMap;
use std::fmt;

use crate::money::Money;

use super::regulatory::LoanClass;
use super::LedgerError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Asset,
    Liability,
    Equity,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Asset => "asset",
            Side::Liability => "liability",
            Side::Equity => "equity",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What an account represents. Determines its side and whether it is a
/// contra account.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AccountKind {
    Loans(LoanClass),
    /// Offsets indexation growth of mortgage loans without touching income.
    IndexationContra,
    /// Provision for loan losses, offsetting mortgage loans.
    LoanLossAllowance,
    Reserves,
    Cash,
    Deposit(String),
    NonCashIncome,
    InterestIncome,
    Capital,
    /// Central bank: notes and coin or other assets backing reserve deposits.
    CashIssued,
    /// Central bank: reserve deposit held by the named bank.
    ReserveDeposit(String),
}

impl AccountKind {
    pub fn side(&self) -> Side {
        match self {
            AccountKind::Loans(_)
            | AccountKind::IndexationContra
            | AccountKind::LoanLossAllowance
            | AccountKind::Reserves
            | AccountKind::Cash
            | AccountKind::CashIssued => Side::Asset,
            AccountKind::Deposit(_)
            | AccountKind::NonCashIncome
            | AccountKind::InterestIncome
            | AccountKind::ReserveDeposit(_) => Side::Liability,
            AccountKind::Capital => Side::Equity,
        }
    }

    /// Asset-side account carrying a credit balance.
    pub fn is_contra(&self) -> bool {
        matches!(
            self,
            AccountKind::IndexationContra | AccountKind::LoanLossAllowance
        )
    }

    /// Canonical account name.
    pub fn name(&self) -> String {
        match self {
            AccountKind::Loans(class) => format!("loans.{}", class.as_str()),
            AccountKind::IndexationContra => "indexation_contra".into(),
            AccountKind::LoanLossAllowance => "loan_loss_allowance".into(),
            AccountKind::Reserves => "reserves".into(),
            AccountKind::Cash => "cash".into(),
            AccountKind::Deposit(customer) => format!("deposit.{customer}"),
            AccountKind::NonCashIncome => "non_cash_income".into(),
            AccountKind::InterestIncome => "interest_income".into(),
            AccountKind::Capital => "capital".into(),
            AccountKind::CashIssued => "cash".into(),
            AccountKind::ReserveDeposit(bank) => format!("reserves.{bank}"),
        }
    }

    /// True when a debit raises the balance.
    fn debit_normal(&self) -> bool {
        self.side() == Side::Asset && !self.is_contra()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Account {
    pub kind: AccountKind,
    /// Balance on the account's normal side; never negative.
    pub balance: Money,
}

impl Account {
    pub fn side(&self) -> Side {
        self.kind.side()
    }

    pub fn is_contra(&self) -> bool {
        self.kind.is_contra()
    }

    /// Contribution to its side's total: contra balances count negatively.
    pub fn signed_balance(&self) -> Money {
        if self.is_contra() {
            -self.balance
        } else {
            self.balance
        }
    }
}

/// One double-entry transaction: a credit to one account and an equal debit to
/// another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Posting {
    pub credit: String,
    pub debit: String,
    pub amount: Money,
    pub memo: String,
}

impl Posting {
    pub fn new(
        credit: impl Into<String>,
        debit: impl Into<String>,
        amount: Money,
        memo: impl Into<String>,
    ) -> Self {
        Posting {
            credit: credit.into(),
            debit: debit.into(),
            amount,
            memo: memo.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JournalEntry {
    pub seq: u64,
    pub posting: Posting,
}

/// Named accounts plus the journal of every committed posting.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Ledger {
    accounts: BTreeMap<String, Account>,
    journal: Vec<JournalEntry>,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn open(&mut self, kind: AccountKind) -> Result<(), LedgerError> {
        let name = kind.name();
        if self.accounts.contains_key(&name) {
            return Err(LedgerError::DuplicateAccount(name));
        }
        self.accounts.insert(
            name,
            Account {
                kind,
                balance: Money::ZERO,
            },
        );
        Ok(())
    }

    pub fn ensure(&mut self, kind: AccountKind) {
        let name = kind.name();
        self.accounts.entry(name).or_insert(Account {
            kind,
            balance: Money::ZERO,
        });
    }

    /// Sets an opening balance directly, outside the journal. Callers must
    /// check the accounting equation once all opening balances are in place.
    pub(crate) fn set_opening(
        &mut self,
        kind: AccountKind,
        balance: Money,
    ) -> Result<(), LedgerError> {
        if balance.is_negative() {
            return Err(LedgerError::NegativeBalance(kind.name()));
        }
        self.ensure(kind.clone());
        self.accounts
            .get_mut(&kind.name())
            .expect("just ensured")
            .balance = balance;
        Ok(())
    }

    pub fn accounts(&self) -> impl Iterator<Item = &Account> {
        self.accounts.values()
    }

    pub fn account(&self, name: &str) -> Option<&Account> {
        self.accounts.get(name)
    }

    pub fn balance(&self, name: &str) -> Result<Money, LedgerError> {
        self.accounts
            .get(name)
            .map(|a| a.balance)
            .ok_or_else(|| LedgerError::UnknownAccount(name.to_string()))
    }

    /// Balance of an account, zero when it has never been opened.
    pub fn balance_or_zero(&self, kind: &AccountKind) -> Money {
        self.accounts
            .get(&kind.name())
            .map_or(Money::ZERO, |a| a.balance)
    }

    pub fn journal(&self) -> &[JournalEntry] {
        &self.journal
    }

    pub fn total(&self, side: Side) -> Money {
        self.accounts
            .values()
            .filter(|a| a.side() == side)
            .map(Account::signed_balance)
            .sum()
    }

    /// `assets - liabilities - equity`; zero for every reachable state.
    pub fn accounting_gap(&self) -> Money {
        self.total(Side::Asset) - self.total(Side::Liability) - self.total(Side::Equity)
    }

    fn applied(&self, name: &str, amount: Money, is_debit: bool) -> Result<Money, LedgerError> {
        let account = self
            .accounts
            .get(name)
            .ok_or_else(|| LedgerError::UnknownAccount(name.to_string()))?;
        let increases = is_debit == account.kind.debit_normal();
        let next = if increases {
            account.balance + amount
        } else {
            account.balance - amount
        };
        if next.is_negative() {
            return Err(LedgerError::NegativeBalance(name.to_string()));
        }
        Ok(next)
    }

    /// Commits a posting atomically: either both balances change or neither.
    pub fn post(&mut self, posting: Posting) -> Result<(), LedgerError> {
        if !posting.amount.is_positive() {
            return Err(LedgerError::NonPositiveAmount(posting.amount));
        }
        if posting.credit == posting.debit {
            return Err(LedgerError::SameAccount(posting.credit));
        }
        let credited = self.applied(&posting.credit, posting.amount, false)?;
        let debited = self.applied(&posting.debit, posting.amount, true)?;
        self.accounts
            .get_mut(&posting.credit)
            .expect("checked")
            .balance = credited;
        self.accounts
            .get_mut(&posting.debit)
            .expect("checked")
            .balance = debited;
        let seq = self.journal.len() as u64 + 1;
        self.journal.push(JournalEntry { seq, posting });
        debug_assert_eq!(self.accounting_gap(), Money::ZERO);
        Ok(())
    }
}
