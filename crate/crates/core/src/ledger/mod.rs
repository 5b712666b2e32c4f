//! Double-entry bookkeeping for commercial banks and a central bank.
//!
//! All amounts are integer minor units, so the accounting equation
//! `assets = liabilities + equity` holds exactly after every posting.

mod account;
mod bank;
pub mod demo;
mod regulatory;
mod system;

pub use account::{Account, AccountKind, JournalEntry, Ledger, Posting, Side};
pub use bank::{
    money_supply, BankState, IncomeSource, IndexationTreatment, OpeningBalances, Recognition,
};
pub use regulatory::{CapitalRatio, LoanClass, RegulatoryConfig, ReserveStatus};
pub use system::{BankingSystem, CentralBankState};

use thiserror::Error;

use crate::money::Money;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LedgerError {
    #[error("unknown account `{0}`")]
    UnknownAccount(String),
    #[error("unknown customer `{0}`")]
    UnknownCustomer(String),
    #[error("unknown bank `{0}`")]
    UnknownBank(String),
    #[error("unknown loan class `{0}`")]
    UnknownLoanClass(String),
    #[error("unknown indexation treatment `{0}`")]
    UnknownTreatment(String),
    #[error("account `{0}` already exists")]
    DuplicateAccount(String),
    #[error("amount must be positive, got {0}")]
    NonPositiveAmount(Money),
    #[error("posting credits and debits the same account `{0}`")]
    SameAccount(String),
    #[error("posting would leave `{0}` with a negative balance")]
    NegativeBalance(String),
    #[error("deposit of {customer} is {balance}, cannot pay {requested}")]
    InsufficientDeposit {
        customer: String,
        balance: Money,
        requested: Money,
    },
    #[error("repayment {requested} exceeds outstanding loans {outstanding}")]
    OverRepayment {
        outstanding: Money,
        requested: Money,
    },
    #[error("income account holds {available}, cannot recognize {requested}")]
    InsufficientIncome { available: Money, requested: Money },
    #[error("fraction {0} outside [0, 1]")]
    InvalidFraction(f64),
    #[error("capital ratio would fall to {ratio:.4}, below the minimum {minimum}")]
    CapitalLimit { ratio: f64, minimum: f64 },
    #[error("reserves short of requirement by {0}")]
    ReserveShortfall(Money),
    #[error("opening balances do not balance (assets - liabilities - equity = {0})")]
    Unbalanced(Money),
}
