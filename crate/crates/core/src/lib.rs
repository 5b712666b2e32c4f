//! Index-linked loan mathematics, bank bookkeeping of loan indexation, and a
//! closed-loop simulation of how that bookkeeping feeds the money supply.

pub mod csv_io;
pub mod indexation;
pub mod ledger;
pub mod loan_engine;
pub mod money;
pub mod period;
pub mod sim;

pub use indexation::{applied_index, CpiSeries, IndexationError, IndexationPolicy};
pub use ledger::{BankState, BankingSystem, IndexationTreatment, LedgerError, Posting};
pub use loan_engine::{LoanError, LoanForm, LoanSpec, PaymentFrequency, Schedule, ScheduleRow};
pub use money::Money;
pub use period::YearMonth;
