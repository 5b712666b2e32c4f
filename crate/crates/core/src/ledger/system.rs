use crate::money::Money;

use super::account::{AccountKind, Ledger, Posting};
use super::bank::{money_supply, BankState};
use super::regulatory::{LoanClass, RegulatoryConfig, ReserveStatus};
use super::LedgerError;

/// Central bank books: cash issued on the asset side, each bank's reserve
/// deposit as a liability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralBankState {
    ledger: Ledger,
}

impl CentralBankState {
    /// Mirrors the reserve balances of `banks`.
    pub fn backing<'a>(banks: impl IntoIterator<Item = &'a BankState>) -> Self {
        let mut ledger = Ledger::new();
        let mut issued = Money::ZERO;
        for bank in banks {
            let reserves = bank.balance(&AccountKind::Reserves);
            ledger
                .set_opening(
                    AccountKind::ReserveDeposit(bank.name().to_string()),
                    reserves,
                )
                .expect("reserves are non-negative");
            issued += reserves;
        }
        ledger
            .set_opening(AccountKind::CashIssued, issued)
            .expect("non-negative");
        CentralBankState { ledger }
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    pub fn reserves_of(&self, bank: &str) -> Money {
        self.ledger
            .balance_or_zero(&AccountKind::ReserveDeposit(bank.to_string()))
    }

    pub fn accounting_gap(&self) -> Money {
        self.ledger.accounting_gap()
    }

    fn receive_reserves(&mut self, bank: &str, amount: Money) -> Result<(), LedgerError> {
        let account = AccountKind::ReserveDeposit(bank.to_string());
        self.ledger.ensure(account.clone());
        self.ledger.post(Posting::new(
            account.name(),
            AccountKind::CashIssued.name(),
            amount,
            format!("reserve deposit from {bank}"),
        ))
    }
}

/// Commercial banks together with their central bank.
#[derive(Debug, Clone, PartialEq)]
pub struct BankingSystem {
    pub banks: Vec<BankState>,
    pub central: CentralBankState,
    pub config: RegulatoryConfig,
}

impl BankingSystem {
    pub fn new(banks: Vec<BankState>, config: RegulatoryConfig) -> Result<Self, LedgerError> {
        config.validate()?;
        let central = CentralBankState::backing(&banks);
        Ok(BankingSystem {
            banks,
            central,
            config,
        })
    }

    pub fn bank(&self, name: &str) -> Result<&BankState, LedgerError> {
        self.banks
            .iter()
            .find(|b| b.name() == name)
            .ok_or_else(|| LedgerError::UnknownBank(name.to_string()))
    }

    pub fn bank_mut(&mut self, name: &str) -> Result<&mut BankState, LedgerError> {
        self.banks
            .iter_mut()
            .find(|b| b.name() == name)
            .ok_or_else(|| LedgerError::UnknownBank(name.to_string()))
    }

    pub fn money_supply(&self) -> Money {
        money_supply(&self.banks)
    }

    /// True when every ledger in the system satisfies the accounting equation.
    pub fn is_balanced(&self) -> bool {
        self.central.accounting_gap() == Money::ZERO
            && self.banks.iter().all(|b| b.accounting_gap() == Money::ZERO)
    }

    /// Moves bank cash into its central bank reserve account.
    pub fn top_up_reserves(&mut self, bank: &str, amount: Money) -> Result<(), LedgerError> {
        self.bank_mut(bank)?.transfer_cash_to_reserves(amount)?;
        self.central.receive_reserves(bank, amount)
    }

    /// [`BankState::make_loan`] followed, when configured, by a cash to
    /// reserves transfer covering as much of any shortfall as cash allows.
    pub fn make_loan(
        &mut self,
        bank: &str,
        customer: &str,
        amount: Money,
        class: LoanClass,
    ) -> Result<ReserveStatus, LedgerError> {
        let config = self.config.clone();
        let status = self
            .bank_mut(bank)?
            .make_loan(customer, amount, class, &config)?;
        if let (true, ReserveStatus::Shortfall(short)) = (config.top_up_reserves, status) {
            let cash = self.bank(bank)?.balance(&AccountKind::Cash);
            let moved = short.min(cash);
            if moved.is_positive() {
                self.top_up_reserves(bank, moved)?;
            }
            return Ok(self.bank(bank)?.reserve_check(&config));
        }
        Ok(status)
    }
}
