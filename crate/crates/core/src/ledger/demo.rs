//! The four-step desk example: a loan to a bank's own customer, indexation
//! growth credited to non-cash income, and its recognition as income.

use crate::money::Money;

use super::bank::{BankState, IndexationTreatment, OpeningBalances};
use super::regulatory::{LoanClass, RegulatoryConfig};
use super::system::BankingSystem;
use super::LedgerError;

/// One bank with two customers; reserves 210, cash 790.
pub fn single_bank_opening() -> BankingSystem {
    let bank = desk_bank(
        "A",
        ["C1", "C2"],
        Money::from_units(210),
        Money::from_units(790),
    );
    BankingSystem::new(vec![bank], RegulatoryConfig::default()).expect("default config is valid")
}

/// Banks A and B with two customers each; reserves 20, cash 980.
pub fn two_bank_opening() -> BankingSystem {
    let reserves = Money::from_units(20);
    let cash = Money::from_units(980);
    let banks = vec![
        desk_bank("A", ["C1", "C2"], reserves, cash),
        desk_bank("B", ["C3", "C4"], reserves, cash),
    ];
    BankingSystem::new(banks, RegulatoryConfig::default()).expect("default config is valid")
}

fn desk_bank(name: &str, customers: [&str; 2], reserves: Money, cash: Money) -> BankState {
    let opening = OpeningBalances {
        loans: vec![(LoanClass::Mortgage, Money::from_units(10_000))],
        reserves,
        cash,
        deposits: customers
            .iter()
            .map(|c| (c.to_string(), Money::from_units(5_000)))
            .collect(),
        capital: Money::from_units(1_000),
    };
    BankState::with_opening(name, &opening).expect("desk bank balances")
}

#[derive(Debug, Clone)]
pub struct DemoStep {
    pub step: u32,
    pub label: &'static str,
    pub system: BankingSystem,
}

/// Replays the example and returns the system after each step.
pub fn replay() -> Result<Vec<DemoStep>, LedgerError> {
    let opening = single_bank_opening();

    let mut lent = opening.clone();
    lent.make_loan("A", "C1", Money::from_units(500), LoanClass::Mortgage)?;

    let mut indexed = two_bank_opening();
    indexed
        .bank_mut("A")?
        .apply_indexation(Money::from_units(500), IndexationTreatment::NonCashIncome)?;

    let mut recognized = indexed.clone();
    let config = recognized.config.clone();
    recognized
        .bank_mut("A")?
        .recognize_income(Money::from_units(500), "C2", 0.10, &config)?;

    Ok(vec![
        DemoStep {
            step: 1,
            label: "opening",
            system: opening,
        },
        DemoStep {
            step: 2,
            label: "loan",
            system: lent,
        },
        DemoStep {
            step: 3,
            label: "indexation",
            system: indexed,
        },
        DemoStep {
            step: 4,
            label: "recognition",
            system: recognized,
        },
    ])
}
