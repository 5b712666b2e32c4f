//! CSV readers and writers for CPI series, schedules, ledger snapshots,
//! posting journals and simulation runs.

use std::io::{Read, Write};

use thiserror::Error;

use crate::indexation::{CpiSeries, IndexationError};
use crate::ledger::BankingSystem;
use crate::loan_engine::Schedule;
use crate::period::YearMonth;
use crate::sim::SimRun;

pub const CPI_HEADER: [&str; 2] = ["period", "index"];
pub const SCHEDULE_HEADER: [&str; 6] = [
    "t",
    "payment",
    "interest",
    "amortization",
    "principal_nominal",
    "principal_real",
];
pub const SNAPSHOT_HEADER: [&str; 4] = ["bank", "account", "side", "balance"];
pub const JOURNAL_HEADER: [&str; 6] = ["seq", "bank", "credit", "debit", "amount", "memo"];
pub const RUN_HEADER: [&str; 7] = [
    "period",
    "M",
    "P",
    "CPI",
    "capital_total",
    "loans_total",
    "expansion_rate_annual",
];

/// Bank label used for central bank rows in snapshots and journals.
pub const CENTRAL_BANK: &str = "central";

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("header must be `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("series: {0}")]
    Series(#[from] IndexationError),
}

/// Reads `period,index` rows (`YYYY-MM`, decimal index) in strictly
/// ascending consecutive months.
pub fn read_cpi_csv<R: Read>(reader: R) -> Result<CpiSeries, CsvError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != CPI_HEADER {
        return Err(CsvError::Header {
            expected: CPI_HEADER.join(","),
            found: headers.iter().collect::<Vec<_>>().join(","),
        });
    }
    let mut observations = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let row_err = |message: String| CsvError::Row { line, message };
        if record.len() != 2 {
            return Err(row_err(format!(
                "expected 2 fields, found {}",
                record.len()
            )));
        }
        let period: YearMonth = record[0].parse().map_err(|e| row_err(format!("{e}")))?;
        let index: f64 = record[1]
            .parse()
            .map_err(|_| row_err(format!("index `{}` is not a decimal number", &record[1])))?;
        if !index.is_finite() {
            return Err(row_err(format!("index `{}` is not finite", &record[1])));
        }
        observations.push((period, index));
    }
    Ok(CpiSeries::new(observations)?)
}

/// Two decimals, with negative zero printed as `0.00`.
pub fn fmt_amount(value: f64) -> String {
    let s = format!("{value:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

fn fmt_ratio(value: f64) -> String {
    let s = format!("{value:.10}");
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        "0.0000000000".to_string()
    } else {
        s
    }
}

/// Nominal payment, interest and amortization per period, with nominal and
/// real principal after the payment.
pub fn write_schedule_csv<W: Write>(writer: W, schedule: &Schedule) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SCHEDULE_HEADER)?;
    for row in schedule.rows() {
        w.write_record([
            row.t.to_string(),
            fmt_amount(row.payment),
            fmt_amount(row.interest_nominal),
            fmt_amount(row.amortization_nominal),
            fmt_amount(row.principal_nominal),
            fmt_amount(row.principal_real),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Every account of every bank, then the central bank. Contra accounts are
/// listed on the asset side with a negative balance.
pub fn write_snapshot_csv<W: Write>(writer: W, system: &BankingSystem) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SNAPSHOT_HEADER)?;
    write_snapshot_rows(&mut w, system, None)?;
    w.flush()?;
    Ok(())
}

/// Snapshot rows for several labelled states, with a leading `step` column.
pub fn write_step_snapshots_csv<'a, W: Write>(
    writer: W,
    steps: impl IntoIterator<Item = (u32, &'a BankingSystem)>,
) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["step"];
    header.extend(SNAPSHOT_HEADER);
    w.write_record(header)?;
    for (step, system) in steps {
        write_snapshot_rows(&mut w, system, Some(step))?;
    }
    w.flush()?;
    Ok(())
}

fn write_snapshot_rows<W: Write>(
    w: &mut csv::Writer<W>,
    system: &BankingSystem,
    step: Option<u32>,
) -> Result<(), CsvError> {
    let ledgers = system
        .banks
        .iter()
        .map(|b| (b.name(), b.ledger()))
        .chain(std::iter::once((CENTRAL_BANK, system.central.ledger())));
    for (bank, ledger) in ledgers {
        for account in ledger.accounts() {
            let mut record = Vec::with_capacity(5);
            if let Some(step) = step {
                record.push(step.to_string());
            }
            record.push(bank.to_string());
            record.push(account.kind.name());
            record.push(account.side().as_str().to_string());
            record.push(account.signed_balance().to_string());
            w.write_record(record)?;
        }
    }
    Ok(())
}

/// Committed postings per bank in booking order, then the central bank.
/// `seq` is the position within the owning ledger's journal.
pub fn write_journal_csv<W: Write>(writer: W, system: &BankingSystem) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(JOURNAL_HEADER)?;
    let ledgers = system
        .banks
        .iter()
        .map(|b| (b.name(), b.ledger()))
        .chain(std::iter::once((CENTRAL_BANK, system.central.ledger())));
    for (bank, ledger) in ledgers {
        for entry in ledger.journal() {
            let p = &entry.posting;
            w.write_record([
                entry.seq.to_string(),
                bank.to_string(),
                p.credit.clone(),
                p.debit.clone(),
                p.amount.to_string(),
                p.memo.clone(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One row per simulated period.
pub fn write_run_csv<W: Write>(writer: W, run: &SimRun) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RUN_HEADER)?;
    for r in &run.records {
        w.write_record([
            r.period.to_string(),
            r.money_supply.to_string(),
            fmt_ratio(r.price_level),
            fmt_ratio(r.cpi),
            r.capital_total.to_string(),
            r.loans_total.to_string(),
            fmt_ratio(r.expansion_rate_annual),
        ])?;
    }
    w.flush()?;
    Ok(())
}
