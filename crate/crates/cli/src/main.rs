use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use indexlink_core::csv_io::{self, CsvError};
use indexlink_core::ledger::demo;
use indexlink_core::loan_engine::{self, LoanForm, LoanSpec, PaymentFrequency};
use indexlink_core::sim::{self, SimConfig};
use indexlink_core::{CpiSeries, YearMonth};

/// Environment variable that sets the `ledger-demo` output directory when
/// `--out-dir` is not given.
const OUT_DIR_ENV: &str = "INDEXLINK_OUT_DIR";

const SCHEDULE_SCHEMA: &str = "\
Input CPI CSV: header `period,index`; period `YYYY-MM`; index a decimal with `.`;
UTF-8; one row per month, strictly ascending with no gaps.

Output CSV: header `t,payment,interest,amortization,principal_nominal,principal_real`.
One row per payment period t = 1..N. Currency has two decimals, no thousands
separators. payment, interest and amortization are nominal; the principal columns
are the balances after the payment.

Rates are annual percentages (`--rate 4.2` is 4.2% a year), divided by the number
of payments per year for the per-period rate.";

const COMPARE_SCHEMA: &str = "\
Input CPI CSV: header `period,index` (see `schedule --help`).

Output CSV: header `form,years,total_cost`. One row per (form, term), forms in the
order given, terms in the order given. total_cost is the sum of nominal payments,
two decimals.";

const THRESHOLD_SCHEMA: &str = "\
Output CSV: header `years,rate,threshold`. rate and threshold are annual
percentages with two decimals. threshold is the smallest constant annual CPI
inflation (to one basis point) at which a monthly fixed-payment loan's nominal
principal ever rises above the amount borrowed.";

const LEDGER_SCHEMA: &str = "\
Standard output CSV: header `step,bank,account,side,balance`. Steps: 1 opening
(one bank), 2 loan of 500 to C1, 3 indexation of 500 at bank A booked as non-cash
income (two banks), 4 recognition of that income paid to C2 with 10% retained.
Bank `central` is the central bank. Contra accounts appear on the asset side
with a negative balance.

With --out-dir DIR (or INDEXLINK_OUT_DIR), also writes per step n:
  DIR/step<n>_snapshot.csv  header `bank,account,side,balance`
  DIR/step<n>_journal.csv   header `seq,bank,credit,debit,amount,memo`
seq numbers postings within each bank's own journal.";

const SIMULATE_SCHEMA: &str = "\
Config file: flat `key = value` lines; `#` starts a comment; unknown keys are
errors. Keys (defaults in brackets):
  periods [120]  treatment non-cash-income|contra-asset [non-cash-income]
  capital_cap none|<amount> [none]  lending_policy none|capital-constrained-max [none]
  retention [0.10]  q <quantity> [initial money supply]
  q_annual_decline <fraction>  q_path <v0,v1,...>  recognition_interval [12]
  initial_inflation [0.054]  loan_years [25]  base_rate [0.04]
  reserve_ratio [0.20]  capital_ratio [0.08]  loss_provision [0]
  initial_state two-bank-desk [two-bank-desk]
Fractions here are plain decimals (0.054 is 5.4%).

Output CSV: header `period,M,P,CPI,capital_total,loans_total,expansion_rate_annual`.
One row per period 1..periods. M, capital_total and loans_total have two
decimals; P, CPI and expansion_rate_annual have ten.";

#[derive(Debug, Parser)]
#[command(
    name = "indexlink",
    version,
    about = "Index-linked loan schedules, bank bookkeeping and money-supply simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Payment schedule of one loan as CSV.
    #[command(after_long_help = SCHEDULE_SCHEMA, after_help = SCHEDULE_SCHEMA)]
    Schedule(ScheduleArgs),
    /// Total cost per loan form and term as CSV.
    #[command(after_long_help = COMPARE_SCHEMA, after_help = COMPARE_SCHEMA)]
    Compare(CompareArgs),
    /// Inflation above which fixed-payment principal grows, per term.
    #[command(after_long_help = THRESHOLD_SCHEMA, after_help = THRESHOLD_SCHEMA)]
    Threshold(ThresholdArgs),
    /// Replays the four-step desk bookkeeping example.
    #[command(name = "ledger-demo", after_long_help = LEDGER_SCHEMA, after_help = LEDGER_SCHEMA)]
    LedgerDemo(LedgerDemoArgs),
    /// Runs the feedback simulation described by a config file.
    #[command(after_long_help = SIMULATE_SCHEMA, after_help = SIMULATE_SCHEMA)]
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
#[allow(clippy::enum_variant_names)]
enum FormArg {
    FixedAmortization,
    FixedPayment,
    FixedRate,
}

impl From<FormArg> for LoanForm {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::FixedAmortization => LoanForm::FixedAmortization,
            FormArg::FixedPayment => LoanForm::FixedPayment,
            FormArg::FixedRate => LoanForm::FixedRate,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FrequencyArg {
    Monthly,
    Annual,
}

impl From<FrequencyArg> for PaymentFrequency {
    fn from(f: FrequencyArg) -> Self {
        match f {
            FrequencyArg::Monthly => PaymentFrequency::Monthly,
            FrequencyArg::Annual => PaymentFrequency::Annual,
        }
    }
}

/// Where the CPI comes from.
#[derive(Debug, Args)]
struct SeriesArgs {
    /// CPI CSV file (`period,index`).
    #[arg(long, value_name = "FILE", conflicts_with = "inflation")]
    cpi: Option<PathBuf>,
    /// Synthetic CPI at this constant annual inflation, in percent.
    #[arg(long, value_name = "PCT", allow_negative_numbers = true)]
    inflation: Option<f64>,
    /// First month of the loan, `YYYY-MM`. Defaults to the first CPI month
    /// (2000-01 for synthetic series).
    #[arg(long, value_name = "YYYY-MM")]
    origination: Option<YearMonth>,
}

#[derive(Debug, Args)]
struct ScheduleArgs {
    #[arg(long, value_enum)]
    form: FormArg,
    #[arg(long)]
    principal: f64,
    /// Annual base rate in percent.
    #[arg(long, value_name = "PCT")]
    rate: f64,
    #[arg(long)]
    years: u32,
    #[arg(long, value_enum, default_value = "monthly")]
    frequency: FrequencyArg,
    #[command(flatten)]
    series: SeriesArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long)]
    principal: f64,
    /// Annual base rate in percent.
    #[arg(long, value_name = "PCT")]
    rate: f64,
    /// Terms in years.
    #[arg(long, value_delimiter = ',', default_value = "25,40")]
    years: Vec<u32>,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "fixed-amortization,fixed-payment,fixed-rate"
    )]
    forms: Vec<FormArg>,
    #[arg(long, value_enum, default_value = "monthly")]
    frequency: FrequencyArg,
    #[command(flatten)]
    series: SeriesArgs,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    /// Annual base rate in percent.
    #[arg(long, value_name = "PCT", default_value_t = 4.0)]
    rate: f64,
    /// Terms in years.
    #[arg(long, value_delimiter = ',', default_value = "25,40")]
    years: Vec<u32>,
}

#[derive(Debug, Args)]
struct LedgerDemoArgs {
    /// Also write per-step snapshot and journal CSV files here.
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Config file (`key = value` lines).
    config: PathBuf,
}

#[derive(Debug)]
struct CliError {
    kind: &'static str,
    message: String,
}

impl CliError {
    fn new(kind: &'static str, message: impl ToString) -> Self {
        CliError {
            kind,
            message: message.to_string(),
        }
    }
}

impl From<CsvError> for CliError {
    fn from(e: CsvError) -> Self {
        CliError::new("csv", e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::new("io", e)
    }
}

impl From<loan_engine::LoanError> for CliError {
    fn from(e: loan_engine::LoanError) -> Self {
        CliError::new("loan", e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = match cli.command {
        Command::Schedule(args) => cmd_schedule(&args, &mut out),
        Command::Compare(args) => cmd_compare(&args, &mut out),
        Command::Threshold(args) => cmd_threshold(&args, &mut out),
        Command::LedgerDemo(args) => cmd_ledger_demo(&args, &mut out),
        Command::Simulate(args) => cmd_simulate(&args, &mut out),
    }
    .and_then(|()| out.flush().map_err(CliError::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.message.replace('\n', " ");
            eprintln!("error: {}: {}", e.kind, message);
            ExitCode::FAILURE
        }
    }
}

fn percent(value: f64, name: &str) -> Result<f64, CliError> {
    if !value.is_finite() {
        return Err(CliError::new(
            "args",
            format!("--{name} must be a finite number"),
        ));
    }
    Ok(value / 100.0)
}

/// Resolves the CPI series and origination. `None` series when no indexed
/// form needs one.
fn load_series(
    args: &SeriesArgs,
    months: usize,
    required: bool,
) -> Result<(Option<CpiSeries>, YearMonth), CliError> {
    let fallback = YearMonth::new(2000, 1).expect("valid month");
    let series = match (&args.cpi, args.inflation) {
        (Some(path), _) => {
            let file = File::open(path)
                .map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))?;
            Some(csv_io::read_cpi_csv(file)?)
        }
        (None, Some(pct)) => {
            let start = args.origination.unwrap_or(fallback);
            let rate = percent(pct, "inflation")?;
            Some(
                CpiSeries::constant_annual(start, months, 100.0, rate)
                    .map_err(|e| CliError::new("series", e))?,
            )
        }
        (None, None) if required => {
            return Err(CliError::new(
                "args",
                "indexed loan forms need --cpi FILE or --inflation PCT",
            ))
        }
        (None, None) => None,
    };
    let origination = args
        .origination
        .or_else(|| series.as_ref().map(|s| s.first().0))
        .unwrap_or(fallback);
    Ok((series, origination))
}

fn build_schedule(
    spec: &LoanSpec,
    series: Option<&CpiSeries>,
) -> Result<loan_engine::Schedule, CliError> {
    match series {
        Some(series) => Ok(loan_engine::schedule(spec, series)?),
        None => Ok(loan_engine::fixed_rate_schedule(spec)?),
    }
}

fn term_periods(years: u32, frequency: PaymentFrequency) -> Result<u32, CliError> {
    years
        .checked_mul(frequency.periods_per_year())
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::new("args", format!("--years must be at least 1, got {years}")))
}

fn cmd_schedule(args: &ScheduleArgs, out: &mut impl Write) -> Result<(), CliError> {
    let form = LoanForm::from(args.form);
    let frequency = PaymentFrequency::from(args.frequency);
    let periods = term_periods(args.years, frequency)?;
    let months = args.years as usize * 12;
    let (series, origination) = load_series(&args.series, months, form.is_indexed())?;
    let spec = LoanSpec::new(
        form,
        args.principal,
        periods,
        percent(args.rate, "rate")?,
        frequency,
        origination,
    )?;
    let schedule = build_schedule(&spec, series.as_ref())?;
    csv_io::write_schedule_csv(out, &schedule)?;
    Ok(())
}

fn cmd_compare(args: &CompareArgs, out: &mut impl Write) -> Result<(), CliError> {
    let forms: Vec<LoanForm> = args.forms.iter().copied().map(LoanForm::from).collect();
    let frequency = PaymentFrequency::from(args.frequency);
    let longest = args.years.iter().copied().max().unwrap_or(0) as usize * 12;
    let required = forms.iter().any(|f| f.is_indexed());
    let (series, origination) = load_series(&args.series, longest, required)?;
    let rate = percent(args.rate, "rate")?;
    let mut rows = Vec::with_capacity(forms.len() * args.years.len());
    for &form in &forms {
        for &years in &args.years {
            let periods = term_periods(years, frequency)?;
            let spec = LoanSpec::new(form, args.principal, periods, rate, frequency, origination)?;
            let schedule = build_schedule(&spec, series.as_ref())?;
            rows.push((form, years, loan_engine::total_cost(&schedule)));
        }
    }
    writeln!(out, "form,years,total_cost")?;
    for (form, years, cost) in rows {
        writeln!(
            out,
            "{},{},{}",
            form.as_str(),
            years,
            csv_io::fmt_amount(cost)
        )?;
    }
    Ok(())
}

fn cmd_threshold(args: &ThresholdArgs, out: &mut impl Write) -> Result<(), CliError> {
    let rate = percent(args.rate, "rate")?;
    let mut rows = Vec::with_capacity(args.years.len());
    for &years in &args.years {
        rows.push((
            years,
            loan_engine::negative_amortization_threshold(years, rate)?,
        ));
    }
    writeln!(out, "years,rate,threshold")?;
    for (years, threshold) in rows {
        writeln!(out, "{},{:.2},{:.2}", years, args.rate, threshold * 100.0)?;
    }
    Ok(())
}

fn cmd_ledger_demo(args: &LedgerDemoArgs, out: &mut impl Write) -> Result<(), CliError> {
    let steps = demo::replay().map_err(|e| CliError::new("ledger", e))?;
    csv_io::write_step_snapshots_csv(&mut *out, steps.iter().map(|s| (s.step, &s.system)))?;
    let dir = args
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from));
    if let Some(dir) = dir {
        fs::create_dir_all(&dir)
            .map_err(|e| CliError::new("io", format!("{}: {e}", dir.display())))?;
        for step in &steps {
            let snapshot = create(&dir.join(format!("step{}_snapshot.csv", step.step)))?;
            csv_io::write_snapshot_csv(snapshot, &step.system)?;
            let journal = create(&dir.join(format!("step{}_journal.csv", step.step)))?;
            csv_io::write_journal_csv(journal, &step.system)?;
        }
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))
}

fn cmd_simulate(args: &SimulateArgs, out: &mut impl Write) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::new("io", format!("{}: {e}", args.config.display())))?;
    let config = SimConfig::parse(&text).map_err(|e| CliError::new("config", e))?;
    let run = sim::run(&config).map_err(|e| CliError::new("simulate", e))?;
    csv_io::write_run_csv(out, &run)?;
    Ok(())
}
