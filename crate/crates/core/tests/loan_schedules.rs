use indexlink_core::loan_engine::{
    fixed_amortization_principal_by_recursion, fixed_amortization_schedule, fixed_payment_schedule,
    fixed_rate_schedule, negative_amortization_threshold, principal_ever_exceeds_initial,
    principal_peak, schedule, total_cost, LoanError, LoanForm, LoanSpec,
};
use indexlink_core::{CpiSeries, YearMonth};

const X0: f64 = 20_000_000.0;

fn origin() -> YearMonth {
    YearMonth::new(2000, 1).unwrap()
}

fn spec(form: LoanForm, years: u32, rate: f64) -> LoanSpec {
    LoanSpec::monthly(form, X0, years, rate, origin()).unwrap()
}

fn constant(annual: f64, months: usize) -> CpiSeries {
    CpiSeries::constant_annual(origin(), months, 100.0, annual).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Spreadsheet-style recursion: nominal balance grown by the period's
/// inflation, interest on the grown balance, payment the real annuity scaled
/// by the index, last payment clears the balance.
fn oracle_fixed_payment(
    principal: f64,
    months: u32,
    annual_rate: f64,
    cpi: &[f64],
) -> Vec<(f64, f64, f64, f64)> {
    let r = annual_rate / 12.0;
    let real_payment = principal * r / (1.0 - (1.0 + r).powi(-(months as i32)));
    let mut balance = principal;
    let mut rows = Vec::new();
    for t in 1..=months as usize {
        let grown = balance * cpi[t] / cpi[t - 1];
        let interest = grown * r;
        let payment = if t == months as usize {
            grown + interest
        } else {
            real_payment * cpi[t] / cpi[0]
        };
        let amortization = payment - interest;
        balance = grown - amortization;
        rows.push((payment, interest, amortization, balance));
    }
    rows
}

#[test]
fn fixed_payment_matches_row_by_row_oracle() {
    let series = constant(0.054, 300);
    let cpi: Vec<f64> = series.observations().iter().map(|&(_, v)| v).collect();
    let expected = oracle_fixed_payment(X0, 300, 0.04, &cpi);
    let s = fixed_payment_schedule(&spec(LoanForm::FixedPayment, 25, 0.04), &series).unwrap();
    assert_eq!(s.rows().len(), 300);
    for (row, &(payment, interest, amortization, balance)) in s.rows().iter().zip(&expected) {
        assert!(rel(row.payment, payment) < 1e-9, "t={} payment", row.t);
        assert!(
            rel(row.interest_nominal, interest) < 1e-9,
            "t={} interest",
            row.t
        );
        assert!(
            rel(row.amortization_nominal, amortization) < 1e-9,
            "t={} amortization",
            row.t
        );
        assert!(
            (row.principal_nominal - balance).abs() < 1e-6,
            "t={} balance",
            row.t
        );
    }
}

#[test]
fn fixed_payment_frozen_values() {
    // 50-digit decimal evaluation of the same recursion.
    let s = fixed_payment_schedule(
        &spec(LoanForm::FixedPayment, 25, 0.04),
        &constant(0.054, 300),
    )
    .unwrap();
    let rows = s.rows();
    let frozen = [
        (
            1,
            106_031.053_961_321_6,
            66_959.488_151_366_72,
            20_048_774.879_600_06,
        ),
        (
            12,
            111_268.005_934_771_4,
            68_737.975_610_852_72,
            20_578_862.652_931_9,
        ),
        (
            120,
            178_622.351_702_419_2,
            80_820.471_351_558_51,
            24_148_339.525_116_69,
        ),
    ];
    for (t, payment, interest, balance) in frozen {
        let row = &rows[t - 1];
        assert!(rel(row.payment, payment) < 1e-10);
        assert!(rel(row.interest_nominal, interest) < 1e-10);
        assert!(rel(row.principal_nominal, balance) < 1e-10);
    }
    assert!(rel(total_cost(&s), 65_758_763.675_327_64) < 1e-10);
    let (t, peak) = principal_peak(&s).unwrap();
    assert_eq!(t, 130);
    assert!(rel(peak, 24_189_466.664_146_37) < 1e-10);
}

#[test]
fn fixed_amortization_frozen_total() {
    let s = fixed_amortization_schedule(
        &spec(LoanForm::FixedAmortization, 25, 0.04),
        &constant(0.054, 300),
    )
    .unwrap();
    assert!(rel(total_cost(&s), 57_935_955.429_297_46) < 1e-10);
    assert!(s.rows().last().unwrap().principal_nominal.abs() < 1e-6);
}

#[test]
fn forty_year_loan_peaks_later_in_its_term() {
    let s25 = fixed_payment_schedule(
        &spec(LoanForm::FixedPayment, 25, 0.04),
        &constant(0.054, 300),
    )
    .unwrap();
    let s40 = fixed_payment_schedule(
        &spec(LoanForm::FixedPayment, 40, 0.04),
        &constant(0.054, 480),
    )
    .unwrap();
    let (t25, _) = principal_peak(&s25).unwrap();
    let (t40, peak40) = principal_peak(&s40).unwrap();
    assert_eq!(t40, 310);
    assert!(rel(peak40, 42_154_904.095_453_83) < 1e-10);
    assert!(rel(total_cost(&s40), 137_552_438.866_476_4) < 1e-10);
    assert!(t40 as f64 / 480.0 > t25 as f64 / 300.0);
}

#[test]
fn fixed_rate_reference_totals() {
    let reference = [
        (0.04, 25, 31_670_200.0),
        (0.04, 40, 40_122_000.0),
        (0.05, 25, 35_075_400.0),
        (0.05, 40, 46_290_800.0),
        (0.07, 25, 42_406_700.0),
        (0.07, 40, 59_657_400.0),
    ];
    for (rate, years, total) in reference {
        let s = fixed_rate_schedule(&spec(LoanForm::FixedRate, years, rate)).unwrap();
        assert!(
            rel(total_cost(&s), total) < 1e-3,
            "{rate} {years}y: {}",
            total_cost(&s)
        );
    }
}

#[test]
fn closed_form_and_recursive_principal_agree() {
    let series = constant(0.12, 300);
    let sp = spec(LoanForm::FixedAmortization, 25, 0.05);
    let closed = fixed_amortization_schedule(&sp, &series).unwrap();
    let recursive = fixed_amortization_principal_by_recursion(&sp, &series).unwrap();
    // Scaled by the amount borrowed: the balance itself tends to zero.
    for (row, x) in closed.rows().iter().zip(&recursive) {
        assert!((row.principal_nominal - x).abs() / X0 < 1e-9, "t={}", row.t);
    }
}

#[test]
fn zero_inflation_indexed_forms_reduce_to_unindexed() {
    let flat = constant(0.0, 300);
    let indexed = schedule(&spec(LoanForm::FixedPayment, 25, 0.04), &flat).unwrap();
    let fixed = schedule(&spec(LoanForm::FixedRate, 25, 0.04), &flat).unwrap();
    for (a, b) in indexed.rows().iter().zip(fixed.rows()) {
        assert!(rel(a.payment, b.payment) < 1e-9);
        assert!(rel(a.principal_nominal, b.principal_nominal) < 1e-9);
        assert_eq!(a.principal_nominal, a.principal_real);
    }
}

#[test]
fn deflation_lowers_nominal_principal_below_real() {
    let s = fixed_payment_schedule(
        &spec(LoanForm::FixedPayment, 25, 0.04),
        &constant(-0.02, 300),
    )
    .unwrap();
    for row in &s.rows()[..299] {
        assert!(row.principal_nominal < row.principal_real);
        assert!(row.index_factor < 1.0);
    }
    assert!(s.negative_amortization_periods().is_empty());
}

#[test]
fn coverage_gap_is_reported() {
    let short = constant(0.05, 120);
    let err = fixed_payment_schedule(&spec(LoanForm::FixedPayment, 25, 0.04), &short).unwrap_err();
    assert!(matches!(err, LoanError::Coverage(_)));
}

#[test]
fn threshold_at_zero_rate_matches_brute_force_grid() {
    // With no interest every period repays X0/N real, so the nominal balance
    // first exceeds X0 where the index outgrows the real repayment.
    for years in [10, 25] {
        let threshold = negative_amortization_threshold(years, 0.0).unwrap();
        let mut grid = None;
        for bp in 1..=2000 {
            let pi = bp as f64 * 1e-4;
            if principal_ever_exceeds_initial(years, 0.0, pi).unwrap() {
                grid = Some(pi);
                break;
            }
        }
        let grid = grid.unwrap();
        assert!(
            (threshold - grid).abs() <= 1e-4 + 1e-12,
            "{years}y: {threshold} vs {grid}"
        );
        // Analytic first-period crossing: (1+pi)^(1/12) > N/(N-1).
        let n = years as f64 * 12.0;
        let analytic = (n / (n - 1.0)).powi(12) - 1.0;
        assert!(
            (threshold - analytic).abs() <= 1e-4,
            "{years}y: {threshold} vs {analytic}"
        );
    }
}

#[test]
fn threshold_brackets_the_crossing() {
    for years in [25, 40] {
        let t = negative_amortization_threshold(years, 0.04).unwrap();
        assert!(principal_ever_exceeds_initial(years, 0.04, t).unwrap());
        assert!(!principal_ever_exceeds_initial(years, 0.04, t - 1e-4).unwrap());
    }
    let t25 = negative_amortization_threshold(25, 0.04).unwrap();
    let t40 = negative_amortization_threshold(40, 0.04).unwrap();
    assert!(t40 < t25);
}
