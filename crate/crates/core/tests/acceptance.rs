//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every criterion is reported even when
//! one fails. Criteria listed in `EXPECTED_FAILURES` are known to be
//! unattainable as stated (see the README); their checks run unchanged and
//! print FAIL. The process fails on any other failure, and also if an
//! expected failure starts passing, so the list cannot go stale.

use std::process::ExitCode;
use std::time::Instant;

use distext::verify::{run_criterion, CheckRow};

const CRITERIA: [(u8, &str); 10] = [
    (1, "D=2 tadpole equals log(mu2)/(4 pi), mass independent"),
    (2, "D=4 tadpole closed form"),
    (3, "Pauli-Villars subtraction equals the D=2 tadpole"),
    (
        4,
        "subtracted direct pairing equals the integrated form-A extension",
    ),
    (5, "form A and form B integrate to the same value"),
    (6, "mass series resums to K0(m x)/(2 pi)"),
    (
        7,
        "alternating binomial sum and infrared delta coefficients",
    ),
    (8, "boundary profile partition of unity"),
    (9, "mu2 = 1 gives exact zeros"),
    (10, "tadpole differences follow log(mu2_1/mu2_2)/(4 pi)"),
];

/// The integrated form-A evaluator is a total derivative whose boundary
/// terms vanish, so it integrates to zero while the direct pairing does not.
const EXPECTED_FAILURES: [u8; 1] = [4];

fn print_failed(rows: &[&CheckRow]) {
    for r in rows {
        println!(
            "    {}: expected {:.17e}, got {:.17e}, |diff| {:.3e}, tol {:.1e}{}",
            r.name,
            r.expected,
            r.got,
            r.abs_diff(),
            r.tolerance,
            r.error
                .as_deref()
                .map(|e| format!(" ({e})"))
                .unwrap_or_default()
        );
    }
}

fn main() -> ExitCode {
    let mut unexpected = Vec::new();
    for (n, title) in CRITERIA {
        let start = Instant::now();
        let rows = run_criterion(n);
        let failed: Vec<&CheckRow> = rows.iter().filter(|r| !r.passed).collect();
        let passed = !rows.is_empty() && failed.is_empty();
        let expected_fail = EXPECTED_FAILURES.contains(&n);
        let note = match (passed, expected_fail) {
            (false, true) => " (expected failure)",
            (true, true) => " (unexpected pass)",
            _ => "",
        };
        println!(
            "criterion {n:>2} {} {title}: {} rows, {:.2?}{note}",
            if passed { "PASS" } else { "FAIL" },
            rows.len(),
            start.elapsed(),
        );
        print_failed(&failed);
        if passed == expected_fail {
            unexpected.push(n);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
