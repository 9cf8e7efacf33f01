//! Acceptance battery: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::ExitCode;

use mhessian::battery::{criterion, suite_document, CRITERIA, SUITE_CRITERIA};
use mhessian::operator::Parameters;
use mhessian::report::{CriterionOutcome, RunConfig};

const SEED: u64 = 7;

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn print(outcome: &CriterionOutcome) {
    println!(
        "criterion {:>2}: {} - {}",
        outcome.id,
        status(outcome.passed),
        outcome.title
    );
    for f in outcome.failures() {
        println!("    {f}");
    }
    for n in &outcome.notes {
        println!("    note: {n}");
    }
}

fn determinism() -> bool {
    let config = || {
        let mut c = RunConfig::new("suite", Parameters::new(2, 1, 0.0).unwrap());
        c.seed = SEED;
        c
    };
    let (a, b) = match (suite_document(config()), suite_document(config())) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            println!("criterion 13: FAIL - {} ({e})", CRITERIA[12].1);
            return false;
        }
    };
    let passed = a.determinism_hash == b.determinism_hash
        && a.canonical_json().unwrap() == b.canonical_json().unwrap()
        && a.compute_hash().unwrap() == a.determinism_hash;
    println!(
        "criterion 13: {} - {} ({})",
        status(passed),
        CRITERIA[12].1,
        a.determinism_hash
    );
    passed
}

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for id in SUITE_CRITERIA {
        match criterion(id, SEED) {
            Ok(outcome) => {
                print(&outcome);
                if !outcome.passed {
                    failed.push(id);
                }
            }
            Err(e) => {
                println!(
                    "criterion {id:>2}: FAIL - {} ({e})",
                    CRITERIA[id as usize - 1].1
                );
                failed.push(id);
            }
        }
    }
    if !determinism() {
        failed.push(13);
    }
    println!();
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!(
            "acceptance: {} of {} criteria fail: {failed:?}",
            failed.len(),
            CRITERIA.len()
        );
        ExitCode::FAILURE
    }
}
