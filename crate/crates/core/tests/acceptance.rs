//! One PASS/FAIL line per acceptance criterion.

use std::io::Write;
use superint::verify::{run_suite, DEFAULT_SEED, SUITES};

#[test]
fn acceptance() {
    // written to the real stdout so the lines show without --nocapture
    let mut out = std::io::stdout().lock();
    let mut failed = Vec::new();
    for (id, _) in SUITES {
        let report = run_suite(id, DEFAULT_SEED);
        writeln!(out, "{}", report.line()).unwrap();
        for f in report.failures().take(5) {
            writeln!(out, "      failed: {} dev {:.3e} tol {:.0e}", f.label, f.deviation, f.tolerance).unwrap();
        }
        out.flush().unwrap();
        if !report.passed() {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "criteria failing: {failed:?}");
}
