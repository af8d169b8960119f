//! Every acceptance criterion at its stated tolerance, one line each.

use omega_ft::verify::{verify_with, Suite};

#[test]
fn acceptance_criteria() {
    let report = verify_with(Suite::All, |outcome| println!("{outcome}"));
    println!("{} passed, {} failed in {:.1} s", report.outcomes.len() - report.failures(), report.failures(), report.seconds);
    let failed: Vec<u8> = report.outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
