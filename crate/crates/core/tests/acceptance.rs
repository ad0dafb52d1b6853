//! Runs the eleven acceptance criteria and prints one PASS/FAIL line each.

use lorcone::acceptance;

#[test]
fn acceptance_criteria() {
    let mut failed = vec![];
    for id in 1..=acceptance::CRITERIA.len() {
        let out = acceptance::run(id);
        println!("{}", out.line());
        if !out.passed {
            failed.push(out.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
