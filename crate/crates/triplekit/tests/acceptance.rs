//! One line per acceptance criterion, with the limits of the default run.

use triplekit::suites::{budget, run_all, RunConfig};

#[test]
fn acceptance() {
    let cfg = RunConfig::default();
    let mut failed = Vec::new();
    for (outcome, elapsed) in run_all(&cfg) {
        let in_budget = budget(outcome.id).is_none_or(|b| elapsed <= b);
        let pass = outcome.pass() && in_budget;
        let time = match budget(outcome.id) {
            Some(b) => format!("{:.2} s of {} s", elapsed.as_secs_f64(), b.as_secs()),
            None => format!("{:.2} s", elapsed.as_secs_f64()),
        };
        println!("criterion {} ({}): {} [{time}]", outcome.id, outcome.name, if pass { "PASS" } else { "FAIL" });
        for c in outcome.checks.iter().filter(|c| !c.pass) {
            println!("    {}", c.line());
        }
        if let Some(e) = &outcome.error {
            println!("    error: {e}");
        }
        if !pass {
            failed.push(outcome.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
