//! Every acceptance criterion at its pinned tolerance. One summary line per
//! criterion, then one line per individual check. Exits non-zero if any check fails.

use std::process::ExitCode;
use std::time::Instant;

use halfspace_casimir::verify::{criterion, diagnostics, VerifyConfig, CRITERIA};

fn main() -> ExitCode {
    let cfg = VerifyConfig::default();
    let mut failed = Vec::new();
    for n in CRITERIA {
        let start = Instant::now();
        let (passed, lines) = match criterion(n, &cfg) {
            Ok(outcomes) => (
                outcomes.iter().all(|o| o.passed),
                outcomes.iter().map(|o| format!("    {o}")).collect::<Vec<_>>(),
            ),
            Err(e) => (false, vec![format!("    error: {e}")]),
        };
        let verdict = if passed { "PASS" } else { "FAIL" };
        println!("criterion {n:>2}: {verdict}  ({:.2} s)", start.elapsed().as_secs_f64());
        for l in lines {
            println!("{l}");
        }
        if !passed {
            failed.push(n);
        }
    }
    if let Ok(notes) = diagnostics(&cfg) {
        for n in notes {
            println!("note: {n}");
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", CRITERIA.count());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
