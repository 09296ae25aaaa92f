//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;

use writhe_core::corpus::{run_suite, SuiteConfig};

fn main() -> ExitCode {
    let config = SuiteConfig::default();
    println!(
        "acceptance suite: N = {}, seed = {}, family N = {}",
        config.n_samples, config.seed, config.family_samples
    );
    let outcomes = run_suite(&config, |o| println!("{}", o.line()));
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
