//! Runs the full acceptance suite and prints one pass/fail line per
//! criterion. Set `GASBALL_CRITERIA=3,8` to run a subset.

use gasball::validation::criteria::{run_suite, SuiteConfig, CRITERIA};

fn main() {
    let ids: Vec<u32> = match std::env::var("GASBALL_CRITERIA") {
        Ok(list) => list.split(',').filter_map(|s| s.trim().parse().ok()).collect(),
        Err(_) => CRITERIA.iter().map(|c| c.0).collect(),
    };
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let results = run_suite(&ids, &SuiteConfig::default(), workers);
    for r in &results {
        println!("{}", r.summary_line());
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
