//! Runs the certification suite on CP^4 with a small trial count.

use kpflow::ambient::{make_space, Field};
use kpflow::lab::{run_suite, suite_passes, ParamsGrid, Tier};

fn main() {
    let space = make_space(Field::Complex, 4).unwrap();
    let reports = run_suite(&space, &ParamsGrid::default(), 20_000, 7);
    for r in &reports {
        let tier = match r.tier {
            Tier::Certified => "certified",
            Tier::Exploratory => "exploratory",
            Tier::Informational => "info",
        };
        println!(
            "{:<12} {:<48} {:>7} trials {:>3} violations  min slack {:>12.4e}  {}",
            tier,
            r.claim_id,
            r.trials,
            r.violations,
            r.min_slack,
            r.detail.as_deref().unwrap_or("")
        );
    }
    println!("certified claims pass: {}", suite_passes(&reports));
}
