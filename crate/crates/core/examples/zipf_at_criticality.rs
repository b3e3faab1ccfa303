//! Signal frequencies follow Zipf's law only near the transition.
//!
//! ```text
//! cargo run --release --example zipf_at_criticality
//! ```

use dancecorpus::least_effort::zipf_at_transition;
use dancecorpus::{sweep, OptimizerParams, SweepConfig};

fn main() {
    let config = SweepConfig {
        grid: vec![0.2, 0.38, 0.40, 0.41, 0.42, 0.44, 0.7, 1.0],
        n: 48,
        m: 48,
        seeds_per_lambda: 4,
        params: OptimizerParams::default(),
        seed: 3,
    };
    let result = sweep(&config).unwrap();
    for (name, window) in [("below", (0.2, 0.2)), ("critical", (0.38, 0.44)), ("above", (0.7, 0.7)), ("lambda=1", (1.0, 1.0))] {
        let report = zipf_at_transition(&result, window).unwrap();
        let median = report.median_exponent.map_or("none".into(), |a| format!("{a:.3}"));
        println!(
            "{name:<9} [{:.2}, {:.2}]  fitted {}/{}  median exponent {median}",
            window.0,
            window.1,
            report.accepted,
            report.fits.len()
        );
    }
    let run = result.runs.iter().find(|r| r.lambda == 0.41).unwrap();
    println!("\nsignal ranks of one run at lambda 0.41:");
    for e in run.signal_ranks.entries.iter().take(8) {
        println!("  {:>3} {:.4}", e.rank, e.frequency);
    }
}
