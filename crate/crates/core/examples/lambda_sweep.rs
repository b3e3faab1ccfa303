//! Sweep the speaker/hearer weighting and locate the jump in mutual
//! information.
//!
//! ```text
//! cargo run --release --example lambda_sweep [n] [seeds]
//! ```

use dancecorpus::{sweep, OptimizerParams, SweepConfig};

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("a positive integer"));
    let n = args.next().unwrap_or(24);
    let seeds = args.next().unwrap_or(5);
    let config = SweepConfig {
        grid: (0..=20).map(|k| k as f64 / 20.0).collect(),
        n,
        m: n,
        seeds_per_lambda: seeds,
        params: OptimizerParams::default(),
        seed: 1,
    };
    let result = sweep(&config).unwrap();
    println!("{:>5} {:>6} {:>6} {:>6} {:>6}", "lambda", "h_s", "h_r|s", "I", "L");
    for p in result.means() {
        let bar = "#".repeat((p.mutual_info * 30.0).round() as usize);
        println!(
            "{:>6.2} {:>6.3} {:>6.3} {:>6.3} {:>6.3} {bar}",
            p.lambda, p.h_s, p.h_r_given_s, p.mutual_info, p.lexicon
        );
    }
    if let Some(t) = &result.transition_estimate {
        println!("\ntransition at lambda = {:.3} +/- {:.3} (jump {:.3})", t.lambda_star, t.uncertainty, t.mutual_info_jump);
    }
}
