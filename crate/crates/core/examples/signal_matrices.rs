//! Hand-built signal-object matrices, their efforts and costs, and an
//! exhaustive check of the optimizer on the 2 x 2 case.
//!
//! ```text
//! cargo run --example signal_matrices
//! ```

use dancecorpus::least_effort::cost;
use dancecorpus::{effort_summary, minimize, OptimizerParams, SignalObjectMatrix};

fn main() {
    let examples = [
        ("one-to-one", SignalObjectMatrix::identity(4)),
        ("all synonyms", SignalObjectMatrix::ones(4, 4)),
        ("one word", SignalObjectMatrix::from_rows(&["1111", "0000", "0000", "0000"]).unwrap()),
        ("two pairs", SignalObjectMatrix::from_rows(&["1100", "0011", "0000", "0000"]).unwrap()),
    ];
    println!("{:<14} {:>6} {:>7} {:>6} {:>5} {:>8}", "matrix", "h_s", "h_r|s", "I", "L", "cost(.5)");
    for (name, m) in &examples {
        let s = effort_summary(m).unwrap();
        println!(
            "{name:<14} {:>6.3} {:>7.3} {:>6.3} {:>5.2} {:>8.3}",
            s.h_s,
            s.h_r_given_s,
            s.mutual_info,
            s.lexicon,
            cost(m, 0.5).unwrap()
        );
    }

    println!("\n2 x 2 optimum by enumeration vs hill climbing:");
    for lambda in [0.1, 0.41, 0.9] {
        let best = (1u8..16)
            .filter_map(|bits| {
                let cells = (0..4).map(|k| bits >> k & 1 == 1).collect();
                let m = SignalObjectMatrix::new(2, 2, cells).unwrap();
                m.first_unnamed_object().is_none().then(|| cost(&m, lambda).unwrap())
            })
            .fold(f64::INFINITY, f64::min);
        let found = minimize(lambda, 2, 2, &OptimizerParams::default(), 5).unwrap();
        println!("  lambda {lambda:<4} enumeration {best:.6}  climb {:.6}", found.cost);
    }
}
