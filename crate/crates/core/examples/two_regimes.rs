//! A rank-frequency curve made of two power laws, and the breakpoint search.
//!
//! ```text
//! cargo run --example two_regimes
//! ```

use dancecorpus::zipf::{detect_regimes, RankFrequencyTable};

fn main() {
    // slope 1 up to rank 100, slope 2 after, continuous at the joint
    let weights = (1..=1000u64).map(|i| {
        let r = i as f64;
        let w = if i <= 100 { 1.0 / r } else { 100.0 / (r * r) };
        (i, w)
    });
    let table = RankFrequencyTable::from_weights(weights).unwrap();
    let split = detect_regimes(&table).unwrap();
    println!("breakpoint rank  {}", split.breakpoint);
    println!("head exponent    {:.3}", split.head.exponent_a);
    println!("tail exponent    {:.3}", split.tail.exponent_a);
    println!("single exponent  {:.3}", split.single.exponent_a);
    println!("rss improvement  {:.3} -> two regimes: {}", split.rss_improvement, split.two_regimes);

    let pure = RankFrequencyTable::from_weights((1..=1000u64).map(|i| (i, 1.0 / i as f64))).unwrap();
    let split = detect_regimes(&pure).unwrap();
    println!("\npure 1/i: improvement {:.3}, two regimes: {}", split.rss_improvement, split.two_regimes);
}
