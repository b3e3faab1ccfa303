//! Monkey-typing text: letters and spaces at random still give a
//! power-law word distribution.
//!
//! ```text
//! cargo run --release --example random_language
//! ```

use dancecorpus::randlang::expected_exponent;
use dancecorpus::{fit_power_law, generate_random_text, rank_frequency, FitMethod, FitRange, RandomTextSpec};

fn main() {
    for (m, q) in [(26, 0.18), (5, 0.2), (2, 0.3)] {
        let spec = RandomTextSpec {
            alphabet_size: m,
            space_probability: q,
            char_count: 1_000_000,
            seed: 9,
        };
        let corpus = generate_random_text(&spec).unwrap();
        let table = rank_frequency(&corpus).unwrap();
        let max = table.len().min(1000);
        let fit = fit_power_law(&table, FitRange::new(10, max), FitMethod::LoglogOls).unwrap();
        println!(
            "M={m:<3} q={q:<5} words={:<7} types={:<7} fitted {:.3}  predicted {:.3}",
            corpus.len(),
            corpus.vocabulary_size(),
            fit.exponent_a,
            expected_exponent(&spec).unwrap()
        );
    }
    let spec = RandomTextSpec {
        alphabet_size: 26,
        space_probability: 0.3,
        char_count: 60,
        seed: 2,
    };
    let sample = generate_random_text(&spec).unwrap();
    let words: Vec<&str> = sample.tokens.iter().map(|&t| sample.label(t).unwrap()).collect();
    println!("\nsample: {}", words.join(" "));
}
