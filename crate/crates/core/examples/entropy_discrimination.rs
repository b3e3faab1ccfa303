//! Is a corpus distinguishable from random text? z-scores of entropy and
//! Zipf exponent against an ensemble of baselines.
//!
//! ```text
//! cargo run --release --example entropy_discrimination
//! ```

use dancecorpus::entropy::ExponentFit;
use dancecorpus::{compare_to_random, generate_random_text, shannon_entropy, FitRange, RandomTextSpec, SymbolCorpus};

fn main() {
    println!("uniform over 8: {} bits", shannon_entropy(&[0.125; 8]).unwrap());
    println!("(1/2, 1/4, 1/4): {} bits\n", shannon_entropy(&[0.5, 0.25, 0.25]).unwrap());

    let spec = RandomTextSpec {
        alphabet_size: 26,
        space_probability: 0.18,
        char_count: 50_000,
        seed: 0,
    };
    let baselines: Vec<SymbolCorpus> = (1..=20)
        .map(|s| generate_random_text(&RandomTextSpec { seed: s, ..spec }).unwrap())
        .collect();
    let fit = ExponentFit {
        range: FitRange::new(10, 1000),
        ..ExponentFit::default()
    };

    let random = generate_random_text(&RandomTextSpec { seed: 100, ..spec }).unwrap();
    let n = random.len();
    let repetitive = SymbolCorpus::from_labels((0..n).map(|i| ["go", "stay", "go", "go"][i % 4]));
    for (name, subject) in [("random text", &random), ("repetitive", &repetitive)] {
        let r = compare_to_random(subject, &baselines, &fit).unwrap();
        println!(
            "{name:<12} entropy {:>7.3} z={:>9.2}   exponent z={}",
            r.subject.unigram_entropy,
            r.entropy.z_score.unwrap_or(f64::NAN),
            r.zipf_exponent.z_score.map_or("n/a".into(), |z| format!("{z:.2}"))
        );
    }
}
