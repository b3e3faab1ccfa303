//! Turn observations into words, then into a corpus with statistics.
//!
//! ```text
//! cargo run --example articulate_dances
//! ```

use dancecorpus::ingest::{calibrate_distance, CalibrationTable, FormatConfig};
use dancecorpus::{articulate, entropy_report, parse_observations, rank_frequency, QuantizationScheme};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let table = parse_observations(include_str!("../data/sample_dances.csv"), &FormatConfig::default()).unwrap();
    let scheme = QuantizationScheme::default();
    let corpus = articulate(&table, &scheme).unwrap();
    for (obs, &t) in table.iter().zip(&corpus.tokens) {
        println!("{:7.2} deg {:5.2} km -> {}", obs.avg_direction, obs.distance_km, corpus.label(t).unwrap());
    }

    // Distances read off a duration calibration for a longer synthetic log:
    // a hive working two feeders, with per-dance scatter.
    let calibration = CalibrationTable::new(vec![(1.0, 0.2), (2.0, 0.6), (3.6, 1.3), (6.0, 3.0)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut log = Vec::new();
    for _ in 0..400 {
        let mut obs = table[0].clone();
        let (dir, dur) = if rng.gen_bool(0.7) { (350.0, 2.9) } else { (162.0, 3.6) };
        obs.avg_direction = (dir + rng.gen_range(-8.0..8.0f64)).rem_euclid(360.0);
        obs.avg_duration = dur + rng.gen_range(-0.6..0.6);
        obs.distance_km = calibrate_distance(obs.avg_duration, &calibration);
        obs.pollen = rng.gen_bool(0.8);
        log.push(obs);
    }
    let corpus = articulate(&log, &scheme).unwrap();
    let ranks = rank_frequency(&corpus).unwrap();
    println!("\n{} tokens, {} word types", corpus.len(), corpus.vocabulary_size());
    for e in ranks.entries.iter().take(5) {
        println!("  rank {:>2} {:<16} {:.3}", e.rank, corpus.label(e.word).unwrap(), e.frequency);
    }
    let report = entropy_report(&corpus, 3).unwrap();
    println!("unigram entropy {:.3} bits", report.unigram_entropy);
    for (n, h) in &report.conditional_entropies {
        println!("  h{n} = {h:.3}");
    }
}
