//! Parse the bundled three-row observation table and recompute every
//! derived column.
//!
//! ```text
//! cargo run --example table_one
//! ```

use dancecorpus::ingest::{derive_direction, derive_xy, FormatConfig, Tolerances};
use dancecorpus::{parse_observations, validate_observation};

fn main() {
    let table = include_str!("../data/sample_dances.csv");
    let observations = parse_observations(table, &FormatConfig::default()).expect("bundled table parses");

    println!("{:>6} {:>8} {:>8} {:>7} {:>7} {:>6} {:>6}", "time", "dir1", "avg_dir", "x", "y", "avg_s", "issues");
    for obs in &observations {
        let dir1 = derive_direction(obs.angles[0], obs.azimuth).unwrap();
        let (x, y) = derive_xy(obs.distance_km, obs.avg_direction).unwrap();
        let issues = validate_observation(obs, &Tolerances::default());
        println!(
            "{:>6} {:>8.2} {:>8.2} {:>7.3} {:>7.3} {:>6.2} {:>6}",
            obs.time_of_day.to_string(),
            dir1,
            obs.avg_direction,
            x,
            y,
            obs.total_duration / f64::from(obs.n_dances),
            issues.len()
        );
    }

    // A transcription slip in one derived column is caught.
    let mut bad = observations[1].clone();
    bad.x_km = 0.14;
    for d in validate_observation(&bad, &Tolerances::default()) {
        println!("flagged {}: stated {} vs recomputed {:?}", d.field, d.stated, d.recomputed);
    }
}
