//! How many bits a quantization scheme can carry per word.
//!
//! ```text
//! cargo run --example info_budget
//! ```

use dancecorpus::articulator::log_spaced_edges;
use dancecorpus::{info_budget, QuantizationScheme};

fn main() {
    let with_workers = QuantizationScheme {
        direction_bins: 32,
        distance_edges: log_spaced_edges(0.1, 12.0, 23),
        include_pollen: false,
        worker_bins: Some(6),
    };
    let layouts = [
        ("default", QuantizationScheme::default()),
        ("32 x 24 x 6 workers", with_workers),
        (
            "8 directions, 4 distances",
            QuantizationScheme {
                direction_bins: 8,
                distance_edges: vec![0.5, 1.0, 2.0],
                include_pollen: false,
                worker_bins: None,
            },
        ),
    ];
    for (name, scheme) in &layouts {
        let bits = info_budget(scheme).unwrap();
        println!(
            "{name:<28} {:>6} words {bits:>6.2} bits  fingerprint {}",
            scheme.capacity(),
            scheme.fingerprint()
        );
    }
    println!("12 whole bits address {} words", 1u32 << 12);
}
