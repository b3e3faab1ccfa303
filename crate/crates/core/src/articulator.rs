//! Quantization of dance observations into discrete words.
//!
//! A word bundles the features of one dance bout: a circular direction bin,
//! a distance bin and, optionally, the pollen flag. Components are packed
//! into a single token id by mixed-radix encoding, direction varying
//! fastest.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::SymbolCorpus;
use crate::ingest::DanceObservation;

#[derive(Debug, Error, PartialEq)]
pub enum ArticulateError {
    #[error("invalid scheme: {0}")]
    Scheme(String),
    #[error("row {row}: field `{field}` is required by the scheme but not usable ({value})")]
    MissingField {
        row: usize,
        field: &'static str,
        value: f64,
    },
    #[error("scheme asks for {0} worker bins but the observations carry no recruit-count column")]
    WorkerChannelUnavailable(u32),
    #[error("{0} must be finite")]
    NonFinite(&'static str),
}

/// Bin layout that maps continuous dance parameters to word components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizationScheme {
    pub direction_bins: u32,
    /// Interior edges in km; `len + 1` bins including both overflow bins.
    pub distance_edges: Vec<f64>,
    #[serde(default)]
    pub include_pollen: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worker_bins: Option<u32>,
}

impl Default for QuantizationScheme {
    fn default() -> Self {
        QuantizationScheme {
            direction_bins: 32,
            distance_edges: log_spaced_edges(0.1, 10.0, 12),
            include_pollen: true,
            worker_bins: None,
        }
    }
}

/// `count` edges spaced geometrically from `lo` to `hi` inclusive.
pub fn log_spaced_edges(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
                .collect()
        }
    }
}

impl QuantizationScheme {
    pub fn validate(&self) -> Result<(), ArticulateError> {
        if self.direction_bins == 0 {
            return Err(ArticulateError::Scheme("direction_bins must be at least 1".into()));
        }
        if self.distance_edges.len() < 2 {
            return Err(ArticulateError::Scheme(
                "distance_edges needs at least two entries".into(),
            ));
        }
        if self.distance_edges.iter().any(|e| !e.is_finite()) {
            return Err(ArticulateError::Scheme("distance edges must be finite".into()));
        }
        if self.distance_edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ArticulateError::Scheme(
                "distance edges must be strictly increasing".into(),
            ));
        }
        if self.worker_bins == Some(0) {
            return Err(ArticulateError::Scheme("worker_bins must be at least 1".into()));
        }
        Ok(())
    }

    pub fn distance_bins(&self) -> u64 {
        self.distance_edges.len() as u64 + 1
    }

    fn pollen_states(&self) -> u64 {
        if self.include_pollen {
            2
        } else {
            1
        }
    }

    /// Number of distinct words the scheme can represent.
    pub fn capacity(&self) -> u64 {
        u64::from(self.direction_bins)
            * self.distance_bins()
            * self.pollen_states()
            * u64::from(self.worker_bins.unwrap_or(1))
    }

    /// Short stable hash of the scheme's serialized form.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(self).expect("scheme serializes");
        hex::encode(&Sha256::digest(&json)[..16])
    }

    fn encode(&self, dir: u32, dist: usize, pollen: bool) -> u64 {
        let mut id = u64::from(dir);
        let mut radix = u64::from(self.direction_bins);
        id += radix * dist as u64;
        radix *= self.distance_bins();
        if self.include_pollen {
            id += radix * u64::from(pollen);
        }
        id
    }

    fn label(&self, dir: u32, dist: usize, pollen: bool) -> String {
        let dw = digits(u64::from(self.direction_bins) - 1).max(2);
        let kw = digits(self.distance_bins() - 1).max(2);
        let mut s = format!("dir{dir:0dw$}|dist{dist:0kw$}");
        if self.include_pollen {
            s.push_str(if pollen { "|P" } else { "|N" });
        }
        s
    }
}

fn digits(mut v: u64) -> usize {
    let mut d = 1;
    while v >= 10 {
        v /= 10;
        d += 1;
    }
    d
}

/// Circular direction bin. Bin 0 is centred on north and covers
/// `[-w/2, w/2)` with `w = 360 / n_bins`.
pub fn bin_direction(direction: f64, n_bins: u32) -> Result<u32, ArticulateError> {
    if n_bins == 0 {
        return Err(ArticulateError::Scheme("direction_bins must be at least 1".into()));
    }
    if !direction.is_finite() {
        return Err(ArticulateError::NonFinite("direction"));
    }
    let width = 360.0 / f64::from(n_bins);
    let shifted = (direction + width / 2.0).rem_euclid(360.0);
    let idx = (shifted / width).floor() as u32;
    Ok(idx % n_bins)
}

/// Distance bin: 0 below the first edge, `edges.len()` at or above the
/// last, otherwise the half-open interior interval containing the value.
pub fn bin_distance(distance_km: f64, edges: &[f64]) -> Result<usize, ArticulateError> {
    if !distance_km.is_finite() {
        return Err(ArticulateError::NonFinite("distance"));
    }
    Ok(edges.partition_point(|&e| e <= distance_km))
}

/// Turn observations into a corpus, one token per observation.
pub fn articulate(
    observations: &[DanceObservation],
    scheme: &QuantizationScheme,
) -> Result<SymbolCorpus, ArticulateError> {
    scheme.validate()?;
    if let Some(w) = scheme.worker_bins.filter(|&w| w > 1) {
        return Err(ArticulateError::WorkerChannelUnavailable(w));
    }
    let mut tokens = Vec::with_capacity(observations.len());
    let mut vocabulary = BTreeMap::new();
    for (row, obs) in observations.iter().enumerate() {
        let dir = bin_direction(obs.avg_direction, scheme.direction_bins).map_err(|_| {
            ArticulateError::MissingField {
                row,
                field: "avg_direction",
                value: obs.avg_direction,
            }
        })?;
        if obs.distance_km < 0.0 {
            return Err(ArticulateError::MissingField {
                row,
                field: "distance_km",
                value: obs.distance_km,
            });
        }
        let dist = bin_distance(obs.distance_km, &scheme.distance_edges).map_err(|_| {
            ArticulateError::MissingField {
                row,
                field: "distance_km",
                value: obs.distance_km,
            }
        })?;
        let id = scheme.encode(dir, dist, obs.pollen);
        vocabulary
            .entry(id)
            .or_insert_with(|| scheme.label(dir, dist, obs.pollen));
        tokens.push(id);
    }
    Ok(SymbolCorpus {
        tokens,
        vocabulary,
        scheme_fingerprint: Some(scheme.fingerprint()),
    })
}

/// Bits needed to address every word the scheme can represent.
pub fn info_budget(scheme: &QuantizationScheme) -> Result<f64, ArticulateError> {
    scheme.validate()?;
    Ok((scheme.capacity() as f64).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_observations, FormatConfig};

    fn table() -> Vec<DanceObservation> {
        parse_observations(include_str!("../data/sample_dances.csv"), &FormatConfig::default()).unwrap()
    }

    #[test]
    fn direction_bin_examples() {
        assert_eq!(bin_direction(348.07, 32).unwrap(), 31);
        assert_eq!(bin_direction(0.0, 32).unwrap(), 0);
        assert_eq!(bin_direction(359.0, 32).unwrap(), 0);
        assert_eq!(bin_direction(5.625, 32).unwrap(), 1);
        assert_eq!(bin_direction(-5.625, 32).unwrap(), 0);
        for x in [0.0, 90.0, 359.9, -720.0] {
            assert_eq!(bin_direction(x, 1).unwrap(), 0);
        }
        assert!(bin_direction(1.0, 0).is_err());
        assert!(bin_direction(f64::NAN, 4).is_err());
    }

    #[test]
    fn distance_bin_examples() {
        let edges = [0.5, 1.0, 2.0];
        assert_eq!(bin_distance(0.75, &edges).unwrap(), 1);
        assert_eq!(bin_distance(0.25, &edges).unwrap(), 0);
        assert_eq!(bin_distance(1.32, &edges).unwrap(), 2);
        assert_eq!(bin_distance(0.5, &edges).unwrap(), 1);
        assert_eq!(bin_distance(2.0, &edges).unwrap(), 3);
        assert_eq!(bin_distance(50.0, &edges).unwrap(), 3);
        assert!(bin_distance(f64::INFINITY, &edges).is_err());
    }

    #[test]
    fn table_rows_articulate() {
        let scheme = QuantizationScheme::default();
        let corpus = articulate(&table(), &scheme).unwrap();
        assert_eq!(corpus.len(), 3);
        assert!(corpus.vocabulary_size() <= 3);
        // Hand binning: 348.07° and 354.10° share bin 31, 162.83° is bin 14.
        // Edges 0.1·10^(2k/11): 0.75 km in bin 5, 1.32 and 1.26 km in bin 7.
        assert_eq!(
            corpus.vocabulary.values().cloned().collect::<Vec<_>>(),
            vec!["dir31|dist05|P", "dir14|dist07|P", "dir31|dist07|P"]
        );
        assert_eq!(corpus.label(corpus.tokens[0]), Some("dir31|dist05|P"));
        assert_eq!(corpus.scheme_fingerprint, Some(scheme.fingerprint()));
        corpus.validate().unwrap();
    }

    #[test]
    fn repeated_observation_is_one_word() {
        let row = table()[0].clone();
        let obs = vec![row; 5];
        let corpus = articulate(&obs, &QuantizationScheme::default()).unwrap();
        assert_eq!(corpus.len(), 5);
        assert_eq!(corpus.vocabulary_size(), 1);
    }

    #[test]
    fn empty_input_empty_corpus() {
        let corpus = articulate(&[], &QuantizationScheme::default()).unwrap();
        assert!(corpus.is_empty());
        assert_eq!(corpus.vocabulary_size(), 0);
    }

    #[test]
    fn unusable_field_is_reported() {
        let mut obs = table();
        obs[1].distance_km = f64::NAN;
        let err = articulate(&obs, &QuantizationScheme::default()).unwrap_err();
        assert!(matches!(err, ArticulateError::MissingField { row: 1, field: "distance_km", .. }));
    }

    #[test]
    fn worker_channel_is_rejected_without_data() {
        let scheme = QuantizationScheme {
            worker_bins: Some(6),
            ..QuantizationScheme::default()
        };
        assert_eq!(
            articulate(&table(), &scheme).unwrap_err(),
            ArticulateError::WorkerChannelUnavailable(6)
        );
    }

    #[test]
    fn budget_examples() {
        let scheme = QuantizationScheme {
            direction_bins: 32,
            distance_edges: log_spaced_edges(0.1, 10.0, 23),
            include_pollen: false,
            worker_bins: Some(6),
        };
        assert_eq!(scheme.capacity(), 32 * 24 * 6);
        assert!((info_budget(&scheme).unwrap() - 12.17).abs() < 0.01);

        let flat = QuantizationScheme {
            direction_bins: 1,
            distance_edges: vec![1.0, 2.0],
            include_pollen: false,
            worker_bins: None,
        };
        // two edges always give three distance bins
        assert!((info_budget(&flat).unwrap() - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn scheme_validation() {
        let mut s = QuantizationScheme {
            distance_edges: vec![1.0],
            ..QuantizationScheme::default()
        };
        assert!(s.validate().is_err());
        s.distance_edges = vec![2.0, 1.0];
        assert!(s.validate().is_err());
        s.distance_edges = vec![1.0, 2.0];
        s.direction_bins = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn log_edges_span_range() {
        let e = log_spaced_edges(0.1, 10.0, 12);
        assert_eq!(e.len(), 12);
        assert!((e[0] - 0.1).abs() < 1e-12 && (e[11] - 10.0).abs() < 1e-9);
        assert!(e.windows(2).all(|w| (w[1] / w[0] - 10f64.powf(2.0 / 11.0)).abs() < 1e-9));
    }

    #[test]
    fn fingerprint_tracks_scheme() {
        let a = QuantizationScheme::default();
        let mut b = a.clone();
        assert_eq!(a.fingerprint(), b.fingerprint());
        b.direction_bins = 16;
        assert_ne!(a.fingerprint(), b.fingerprint());
    }
}
