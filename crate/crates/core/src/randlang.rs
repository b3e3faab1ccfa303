//! Intermittent-silence random text: equiprobable letters interrupted by a
//! space symbol. Words are the maximal letter runs between spaces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::SymbolCorpus;

#[derive(Debug, Error, PartialEq)]
pub enum RandLangError {
    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,
    #[error("space probability must lie in (0, 1), got {0}")]
    SpaceProbability(f64),
    #[error("a single-letter alphabet has no power-law regime")]
    NoPowerLaw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomTextSpec {
    pub alphabet_size: u32,
    pub space_probability: f64,
    pub char_count: usize,
    pub seed: u64,
}

impl RandomTextSpec {
    pub fn validate(&self) -> Result<(), RandLangError> {
        if self.alphabet_size == 0 {
            return Err(RandLangError::EmptyAlphabet);
        }
        let q = self.space_probability;
        if !(q > 0.0 && q < 1.0) {
            return Err(RandLangError::SpaceProbability(q));
        }
        Ok(())
    }

    /// Expected number of words: a word starts at every letter that
    /// follows a space or opens the text.
    pub fn expected_tokens(&self) -> f64 {
        if self.char_count == 0 {
            return 0.0;
        }
        let q = self.space_probability;
        (1.0 - q) + (self.char_count as f64 - 1.0) * q * (1.0 - q)
    }
}

/// Printable symbol for letter `k`.
pub fn letter(k: u32) -> char {
    const BASE: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    match BASE.get(k as usize) {
        Some(&b) => b as char,
        // CJK unified ideographs: 20 000+ printable, non-space code points
        None => char::from_u32(0x4E00 + k - BASE.len() as u32).unwrap_or('\u{FFFD}'),
    }
}

pub fn generate_random_text(spec: &RandomTextSpec) -> Result<SymbolCorpus, RandLangError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut words = Vec::new();
    let mut current = String::new();
    for _ in 0..spec.char_count {
        if rng.gen::<f64>() < spec.space_probability {
            if !current.is_empty() {
                words.push(std::mem::take(&mut current));
            }
        } else {
            current.push(letter(rng.gen_range(0..spec.alphabet_size)));
        }
    }
    if !current.is_empty() {
        words.push(current);
    }
    Ok(SymbolCorpus::from_labels(words))
}

/// `1 + ln(1/(1-q)) / ln M`: the slope of the rank-frequency staircase of
/// intermittent-silence text in the continuum limit.
pub fn expected_exponent(spec: &RandomTextSpec) -> Result<f64, RandLangError> {
    spec.validate()?;
    if spec.alphabet_size < 2 {
        return Err(RandLangError::NoPowerLaw);
    }
    let q = spec.space_probability;
    Ok(1.0 + (1.0 / (1.0 - q)).ln() / f64::from(spec.alphabet_size).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(m: u32, q: f64, chars: usize, seed: u64) -> RandomTextSpec {
        RandomTextSpec {
            alphabet_size: m,
            space_probability: q,
            char_count: chars,
            seed,
        }
    }

    #[test]
    fn exponent_closed_form() {
        let a = expected_exponent(&spec(26, 0.18, 0, 0)).unwrap();
        assert!((a - 1.061).abs() < 5e-4, "{a}");
        assert!((expected_exponent(&spec(2, 0.5, 0, 0)).unwrap() - 2.0).abs() < 1e-12);
        let near_zero = expected_exponent(&spec(26, 1e-9, 0, 0)).unwrap();
        assert!((near_zero - 1.0).abs() < 1e-8);
        assert_eq!(expected_exponent(&spec(1, 0.5, 0, 0)), Err(RandLangError::NoPowerLaw));
    }

    #[test]
    fn zero_chars_empty_corpus() {
        let c = generate_random_text(&spec(26, 0.2, 0, 1)).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn invalid_specs() {
        assert_eq!(
            generate_random_text(&spec(0, 0.2, 10, 1)),
            Err(RandLangError::EmptyAlphabet)
        );
        for q in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(generate_random_text(&spec(3, q, 10, 1)).is_err());
        }
    }

    #[test]
    fn single_letter_words_are_runs() {
        let c = generate_random_text(&spec(1, 0.5, 5000, 3)).unwrap();
        assert!(c.vocabulary.values().all(|w| w.chars().all(|ch| ch == 'a')));
    }

    #[test]
    fn same_seed_same_text() {
        let s = spec(5, 0.3, 2000, 11);
        assert_eq!(generate_random_text(&s).unwrap(), generate_random_text(&s).unwrap());
        let other = RandomTextSpec { seed: 12, ..s };
        assert_ne!(generate_random_text(&s).unwrap(), generate_random_text(&other).unwrap());
    }

    #[test]
    fn letters_are_distinct() {
        let set: std::collections::HashSet<char> = (0..500).map(letter).collect();
        assert_eq!(set.len(), 500);
        assert!(!set.contains(&' '));
    }
}
