//! The symbol corpus shared by all analyses.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("token {0} has no vocabulary entry")]
    UnknownToken(u64),
    #[error("vocabulary entry {0} never occurs in the token stream")]
    UnusedWord(u64),
    #[error("label {0:?} is used by more than one word")]
    DuplicateLabel(String),
    #[error("empty label on line {0}")]
    EmptyLabel(usize),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// An ordered stream of word identifiers with their labels.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolCorpus {
    pub tokens: Vec<u64>,
    pub vocabulary: BTreeMap<u64, String>,
    /// Identifies the quantization scheme that produced a dance corpus.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme_fingerprint: Option<String>,
}

impl SymbolCorpus {
    /// Build a corpus from already-assigned ids, checking that the
    /// vocabulary covers exactly the distinct tokens.
    pub fn new(
        tokens: Vec<u64>,
        vocabulary: BTreeMap<u64, String>,
        scheme_fingerprint: Option<String>,
    ) -> Result<Self, CorpusError> {
        let corpus = SymbolCorpus {
            tokens,
            vocabulary,
            scheme_fingerprint,
        };
        corpus.validate()?;
        Ok(corpus)
    }

    /// Assign ids `0, 1, 2, …` to labels in order of first appearance.
    pub fn from_labels<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut ids: HashMap<String, u64> = HashMap::new();
        let mut vocabulary = BTreeMap::new();
        let mut tokens = Vec::new();
        for label in labels {
            let label = label.as_ref();
            let next = ids.len() as u64;
            let id = *ids.entry(label.to_string()).or_insert_with(|| {
                vocabulary.insert(next, label.to_string());
                next
            });
            tokens.push(id);
        }
        SymbolCorpus {
            tokens,
            vocabulary,
            scheme_fingerprint: None,
        }
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let mut seen = std::collections::BTreeSet::new();
        for &t in &self.tokens {
            if !self.vocabulary.contains_key(&t) {
                return Err(CorpusError::UnknownToken(t));
            }
            seen.insert(t);
        }
        if let Some(&unused) = self.vocabulary.keys().find(|k| !seen.contains(k)) {
            return Err(CorpusError::UnusedWord(unused));
        }
        let mut labels = std::collections::HashSet::new();
        for label in self.vocabulary.values() {
            if !labels.insert(label.as_str()) {
                return Err(CorpusError::DuplicateLabel(label.clone()));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn vocabulary_size(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn label(&self, word: u64) -> Option<&str> {
        self.vocabulary.get(&word).map(String::as_str)
    }

    pub fn to_json(&self) -> Result<String, CorpusError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, CorpusError> {
        let corpus: SymbolCorpus = serde_json::from_str(text)?;
        corpus.validate()?;
        Ok(corpus)
    }

    /// One label per line.
    pub fn to_token_stream(&self) -> String {
        let mut out = String::new();
        for t in &self.tokens {
            out.push_str(&self.vocabulary[t]);
            out.push('\n');
        }
        out
    }

    /// Inverse of [`to_token_stream`](Self::to_token_stream). Ids are
    /// reassigned by first appearance; blank lines are rejected.
    pub fn from_token_stream(text: &str) -> Result<Self, CorpusError> {
        let mut labels = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let label = line.trim();
            if label.is_empty() {
                return Err(CorpusError::EmptyLabel(i + 1));
            }
            labels.push(label);
        }
        Ok(SymbolCorpus::from_labels(labels))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_get_first_appearance_ids() {
        let c = SymbolCorpus::from_labels(["b", "a", "b", "c"]);
        assert_eq!(c.tokens, vec![0, 1, 0, 2]);
        assert_eq!(c.label(1), Some("a"));
        assert!(c.validate().is_ok());
    }

    #[test]
    fn validation_catches_mismatched_vocabulary() {
        let mut vocab = BTreeMap::new();
        vocab.insert(0, "x".to_string());
        assert!(matches!(
            SymbolCorpus::new(vec![0, 1], vocab.clone(), None),
            Err(CorpusError::UnknownToken(1))
        ));
        vocab.insert(5, "y".to_string());
        assert!(matches!(
            SymbolCorpus::new(vec![0], vocab, None),
            Err(CorpusError::UnusedWord(5))
        ));
    }

    #[test]
    fn token_stream_round_trip() {
        let c = SymbolCorpus::from_labels(["dir01|dist02", "dir03|dist02", "dir01|dist02"]);
        let back = SymbolCorpus::from_token_stream(&c.to_token_stream()).unwrap();
        assert_eq!(back, c);
        assert!(SymbolCorpus::from_token_stream("a\n\nb\n").is_err());
    }

    #[test]
    fn json_round_trip_keeps_fingerprint() {
        let mut c = SymbolCorpus::from_labels(["a", "b"]);
        c.scheme_fingerprint = Some("abc".into());
        assert_eq!(SymbolCorpus::from_json(&c.to_json().unwrap()).unwrap(), c);
    }
}
