//! Plug-in Shannon entropies of symbol corpora and the comparison of a
//! corpus against an ensemble of random-language baselines.
//!
//! n-gram statistics use overlapping windows with cyclic wrap-around: a
//! corpus of length `L` always yields `L` windows of every order `n ≤ L`.
//! The empirical window distribution is then exactly shift-invariant, which
//! makes block entropy non-decreasing and conditional entropy
//! non-increasing in `n` for every corpus, not just in expectation.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::SymbolCorpus;
use crate::zipf::{fit_power_law, rank_frequency, FitMethod, FitRange};

#[derive(Debug, Error, PartialEq)]
pub enum EntropyError {
    #[error("not a probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("corpus of {len} tokens is shorter than n-gram order {n}")]
    TooShort { len: usize, n: usize },
    #[error("n-gram order must be at least 1")]
    ZeroOrder,
    #[error("need at least {min} baseline corpora, got {got}")]
    TooFewBaselines { min: usize, got: usize },
    #[error("baseline {index} has {tokens} tokens, outside x2 of the subject's {subject}")]
    BaselineSize {
        index: usize,
        tokens: usize,
        subject: usize,
    },
    #[error("subject corpus is empty")]
    EmptySubject,
}

const SUM_TOLERANCE: f64 = 1e-9;

/// `-Σ p log2 p`, with `0 log 0 = 0`.
pub fn shannon_entropy(distribution: &[f64]) -> Result<f64, EntropyError> {
    if let Some(p) = distribution.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(EntropyError::InvalidDistribution(format!("entry {p}")));
    }
    let sum: f64 = distribution.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(EntropyError::InvalidDistribution(format!("sums to {sum}")));
    }
    Ok(entropy_bits(distribution.iter().copied()))
}

fn entropy_bits(probabilities: impl Iterator<Item = f64>) -> f64 {
    let h: f64 = probabilities
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum();
    // 1.0 * log2(1.0) leaves -0.0
    h.max(0.0)
}

fn count_entropy<K>(counts: &HashMap<K, usize>, total: usize) -> f64 {
    let total = total as f64;
    entropy_bits(counts.values().map(|&c| c as f64 / total))
}

fn block_entropy(tokens: &[u64], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let len = tokens.len();
    let mut counts: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut window = Vec::with_capacity(n);
    for start in 0..len {
        window.clear();
        window.extend((0..n).map(|k| tokens[(start + k) % len]));
        *counts.entry(window.clone()).or_default() += 1;
    }
    count_entropy(&counts, len)
}

/// Block entropy of order `n` and the conditional entropy of a symbol given
/// its `n - 1` predecessors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NgramEntropy {
    pub block: f64,
    pub conditional: f64,
}

pub fn ngram_entropy(corpus: &SymbolCorpus, n: usize) -> Result<NgramEntropy, EntropyError> {
    if n == 0 {
        return Err(EntropyError::ZeroOrder);
    }
    if corpus.len() < n {
        return Err(EntropyError::TooShort { len: corpus.len(), n });
    }
    let block = block_entropy(&corpus.tokens, n);
    let previous = block_entropy(&corpus.tokens, n - 1);
    Ok(NgramEntropy {
        block,
        conditional: (block - previous).max(0.0),
    })
}

/// Entropy statistics of one corpus, in bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub unigram_entropy: f64,
    pub ngram_entropies: BTreeMap<usize, f64>,
    pub conditional_entropies: BTreeMap<usize, f64>,
    pub vocabulary_size: usize,
    pub token_count: usize,
    /// Always `"plug-in"`: no small-sample bias correction is applied.
    pub estimator: String,
}

/// Report for orders `1..=max_n`, truncated at the corpus length.
pub fn entropy_report(corpus: &SymbolCorpus, max_n: usize) -> Result<EntropyReport, EntropyError> {
    if corpus.is_empty() {
        return Err(EntropyError::EmptySubject);
    }
    let top = max_n.max(1).min(corpus.len());
    let mut ngram_entropies = BTreeMap::new();
    let mut conditional_entropies = BTreeMap::new();
    let mut previous = 0.0;
    for n in 1..=top {
        let block = block_entropy(&corpus.tokens, n);
        ngram_entropies.insert(n, block);
        conditional_entropies.insert(n, (block - previous).max(0.0));
        previous = block;
    }
    Ok(EntropyReport {
        unigram_entropy: ngram_entropies[&1],
        ngram_entropies,
        conditional_entropies,
        vocabulary_size: corpus.vocabulary_size(),
        token_count: corpus.len(),
        estimator: "plug-in".into(),
    })
}

/// Unigram entropy and fitted Zipf exponent of one corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub tokens: usize,
    pub types: usize,
    pub unigram_entropy: f64,
    /// `None` when the rank-frequency table is too small to fit.
    pub zipf_exponent: Option<f64>,
}

impl CorpusStats {
    pub fn of(corpus: &SymbolCorpus, fit: &ExponentFit) -> Result<Self, EntropyError> {
        if corpus.is_empty() {
            return Err(EntropyError::EmptySubject);
        }
        let table = rank_frequency(corpus).map_err(|_| EntropyError::EmptySubject)?;
        let unigram_entropy = entropy_bits(table.entries.iter().map(|e| e.frequency));
        let range = FitRange {
            min: fit.range.min,
            max: fit.range.max.map(|m| m.min(table.len())),
        };
        let zipf_exponent = fit_power_law(&table, range, fit.method)
            .ok()
            .map(|f| f.exponent_a);
        Ok(CorpusStats {
            tokens: corpus.len(),
            types: corpus.vocabulary_size(),
            unigram_entropy,
            zipf_exponent,
        })
    }
}

/// How the Zipf exponent is estimated for the discrimination report.
/// A `max` rank beyond a table's size is clipped to that table.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ExponentFit {
    pub range: FitRange,
    pub method: FitMethod,
}

/// Mean, sample standard deviation and the subject's z-score for one
/// statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discrimination {
    pub subject: Option<f64>,
    pub baseline_mean: Option<f64>,
    pub baseline_std: Option<f64>,
    pub baselines_used: usize,
    /// `None` if the subject value is missing or the baseline spread is 0.
    pub z_score: Option<f64>,
}

impl Discrimination {
    fn new(subject: Option<f64>, values: &[f64]) -> Self {
        let k = values.len();
        let mean = (k > 0).then(|| values.iter().sum::<f64>() / k as f64);
        let std = (k > 1).then(|| {
            let m = mean.unwrap();
            (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (k - 1) as f64).sqrt()
        });
        let z_score = match (subject, mean, std) {
            (Some(s), Some(m), Some(sd)) if sd > 0.0 => Some((s - m) / sd),
            _ => None,
        };
        Discrimination {
            subject,
            baseline_mean: mean,
            baseline_std: std,
            baselines_used: k,
            z_score,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminationReport {
    pub subject: CorpusStats,
    pub entropy: Discrimination,
    pub zipf_exponent: Discrimination,
    /// In baseline index order.
    pub baselines: Vec<CorpusStats>,
}

impl DiscriminationReport {
    /// `index,tokens,types,unigram_entropy,zipf_exponent`.
    pub fn baselines_csv(&self) -> String {
        let mut out = String::from("index,tokens,types,unigram_entropy,zipf_exponent\n");
        for (i, b) in self.baselines.iter().enumerate() {
            let exp = b.zipf_exponent.map(|e| e.to_string()).unwrap_or_default();
            out.push_str(&format!("{i},{},{},{},{exp}\n", b.tokens, b.types, b.unigram_entropy));
        }
        out
    }
}

pub const MIN_BASELINES: usize = 10;

/// Compare a corpus with an ensemble of baselines by z-scores of unigram
/// entropy and Zipf exponent.
pub fn compare_to_random(
    subject: &SymbolCorpus,
    baselines: &[SymbolCorpus],
    fit: &ExponentFit,
) -> Result<DiscriminationReport, EntropyError> {
    if baselines.len() < MIN_BASELINES {
        return Err(EntropyError::TooFewBaselines {
            min: MIN_BASELINES,
            got: baselines.len(),
        });
    }
    if subject.is_empty() {
        return Err(EntropyError::EmptySubject);
    }
    let n = subject.len();
    for (index, b) in baselines.iter().enumerate() {
        if b.len() * 2 < n || b.len() > 2 * n {
            return Err(EntropyError::BaselineSize {
                index,
                tokens: b.len(),
                subject: n,
            });
        }
    }
    let subject_stats = CorpusStats::of(subject, fit)?;
    let stats: Vec<CorpusStats> = baselines
        .iter()
        .map(|b| CorpusStats::of(b, fit))
        .collect::<Result<_, _>>()?;
    let entropies: Vec<f64> = stats.iter().map(|s| s.unigram_entropy).collect();
    let exponents: Vec<f64> = stats.iter().filter_map(|s| s.zipf_exponent).collect();
    Ok(DiscriminationReport {
        entropy: Discrimination::new(Some(subject_stats.unigram_entropy), &entropies),
        zipf_exponent: Discrimination::new(subject_stats.zipf_exponent, &exponents),
        subject: subject_stats,
        baselines: stats,
    })
}
