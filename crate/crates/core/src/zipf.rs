//! Rank-frequency tables, power-law exponent fits and two-regime detection.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::SymbolCorpus;

#[derive(Debug, Error, PartialEq)]
pub enum ZipfError {
    #[error("cannot rank an empty corpus")]
    EmptyCorpus,
    #[error("fit needs at least 3 ranks with non-zero counts, found {0}")]
    TooFewPoints(usize),
    #[error("fit range {min}..={max} lies outside ranks 1..={size}")]
    BadRange { min: usize, max: usize, size: usize },
    #[error("regime detection needs at least 10 ranks, table has {0}")]
    TableTooSmall(usize),
    #[error("invalid weight {0}: weights must be finite and non-negative")]
    BadWeight(f64),
}

/// One row of a rank-frequency table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    /// 1-based.
    pub rank: usize,
    pub word: u64,
    /// Token count for corpora, probability mass for weighted tables.
    pub count: f64,
    pub frequency: f64,
}

/// Vocabulary sorted by descending count; ties by ascending word id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankFrequencyTable {
    pub entries: Vec<RankEntry>,
}

impl RankFrequencyTable {
    /// Build from `(word, weight)` pairs. Zero weights are kept and ranked
    /// last.
    pub fn from_weights<I>(weights: I) -> Result<Self, ZipfError>
    where
        I: IntoIterator<Item = (u64, f64)>,
    {
        let mut pairs: Vec<(u64, f64)> = weights.into_iter().collect();
        if let Some(&(_, bad)) = pairs.iter().find(|(_, w)| !w.is_finite() || *w < 0.0) {
            return Err(ZipfError::BadWeight(bad));
        }
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        if pairs.is_empty() || total <= 0.0 {
            return Err(ZipfError::EmptyCorpus);
        }
        pairs.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let entries = pairs
            .into_iter()
            .enumerate()
            .map(|(i, (word, count))| RankEntry {
                rank: i + 1,
                word,
                count,
                frequency: count / total,
            })
            .collect();
        Ok(RankFrequencyTable { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `rank,word,count,frequency` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,word,count,frequency\n");
        for e in &self.entries {
            let _ = writeln!(out, "{},{},{},{}", e.rank, e.word, e.count, e.frequency);
        }
        out
    }

    /// Two whitespace-separated columns, `ln(rank) ln(frequency)`, for
    /// plotting. Zero-frequency rows are omitted.
    pub fn to_loglog(&self) -> String {
        let mut out = String::from("# ln_rank ln_frequency\n");
        for e in self.entries.iter().filter(|e| e.frequency > 0.0) {
            let _ = writeln!(out, "{} {}", (e.rank as f64).ln(), e.frequency.ln());
        }
        out
    }
}

/// Count tokens and rank the vocabulary.
pub fn rank_frequency(corpus: &SymbolCorpus) -> Result<RankFrequencyTable, ZipfError> {
    if corpus.is_empty() {
        return Err(ZipfError::EmptyCorpus);
    }
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for &t in &corpus.tokens {
        *counts.entry(t).or_default() += 1;
    }
    RankFrequencyTable::from_weights(counts.into_iter().map(|(w, c)| (w, c as f64)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMethod {
    /// Least squares through `(ln i, ln P_i)`.
    #[default]
    LoglogOls,
    /// Maximum likelihood of the rank-truncated zeta family.
    DiscreteMle,
}

impl std::str::FromStr for FitMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "loglog-ols" | "ols" => Ok(FitMethod::LoglogOls),
            "discrete-mle" | "mle" => Ok(FitMethod::DiscreteMle),
            other => Err(format!("unknown fit method `{other}`")),
        }
    }
}

/// Inclusive 1-based rank range. `max = None` means the last rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitRange {
    pub min: usize,
    pub max: Option<usize>,
}

impl FitRange {
    pub const ALL: FitRange = FitRange { min: 1, max: None };

    pub fn new(min: usize, max: usize) -> Self {
        FitRange {
            min,
            max: Some(max),
        }
    }
}

impl Default for FitRange {
    fn default() -> Self {
        FitRange::ALL
    }
}

/// Fitted `P_i ≈ C / i^a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub method: FitMethod,
    pub exponent_a: f64,
    /// `ln C`.
    pub intercept: f64,
    pub stderr_a: f64,
    /// Inclusive rank range actually used.
    pub fit_range: (usize, usize),
    /// Log-log coefficient of determination of the fitted line.
    pub r_squared: f64,
    pub points: usize,
    /// Set when ranks with zero count inside the range were dropped.
    pub zero_counts_excluded: bool,
}

struct Points {
    log_rank: Vec<f64>,
    log_freq: Vec<f64>,
    weights: Vec<f64>,
    range: (usize, usize),
    zero_excluded: bool,
}

fn collect_points(table: &RankFrequencyTable, range: FitRange) -> Result<Points, ZipfError> {
    let size = table.len();
    let max = range.max.unwrap_or(size);
    if range.min < 1 || max > size || range.min > max {
        return Err(ZipfError::BadRange {
            min: range.min,
            max,
            size,
        });
    }
    let mut p = Points {
        log_rank: Vec::new(),
        log_freq: Vec::new(),
        weights: Vec::new(),
        range: (range.min, max),
        zero_excluded: false,
    };
    for e in &table.entries[range.min - 1..max] {
        if e.count > 0.0 {
            p.log_rank.push((e.rank as f64).ln());
            p.log_freq.push(e.frequency.ln());
            p.weights.push(e.count);
        } else {
            p.zero_excluded = true;
        }
    }
    if p.log_rank.len() < 3 {
        return Err(ZipfError::TooFewPoints(p.log_rank.len()));
    }
    Ok(p)
}

struct LineFit {
    slope: f64,
    intercept: f64,
    rss: f64,
    sxx: f64,
    syy: f64,
}

fn ols(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let r = yi - (intercept + slope * xi);
            r * r
        })
        .sum();
    LineFit {
        slope,
        intercept,
        rss,
        sxx,
        syy,
    }
}

fn r_squared(rss: f64, syy: f64) -> f64 {
    if syy > 0.0 {
        1.0 - rss / syy
    } else {
        1.0
    }
}

const MLE_TOLERANCE: f64 = 1e-6;

/// Mean of `ln i` under `P(i) ∝ i^-a` restricted to the given log-ranks,
/// together with its variance.
fn log_rank_moments(log_ranks: &[f64], a: f64) -> (f64, f64, f64) {
    // shift by the first term so the weights stay near 1
    let x0 = log_ranks[0];
    let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for &x in log_ranks {
        let w = (-a * (x - x0)).exp();
        z += w;
        m1 += w * x;
        m2 += w * x * x;
    }
    let mean = m1 / z;
    let var = (m2 / z - mean * mean).max(0.0);
    let log_z = z.ln() - a * x0;
    (mean, var, log_z)
}

fn mle(p: &Points) -> PowerLawFit {
    // Support is every rank in the range, observed or not.
    let support: Vec<f64> = (p.range.0..=p.range.1).map(|i| (i as f64).ln()).collect();
    let total: f64 = p.weights.iter().sum();
    let data_mean: f64 = p
        .weights
        .iter()
        .zip(&p.log_rank)
        .map(|(w, x)| w * x)
        .sum::<f64>()
        / total;
    // Score is total * (E_a[ln i] - data_mean), strictly decreasing in a.
    let score = |a: f64| log_rank_moments(&support, a).0 - data_mean;

    let (mut lo, mut hi) = (-1.0, 4.0);
    while score(lo) < 0.0 && lo > -64.0 {
        lo *= 2.0;
    }
    while score(hi) > 0.0 && hi < 64.0 {
        hi *= 2.0;
    }
    while hi - lo > MLE_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if score(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    let (_, var, log_z) = log_rank_moments(&support, a);
    let stderr_a = if var > 0.0 {
        1.0 / (total * var).sqrt()
    } else {
        f64::INFINITY
    };
    // Table frequencies are relative to the whole table, so scale the
    // truncated zeta by the observed mass inside the range.
    let mass: f64 = p.log_freq.iter().map(|f| f.exp()).sum();
    let intercept = mass.ln() - log_z;
    let (rss, syy) = {
        let my = p.log_freq.iter().sum::<f64>() / p.log_freq.len() as f64;
        p.log_rank.iter().zip(&p.log_freq).fold((0.0, 0.0), |(r, s), (&x, &y)| {
            let e = y - (intercept - a * x);
            (r + e * e, s + (y - my) * (y - my))
        })
    };
    PowerLawFit {
        method: FitMethod::DiscreteMle,
        exponent_a: a,
        intercept,
        stderr_a,
        fit_range: p.range,
        r_squared: r_squared(rss, syy),
        points: p.log_rank.len(),
        zero_counts_excluded: p.zero_excluded,
    }
}

fn ols_fit(p: &Points) -> (PowerLawFit, f64) {
    let line = ols(&p.log_rank, &p.log_freq);
    let dof = p.log_rank.len() as f64 - 2.0;
    let stderr_a = if line.sxx > 0.0 {
        (line.rss / dof / line.sxx).sqrt()
    } else {
        0.0
    };
    let fit = PowerLawFit {
        method: FitMethod::LoglogOls,
        exponent_a: 0.0 - line.slope,
        intercept: line.intercept,
        stderr_a,
        fit_range: p.range,
        r_squared: r_squared(line.rss, line.syy),
        points: p.log_rank.len(),
        zero_counts_excluded: p.zero_excluded,
    };
    (fit, line.rss)
}

/// Fit the exponent `a` of `P_i ≈ 1/i^a` over a rank range.
pub fn fit_power_law(
    table: &RankFrequencyTable,
    range: FitRange,
    method: FitMethod,
) -> Result<PowerLawFit, ZipfError> {
    let points = collect_points(table, range)?;
    Ok(match method {
        FitMethod::LoglogOls => ols_fit(&points).0,
        FitMethod::DiscreteMle => mle(&points),
    })
}

/// Result of a two-regime search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeSplit {
    /// Last rank of the head regime.
    pub breakpoint: usize,
    pub head: PowerLawFit,
    pub tail: PowerLawFit,
    pub single: PowerLawFit,
    pub split_rss: f64,
    pub single_rss: f64,
    /// `1 - split_rss / single_rss`, 0 when the single fit is already exact.
    pub rss_improvement: f64,
    /// Improvement of at least [`REGIME_IMPROVEMENT_THRESHOLD`].
    pub two_regimes: bool,
}

pub const REGIME_IMPROVEMENT_THRESHOLD: f64 = 0.05;

const MAX_CANDIDATES: usize = 400;

fn breakpoint_candidates(size: usize) -> Vec<usize> {
    let (lo, hi) = (3usize, size - 3);
    if hi - lo < MAX_CANDIDATES {
        return (lo..=hi).collect();
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<usize> = (0..MAX_CANDIDATES)
        .map(|k| (a + (b - a) * k as f64 / (MAX_CANDIDATES - 1) as f64).exp().round() as usize)
        .map(|c| c.clamp(lo, hi))
        .collect();
    out.dedup();
    out
}

/// Find the rank that best splits the curve into two log-log lines.
pub fn detect_regimes(table: &RankFrequencyTable) -> Result<RegimeSplit, ZipfError> {
    let size = table.len();
    if size < 10 {
        return Err(ZipfError::TableTooSmall(size));
    }
    let all = collect_points(table, FitRange::ALL)?;
    let (single, single_rss) = ols_fit(&all);

    let mut best: Option<(usize, f64)> = None;
    for b in breakpoint_candidates(size) {
        let Ok(h) = collect_points(table, FitRange::new(1, b)) else { continue };
        let Ok(t) = collect_points(table, FitRange::new(b + 1, size)) else { continue };
        let rss = ols(&h.log_rank, &h.log_freq).rss + ols(&t.log_rank, &t.log_freq).rss;
        if best.is_none_or(|(_, r)| rss < r) {
            best = Some((b, rss));
        }
    }
    let (breakpoint, split_rss) = best.ok_or(ZipfError::TableTooSmall(size))?;
    let head = ols_fit(&collect_points(table, FitRange::new(1, breakpoint))?).0;
    let tail = ols_fit(&collect_points(table, FitRange::new(breakpoint + 1, size))?).0;

    // An exact single power law leaves only rounding noise in both sums.
    let scale = all.log_freq.iter().map(|y| y * y).sum::<f64>().max(1.0);
    let rss_improvement = if single_rss > 1e-12 * scale {
        1.0 - split_rss / single_rss
    } else {
        0.0
    };
    Ok(RegimeSplit {
        breakpoint,
        head,
        tail,
        single,
        split_rss,
        single_rss,
        rss_improvement,
        two_regimes: rss_improvement >= REGIME_IMPROVEMENT_THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(a: f64, v: usize) -> RankFrequencyTable {
        RankFrequencyTable::from_weights((1..=v).map(|i| (i as u64, (i as f64).powf(-a)))).unwrap()
    }

    #[test]
    fn small_ranking() {
        let c = SymbolCorpus::from_labels(["a", "a", "a", "b", "b", "c"]);
        let t = rank_frequency(&c).unwrap();
        let got: Vec<(usize, u64, f64)> = t.entries.iter().map(|e| (e.rank, e.word, e.count)).collect();
        assert_eq!(got, vec![(1, 0, 3.0), (2, 1, 2.0), (3, 2, 1.0)]);
        assert!((t.entries[0].frequency - 0.5).abs() < 1e-15);
        assert!((t.entries[1].frequency - 1.0 / 3.0).abs() < 1e-15);
        assert!((t.entries[2].frequency - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn single_word_table() {
        let c = SymbolCorpus::from_labels(std::iter::repeat_n("x", 100));
        let t = rank_frequency(&c).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.entries[0].frequency, 1.0);
        assert_eq!(
            fit_power_law(&t, FitRange::ALL, FitMethod::LoglogOls),
            Err(ZipfError::TooFewPoints(1))
        );
    }

    #[test]
    fn empty_corpus_rejected() {
        assert_eq!(rank_frequency(&SymbolCorpus::default()), Err(ZipfError::EmptyCorpus));
    }

    #[test]
    fn ties_break_by_word_id() {
        let c = SymbolCorpus::from_labels(["z", "y", "x", "y", "z", "x"]);
        let t = rank_frequency(&c).unwrap();
        assert_eq!(t.entries.iter().map(|e| e.word).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn exact_zipf_ols() {
        let fit = fit_power_law(&exact(1.0, 1000), FitRange::ALL, FitMethod::LoglogOls).unwrap();
        assert!((fit.exponent_a - 1.0).abs() < 0.01);
        assert!(fit.r_squared > 0.999_999);
        assert!(fit.stderr_a >= 0.0 && fit.stderr_a < 1e-9);
        assert_eq!(fit.fit_range, (1, 1000));
    }

    #[test]
    fn uniform_table_has_zero_exponent() {
        let t = RankFrequencyTable::from_weights((0..50).map(|w| (w, 7.0))).unwrap();
        for method in [FitMethod::LoglogOls, FitMethod::DiscreteMle] {
            let fit = fit_power_law(&t, FitRange::ALL, method).unwrap();
            assert!(fit.exponent_a.abs() < 0.01, "{method:?} {}", fit.exponent_a);
        }
    }

    #[test]
    fn ols_and_mle_agree_on_exact_tables() {
        for a in [0.8, 1.0, 1.2] {
            let t = exact(a, 1000);
            let o = fit_power_law(&t, FitRange::ALL, FitMethod::LoglogOls).unwrap();
            let m = fit_power_law(&t, FitRange::ALL, FitMethod::DiscreteMle).unwrap();
            assert!((o.exponent_a - m.exponent_a).abs() < 0.02, "a={a}: {} vs {}", o.exponent_a, m.exponent_a);
            assert!((m.exponent_a - a).abs() < 1e-5);
        }
    }

    #[test]
    fn scaling_counts_keeps_exponent() {
        let t = exact(1.1, 200);
        let scaled = RankFrequencyTable::from_weights(
            t.entries.iter().map(|e| (e.word, e.count * 37.0)),
        )
        .unwrap();
        for method in [FitMethod::LoglogOls, FitMethod::DiscreteMle] {
            let a = fit_power_law(&t, FitRange::new(2, 150), method).unwrap();
            let b = fit_power_law(&scaled, FitRange::new(2, 150), method).unwrap();
            assert!((a.exponent_a - b.exponent_a).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_counts_are_flagged() {
        let mut weights: Vec<(u64, f64)> = (1..=10).map(|i| (i, 11.0 - i as f64)).collect();
        weights.push((99, 0.0));
        let t = RankFrequencyTable::from_weights(weights).unwrap();
        let fit = fit_power_law(&t, FitRange::ALL, FitMethod::LoglogOls).unwrap();
        assert!(fit.zero_counts_excluded);
        assert_eq!(fit.points, 10);
    }

    #[test]
    fn range_checks() {
        let t = exact(1.0, 20);
        assert!(matches!(
            fit_power_law(&t, FitRange::new(5, 30), FitMethod::LoglogOls),
            Err(ZipfError::BadRange { .. })
        ));
        assert_eq!(
            fit_power_law(&t, FitRange::new(5, 6), FitMethod::LoglogOls),
            Err(ZipfError::TooFewPoints(2))
        );
        assert!(RankFrequencyTable::from_weights([(0, -1.0)]).is_err());
    }

    #[test]
    fn stitched_table_breakpoint() {
        // a = 1 up to rank 100, a = 2 beyond, continuous at the join
        let t = RankFrequencyTable::from_weights((1..=10_000u64).map(|i| {
            let x = i as f64;
            (i, if i <= 100 { 1.0 / x } else { 100.0 / (x * x) })
        }))
        .unwrap();
        let split = detect_regimes(&t).unwrap();
        assert!((80..=130).contains(&split.breakpoint), "{}", split.breakpoint);
        assert!((split.head.exponent_a - 1.0).abs() < 0.05);
        assert!((split.tail.exponent_a - 2.0).abs() < 0.05);
        assert!(split.two_regimes);
    }

    #[test]
    fn single_law_is_not_split() {
        let split = detect_regimes(&exact(1.0, 5000)).unwrap();
        assert!(split.rss_improvement < 0.05);
        assert!(!split.two_regimes);
    }

    #[test]
    fn flat_ten_rank_table() {
        let t = RankFrequencyTable::from_weights((0..10).map(|w| (w, 1.0))).unwrap();
        let split = detect_regimes(&t).unwrap();
        assert!((3..=7).contains(&split.breakpoint));
        assert!(split.head.exponent_a.abs() < 1e-12);
        assert!(split.tail.exponent_a.abs() < 1e-12);
        assert_eq!(split.rss_improvement, 0.0);
    }

    #[test]
    fn tiny_table_rejected() {
        let t = exact(1.0, 9);
        assert_eq!(detect_regimes(&t), Err(ZipfError::TableTooSmall(9)));
    }

    #[test]
    fn csv_and_loglog_outputs() {
        let c = SymbolCorpus::from_labels(["a", "a", "b"]);
        let t = rank_frequency(&c).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("rank,word,count,frequency\n1,0,2,"));
        assert_eq!(t.to_loglog().lines().count(), 3);
    }
}
