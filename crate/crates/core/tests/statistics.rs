//! Sampling-based checks: each compares an estimator against the exact
//! distribution its input was drawn from.

use std::collections::BTreeMap;

use dancecorpus::entropy::ExponentFit;
use dancecorpus::zipf::{detect_regimes, RankFrequencyTable};
use dancecorpus::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn zipf_probabilities(a: f64, words: usize) -> Vec<f64> {
    let w: Vec<f64> = (1..=words).map(|i| (i as f64).powf(-a)).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

fn sample_tokens(p: &[f64], tokens: usize, seed: u64) -> Vec<u64> {
    let mut cdf = p.to_vec();
    for i in 1..cdf.len() {
        cdf[i] += cdf[i - 1];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..tokens)
        .map(|_| {
            let u = rng.gen::<f64>() * cdf[cdf.len() - 1];
            cdf.partition_point(|&c| c < u).min(p.len() - 1) as u64
        })
        .collect()
}

fn corpus_of(tokens: Vec<u64>) -> SymbolCorpus {
    SymbolCorpus::from_labels(tokens.into_iter().map(|t| format!("w{t}")))
}

#[test]
fn rank_table_matches_generator() {
    let p = zipf_probabilities(1.0, 1000);
    let n = 100_000;
    let corpus = corpus_of(sample_tokens(&p, n, 3));
    let table = rank_frequency(&corpus).unwrap();
    let count_of: BTreeMap<&str, f64> = table
        .entries
        .iter()
        .map(|e| (corpus.label(e.word).unwrap(), e.count))
        .collect();
    let mut outside = 0;
    for (i, &pi) in p.iter().enumerate() {
        let observed = count_of.get(format!("w{i}").as_str()).copied().unwrap_or(0.0);
        let sigma = (n as f64 * pi * (1.0 - pi)).sqrt();
        if (observed - n as f64 * pi).abs() > 3.0 * sigma {
            outside += 1;
        }
    }
    // 0.27% of words are expected outside 3 sigma
    assert!(outside <= 10, "{outside} of 1000 words outside 3 sigma");
    let total: f64 = table.entries.iter().map(|e| e.frequency).sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn mle_stderr_matches_seed_spread() {
    let p = zipf_probabilities(1.0, 1000);
    let fits: Vec<PowerLawFit> = (0..30)
        .map(|s| {
            let table = rank_frequency(&corpus_of(sample_tokens(&p, 20_000, 100 + s))).unwrap();
            fit_power_law(&table, FitRange::ALL, FitMethod::DiscreteMle).unwrap()
        })
        .collect();
    let a: Vec<f64> = fits.iter().map(|f| f.exponent_a).collect();
    let mean = a.iter().sum::<f64>() / a.len() as f64;
    let spread = (a.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (a.len() - 1) as f64).sqrt();
    let reported = fits.iter().map(|f| f.stderr_a).sum::<f64>() / fits.len() as f64;
    assert!((mean - 1.0).abs() < 0.02, "{mean}");
    assert!(spread / reported > 0.6 && spread / reported < 1.6, "spread {spread} vs stderr {reported}");
}

#[test]
fn sampled_single_law_split_gain_is_finite_sample_noise() {
    // Sorting noisy tail counts bends the empirical curve, so a split always
    // helps on samples; the gain must shrink with sample size and vanish on
    // the exact table.
    let p = zipf_probabilities(1.0, 1000);
    let mean_gain = |tokens: usize| {
        (0..3)
            .map(|seed| {
                let table = rank_frequency(&corpus_of(sample_tokens(&p, tokens, 200 + seed))).unwrap();
                detect_regimes(&table).unwrap().rss_improvement
            })
            .sum::<f64>()
            / 3.0
    };
    let (small, large) = (mean_gain(100_000), mean_gain(1_000_000));
    assert!(large < small, "{large} !< {small}");
    let exact = RankFrequencyTable::from_weights(p.iter().enumerate().map(|(i, &x)| (i as u64, x))).unwrap();
    let split = detect_regimes(&exact).unwrap();
    assert!(split.rss_improvement < 0.05 && !split.two_regimes);
}

#[test]
fn iid_bigram_conditional_entropy() {
    let tokens = sample_tokens(&[0.25; 4], 100_000, 5);
    let h = ngram_entropy(&corpus_of(tokens), 2).unwrap();
    assert!((h.conditional - 2.0).abs() <= 0.05, "{}", h.conditional);
}

fn staircase_chi_square(m: u32, q: f64, max_len: u32, seed: u64) {
    let spec = RandomTextSpec {
        alphabet_size: m,
        space_probability: q,
        char_count: 200_000,
        seed,
    };
    let corpus = generate_random_text(&spec).unwrap();
    let mut observed: BTreeMap<String, f64> = BTreeMap::new();
    for &t in &corpus.tokens {
        *observed.entry(corpus.label(t).unwrap().to_string()).or_default() += 1.0;
    }
    let total = corpus.len() as f64;
    // every word up to max_len, then one pooled cell for the longer ones
    let mut words = vec![String::new()];
    let mut cells = Vec::new();
    let mut covered = 0.0;
    for len in 1..=max_len {
        words = words
            .iter()
            .flat_map(|w| (0..m).map(move |k| format!("{w}{}", randlang::letter(k))))
            .collect();
        let p_word = q * (1.0 - q).powi(len as i32 - 1) / f64::from(m).powi(len as i32);
        for w in &words {
            cells.push((observed.get(w).copied().unwrap_or(0.0), p_word * total));
            covered += observed.get(w).copied().unwrap_or(0.0);
        }
    }
    let p_longer = (1.0 - q).powi(max_len as i32);
    cells.push((total - covered, p_longer * total));
    assert!(cells.iter().all(|&(_, e)| e >= 5.0), "a cell has expected count below 5");
    let stat: f64 = cells.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let critical = ChiSquared::new((cells.len() - 1) as f64).unwrap().inverse_cdf(0.99);
    assert!(stat <= critical, "M={m}: chi2 {stat} > {critical} with {} cells", cells.len());
}

#[test]
fn random_text_follows_staircase() {
    staircase_chi_square(1, 0.5, 8, 1);
    staircase_chi_square(2, 0.3, 6, 2);
    staircase_chi_square(3, 0.25, 4, 3);
    staircase_chi_square(4, 0.2, 3, 4);
}

#[test]
fn random_text_word_count() {
    for (m, q, seed) in [(26, 0.18, 1), (3, 0.5, 2), (10, 0.05, 3)] {
        let spec = RandomTextSpec {
            alphabet_size: m,
            space_probability: q,
            char_count: 100_000,
            seed,
        };
        let words = generate_random_text(&spec).unwrap().len() as f64;
        // a word starts at each letter preceded by a space
        let expected = spec.expected_tokens();
        let p = q * (1.0 - q);
        // neighbouring starts are negatively correlated, so this over-covers
        let sigma = (spec.char_count as f64 * p * (1.0 - p)).sqrt();
        assert!((words - expected).abs() <= 5.0 * sigma, "{words} vs {expected}");
    }
}

#[test]
fn self_comparison_rarely_discriminates() {
    let spec = RandomTextSpec {
        alphabet_size: 26,
        space_probability: 0.18,
        char_count: 20_000,
        seed: 0,
    };
    let fit = ExponentFit::default();
    let reps = 100;
    let mut both_small = 0;
    for rep in 0..reps {
        let draw = |k: u64| generate_random_text(&RandomTextSpec { seed: rep * 1000 + k, ..spec }).unwrap();
        let subject = draw(0);
        let baselines: Vec<SymbolCorpus> = (1..=30).map(draw).collect();
        let r = compare_to_random(&subject, &baselines, &fit).unwrap();
        let small = |z: Option<f64>| z.is_some_and(|z| z.abs() < 3.0);
        if small(r.entropy.z_score) && small(r.zipf_exponent.z_score) {
            both_small += 1;
        }
    }
    assert!(both_small >= 95, "{both_small}/{reps}");
}

#[test]
fn constant_corpus_is_far_below_random_entropy() {
    let spec = RandomTextSpec {
        alphabet_size: 26,
        space_probability: 0.18,
        char_count: 20_000,
        seed: 0,
    };
    let baselines: Vec<SymbolCorpus> = (1..=10)
        .map(|k| generate_random_text(&RandomTextSpec { seed: k, ..spec }).unwrap())
        .collect();
    let subject = SymbolCorpus::from_labels(std::iter::repeat_n("same", baselines[0].len()));
    let r = compare_to_random(&subject, &baselines, &ExponentFit::default()).unwrap();
    assert_eq!(r.subject.unigram_entropy, 0.0);
    assert!(r.entropy.z_score.unwrap() < -10.0, "{:?}", r.entropy);
}

#[test]
fn exact_tables_ols_and_mle_agree() {
    for a in [0.8, 1.0, 1.2] {
        let p = zipf_probabilities(a, 1000);
        let table = RankFrequencyTable::from_weights(p.iter().enumerate().map(|(i, &x)| (i as u64, x))).unwrap();
        let ols = fit_power_law(&table, FitRange::ALL, FitMethod::LoglogOls).unwrap();
        let mle = fit_power_law(&table, FitRange::ALL, FitMethod::DiscreteMle).unwrap();
        assert!((ols.exponent_a - mle.exponent_a).abs() < 0.02);
        assert!((mle.exponent_a - a).abs() < 1e-5);
    }
}
