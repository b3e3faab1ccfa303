//! Binary signal–object matrices under the speaker/hearer least-effort cost.
//!
//! Signal `i` refers to object `j` iff `a_ij = 1`. Objects are equiprobable
//! and a speaker names object `j` with any of its `ω_j` signals uniformly:
//!
//! ```text
//! p(r_j) = 1/m          p(s_i | r_j) = a_ij / ω_j
//! p(s_i, r_j) = a_ij / (m ω_j)
//! ```
//!
//! so every object must carry at least one signal. Entropies are normalized
//! to `[0, 1]`, speaker effort by `ln n` and hearer effort by `ln m`, and
//! the combined cost is `Ω(λ) = λ h(R|S) + (1 - λ) h(S)`.
//!
//! [`minimize`] is an accept-on-ties stochastic hill climb; [`sweep`] runs it
//! over a λ grid and [`detect_transition`] locates the jump in mutual
//! information and lexicon size.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::zipf::{fit_power_law, FitMethod, FitRange, PowerLawFit, RankFrequencyTable};

#[derive(Debug, Error, PartialEq)]
pub enum LeastEffortError {
    #[error("matrix has no links")]
    AllZero,
    #[error("object {0} is not named by any signal")]
    UnnamedObject(usize),
    #[error("matrix needs {expected} cells, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("bad matrix row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error("lambda must lie in [0, 1], got {0}")]
    Lambda(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Domain(String),
}

/// Binary `n × m` matrix, row-major, signals on rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignalObjectMatrix {
    n: usize,
    m: usize,
    cells: Vec<u8>,
}

impl SignalObjectMatrix {
    pub fn new(n: usize, m: usize, cells: Vec<bool>) -> Result<Self, LeastEffortError> {
        Self::from_cells(n, m, cells.into_iter().map(u8::from).collect())
    }

    fn from_cells(n: usize, m: usize, cells: Vec<u8>) -> Result<Self, LeastEffortError> {
        if n == 0 || m == 0 || cells.len() != n * m {
            return Err(LeastEffortError::Shape {
                expected: n * m,
                got: cells.len(),
            });
        }
        if cells.iter().all(|&c| c == 0) {
            return Err(LeastEffortError::AllZero);
        }
        Ok(SignalObjectMatrix { n, m, cells })
    }

    /// Parse rows of `0`/`1` characters; whitespace inside a row is ignored.
    pub fn from_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self, LeastEffortError> {
        let mut cells = Vec::new();
        let mut m = None;
        for (row, line) in rows.iter().enumerate() {
            let before = cells.len();
            for ch in line.as_ref().chars().filter(|c| !c.is_whitespace()) {
                match ch {
                    '0' => cells.push(0),
                    '1' => cells.push(1),
                    other => {
                        return Err(LeastEffortError::Parse {
                            row,
                            message: format!("unexpected character {other:?}"),
                        })
                    }
                }
            }
            let width = cells.len() - before;
            if *m.get_or_insert(width) != width {
                return Err(LeastEffortError::Parse {
                    row,
                    message: format!("row has {width} cells, expected {}", m.unwrap()),
                });
            }
        }
        Self::from_cells(rows.len(), m.unwrap_or(0), cells)
    }

    pub fn identity(n: usize) -> Self {
        let cells = (0..n * n).map(|k| u8::from(k / n == k % n)).collect();
        Self::from_cells(n, n, cells).expect("identity of n >= 1")
    }

    pub fn ones(n: usize, m: usize) -> Self {
        Self::from_cells(n, m, vec![1; n * m]).expect("non-empty")
    }

    pub fn signals(&self) -> usize {
        self.n
    }

    pub fn objects(&self) -> usize {
        self.m
    }

    pub fn get(&self, signal: usize, object: usize) -> bool {
        self.cells[signal * self.m + object] == 1
    }

    /// `μ_i`, the number of objects each signal refers to.
    pub fn signal_degrees(&self) -> Vec<usize> {
        self.cells
            .chunks(self.m)
            .map(|row| row.iter().map(|&c| usize::from(c)).sum())
            .collect()
    }

    /// `ω_j`, the number of signals naming each object.
    pub fn object_degrees(&self) -> Vec<usize> {
        object_degrees(&self.cells, self.n, self.m)
    }

    /// Effective lexicon size `|{i : μ_i > 0}| / n`.
    pub fn lexicon(&self) -> f64 {
        let used = self.signal_degrees().into_iter().filter(|&d| d > 0).count();
        used as f64 / self.n as f64
    }

    pub fn first_unnamed_object(&self) -> Option<usize> {
        self.object_degrees().iter().position(|&w| w == 0)
    }

    /// Swap two signals (rows).
    pub fn swap_signals(&mut self, a: usize, b: usize) {
        for j in 0..self.m {
            self.cells.swap(a * self.m + j, b * self.m + j);
        }
    }

    /// Swap two objects (columns).
    pub fn swap_objects(&mut self, a: usize, b: usize) {
        for i in 0..self.n {
            self.cells.swap(i * self.m + a, i * self.m + b);
        }
    }

    /// Dense `0`/`1` grid, one signal per line.
    pub fn to_grid(&self) -> String {
        let mut out = String::with_capacity(self.n * (self.m + 1));
        for row in self.cells.chunks(self.m) {
            out.extend(row.iter().map(|&c| if c == 1 { '1' } else { '0' }));
            out.push('\n');
        }
        out
    }

    pub fn from_grid(text: &str) -> Result<Self, LeastEffortError> {
        let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        Self::from_rows(&rows)
    }
}

impl Serialize for SignalObjectMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<String> = self.to_grid().lines().map(String::from).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SignalObjectMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<String>::deserialize(d)?;
        SignalObjectMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

fn object_degrees(cells: &[u8], n: usize, m: usize) -> Vec<usize> {
    let mut omega = vec![0usize; m];
    for i in 0..n {
        for (w, &c) in omega.iter_mut().zip(&cells[i * m..(i + 1) * m]) {
            *w += usize::from(c);
        }
    }
    omega
}

/// Joint and marginal distributions of a matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distributions {
    /// Row-major `n × m`.
    pub joint: Vec<f64>,
    pub signals: Vec<f64>,
    pub objects: Vec<f64>,
}

pub fn matrix_probabilities(matrix: &SignalObjectMatrix) -> Result<Distributions, LeastEffortError> {
    let (n, m) = (matrix.n, matrix.m);
    let omega = matrix.object_degrees();
    if let Some(j) = omega.iter().position(|&w| w == 0) {
        return Err(LeastEffortError::UnnamedObject(j));
    }
    let mut joint = vec![0.0; n * m];
    for i in 0..n {
        for j in 0..m {
            if matrix.get(i, j) {
                joint[i * m + j] = 1.0 / (m as f64 * omega[j] as f64);
            }
        }
    }
    let signals = (0..n).map(|i| joint[i * m..(i + 1) * m].iter().sum()).collect();
    let objects = vec![1.0 / m as f64; m];
    Ok(Distributions {
        joint,
        signals,
        objects,
    })
}

/// Normalized effort entropies of one matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffortSummary {
    /// Speaker effort `H(S) / ln n`.
    pub h_s: f64,
    /// Hearer effort `H(R|S) / ln m`.
    pub h_r_given_s: f64,
    /// `(H(S) - H(S|R)) / ln n`.
    pub mutual_info: f64,
    /// Effective lexicon size.
    pub lexicon: f64,
}

/// Raw entropies in nats, from integer degrees so that the same matrix
/// always produces bit-identical values.
struct Entropies {
    h_s: f64,
    h_s_given_r: f64,
    h_r_given_s: f64,
}

fn entropies(cells: &[u8], n: usize, m: usize, omega: &[usize], inv: &mut Vec<f64>) -> Entropies {
    inv.clear();
    inv.extend(omega.iter().map(|&w| 1.0 / w as f64));
    let mf = m as f64;
    let mut h_s = 0.0;
    for row in cells.chunks(m) {
        let mass: f64 = row.iter().zip(inv.iter()).map(|(&c, &v)| f64::from(c) * v).sum();
        if mass > 0.0 {
            let p = mass / mf;
            h_s -= p * p.ln();
        }
    }
    let h_s_given_r = omega.iter().map(|&w| (w as f64).ln()).sum::<f64>() / mf;
    // H(S,R) = ln m + H(S|R) because p(r) is uniform
    let h_r_given_s = mf.ln() + h_s_given_r - h_s;
    debug_assert_eq!(cells.len(), n * m);
    Entropies {
        h_s: h_s.max(0.0),
        h_s_given_r,
        h_r_given_s: h_r_given_s.max(0.0),
    }
}

fn normalize(h: f64, size: usize) -> f64 {
    if size <= 1 {
        0.0
    } else {
        h / (size as f64).ln()
    }
}

fn omega_checked(matrix: &SignalObjectMatrix) -> Result<Vec<usize>, LeastEffortError> {
    let omega = matrix.object_degrees();
    match omega.iter().position(|&w| w == 0) {
        Some(j) => Err(LeastEffortError::UnnamedObject(j)),
        None => Ok(omega),
    }
}

pub fn effort_summary(matrix: &SignalObjectMatrix) -> Result<EffortSummary, LeastEffortError> {
    let omega = omega_checked(matrix)?;
    let e = entropies(&matrix.cells, matrix.n, matrix.m, &omega, &mut Vec::new());
    Ok(EffortSummary {
        h_s: normalize(e.h_s, matrix.n),
        h_r_given_s: normalize(e.h_r_given_s, matrix.m),
        mutual_info: normalize(e.h_s - e.h_s_given_r, matrix.n),
        lexicon: matrix.lexicon(),
    })
}

fn check_lambda(lambda: f64) -> Result<(), LeastEffortError> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(LeastEffortError::Lambda(lambda))
    }
}

fn omega_cost(cells: &[u8], n: usize, m: usize, omega: &[usize], lambda: f64, inv: &mut Vec<f64>) -> f64 {
    let e = entropies(cells, n, m, omega, inv);
    lambda * normalize(e.h_r_given_s, m) + (1.0 - lambda) * normalize(e.h_s, n)
}

/// `Ω(λ) = λ h(R|S) + (1 - λ) h(S)`.
pub fn cost(matrix: &SignalObjectMatrix, lambda: f64) -> Result<f64, LeastEffortError> {
    check_lambda(lambda)?;
    let omega = omega_checked(matrix)?;
    Ok(omega_cost(&matrix.cells, matrix.n, matrix.m, &omega, lambda, &mut Vec::new()))
}

/// Floor on the default stagnation limit. At 2 x 2, `2 n m` is 8 steps,
/// and a run stops on a plateau about a third of the time.
pub const MIN_STAGNATION: usize = 64;

/// Hill-climb settings. `None` picks the size-dependent default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerParams {
    /// Per-cell flip probability; default `2 / (n m)`.
    pub flip_probability: Option<f64>,
    /// Consecutive non-improving steps before stopping; default
    /// `max(2 n m, MIN_STAGNATION)`.
    pub stagnation_limit: Option<usize>,
    pub max_steps: usize,
}

impl Default for OptimizerParams {
    fn default() -> Self {
        OptimizerParams {
            flip_probability: None,
            stagnation_limit: None,
            max_steps: 2_000_000,
        }
    }
}

impl OptimizerParams {
    fn resolve(&self, n: usize, m: usize) -> Result<(f64, usize), LeastEffortError> {
        let cells = (n * m) as f64;
        let nu = self.flip_probability.unwrap_or(2.0 / cells).min(1.0);
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(LeastEffortError::Config(format!(
                "flip probability must lie in (0, 1], got {nu}"
            )));
        }
        let limit = self.stagnation_limit.unwrap_or((2 * n * m).max(MIN_STAGNATION));
        if limit == 0 || self.max_steps == 0 {
            return Err(LeastEffortError::Config(
                "stagnation limit and max steps must be positive".into(),
            ));
        }
        Ok((nu, limit))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeResult {
    pub matrix: SignalObjectMatrix,
    pub cost: f64,
    /// Cost of the current matrix, initial state first, then after each step.
    pub trace: Vec<f64>,
    pub steps: usize,
    pub seed: u64,
}

/// Gap to the next flipped cell when each cell flips with probability `nu`.
fn geometric_gap(rng: &mut ChaCha8Rng, log_keep: f64) -> usize {
    if log_keep == f64::NEG_INFINITY {
        return 0;
    }
    let u: f64 = 1.0 - rng.gen::<f64>();
    let gap = (u.ln() / log_keep).floor();
    if gap >= usize::MAX as f64 {
        usize::MAX
    } else {
        gap as usize
    }
}

fn climb(
    lambda: f64,
    n: usize,
    m: usize,
    params: &OptimizerParams,
    seed: u64,
    keep_trace: bool,
) -> Result<MinimizeResult, LeastEffortError> {
    check_lambda(lambda)?;
    if n < 2 || m < 2 {
        return Err(LeastEffortError::Config(format!(
            "need at least 2 signals and 2 objects, got {n} x {m}"
        )));
    }
    let (nu, limit) = params.resolve(n, m)?;
    let log_keep = (1.0 - nu).ln();
    let total = n * m;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut cells = vec![0u8; total];
    let mut omega;
    loop {
        for c in cells.iter_mut() {
            *c = u8::from(rng.gen::<bool>());
        }
        omega = object_degrees(&cells, n, m);
        if omega.iter().all(|&w| w > 0) {
            break;
        }
    }
    let mut inv = Vec::with_capacity(m);
    let mut current = omega_cost(&cells, n, m, &omega, lambda, &mut inv);
    let mut trace = if keep_trace { vec![current] } else { Vec::new() };
    let mut flips = Vec::new();
    let mut stagnant = 0;
    let mut steps = 0;

    while stagnant < limit && steps < params.max_steps {
        steps += 1;
        flips.clear();
        let mut pos = geometric_gap(&mut rng, log_keep);
        while pos < total {
            flips.push(pos);
            pos = pos.saturating_add(1).saturating_add(geometric_gap(&mut rng, log_keep));
        }

        let mut accepted = false;
        if !flips.is_empty() {
            let mut feasible = true;
            for &k in &flips {
                cells[k] ^= 1;
                let j = k % m;
                if cells[k] == 1 {
                    omega[j] += 1;
                } else {
                    omega[j] -= 1;
                }
            }
            for &k in &flips {
                if omega[k % m] == 0 {
                    feasible = false;
                }
            }
            if feasible {
                let candidate = omega_cost(&cells, n, m, &omega, lambda, &mut inv);
                if candidate <= current {
                    if candidate < current {
                        stagnant = 0;
                    } else {
                        stagnant += 1;
                    }
                    current = candidate;
                    accepted = true;
                }
            }
            if !accepted {
                for &k in &flips {
                    cells[k] ^= 1;
                    let j = k % m;
                    if cells[k] == 1 {
                        omega[j] += 1;
                    } else {
                        omega[j] -= 1;
                    }
                }
            }
        }
        if !accepted {
            stagnant += 1;
        }
        if keep_trace {
            trace.push(current);
        }
    }

    let matrix = SignalObjectMatrix::from_cells(n, m, cells).expect("feasible matrices have links");
    Ok(MinimizeResult {
        matrix,
        cost: current,
        trace,
        steps,
        seed,
    })
}

/// Minimize `Ω(λ)` from a random start.
///
/// The start draws every cell from Bernoulli(0.5), redrawing until each
/// object is named. Each step flips every cell independently with the
/// configured probability; candidates leaving an object unnamed are
/// rejected, others are kept iff their cost does not exceed the current one.
pub fn minimize(
    lambda: f64,
    n: usize,
    m: usize,
    params: &OptimizerParams,
    seed: u64,
) -> Result<MinimizeResult, LeastEffortError> {
    climb(lambda, n, m, params, seed, true)
}

/// Seed of run `(lambda_index, seed_index)` under a global seed.
pub fn derive_seed(global: u64, lambda_index: usize, seed_index: usize) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    splitmix(splitmix(splitmix(global) ^ lambda_index as u64) ^ seed_index as u64)
}

/// Parameters of a λ sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub grid: Vec<f64>,
    pub n: usize,
    pub m: usize,
    pub seeds_per_lambda: usize,
    #[serde(default)]
    pub params: OptimizerParams,
    pub seed: u64,
}

/// Final state of one `(λ, seed)` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub lambda: f64,
    pub lambda_index: usize,
    pub seed_index: usize,
    pub seed: u64,
    pub cost: f64,
    pub summary: EffortSummary,
    /// Signals ranked by `p(s_i)`; unused signals excluded.
    pub signal_ranks: RankFrequencyTable,
    pub iterations: usize,
    pub matrix: SignalObjectMatrix,
}

/// Seed-averaged curves at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanPoint {
    pub lambda: f64,
    pub cost: f64,
    pub h_s: f64,
    pub h_r_given_s: f64,
    pub mutual_info: f64,
    pub lexicon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionEstimate {
    /// Midpoint of the grid pair with the largest jump in mean mutual
    /// information.
    pub lambda_star: f64,
    /// Half the spacing of that pair.
    pub uncertainty: f64,
    pub mutual_info_jump: f64,
    /// Same estimate from the mean lexicon curve.
    pub lexicon_lambda_star: f64,
    pub lexicon_jump: f64,
    /// Largest jump is less than twice the median jump.
    pub low_confidence: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaSweepResult {
    pub grid: Vec<f64>,
    pub n: usize,
    pub m: usize,
    pub seeds_per_lambda: usize,
    pub seed: u64,
    /// Grid order, then seed order.
    pub runs: Vec<RunRecord>,
    pub transition_estimate: Option<TransitionEstimate>,
}

impl LambdaSweepResult {
    pub fn means(&self) -> Vec<MeanPoint> {
        self.grid
            .iter()
            .enumerate()
            .map(|(k, &lambda)| {
                let runs: Vec<&RunRecord> = self.runs.iter().filter(|r| r.lambda_index == k).collect();
                let c = runs.len().max(1) as f64;
                let avg = |f: &dyn Fn(&RunRecord) -> f64| runs.iter().map(|r| f(r)).sum::<f64>() / c;
                MeanPoint {
                    lambda,
                    cost: avg(&|r| r.cost),
                    h_s: avg(&|r| r.summary.h_s),
                    h_r_given_s: avg(&|r| r.summary.h_r_given_s),
                    mutual_info: avg(&|r| r.summary.mutual_info),
                    lexicon: avg(&|r| r.summary.lexicon),
                }
            })
            .collect()
    }

    /// `lambda,seed_index,seed,cost,h_s,h_r_given_s,mutual_info,L,iterations`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,seed_index,seed,cost,h_s,h_r_given_s,mutual_info,L,iterations\n");
        for r in &self.runs {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.lambda,
                r.seed_index,
                r.seed,
                r.cost,
                r.summary.h_s,
                r.summary.h_r_given_s,
                r.summary.mutual_info,
                r.summary.lexicon,
                r.iterations
            );
        }
        out
    }

    /// Seed-averaged curves, `lambda cost h_s h_r_given_s mutual_info L`.
    pub fn means_table(&self) -> String {
        let mut out = String::from("# lambda cost h_s h_r_given_s mutual_info L\n");
        for p in self.means() {
            let _ = writeln!(
                out,
                "{} {} {} {} {} {}",
                p.lambda, p.cost, p.h_s, p.h_r_given_s, p.mutual_info, p.lexicon
            );
        }
        out
    }
}

pub fn validate_grid(grid: &[f64]) -> Result<(), LeastEffortError> {
    if grid.is_empty() {
        return Err(LeastEffortError::Config("lambda grid is empty".into()));
    }
    if let Some(&bad) = grid.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return Err(LeastEffortError::Lambda(bad));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LeastEffortError::Config("lambda grid must be strictly increasing".into()));
    }
    Ok(())
}

fn signal_ranks(matrix: &SignalObjectMatrix) -> Result<RankFrequencyTable, LeastEffortError> {
    let dist = matrix_probabilities(matrix)?;
    RankFrequencyTable::from_weights(
        dist.signals
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, &p)| (i as u64, p)),
    )
    .map_err(|e| LeastEffortError::Domain(e.to_string()))
}

/// Run [`minimize`] for every `(λ, seed)` pair. Runs are independent and
/// execute in parallel; results come back in grid order.
pub fn sweep(config: &SweepConfig) -> Result<LambdaSweepResult, LeastEffortError> {
    validate_grid(&config.grid)?;
    if config.seeds_per_lambda == 0 {
        return Err(LeastEffortError::Config("need at least one seed per lambda".into()));
    }
    if config.n < 2 || config.m < 2 {
        return Err(LeastEffortError::Config(format!(
            "need at least 2 signals and 2 objects, got {} x {}",
            config.n, config.m
        )));
    }
    config.params.resolve(config.n, config.m)?;

    let jobs: Vec<(usize, usize)> = (0..config.grid.len())
        .flat_map(|k| (0..config.seeds_per_lambda).map(move |s| (k, s)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(k, s)| {
            let lambda = config.grid[k];
            let seed = derive_seed(config.seed, k, s);
            let result = climb(lambda, config.n, config.m, &config.params, seed, false)?;
            Ok(RunRecord {
                lambda,
                lambda_index: k,
                seed_index: s,
                seed,
                cost: result.cost,
                summary: effort_summary(&result.matrix)?,
                signal_ranks: signal_ranks(&result.matrix)?,
                iterations: result.steps,
                matrix: result.matrix,
            })
        })
        .collect::<Result<Vec<_>, LeastEffortError>>()?;

    let mut result = LambdaSweepResult {
        grid: config.grid.clone(),
        n: config.n,
        m: config.m,
        seeds_per_lambda: config.seeds_per_lambda,
        seed: config.seed,
        runs,
        transition_estimate: None,
    };
    if result.grid.len() >= MIN_TRANSITION_POINTS {
        result.transition_estimate = Some(detect_transition(&result)?);
    }
    Ok(result)
}

pub const MIN_TRANSITION_POINTS: usize = 5;

fn largest_jump(curve: &[f64]) -> (usize, f64, f64) {
    let jumps: Vec<f64> = curve.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let (k, &jump) = jumps
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |best, (k, j)| if *j > *best.1 { (k, j) } else { best });
    let mut sorted = jumps.clone();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    };
    (k, jump, median)
}

/// Transition location from seed-averaged mutual-information and lexicon
/// curves over a grid.
pub fn transition_from_curves(
    grid: &[f64],
    mutual_info: &[f64],
    lexicon: &[f64],
) -> Result<TransitionEstimate, LeastEffortError> {
    validate_grid(grid)?;
    if grid.len() < MIN_TRANSITION_POINTS {
        return Err(LeastEffortError::Domain(format!(
            "transition detection needs at least {MIN_TRANSITION_POINTS} grid points, got {}",
            grid.len()
        )));
    }
    if mutual_info.len() != grid.len() || lexicon.len() != grid.len() {
        return Err(LeastEffortError::Domain("curve length differs from grid".into()));
    }
    let (k, jump, median) = largest_jump(mutual_info);
    let (kl, l_jump, _) = largest_jump(lexicon);
    Ok(TransitionEstimate {
        lambda_star: 0.5 * (grid[k] + grid[k + 1]),
        uncertainty: 0.5 * (grid[k + 1] - grid[k]),
        mutual_info_jump: jump,
        lexicon_lambda_star: 0.5 * (grid[kl] + grid[kl + 1]),
        lexicon_jump: l_jump,
        low_confidence: jump < 2.0 * median,
    })
}

pub fn detect_transition(sweep: &LambdaSweepResult) -> Result<TransitionEstimate, LeastEffortError> {
    let means = sweep.means();
    let mi: Vec<f64> = means.iter().map(|p| p.mutual_info).collect();
    let lex: Vec<f64> = means.iter().map(|p| p.lexicon).collect();
    transition_from_curves(&sweep.grid, &mi, &lex)
}

/// One run's signal-frequency fit inside a λ window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowFit {
    pub lambda: f64,
    pub seed_index: usize,
    pub fit: Option<PowerLawFit>,
    /// Why the fit was rejected, when it was.
    pub rejected: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZipfWindowReport {
    pub window: (f64, f64),
    pub fits: Vec<WindowFit>,
    /// Median exponent over accepted fits.
    pub median_exponent: Option<f64>,
    pub accepted: usize,
}

/// Fit the signal rank-frequency of every run with λ in `window`
/// (inclusive) by log-log least squares over all used signals.
pub fn zipf_at_transition(
    sweep: &LambdaSweepResult,
    window: (f64, f64),
) -> Result<ZipfWindowReport, LeastEffortError> {
    const SLACK: f64 = 1e-12;
    let (lo, hi) = window;
    let fits: Vec<WindowFit> = sweep
        .runs
        .iter()
        .filter(|r| r.lambda >= lo - SLACK && r.lambda <= hi + SLACK)
        .map(|r| match fit_power_law(&r.signal_ranks, FitRange::ALL, FitMethod::LoglogOls) {
            Ok(fit) => WindowFit {
                lambda: r.lambda,
                seed_index: r.seed_index,
                fit: Some(fit),
                rejected: None,
            },
            Err(e) => WindowFit {
                lambda: r.lambda,
                seed_index: r.seed_index,
                fit: None,
                rejected: Some(e.to_string()),
            },
        })
        .collect();
    if fits.is_empty() {
        return Err(LeastEffortError::Domain(format!(
            "no runs with lambda in [{lo}, {hi}]"
        )));
    }
    let mut exps: Vec<f64> = fits.iter().filter_map(|f| f.fit.as_ref()).map(|f| f.exponent_a).collect();
    exps.sort_by(f64::total_cmp);
    let median_exponent = match exps.len() {
        0 => None,
        k if k % 2 == 1 => Some(exps[k / 2]),
        k => Some(0.5 * (exps[k / 2 - 1] + exps[k / 2])),
    };
    Ok(ZipfWindowReport {
        window,
        accepted: exps.len(),
        fits,
        median_exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn identity_probabilities() {
        let d = matrix_probabilities(&SignalObjectMatrix::identity(3)).unwrap();
        assert!(d.signals.iter().all(|&p| close(p, 1.0 / 3.0)));
        assert!(d.objects.iter().all(|&p| close(p, 1.0 / 3.0)));
    }

    #[test]
    fn all_ones_probabilities() {
        let d = matrix_probabilities(&SignalObjectMatrix::ones(3, 3)).unwrap();
        assert!(d.joint.iter().all(|&p| close(p, 1.0 / 9.0)));
    }

    #[test]
    fn speaker_economy_matrix() {
        // "bank" names furniture, bank and river bank; the other words idle
        let a = SignalObjectMatrix::from_rows(&["111", "000", "000"]).unwrap();
        let d = matrix_probabilities(&a).unwrap();
        assert_eq!(d.signals, vec![1.0, 0.0, 0.0]);
        let s = effort_summary(&a).unwrap();
        assert_eq!(s.h_s, 0.0);
        assert!(close(s.h_r_given_s, 1.0));
        assert!(close(s.lexicon, 1.0 / 3.0));
        assert!(close(s.mutual_info, 0.0));
    }

    #[test]
    fn hearer_economy_matrix() {
        let s = effort_summary(&SignalObjectMatrix::identity(3)).unwrap();
        assert!(close(s.h_s, 1.0));
        assert!(close(s.h_r_given_s, 0.0));
        assert!(close(s.mutual_info, 1.0));
        assert!(close(s.lexicon, 1.0));
    }

    #[test]
    fn all_ones_summary() {
        let s = effort_summary(&SignalObjectMatrix::ones(3, 3)).unwrap();
        assert!(close(s.h_s, 1.0));
        assert!(close(s.h_r_given_s, 1.0));
        assert!(close(s.mutual_info, 0.0));
        assert!(close(s.lexicon, 1.0));
    }

    #[test]
    fn single_row_or_column_normalizes_to_zero() {
        let one_signal = SignalObjectMatrix::from_rows(&["111"]).unwrap();
        let s = effort_summary(&one_signal).unwrap();
        assert_eq!(s.h_s, 0.0);
        assert!(close(s.h_r_given_s, 1.0));
        let one_object = SignalObjectMatrix::from_rows(&["1", "1"]).unwrap();
        let s = effort_summary(&one_object).unwrap();
        assert_eq!(s.h_r_given_s, 0.0);
        assert!(close(s.h_s, 1.0));
    }

    #[test]
    fn cost_examples() {
        let id = SignalObjectMatrix::identity(3);
        assert!(close(cost(&id, 0.0).unwrap(), 1.0));
        assert!(close(cost(&id, 1.0).unwrap(), 0.0));
        // h_s = h_r|s = 1, so every weighting costs 1
        assert!(close(cost(&SignalObjectMatrix::ones(3, 3), 0.5).unwrap(), 1.0));
        assert_eq!(cost(&id, 1.5), Err(LeastEffortError::Lambda(1.5)));
        assert!(cost(&id, f64::NAN).is_err());
    }

    #[test]
    fn invalid_matrices() {
        assert_eq!(SignalObjectMatrix::from_rows(&["00", "00"]), Err(LeastEffortError::AllZero));
        assert!(SignalObjectMatrix::from_rows(&["01", "1"]).is_err());
        assert!(SignalObjectMatrix::from_rows(&["0x"]).is_err());
        let unnamed = SignalObjectMatrix::from_rows(&["10", "10"]).unwrap();
        assert_eq!(effort_summary(&unnamed), Err(LeastEffortError::UnnamedObject(1)));
        assert_eq!(cost(&unnamed, 0.5), Err(LeastEffortError::UnnamedObject(1)));
    }

    #[test]
    fn grid_round_trip() {
        let a = SignalObjectMatrix::from_rows(&["101", "010"]).unwrap();
        assert_eq!(a.to_grid(), "101\n010\n");
        assert_eq!(SignalObjectMatrix::from_grid(&a.to_grid()).unwrap(), a);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"["101","010"]"#);
        assert_eq!(serde_json::from_str::<SignalObjectMatrix>(&json).unwrap(), a);
    }

    #[test]
    fn extreme_lambdas_reach_degenerate_optima() {
        // The default patience of 2nm often stops in a local minimum one
        // multi-cell move away from the optimum; give the climber longer.
        let p = OptimizerParams {
            stagnation_limit: Some(20 * 64),
            ..OptimizerParams::default()
        };
        for seed in 0..10 {
            let r = minimize(0.0, 8, 8, &p, seed).unwrap();
            assert!(effort_summary(&r.matrix).unwrap().h_s <= 0.05, "{}", r.matrix.to_grid());
        }
        let reached = (0..10)
            .filter(|&seed| {
                let r = minimize(1.0, 8, 8, &p, seed).unwrap();
                effort_summary(&r.matrix).unwrap().h_r_given_s <= 0.05
            })
            .count();
        assert!(reached >= 7, "{reached}");
    }

    #[test]
    fn minimize_is_deterministic() {
        let p = OptimizerParams::default();
        let a = minimize(0.41, 6, 6, &p, 99).unwrap();
        let b = minimize(0.41, 6, 6, &p, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trace.len(), a.steps + 1);
        assert!(a.trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(a.cost, cost(&a.matrix, 0.41).unwrap());
    }

    #[test]
    fn optimizer_rejects_bad_configs() {
        let p = OptimizerParams::default();
        assert!(minimize(0.5, 1, 4, &p, 0).is_err());
        assert!(minimize(2.0, 4, 4, &p, 0).is_err());
        let bad = OptimizerParams {
            flip_probability: Some(0.0),
            ..p
        };
        assert!(minimize(0.5, 4, 4, &bad, 0).is_err());
        let bad = OptimizerParams { max_steps: 0, ..p };
        assert!(minimize(0.5, 4, 4, &bad, 0).is_err());
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let mut cfg = SweepConfig {
            grid: vec![],
            n: 4,
            m: 4,
            seeds_per_lambda: 1,
            params: OptimizerParams::default(),
            seed: 1,
        };
        assert!(sweep(&cfg).is_err());
        cfg.grid = vec![0.5, 0.2];
        assert!(sweep(&cfg).is_err());
        cfg.grid = vec![0.0, 1.2];
        assert!(sweep(&cfg).is_err());
        cfg.grid = vec![0.0, 1.0];
        cfg.seeds_per_lambda = 0;
        assert!(sweep(&cfg).is_err());
    }

    #[test]
    fn degenerate_sweep_ends() {
        let cfg = SweepConfig {
            grid: vec![0.0, 1.0],
            n: 8,
            m: 8,
            seeds_per_lambda: 4,
            params: OptimizerParams::default(),
            seed: 5,
        };
        let s = sweep(&cfg).unwrap();
        assert_eq!(s.runs.len(), 8);
        assert!(s.transition_estimate.is_none());
        let means = s.means();
        assert!(means[0].lexicon < 0.3, "{:?}", means[0]);
        assert!(means[1].mutual_info > means[0].mutual_info + 0.5);
        assert!(means[1].lexicon > 0.8);
    }

    #[test]
    fn step_curve_transition() {
        let grid: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let step: Vec<f64> = grid.iter().map(|&l| if l >= 0.4 - 1e-9 { 1.0 } else { 0.0 }).collect();
        let t = transition_from_curves(&grid, &step, &step).unwrap();
        assert!((t.lambda_star - 0.4).abs() <= 0.1 + 1e-12);
        assert!((t.uncertainty - 0.05).abs() < 1e-12);
        assert!(!t.low_confidence);
        assert!(close(t.mutual_info_jump, 1.0));
    }

    #[test]
    fn linear_curve_is_low_confidence() {
        let grid: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let t = transition_from_curves(&grid, &grid, &grid).unwrap();
        assert!(t.low_confidence);
    }

    #[test]
    fn short_grid_rejected() {
        let g = [0.0, 0.5, 1.0];
        assert!(transition_from_curves(&g, &g, &g).is_err());
    }

    #[test]
    fn window_fits() {
        let cfg = SweepConfig {
            grid: vec![0.0, 1.0],
            n: 8,
            m: 8,
            seeds_per_lambda: 3,
            params: OptimizerParams {
                stagnation_limit: Some(20 * 64),
                ..OptimizerParams::default()
            },
            seed: 2,
        };
        let s = sweep(&cfg).unwrap();
        let at_zero = zipf_at_transition(&s, (0.0, 0.0)).unwrap();
        assert_eq!(at_zero.fits.len(), 3);
        assert_eq!(at_zero.accepted, 0);
        assert!(at_zero.median_exponent.is_none());
        assert!(at_zero.fits.iter().all(|f| f.rejected.is_some()));
        assert!(zipf_at_transition(&s, (0.3, 0.6)).is_err());
        let at_one = zipf_at_transition(&s, (1.0, 1.0)).unwrap();
        assert!(at_one.median_exponent.unwrap() < 0.3);
    }

    #[test]
    fn seeds_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for k in 0..30 {
            for s in 0..30 {
                assert!(seen.insert(derive_seed(7, k, s)));
            }
        }
        assert_ne!(derive_seed(7, 0, 0), derive_seed(8, 0, 0));
    }
}
