//! The `dancecorpus` command: configuration, subcommands and artifacts.
//!
//! Every subcommand reads an optional TOML [`PipelineConfig`], lets flags
//! override it, and writes its artifacts into the output directory. Files
//! are written to a temporary sibling first and renamed into place.
//!
//! Exit codes: 0 clean, 1 data findings (discrepancies, skipped rows),
//! 2 errors.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::articulator::{articulate, info_budget, QuantizationScheme};
use crate::corpus::SymbolCorpus;
use crate::entropy::{compare_to_random, entropy_report, ExponentFit, MIN_BASELINES};
use crate::ingest::{
    calibrate_distance, from_json_lines, parse_rows, to_canonical_csv, to_json_lines,
    validate_observation, CalibrationTable, DanceObservation, Delimiter, Discrepancy,
    FormatConfig, Tolerances,
};
use crate::least_effort::{
    derive_seed, sweep, zipf_at_transition, OptimizerParams, SweepConfig,
};
use crate::randlang::{generate_random_text, RandomTextSpec};
use crate::zipf::{detect_regimes, fit_power_law, rank_frequency, FitMethod, FitRange};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Stage(String),
}

impl PipelineError {
    fn io(path: &Path, source: io::Error) -> Self {
        PipelineError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

fn stage<E: std::fmt::Display>(e: E) -> PipelineError {
    PipelineError::Stage(e.to_string())
}

/// What a successful command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    /// Data problems worth a non-zero exit (code 1).
    pub findings: bool,
}

#[derive(Debug, Parser)]
#[command(name = "dancecorpus", version, about = "Waggle-dance corpus statistics and least-effort simulations")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Global seed for stochastic commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and cross-check an observation table.
    Ingest(IngestArgs),
    /// Quantize observations into a symbol corpus and measure it.
    Corpus(CorpusArgs),
    /// Rank-frequency table, power-law fits and two-regime search.
    Zipf(ZipfArgs),
    /// Unigram and n-gram entropies.
    Entropy(EntropyArgs),
    /// Sweep the speaker/hearer weighting of the signal-object model.
    Leasteffort(LeastEffortArgs),
    /// Compare a corpus with random intermittent-silence texts.
    Baseline(BaselineArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Observation table (CSV or TSV with a header row).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Fail on the first malformed row instead of skipping it.
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub delimiter: Option<Delimiter>,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Observations as JSON lines (`.jsonl`) or a raw table.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Quantization scheme file (TOML, or JSON by extension).
    #[arg(long)]
    pub scheme: Option<PathBuf>,
    /// Print the scheme's information budget in bits and exit.
    #[arg(long)]
    pub budget: bool,
    #[arg(long)]
    pub method: Option<FitMethod>,
    #[arg(long)]
    pub max_n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ZipfArgs {
    /// Corpus JSON or a token stream (`.txt`, one label per line).
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub min_rank: Option<usize>,
    #[arg(long)]
    pub max_rank: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Highest n-gram order.
    #[arg(long)]
    pub max_n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LeastEffortArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// `lo..hi:count` or a comma-separated list.
    #[arg(long)]
    pub grid: Option<String>,
    /// Runs per grid point.
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Window for the signal-frequency fits, `lo,hi`.
    #[arg(long)]
    pub window: Option<String>,
    #[arg(long)]
    pub stagnation_limit: Option<usize>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Write every final matrix under `matrices/`.
    #[arg(long)]
    pub dump_matrices: bool,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    /// Corpus JSON or token stream to test.
    #[arg(long)]
    pub subject: Option<PathBuf>,
    #[arg(long)]
    pub alphabet_size: Option<u32>,
    #[arg(long)]
    pub space_probability: Option<f64>,
    /// Characters per baseline text; derived from the subject when unset.
    #[arg(long)]
    pub char_count: Option<usize>,
    /// Number of baseline texts.
    #[arg(long)]
    pub ensemble: Option<usize>,
}

/// λ grid as text (`"0..1:21"`, `"0,0.5,1"`) or as an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Text(String),
    Values(Vec<f64>),
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        match self {
            GridSpec::Values(v) => Ok(v.clone()),
            GridSpec::Text(t) => parse_grid(t),
        }
    }
}

/// Parse `lo..hi:count` (inclusive, evenly spaced) or `a,b,c`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let text = text.trim();
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad number `{}` in grid `{text}`", s.trim()))
    };
    if let Some((range, count)) = text.split_once(':') {
        let (lo, hi) = range
            .split_once("..")
            .ok_or_else(|| format!("expected `lo..hi:count`, got `{text}`"))?;
        let (lo, hi) = (num(lo)?, num(hi)?);
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| format!("bad point count in grid `{text}`"))?;
        return match count {
            0 => Err("grid needs at least one point".into()),
            1 => Ok(vec![lo]),
            _ => Ok((0..count)
                .map(|k| {
                    let v = lo + (hi - lo) * k as f64 / (count - 1) as f64;
                    // keeps 0.35 from printing as 0.35000000000000003
                    (v * 1e12).round() / 1e12
                })
                .collect()),
        };
    }
    text.split(',').map(num).collect()
}

fn parse_window(text: &str) -> Result<(f64, f64), String> {
    let v = parse_grid(text)?;
    match v[..] {
        [lo, hi] if lo <= hi => Ok((lo, hi)),
        _ => Err(format!("window must be `lo,hi` with lo <= hi, got `{text}`")),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// Duration → distance anchors, `[[seconds, km], ...]`.
    pub calibration: Option<CalibrationTable>,
    pub ingest: IngestSection,
    pub scheme: Option<QuantizationScheme>,
    pub corpus: CorpusSection,
    pub fit: FitSection,
    pub entropy: EntropySection,
    pub leasteffort: LeastEffortSection,
    pub baseline: BaselineSection,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestSection {
    pub input: Option<PathBuf>,
    pub strict: bool,
    pub format: FormatConfig,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    pub input: Option<PathBuf>,
    /// Scheme file; overrides an inline `[scheme]` table.
    pub scheme: Option<PathBuf>,
    /// Corpus consumed by `zipf` and `entropy`.
    pub corpus: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitSection {
    pub method: FitMethod,
    pub min_rank: Option<usize>,
    pub max_rank: Option<usize>,
}

impl FitSection {
    fn range(&self) -> FitRange {
        FitRange {
            min: self.min_rank.unwrap_or(1),
            max: self.max_rank,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntropySection {
    pub max_n: usize,
}

impl Default for EntropySection {
    fn default() -> Self {
        EntropySection { max_n: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LeastEffortSection {
    pub n: usize,
    pub m: usize,
    pub grid: GridSpec,
    pub seeds: usize,
    pub window: (f64, f64),
    pub params: OptimizerParams,
    pub dump_matrices: bool,
}

impl Default for LeastEffortSection {
    fn default() -> Self {
        LeastEffortSection {
            n: 32,
            m: 32,
            grid: GridSpec::Text("0..1:21".into()),
            seeds: 10,
            window: (0.38, 0.44),
            params: OptimizerParams::default(),
            dump_matrices: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineSection {
    pub subject: Option<PathBuf>,
    pub alphabet_size: u32,
    pub space_probability: f64,
    pub char_count: Option<usize>,
    pub ensemble: usize,
}

impl Default for BaselineSection {
    fn default() -> Self {
        BaselineSection {
            subject: None,
            alphabet_size: 26,
            space_probability: 0.18,
            char_count: None,
            ensemble: 20,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        Self::from_toml(&read_text(path)?)
    }
}

fn read_text(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))
}

/// Write `bytes` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "no file name"))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

struct OutDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutDir {
    fn new(root: PathBuf) -> Self {
        OutDir {
            root,
            written: Vec::new(),
        }
    }

    fn text(&mut self, name: &str, contents: &str) -> Result<(), PipelineError> {
        let path = self.root.join(name);
        write_atomic(&path, contents.as_bytes()).map_err(|e| PipelineError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), PipelineError> {
        let mut s = serde_json::to_string_pretty(value).map_err(stage)?;
        s.push('\n');
        self.text(name, &s)
    }

    /// The value, or `{"error": ...}` when the computation failed.
    fn json_or_error<T: Serialize, E: std::fmt::Display>(
        &mut self,
        name: &str,
        value: Result<T, E>,
    ) -> Result<(), PipelineError> {
        match value {
            Ok(v) => self.json(name, &v),
            Err(e) => {
                eprintln!("warning: {name}: {e}");
                self.json(name, &serde_json::json!({ "error": e.to_string() }))
            }
        }
    }

    fn finish(self, findings: bool) -> Outcome {
        Outcome {
            written: self.written,
            findings,
        }
    }
}

/// Parse arguments, run, report, and return the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    match run(&cli) {
        Ok(outcome) => {
            for p in &outcome.written {
                eprintln!("wrote {}", p.display());
            }
            i32::from(outcome.findings)
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, PipelineError> {
    let config = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    let out = cli
        .out
        .clone()
        .or_else(|| config.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let seed = cli.seed.or(config.seed);
    let out = OutDir::new(out);
    match &cli.command {
        Command::Ingest(a) => cmd_ingest(a, &config, out),
        Command::Corpus(a) => cmd_corpus(a, &config, out),
        Command::Zipf(a) => cmd_zipf(a, &config, out),
        Command::Entropy(a) => cmd_entropy(a, &config, out),
        Command::Leasteffort(a) => cmd_leasteffort(a, &config, require_seed(seed)?, out),
        Command::Baseline(a) => cmd_baseline(a, &config, require_seed(seed)?, out),
    }
}

fn require_seed(seed: Option<u64>) -> Result<u64, PipelineError> {
    seed.ok_or_else(|| {
        PipelineError::Usage("this command is stochastic: pass --seed or set `seed` in the config".into())
    })
}

fn need_path(flag: Option<&PathBuf>, configured: Option<&PathBuf>, what: &str) -> Result<PathBuf, PipelineError> {
    flag.or(configured)
        .cloned()
        .ok_or_else(|| PipelineError::Usage(format!("no {what} given")))
}

#[derive(Serialize)]
struct SkippedRow {
    row: usize,
    error: String,
}

#[derive(Serialize)]
struct RowDiscrepancy<'a> {
    row: usize,
    #[serde(flatten)]
    discrepancy: &'a Discrepancy,
}

#[derive(Serialize)]
struct IngestReport<'a> {
    rows_read: usize,
    rows_skipped: Vec<SkippedRow>,
    discrepancies: Vec<RowDiscrepancy<'a>>,
}

fn cmd_ingest(args: &IngestArgs, config: &PipelineConfig, mut out: OutDir) -> Result<Outcome, PipelineError> {
    let input = need_path(args.input.as_ref(), config.ingest.input.as_ref(), "input table (--input)")?;
    let text = read_text(&input)?;
    let mut format = config.ingest.format.clone();
    if let Some(d) = args.delimiter {
        format.delimiter = d;
    }
    let strict = args.strict || config.ingest.strict;

    let mut observations = Vec::new();
    let mut skipped = Vec::new();
    for (row, parsed) in parse_rows(&text, &format).map_err(stage)?.into_iter().enumerate() {
        match parsed {
            Ok(obs) => observations.push((row, obs)),
            Err(e) if strict => return Err(stage(e)),
            Err(e) => {
                eprintln!("warning: skipping row {row}: {e}");
                skipped.push(SkippedRow {
                    row,
                    error: e.to_string(),
                });
            }
        }
    }

    let checks: Vec<(usize, Vec<Discrepancy>)> = observations
        .iter()
        .map(|(row, obs)| (*row, validate_observation(obs, &config.ingest.tolerances)))
        .collect();
    let discrepancies: Vec<RowDiscrepancy> = checks
        .iter()
        .flat_map(|(row, ds)| ds.iter().map(|d| RowDiscrepancy { row: *row, discrepancy: d }))
        .collect();
    let findings = !skipped.is_empty() || !discrepancies.is_empty();

    let obs: Vec<DanceObservation> = observations.iter().map(|(_, o)| o.clone()).collect();
    out.text("observations.jsonl", &to_json_lines(&obs).map_err(stage)?)?;
    out.text("observations.csv", &to_canonical_csv(&obs).map_err(stage)?)?;
    if let Some(table) = &config.calibration {
        let mut csv = String::from("row,avg_duration,distance_km,calibrated_distance_km\n");
        for (row, o) in &observations {
            let km = calibrate_distance(o.avg_duration, table);
            csv.push_str(&format!("{row},{},{},{km}\n", o.avg_duration, o.distance_km));
        }
        out.text("calibration.csv", &csv)?;
    }
    out.json(
        "discrepancies.json",
        &IngestReport {
            rows_read: observations.len() + skipped.len(),
            rows_skipped: skipped,
            discrepancies,
        },
    )?;
    Ok(out.finish(findings))
}

fn load_scheme(args: &CorpusArgs, config: &PipelineConfig) -> Result<QuantizationScheme, PipelineError> {
    let path = args.scheme.as_ref().or(config.corpus.scheme.as_ref());
    let scheme = match path {
        Some(p) => {
            let text = read_text(p)?;
            if p.extension().is_some_and(|e| e == "json") {
                serde_json::from_str(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", p.display())))?
            } else {
                toml::from_str(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", p.display())))?
            }
        }
        None => config.scheme.clone().unwrap_or_default(),
    };
    scheme.validate().map_err(stage)?;
    Ok(scheme)
}

fn load_observations(path: &Path, format: &FormatConfig) -> Result<Vec<DanceObservation>, PipelineError> {
    let text = read_text(path)?;
    if path.extension().is_some_and(|e| e == "jsonl") {
        from_json_lines(&text).map_err(stage)
    } else {
        crate::ingest::parse_observations(&text, format).map_err(stage)
    }
}

fn load_corpus(path: &Path) -> Result<SymbolCorpus, PipelineError> {
    let text = read_text(path)?;
    let parsed = if path.extension().is_some_and(|e| e == "txt") {
        SymbolCorpus::from_token_stream(&text)
    } else {
        SymbolCorpus::from_json(&text)
    };
    parsed.map_err(|e| PipelineError::Stage(format!("{}: {e}", path.display())))
}

fn cmd_corpus(args: &CorpusArgs, config: &PipelineConfig, mut out: OutDir) -> Result<Outcome, PipelineError> {
    let scheme = load_scheme(args, config)?;
    if args.budget {
        println!("{:.6}", info_budget(&scheme).map_err(stage)?);
        return Ok(out.finish(false));
    }
    let input = need_path(args.input.as_ref(), config.corpus.input.as_ref(), "observations (--input)")?;
    let observations = load_observations(&input, &config.ingest.format)?;
    let corpus = articulate(&observations, &scheme).map_err(stage)?;

    out.text("corpus.json", &corpus.to_json().map_err(stage)?)?;
    out.text("corpus.tokens.txt", &corpus.to_token_stream())?;
    out.json("scheme.json", &scheme)?;
    let table = rank_frequency(&corpus).map_err(stage)?;
    out.text("rank_frequency.csv", &table.to_csv())?;
    out.text("loglog.dat", &table.to_loglog())?;
    let method = args.method.unwrap_or(config.fit.method);
    out.json_or_error("fit.json", fit_power_law(&table, config.fit.range(), method))?;
    let max_n = args.max_n.unwrap_or(config.entropy.max_n);
    out.json("entropy.json", &entropy_report(&corpus, max_n).map_err(stage)?)?;
    Ok(out.finish(false))
}

fn corpus_path(flag: Option<&PathBuf>, config: &PipelineConfig) -> Result<PathBuf, PipelineError> {
    need_path(flag, config.corpus.corpus.as_ref(), "corpus (--corpus)")
}

fn cmd_zipf(args: &ZipfArgs, config: &PipelineConfig, mut out: OutDir) -> Result<Outcome, PipelineError> {
    let corpus = load_corpus(&corpus_path(args.corpus.as_ref(), config)?)?;
    let table = rank_frequency(&corpus).map_err(stage)?;
    let range = FitRange {
        min: args.min_rank.unwrap_or(config.fit.range().min),
        max: args.max_rank.or(config.fit.max_rank),
    };
    out.text("rank_frequency.csv", &table.to_csv())?;
    out.text("loglog.dat", &table.to_loglog())?;
    out.json_or_error("fit_ols.json", fit_power_law(&table, range, FitMethod::LoglogOls))?;
    out.json_or_error("fit_mle.json", fit_power_law(&table, range, FitMethod::DiscreteMle))?;
    out.json_or_error("regimes.json", detect_regimes(&table))?;
    Ok(out.finish(false))
}

fn cmd_entropy(args: &EntropyArgs, config: &PipelineConfig, mut out: OutDir) -> Result<Outcome, PipelineError> {
    let corpus = load_corpus(&corpus_path(args.corpus.as_ref(), config)?)?;
    let max_n = args.max_n.unwrap_or(config.entropy.max_n);
    out.json("entropy.json", &entropy_report(&corpus, max_n).map_err(stage)?)?;
    Ok(out.finish(false))
}

fn cmd_leasteffort(
    args: &LeastEffortArgs,
    config: &PipelineConfig,
    seed: u64,
    mut out: OutDir,
) -> Result<Outcome, PipelineError> {
    let section = &config.leasteffort;
    let grid = match &args.grid {
        Some(text) => parse_grid(text),
        None => section.grid.values(),
    }
    .map_err(PipelineError::Usage)?;
    let window = match &args.window {
        Some(text) => parse_window(text).map_err(PipelineError::Usage)?,
        None => section.window,
    };
    let mut params = section.params;
    if let Some(s) = args.stagnation_limit {
        params.stagnation_limit = Some(s);
    }
    if let Some(s) = args.max_steps {
        params.max_steps = s;
    }
    let sweep_config = SweepConfig {
        grid,
        n: args.n.unwrap_or(section.n),
        m: args.m.unwrap_or(section.m),
        seeds_per_lambda: args.seeds.unwrap_or(section.seeds),
        params,
        seed,
    };
    let result = sweep(&sweep_config).map_err(stage)?;

    out.text("sweep.csv", &result.to_csv())?;
    out.json("sweep.json", &result)?;
    out.text("means.dat", &result.means_table())?;
    match &result.transition_estimate {
        Some(t) => out.json("transition.json", t)?,
        None => out.json(
            "transition.json",
            &serde_json::json!({
                "error": format!("need at least {} grid points", crate::least_effort::MIN_TRANSITION_POINTS)
            }),
        )?,
    }
    out.json_or_error("zipf_window.json", zipf_at_transition(&result, window))?;
    let dump = args.dump_matrices || section.dump_matrices;
    for r in &result.runs {
        let stem = format!("lambda{:02}_seed{:02}", r.lambda_index, r.seed_index);
        out.text(&format!("ranks/{stem}.csv"), &r.signal_ranks.to_csv())?;
        if dump {
            out.text(&format!("matrices/{stem}.txt"), &r.matrix.to_grid())?;
        }
    }
    Ok(out.finish(false))
}

/// Characters whose expected word count matches `tokens`.
fn chars_for_tokens(tokens: usize, q: f64) -> usize {
    let extra = (tokens as f64 - (1.0 - q)).max(0.0) / (q * (1.0 - q));
    1 + extra.round() as usize
}

#[derive(Serialize)]
struct BaselineOutput<'a> {
    spec: RandomTextSpec,
    ensemble: usize,
    fit: ExponentFit,
    #[serde(flatten)]
    report: &'a crate::entropy::DiscriminationReport,
}

fn cmd_baseline(
    args: &BaselineArgs,
    config: &PipelineConfig,
    seed: u64,
    mut out: OutDir,
) -> Result<Outcome, PipelineError> {
    let section = &config.baseline;
    let ensemble = args.ensemble.unwrap_or(section.ensemble);
    if ensemble < MIN_BASELINES {
        return Err(PipelineError::Usage(format!(
            "ensemble must contain at least {MIN_BASELINES} baselines, got {ensemble}"
        )));
    }
    let subject = load_corpus(&need_path(args.subject.as_ref(), section.subject.as_ref(), "subject corpus (--subject)")?)?;
    if subject.is_empty() {
        return Err(PipelineError::Stage("subject corpus is empty".into()));
    }
    let q = args.space_probability.unwrap_or(section.space_probability);
    let spec = RandomTextSpec {
        alphabet_size: args.alphabet_size.unwrap_or(section.alphabet_size),
        space_probability: q,
        char_count: args
            .char_count
            .or(section.char_count)
            .unwrap_or_else(|| chars_for_tokens(subject.len(), q)),
        seed,
    };
    spec.validate().map_err(stage)?;
    let baselines = (0..ensemble)
        .into_par_iter()
        .map(|i| {
            generate_random_text(&RandomTextSpec {
                seed: derive_seed(seed, 0, i),
                ..spec
            })
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(stage)?;
    let fit = ExponentFit {
        range: config.fit.range(),
        method: config.fit.method,
    };
    let report = compare_to_random(&subject, &baselines, &fit).map_err(stage)?;
    out.json(
        "baseline.json",
        &BaselineOutput {
            spec,
            ensemble,
            fit,
            report: &report,
        },
    )?;
    out.text("baseline.csv", &report.baselines_csv())?;
    Ok(out.finish(false))
}
