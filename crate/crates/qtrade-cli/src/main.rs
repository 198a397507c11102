//! `qtrade`: compute Tsallis-q correlation measures, verify the trade-off
//! identities on tripartite states, and run corpus scans.
//!
//! Exit codes: 0 success, 1 violation candidate flagged, 2 input/validation
//! error, 3 numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qtrade_core::entropy::{tsallis_entropy, QParam};
use qtrade_core::io::{
    measure_reports_csv, parse_state_json, theorem_reports_csv, write_atomic, LoadedState,
    VectorJson,
};
use qtrade_core::measures::{compute_measure, Measure, MeasureReport};
use qtrade_core::optimize::OptConfig;
use qtrade_core::qstate::{DensityMatrix, PureState};
use qtrade_core::theorems::{
    build_corpus, CorpusState, ScanOptions, TheoremKind, TheoremReport, TriContext, DEFAULT_Q_GRID,
};
use qtrade_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "qtrade",
    version,
    about = "Tsallis-q correlation measures and trade-off identity certification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OptArgs {
    /// Optimizer restarts (the first is always the deterministic identity
    /// start). Default 20.
    #[arg(long)]
    restarts: Option<usize>,
    /// Iteration cap per restart. Default 2000.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Per-sweep improvement threshold that ends a restart. Default 1e-8.
    #[arg(long)]
    tol: Option<f64>,
    /// Master seed; every random choice derives from it. Falls back to
    /// QTRADE_SEED, then the config file, then 0.
    #[arg(long, env = "QTRADE_SEED")]
    seed: Option<u64>,
    /// Cap on decomposition/measurement cardinality.
    #[arg(long)]
    m_outcomes: Option<usize>,
    /// JSON config file; flags take precedence over its fields, which take
    /// precedence over the defaults.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Optional optimizer fields of a `--config` file.
#[derive(Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    restarts: Option<usize>,
    max_iters: Option<usize>,
    tol: Option<f64>,
    seed: Option<u64>,
    m_outcomes: Option<usize>,
}

impl OptArgs {
    fn to_config(&self) -> Result<OptConfig> {
        let file: FileConfig = match &self.config {
            None => FileConfig::default(),
            Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        };
        let defaults = OptConfig::default();
        Ok(OptConfig {
            restarts: self.restarts.or(file.restarts).unwrap_or(defaults.restarts),
            max_iters: self
                .max_iters
                .or(file.max_iters)
                .unwrap_or(defaults.max_iters),
            tol: self.tol.or(file.tol).unwrap_or(defaults.tol),
            seed: self.seed.or(file.seed).unwrap_or(defaults.seed),
            m_outcomes: self.m_outcomes.or(file.m_outcomes),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute a correlation measure (or the Tsallis-q entropy) of a state.
    Compute {
        /// One of: q-entanglement, q-eoa, q-cc, q-ue, q-discord, q-ud,
        /// entropy.
        #[arg(long)]
        measure: String,
        /// Entropy parameter; repeatable. Measures require q >= 1.
        #[arg(long = "q", required = true)]
        q: Vec<f64>,
        /// State file ({dims, re, im} vector or matrix form).
        #[arg(long)]
        input: PathBuf,
        /// Report destination (stdout when omitted).
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Verify a trade-off identity or inequality on a tripartite pure state.
    Verify {
        /// One of: t1-cc, t1-ue, t2, t3-identity, t4-identity, monogamy-ue,
        /// polygamy-eoa, polygamy-ud, cond-cancel.
        #[arg(long)]
        theorem: String,
        #[arg(long = "q", required = true)]
        q: Vec<f64>,
        /// Pure tripartite state file (purity checked to 1e-9 for matrix
        /// input).
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Run every selected verifier over a corpus × q-grid.
    Scan {
        /// Corpus file (JSON array of state vectors). Omit to generate one.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Number of Haar-random states when generating.
        #[arg(long, default_value_t = 10)]
        corpus_count: usize,
        /// Subsystem dimensions when generating, e.g. `2,2,2`.
        #[arg(long, default_value = "2,2,2")]
        dims: String,
        /// Prepend the canonical states defined for the dimensions.
        #[arg(long, default_value_t = false)]
        include_canonical: bool,
        /// q-grid; repeatable. Defaults to 1, 1.25, 1.5, 2, 3, 5.
        #[arg(long = "q")]
        q: Vec<f64>,
        /// Comma-separated theorem list, or `all`. Defaults to the five
        /// identity verifiers.
        #[arg(long)]
        theorems: Option<String>,
        /// Output directory (reports.json, summary.json, reports.csv,
        /// timing.json).
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Generate a corpus file of Haar-random pure states.
    GenCorpus {
        #[arg(long, default_value_t = 10)]
        corpus_count: usize,
        #[arg(long, default_value = "2,2,2")]
        dims: String,
        #[arg(long, default_value_t = false)]
        include_canonical: bool,
        #[arg(long, env = "QTRADE_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Serialize)]
struct EntropyReport {
    measure: &'static str,
    q: f64,
    value: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Numerical(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Compute {
            measure,
            q,
            input,
            output,
            format,
            opt,
        } => cmd_compute(
            &measure,
            &q,
            &input,
            output.as_deref(),
            format,
            &opt.to_config()?,
        ),
        Command::Verify {
            theorem,
            q,
            input,
            output,
            format,
            opt,
        } => cmd_verify(
            &theorem,
            &q,
            &input,
            output.as_deref(),
            format,
            &opt.to_config()?,
        ),
        Command::Scan {
            input,
            corpus_count,
            dims,
            include_canonical,
            q,
            theorems,
            output,
            format: _,
            opt,
        } => cmd_scan(
            input.as_deref(),
            corpus_count,
            &dims,
            include_canonical,
            &q,
            theorems.as_deref(),
            &output,
            &opt.to_config()?,
        ),
        Command::GenCorpus {
            corpus_count,
            dims,
            include_canonical,
            seed,
            output,
        } => cmd_gen_corpus(corpus_count, &dims, include_canonical, seed, &output),
    }
}

fn parse_dims(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidParam(format!("bad dimension `{p}` in `{s}`")))
        })
        .collect()
}

fn load_state(path: &Path) -> Result<LoadedState> {
    let text = std::fs::read_to_string(path)?;
    parse_state_json(&text)
}

/// A pure state from either file form; matrix input must pass the 1e-9
/// purity check and is replaced by its dominant eigenvector.
fn load_pure_state(path: &Path) -> Result<PureState> {
    match load_state(path)? {
        LoadedState::Pure(p) => Ok(p),
        LoadedState::Mixed(dm) => {
            let purity = dm.purity();
            if purity < 1.0 - 1e-9 {
                return Err(Error::InvalidState(format!(
                    "matrix input has purity {purity}, need a pure state"
                )));
            }
            let spec = dm.spectral()?;
            PureState::new(spec.eigenvector(0), dm.dims().to_vec())
        }
    }
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, bytes),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn cmd_compute(
    measure: &str,
    qs: &[f64],
    input: &Path,
    output: Option<&Path>,
    format: Format,
    cfg: &OptConfig,
) -> Result<ExitCode> {
    let state = load_state(input)?;
    let rho: DensityMatrix = state.to_density();
    let bytes = if measure == "entropy" {
        let mut reports = Vec::new();
        for &qv in qs {
            let qp = QParam::new(qv)?;
            reports.push(EntropyReport {
                measure: "entropy",
                q: qv,
                value: tsallis_entropy(&rho, &qp)?,
            });
        }
        match format {
            Format::Json => to_json_single_or_array(&reports)?,
            Format::Csv => {
                let mut s = String::from("measure,q,value\n");
                for r in &reports {
                    s.push_str(&format!("entropy,{},{}\n", r.q, r.value));
                }
                s.into_bytes()
            }
        }
    } else {
        let m: Measure = measure.parse()?;
        let mut reports: Vec<MeasureReport> = Vec::new();
        for &qv in qs {
            let qp = QParam::new(qv)?;
            reports.push(compute_measure(m, &rho, &qp, cfg)?);
        }
        match format {
            Format::Json => to_json_single_or_array(&reports)?,
            Format::Csv => measure_reports_csv(&reports).into_bytes(),
        }
    };
    emit(output, &bytes)?;
    Ok(ExitCode::SUCCESS)
}

fn to_json_single_or_array<T: Serialize>(items: &[T]) -> Result<Vec<u8>> {
    let json = if items.len() == 1 {
        serde_json::to_vec_pretty(&items[0])?
    } else {
        serde_json::to_vec_pretty(items)?
    };
    Ok(json)
}

fn cmd_verify(
    theorem: &str,
    qs: &[f64],
    input: &Path,
    output: Option<&Path>,
    format: Format,
    cfg: &OptConfig,
) -> Result<ExitCode> {
    let kind: TheoremKind = theorem.parse()?;
    let psi = load_pure_state(input)?;
    let mut reports: Vec<TheoremReport> = Vec::new();
    for &qv in qs {
        let qp = QParam::new(qv)?;
        let ctx = TriContext::new(&psi, &qp, cfg, "input")?;
        reports.push(ctx.verify(kind)?);
    }
    let any_violation = reports.iter().any(|r| r.violation);
    let bytes = match format {
        Format::Json => to_json_single_or_array(&reports)?,
        Format::Csv => theorem_reports_csv(&reports).into_bytes(),
    };
    emit(output, &bytes)?;
    for r in &reports {
        eprintln!(
            "verify {} q={}: residual={:.3e} converged={} violation={}",
            r.theorem.as_str(),
            r.q,
            r.residual,
            r.converged,
            r.violation
        );
    }
    Ok(if any_violation {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn load_corpus(path: &Path) -> Result<Vec<CorpusState>> {
    let text = std::fs::read_to_string(path)?;
    let raw: Vec<VectorJson> = serde_json::from_str(&text)?;
    raw.into_iter()
        .enumerate()
        .map(|(i, v)| {
            Ok(CorpusState {
                id: format!("state-{i:04}"),
                state: PureState::try_from(v)?,
            })
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(
    input: Option<&Path>,
    corpus_count: usize,
    dims: &str,
    include_canonical: bool,
    qs: &[f64],
    theorems: Option<&str>,
    output: &Path,
    cfg: &OptConfig,
) -> Result<ExitCode> {
    let corpus = match input {
        Some(path) => load_corpus(path)?,
        None => {
            let dims = parse_dims(dims)?;
            build_corpus(corpus_count, &dims, cfg.seed, include_canonical)?
        }
    };
    let theorems = match theorems {
        None => TheoremKind::default_scan_set(),
        Some("all") => TheoremKind::all(),
        Some(list) => list
            .split(',')
            .map(|t| t.trim().parse())
            .collect::<Result<Vec<_>>>()?,
    };
    let options = ScanOptions {
        q_grid: if qs.is_empty() {
            DEFAULT_Q_GRID.to_vec()
        } else {
            qs.to_vec()
        },
        theorems,
        opt: cfg.clone(),
    };
    eprintln!(
        "scan: {} states x {} q-values x {} theorems (seed {})",
        corpus.len(),
        options.q_grid.len(),
        options.theorems.len(),
        cfg.seed
    );
    let started = Instant::now();
    let outcome = qtrade_core::theorems::scan(&corpus, &options)?;
    let wall = started.elapsed().as_secs_f64();

    std::fs::create_dir_all(output)?;
    write_atomic(
        &output.join("reports.json"),
        &serde_json::to_vec_pretty(&outcome.reports)?,
    )?;
    write_atomic(
        &output.join("summary.json"),
        &serde_json::to_vec_pretty(&outcome.summary)?,
    )?;
    write_atomic(
        &output.join("reports.csv"),
        theorem_reports_csv(&outcome.reports).as_bytes(),
    )?;
    // wall-clock lives outside summary.json so equal seeds hash equal
    write_atomic(
        &output.join("timing.json"),
        &serde_json::to_vec_pretty(&serde_json::json!({
            "wall_seconds": wall,
            "reports": outcome.reports.len(),
        }))?,
    )?;
    eprintln!(
        "scan: {} reports in {:.1}s, {} violation candidate(s), {} error(s) -> {}",
        outcome.reports.len(),
        wall,
        outcome.summary.violation_candidates.len(),
        outcome.summary.errors.len(),
        output.display()
    );
    Ok(if outcome.summary.violation_candidates.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_gen_corpus(
    corpus_count: usize,
    dims: &str,
    include_canonical: bool,
    seed: u64,
    output: &Path,
) -> Result<ExitCode> {
    if corpus_count == 0 && !include_canonical {
        return Err(Error::InvalidParam("corpus would be empty".into()));
    }
    let dims = parse_dims(dims)?;
    let corpus = build_corpus(corpus_count, &dims, seed, include_canonical)?;
    let raw: Vec<VectorJson> = corpus.iter().map(|c| VectorJson::from(&c.state)).collect();
    write_atomic(output, &serde_json::to_vec_pretty(&raw)?)?;
    eprintln!(
        "gen-corpus: wrote {} states to {}",
        raw.len(),
        output.display()
    );
    Ok(ExitCode::SUCCESS)
}
