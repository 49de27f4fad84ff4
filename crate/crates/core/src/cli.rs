//! Command-line driver: computes measures, scans random states, traces
//! maximal-discord curves, classifies channels and audits the bounds.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::bounds::{audit, AuditTolerances, BatchSummary, BoundReport};
use crate::channels::{quantumness_breaking_verdict, QuantumChannel};
use crate::error::Error;
use crate::measures::optimize::OptimizerConfig;
use crate::measures::{measure, Distance, MeasureKind, MeasureResult};
use crate::states::{
    bell_state, max_hellinger_discord_state, max_trace_discord_state, max_trace_discord_value, random_fixed_purity_state,
    random_haar_state, BellLabel, DensityMatrix, WernerBranch,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "geodiscord", version, about = "Geometric measures of quantum correlations")]
pub struct Cli {
    #[command(flatten)]
    pub run: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Seed for every random draw; sample `i` uses stream `i` of this seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of sampled states or channels.
    #[arg(long, global = true, default_value_t = 100)]
    pub samples: usize,
    /// Rank of sampled states; `0` cycles through all ranks.
    #[arg(long, global = true, default_value_t = 0)]
    pub rank: usize,
    /// Fix the purity of sampled states.
    #[arg(long, global = true)]
    pub purity: Option<f64>,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Slack tolerance for inequalities in audits.
    #[arg(long, global = true, default_value_t = 1e-5)]
    pub tol: f64,
    /// Optimizer restarts per basis search.
    #[arg(long, global = true, default_value_t = 16)]
    pub restarts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate measures on one state.
    Compute {
        /// JSON file, or a named state such as `bell:psi-`, `werner:P=0.6:minus`,
        /// `maxtr:P=0.7`, `maxhel:P=0.7`, `random:seed=3:rank=2`, `mixed`.
        state: String,
        /// `G`, `M`, `R` or `all`.
        #[arg(default_value = "all")]
        measure: String,
        /// `tr`, `hs`, `bu`, `he` or `all`.
        #[arg(default_value = "all")]
        distance: String,
    },
    /// Evaluate a pair of measures on random two-qubit states.
    Scan {
        /// First measure, e.g. `R:bu`.
        x: String,
        /// Second measure, e.g. `R:he`.
        y: String,
        /// Dimension of B.
        #[arg(long, default_value_t = 2)]
        n_b: usize,
        /// Skip the per-state bound audit.
        #[arg(long)]
        no_audit: bool,
    },
    /// Maximal discord of response against purity.
    Maxcurve {
        #[arg(value_enum)]
        measure: CurveMeasure,
        /// Number of purity grid points on `[1/4, 1]`.
        #[arg(long, default_value_t = 40)]
        points: usize,
    },
    /// Classify a channel from a Kraus JSON file or a name such as
    /// `identity:n=2`, `depolarizing:n=2:p=1`, `measure:n=2`, `random:n=2:k=2`.
    Channel { channel: String },
    /// Check every relation between the measures on random states.
    Audit {
        /// Dimension of A (2 or 3).
        #[arg(long, default_value_t = 2)]
        n_a: usize,
        /// Dimension of B.
        #[arg(long, default_value_t = 2)]
        n_b: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveMeasure {
    TraceResponse,
    BuresResponse,
    HellingerResponse,
    HsResponse,
}

impl CurveMeasure {
    fn distance(self) -> Distance {
        match self {
            CurveMeasure::TraceResponse => Distance::Trace,
            CurveMeasure::BuresResponse => Distance::Bures,
            CurveMeasure::HellingerResponse => Distance::Hellinger,
            CurveMeasure::HsResponse => Distance::HilbertSchmidt,
        }
    }
}

/// A failure together with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(e: impl std::fmt::Display) -> Self {
        Self { code: EXIT_USAGE, message: e.to_string() }
    }

    fn numerical(e: impl std::fmt::Display) -> Self {
        Self { code: EXIT_NUMERICAL, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Result of a command: the text to emit and the exit code.
pub struct Output {
    pub text: String,
    pub code: i32,
}

impl RunConfig {
    fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig { restarts: self.restarts, ..OptimizerConfig::default() }
    }

    fn header(&self, command: &str) -> String {
        let cfg = self.optimizer();
        format!(
            "# geodiscord {VERSION}\n# command: {command}\n# seed: {}\n# tol: {:e}\n# optimizer: restarts={} tol={:e} max_evals={}\n",
            self.seed, self.tol, cfg.restarts, cfg.tol, cfg.max_evals
        )
    }

    fn meta(&self, command: &str) -> serde_json::Value {
        json!({
            "version": VERSION,
            "command": command,
            "seed": self.seed,
            "tol": self.tol,
            "optimizer": self.optimizer(),
        })
    }
}

/// Random stream for sample `index`, independent of scheduling.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "nan".into()
    }
}

fn parse_kv<'a>(parts: &[&'a str]) -> CliResult<Vec<(&'a str, &'a str)>> {
    parts
        .iter()
        .map(|p| p.split_once('=').ok_or_else(|| CliError::usage(format!("expected key=value, got `{p}`"))))
        .collect()
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.parse().map_err(|_| CliError::usage(format!("invalid value `{v}` for `{key}`")))
}

const STATE_FAMILIES: &str = "bell, werner, maxtr, maxhel, random, mixed";

/// Parses `family:key=value:...`.
pub fn parse_named_state(spec: &str) -> CliResult<DensityMatrix> {
    let mut parts: Vec<&str> = spec.split(':').collect();
    let family = parts.remove(0);
    let lib = |r: crate::Result<DensityMatrix>| r.map_err(CliError::usage);
    match family {
        "bell" => {
            let label = parts.first().copied().unwrap_or("phi+");
            Ok(bell_state(BellLabel::parse(label).map_err(CliError::usage)?))
        }
        "werner" => {
            let mut purity = None;
            let mut branch = WernerBranch::Minus;
            for p in parts {
                match p.split_once('=') {
                    Some(("P", v)) => purity = Some(parse_num("P", v)?),
                    None if p == "plus" => branch = WernerBranch::Plus,
                    None if p == "minus" => branch = WernerBranch::Minus,
                    _ => return Err(CliError::usage(format!("unknown werner option `{p}`"))),
                }
            }
            let purity = purity.ok_or_else(|| CliError::usage("werner needs P=<purity>"))?;
            lib(crate::states::werner_state(purity, branch))
        }
        "maxtr" | "maxhel" => {
            let kv = parse_kv(&parts)?;
            let purity = match kv.as_slice() {
                [("P", v)] => parse_num("P", v)?,
                _ => return Err(CliError::usage(format!("{family} needs exactly P=<purity>"))),
            };
            if family == "maxtr" {
                lib(max_trace_discord_state(purity))
            } else {
                Ok(max_hellinger_discord_state(purity).map_err(CliError::usage)?.state)
            }
        }
        "random" => {
            let (mut seed, mut rank, mut n_a, mut n_b) = (0u64, 0usize, 2usize, 2usize);
            for p in parts {
                match p.split_once('=') {
                    Some(("seed", v)) => seed = parse_num("seed", v)?,
                    Some(("rank", v)) => rank = parse_num("rank", v)?,
                    Some(("na", v)) => n_a = parse_num("na", v)?,
                    Some(("nb", v)) => n_b = parse_num("nb", v)?,
                    None => seed = parse_num("seed", p)?,
                    _ => return Err(CliError::usage(format!("unknown random option `{p}`"))),
                }
            }
            let rank = if rank == 0 { n_a * n_b } else { rank };
            lib(random_haar_state(n_a, n_b, rank, &mut sample_rng(seed, 0)))
        }
        "mixed" => {
            let (mut n_a, mut n_b) = (2usize, 2usize);
            for (k, v) in parse_kv(&parts)? {
                match k {
                    "na" => n_a = parse_num(k, v)?,
                    "nb" => n_b = parse_num(k, v)?,
                    _ => return Err(CliError::usage(format!("unknown mixed option `{k}`"))),
                }
            }
            Ok(DensityMatrix::maximally_mixed(n_a, n_b))
        }
        _ => Err(CliError::usage(format!("unknown state family `{family}`; valid families: {STATE_FAMILIES}"))),
    }
}

fn load_state(source: &str) -> CliResult<DensityMatrix> {
    if source.ends_with(".json") || Path::new(source).is_file() {
        let text = std::fs::read_to_string(source).map_err(|e| CliError::usage(format!("{source}: {e}")))?;
        DensityMatrix::from_json(&text).map_err(CliError::usage)
    } else {
        parse_named_state(source)
    }
}

fn load_channel(source: &str) -> CliResult<QuantumChannel> {
    if source.ends_with(".json") || Path::new(source).is_file() {
        let text = std::fs::read_to_string(source).map_err(|e| CliError::usage(format!("{source}: {e}")))?;
        return QuantumChannel::from_json(&text).map_err(CliError::usage);
    }
    let mut parts: Vec<&str> = source.split(':').collect();
    let name = parts.remove(0);
    let (mut n, mut p, mut k, mut seed) = (2usize, 1.0f64, 2usize, 0u64);
    for (key, v) in parse_kv(&parts)? {
        match key {
            "n" => n = parse_num(key, v)?,
            "p" => p = parse_num(key, v)?,
            "k" => k = parse_num(key, v)?,
            "seed" => seed = parse_num(key, v)?,
            _ => return Err(CliError::usage(format!("unknown channel option `{key}`"))),
        }
    }
    match name {
        "identity" => Ok(QuantumChannel::identity(n)),
        "depolarizing" => QuantumChannel::depolarizing(n, p).map_err(CliError::usage),
        "measure" => Ok(QuantumChannel::measure_computational(n)),
        "random" => QuantumChannel::random(n, n, k, &mut sample_rng(seed, 0)).map_err(CliError::usage),
        _ => Err(CliError::usage(format!(
            "unknown channel `{name}`; valid channels: identity, depolarizing, measure, random"
        ))),
    }
}

fn parse_selector<T: Copy>(s: &str, all: &[T], one: impl Fn(&str) -> crate::Result<T>) -> CliResult<Vec<T>> {
    if s.eq_ignore_ascii_case("all") {
        Ok(all.to_vec())
    } else {
        Ok(vec![one(s).map_err(CliError::usage)?])
    }
}

/// `KIND:dist`, e.g. `R:bu`.
fn parse_measure_pair(s: &str) -> CliResult<(MeasureKind, Distance)> {
    let (k, d) = s.split_once(':').ok_or_else(|| CliError::usage(format!("expected KIND:distance, got `{s}`")))?;
    Ok((MeasureKind::parse(k).map_err(CliError::usage)?, Distance::parse(d).map_err(CliError::usage)?))
}

#[derive(Serialize)]
struct ComputeRow {
    measure: &'static str,
    distance: &'static str,
    value: Option<f64>,
    #[serde(flatten)]
    result: Option<MeasureResult>,
    error: Option<String>,
}

fn cmd_compute(run: &RunConfig, source: &str, kind: &str, dist: &str) -> CliResult<Output> {
    let rho = load_state(source)?;
    let kinds = parse_selector(kind, &MeasureKind::ALL, MeasureKind::parse)?;
    let dists = parse_selector(dist, &Distance::ALL, Distance::parse)?;
    let cfg = run.optimizer();
    let mut rows = Vec::new();
    for &k in &kinds {
        for &d in &dists {
            let row = match measure(&rho, k, d, &cfg) {
                Ok(r) => ComputeRow { measure: k.short(), distance: d.short(), value: Some(r.value), result: Some(r), error: None },
                Err(e @ Error::UnsupportedDimension { .. }) => {
                    ComputeRow { measure: k.short(), distance: d.short(), value: None, result: None, error: Some(e.to_string()) }
                }
                Err(e) => return Err(CliError::numerical(e)),
            };
            rows.push(row);
        }
    }
    let text = match run.format {
        Format::Json => {
            let body = json!({
                "meta": run.meta("compute"),
                "state": { "n_a": rho.n_a(), "n_b": rho.n_b(), "purity": rho.purity() },
                "measures": rows,
            });
            serde_json::to_string_pretty(&body).expect("serializable") + "\n"
        }
        Format::Csv => {
            let mut out = run.header(&format!("compute {source}"));
            out.push_str("measure,distance,value,converged,restarts,evaluations\n");
            for r in &rows {
                let rep = r.result.as_ref().and_then(|m| m.report.as_ref());
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.measure,
                    r.distance,
                    r.value.map_or("nan".into(), fmt_f64),
                    rep.map_or(r.value.is_some(), |p| p.converged),
                    rep.map_or(0, |p| p.restarts),
                    rep.map_or(0, |p| p.evaluations),
                );
            }
            out
        }
    };
    Ok(Output { text, code: EXIT_OK })
}

/// Rank of sample `index` under the `--rank` policy.
fn sample_rank(policy: usize, index: usize, dim: usize, purity: Option<f64>) -> usize {
    if policy != 0 {
        return policy;
    }
    // Rank r reaches purities in [1/r, 1); a pure state needs rank one.
    if purity.is_some_and(|p| p >= 1.0 - 1e-12) {
        return 1;
    }
    let lo = purity.map_or(1, |p| ((1.0 / p) - 1e-12).ceil().max(1.0) as usize).min(dim);
    lo + index % (dim - lo + 1)
}

fn sample_state(run: &RunConfig, n_a: usize, n_b: usize, index: usize) -> crate::Result<DensityMatrix> {
    let mut rng = sample_rng(run.seed, index);
    let rank = sample_rank(run.rank, index, n_a * n_b, run.purity);
    match run.purity {
        Some(p) => random_fixed_purity_state(n_a, n_b, p, rank, &mut rng),
        None => random_haar_state(n_a, n_b, rank, &mut rng),
    }
}

fn check_sampling(run: &RunConfig, n_a: usize, n_b: usize) -> CliResult<()> {
    // Surface bad --rank/--purity combinations as usage errors before sampling.
    if run.samples > 0 {
        sample_state(run, n_a, n_b, 0).map_err(CliError::usage)?;
    }
    Ok(())
}

struct ScanRow {
    index: usize,
    purity: f64,
    rank: usize,
    x: f64,
    y: f64,
    violations: Option<usize>,
}

fn cmd_scan(run: &RunConfig, x: &str, y: &str, n_b: usize, no_audit: bool) -> CliResult<Output> {
    let (kx, dx) = parse_measure_pair(x)?;
    let (ky, dy) = parse_measure_pair(y)?;
    check_sampling(run, 2, n_b)?;
    let cfg = run.optimizer();
    let rows: Vec<crate::Result<ScanRow>> = (0..run.samples)
        .into_par_iter()
        .map(|i| {
            let rho = sample_state(run, 2, n_b, i)?;
            let violations = if no_audit { None } else { Some(audit(&rho, run.tol, &cfg)?.violation_count()) };
            Ok(ScanRow {
                index: i,
                purity: rho.purity(),
                rank: rho.rank()?,
                x: measure(&rho, kx, dx, &cfg)?.value,
                y: measure(&rho, ky, dy, &cfg)?.value,
                violations,
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<crate::Result<Vec<_>>>().map_err(CliError::numerical)?;
    let total: usize = rows.iter().filter_map(|r| r.violations).sum();
    let text = match run.format {
        Format::Json => {
            let body = json!({
                "meta": run.meta("scan"),
                "x": x, "y": y,
                "rows": rows.iter().map(|r| json!({
                    "index": r.index, "purity": r.purity, "rank": r.rank,
                    "x": r.x, "y": r.y, "violations": r.violations,
                })).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&body).expect("serializable") + "\n"
        }
        Format::Csv => {
            let mut out = run.header(&format!("scan {x} {y}"));
            let _ = writeln!(out, "index,purity,rank,{x},{y},violations");
            for r in &rows {
                let v = r.violations.map_or("nan".into(), |v| v.to_string());
                let _ = writeln!(out, "{},{},{},{},{},{v}", r.index, fmt_f64(r.purity), r.rank, fmt_f64(r.x), fmt_f64(r.y));
            }
            out
        }
    };
    Ok(Output { text, code: if total > 0 { EXIT_VIOLATION } else { EXIT_OK } })
}

/// One point of a maximal-discord curve.
#[derive(Debug, Clone, Serialize)]
pub struct CurvePoint {
    pub purity: f64,
    /// Closed-form maximum, where one is known.
    pub analytic: f64,
    /// Value on the extremal family state, where the family is known.
    pub family: f64,
    /// Largest value over the sampled fixed-purity states (`nan` without samples).
    pub envelope: f64,
}

/// Evenly spaced purities on `[1/4, 1]`.
pub fn purity_grid(points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![1.0],
        _ => (0..points).map(|i| 0.25 + 0.75 * i as f64 / (points - 1) as f64).collect(),
    }
}

/// Maximal-discord curve: analytic and family values plus a random-search
/// envelope over `samples` fixed-purity two-qubit states per grid point.
pub fn maxcurve(
    which: CurveMeasure,
    grid: &[f64],
    samples: usize,
    seed: u64,
    cfg: &OptimizerConfig,
) -> crate::Result<Vec<CurvePoint>> {
    let d = which.distance();
    grid.iter()
        .enumerate()
        .map(|(gi, &p)| {
            let (analytic, family) = match which {
                CurveMeasure::TraceResponse => {
                    let st = max_trace_discord_state(p)?;
                    (max_trace_discord_value(p)?, measure(&st, MeasureKind::Response, d, cfg)?.value)
                }
                CurveMeasure::HellingerResponse => (f64::NAN, max_hellinger_discord_state(p)?.value),
                CurveMeasure::BuresResponse | CurveMeasure::HsResponse => (f64::NAN, f64::NAN),
            };
            let envelope = if samples == 0 {
                f64::NAN
            } else {
                let values: Vec<crate::Result<f64>> = (0..samples)
                    .into_par_iter()
                    .map(|i| {
                        let mut rng = sample_rng(seed, gi * samples + i);
                        let rank = sample_rank(0, i, 4, Some(p));
                        let rho = random_fixed_purity_state(2, 2, p, rank, &mut rng)?;
                        Ok(measure(&rho, MeasureKind::Response, d, cfg)?.value)
                    })
                    .collect();
                values.into_iter().try_fold(f64::NEG_INFINITY, |m, v| v.map(|v| m.max(v)))?
            };
            Ok(CurvePoint { purity: p, analytic, family, envelope })
        })
        .collect()
}

fn cmd_maxcurve(run: &RunConfig, which: CurveMeasure, points: usize) -> CliResult<Output> {
    let grid = purity_grid(points);
    let curve = maxcurve(which, &grid, run.samples, run.seed, &run.optimizer()).map_err(CliError::numerical)?;
    let name = which.to_possible_value().expect("no skipped variants").get_name().to_owned();
    let text = match run.format {
        Format::Json => {
            let body = json!({ "meta": run.meta("maxcurve"), "measure": name, "samples": run.samples, "points": curve });
            serde_json::to_string_pretty(&body).expect("serializable") + "\n"
        }
        Format::Csv => {
            let mut out = run.header(&format!("maxcurve {name}"));
            let _ = writeln!(out, "# samples per point: {}", run.samples);
            out.push_str("purity,analytic,family,envelope\n");
            for c in &curve {
                let _ = writeln!(out, "{},{},{},{}", fmt_f64(c.purity), fmt_f64(c.analytic), fmt_f64(c.family), fmt_f64(c.envelope));
            }
            out
        }
    };
    Ok(Output { text, code: EXIT_OK })
}

fn cmd_channel(run: &RunConfig, source: &str) -> CliResult<Output> {
    let ch = load_channel(source)?;
    let report = quantumness_breaking_verdict(&ch, &run.optimizer()).map_err(|e| match e {
        Error::DimensionMismatch(_) => CliError::usage(e),
        _ => CliError::numerical(e),
    })?;
    let text = match run.format {
        Format::Json => {
            serde_json::to_string_pretty(&json!({ "meta": run.meta("channel"), "report": report })).expect("serializable") + "\n"
        }
        Format::Csv => {
            let verdict = match report.verdict {
                crate::channels::Verdict::NotQuantumnessBreaking { .. } => "NotQuantumnessBreaking",
                crate::channels::Verdict::QuantumnessBreaking => "QuantumnessBreaking",
                crate::channels::Verdict::Inconclusive => "Inconclusive",
            };
            let mut out = run.header(&format!("channel {source}"));
            out.push_str("n,superoperator_rank,jamiolkowski_discord,residual_bound,verdict\n");
            let _ = writeln!(
                out,
                "{},{},{},{},{verdict}",
                report.n,
                report.superoperator_rank,
                report.jamiolkowski_discord.map_or("nan".into(), fmt_f64),
                fmt_f64(report.residual_bound)
            );
            out
        }
    };
    Ok(Output { text, code: EXIT_OK })
}

/// Audits `samples` random states and aggregates the reports.
pub fn audit_batch(run: &RunConfig, n_a: usize, n_b: usize) -> crate::Result<BatchSummary> {
    crate::bounds::relation_registry(n_a)?;
    let cfg = run.optimizer();
    let reports: Vec<crate::Result<BoundReport>> = (0..run.samples)
        .into_par_iter()
        .map(|i| audit(&sample_state(run, n_a, n_b, i)?, run.tol, &cfg))
        .collect();
    let mut summary = BatchSummary::default();
    for r in reports {
        summary.add(&r?);
    }
    Ok(summary)
}

fn cmd_audit(run: &RunConfig, n_a: usize, n_b: usize) -> CliResult<Output> {
    check_sampling(run, n_a, n_b)?;
    let summary = audit_batch(run, n_a, n_b).map_err(|e| match e {
        Error::UnsupportedDimension { .. } => CliError::usage(e),
        _ => CliError::numerical(e),
    })?;
    let tols = AuditTolerances::new(run.tol, &run.optimizer());
    let text = match run.format {
        Format::Json => {
            let body = json!({ "meta": run.meta("audit"), "n_a": n_a, "n_b": n_b, "tolerances": tols, "summary": summary });
            serde_json::to_string_pretty(&body).expect("serializable") + "\n"
        }
        Format::Csv => {
            let mut out = run.header(&format!("audit {n_a}x{n_b}"));
            let _ = writeln!(
                out,
                "# states: {}\n# violations: {}\n# conjecture counterexamples: {}",
                summary.states, summary.violations, summary.conjecture_counterexamples
            );
            out.push_str("relation,conjecture,extreme_slack,failures\n");
            for r in &summary.relations {
                let _ = writeln!(out, "{},{},{},{}", r.relation, r.conjecture, fmt_f64(r.extreme_slack), r.failures);
            }
            out
        }
    };
    Ok(Output { text, code: if summary.violations > 0 { EXIT_VIOLATION } else { EXIT_OK } })
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> CliResult<Output> {
    let run = &cli.run;
    match &cli.command {
        Command::Compute { state, measure, distance } => cmd_compute(run, state, measure, distance),
        Command::Scan { x, y, n_b, no_audit } => cmd_scan(run, x, y, *n_b, *no_audit),
        Command::Maxcurve { measure, points } => cmd_maxcurve(run, *measure, *points),
        Command::Channel { channel } => cmd_channel(run, channel),
        Command::Audit { n_a, n_b } => cmd_audit(run, *n_a, *n_b),
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let out = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {}", e.message);
            return e.code;
        }
    };
    match &cli.run.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &out.text) {
                eprintln!("error: {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
        None => print!("{}", out.text),
    }
    out.code
}
