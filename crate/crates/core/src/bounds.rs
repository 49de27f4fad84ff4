//! Relations between the twelve measures and a data-driven audit that checks
//! them on concrete states.

use std::f64::consts::SQRT_2;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::optimize::OptimizerConfig;
use crate::measures::pure::pure_state_measure_table;
use crate::measures::{all_measures, Distance, MeasureKind, MeasureTable};
use crate::states::DensityMatrix;

/// Arguments this far outside a function's domain are treated as rounding.
const DOMAIN_SLACK: f64 = 1e-9;

/// Upper end of the range of the qubit geometric discords, where `g` reaches 1.
pub const QUBIT_GEO_MAX: f64 = 2.0 - SQRT_2;

/// `g(d) = 2d - d^2/2` on `[0, 2 - sqrt 2]`, onto `[0, 1]`.
pub fn g(d: f64) -> Result<f64> {
    let d = in_domain("g", d, 0.0, QUBIT_GEO_MAX)?;
    Ok(2.0 * d - d * d / 2.0)
}

/// Inverse of [`g`]: `2 - 2 sqrt(1 - x/2)` on `[0, 1]`.
pub fn g_inv(x: f64) -> Result<f64> {
    let x = in_domain("g_inv", x, 0.0, 1.0)?;
    Ok(2.0 - 2.0 * (1.0 - x / 2.0).max(0.0).sqrt())
}

/// `h(d) = 2 g(d) - g(d)^2` on `[0, 2 - sqrt 2]`.
pub fn h(d: f64) -> Result<f64> {
    let gd = g(d)?;
    Ok(2.0 * gd - gd * gd)
}

fn in_domain(function: &'static str, v: f64, lo: f64, hi: f64) -> Result<f64> {
    if !v.is_finite() || v < lo - DOMAIN_SLACK || v > hi + DOMAIN_SLACK {
        return Err(Error::DomainError { function, value: v });
    }
    Ok(v.clamp(lo, hi))
}

// Unchecked versions for the registry, where every input is a measure value
// that is already known to lie in range.
fn gf(d: f64) -> f64 {
    2.0 * d - d * d / 2.0
}

fn gif(x: f64) -> f64 {
    2.0 - 2.0 * (1.0 - x / 2.0).max(0.0).sqrt()
}

fn hf(d: f64) -> f64 {
    let gd = gf(d);
    2.0 * gd - gd * gd
}

/// Measure values for one state, indexed for the registry.
#[derive(Debug, Clone, Copy)]
pub struct Values {
    pub n_a: usize,
    pub n_b: usize,
    geo: [f64; 4],
    meas: [f64; 4],
    resp: [f64; 4],
}

impl Values {
    pub fn from_table(t: &MeasureTable, n_a: usize, n_b: usize) -> Self {
        let row = |k| Distance::ALL.map(|d| t.get(k, d).unwrap_or(f64::NAN));
        Self {
            n_a,
            n_b,
            geo: row(MeasureKind::Geometric),
            meas: row(MeasureKind::MeasurementInduced),
            resp: row(MeasureKind::Response),
        }
    }
}

const TR: usize = 0;
const HS: usize = 1;
const BU: usize = 2;
const HE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RelationKind {
    /// `lhs <= rhs`.
    Inequality,
    /// `lhs == rhs`.
    Identity,
}

/// One relation of the registry. `eval` returns `(lhs, rhs)`.
#[derive(Clone, Copy)]
pub struct Relation {
    pub name: &'static str,
    pub kind: RelationKind,
    /// Conjectured relations are tallied separately and never count as
    /// violations.
    pub conjecture: bool,
    pub eval: fn(&Values) -> (f64, f64),
}

macro_rules! rel {
    ($name:literal, le, |$v:ident| $lhs:expr, $rhs:expr) => {
        Relation { name: $name, kind: RelationKind::Inequality, conjecture: false, eval: |$v: &Values| ($lhs, $rhs) }
    };
    ($name:literal, eq, |$v:ident| $lhs:expr, $rhs:expr) => {
        Relation { name: $name, kind: RelationKind::Identity, conjecture: false, eval: |$v: &Values| ($lhs, $rhs) }
    };
    ($name:literal, conj, |$v:ident| $lhs:expr, $rhs:expr) => {
        Relation { name: $name, kind: RelationKind::Inequality, conjecture: true, eval: |$v: &Values| ($lhs, $rhs) }
    };
}

const C22: f64 = 2.0 - SQRT_2;

/// Relations for a qubit A.
fn qubit_relations() -> Vec<Relation> {
    vec![
        // Trace and Hilbert-Schmidt.
        rel!("trace_geo_over_dim_le_hs_geo", le, |v| v.geo[TR] / (v.n_a * v.n_b) as f64, v.geo[HS]),
        rel!("hs_geo_le_trace_geo", le, |v| v.geo[HS], v.geo[TR]),
        rel!("trace_meas_over_dim_le_hs_meas", le, |v| v.meas[TR] / (v.n_a * v.n_b) as f64, v.meas[HS]),
        rel!("hs_meas_le_trace_meas", le, |v| v.meas[HS], v.meas[TR]),
        rel!("trace_resp_over_nb_le_hs_resp", le, |v| v.resp[TR] / v.n_b as f64, v.resp[HS]),
        rel!("hs_resp_le_trace_resp", le, |v| v.resp[HS], v.resp[TR]),
        rel!("trace_geo_eq_trace_meas", eq, |v| v.geo[TR], v.meas[TR]),
        rel!("trace_meas_eq_trace_resp", eq, |v| v.meas[TR], v.resp[TR]),
        rel!("hs_geo_eq_hs_meas", eq, |v| v.geo[HS], v.meas[HS]),
        rel!("hs_resp_eq_twice_hs_geo", eq, |v| v.resp[HS], 2.0 * v.geo[HS]),
        // Bures and Hellinger against trace, per measure.
        rel!("bures_geo_sq_le_hellinger_geo_sq", le, |v| v.geo[BU].powi(2), v.geo[HE].powi(2)),
        rel!("hellinger_geo_sq_le_trace_geo", le, |v| v.geo[HE].powi(2), v.geo[TR]),
        rel!("trace_geo_le_2g_bures_geo", le, |v| v.geo[TR], 2.0 * gf(v.geo[BU])),
        rel!("bures_meas_sq_le_hellinger_meas_sq", le, |v| v.meas[BU].powi(2), v.meas[HE].powi(2)),
        rel!("hellinger_meas_sq_le_trace_meas", le, |v| v.meas[HE].powi(2), v.meas[TR]),
        rel!("trace_meas_le_2g_bures_meas", le, |v| v.meas[TR], 2.0 * gf(v.meas[BU])),
        rel!("bures_resp_sq_le_hellinger_resp_sq", le, |v| v.resp[BU].powi(2), v.resp[HE].powi(2)),
        rel!("hellinger_resp_sq_le_trace_resp", le, |v| v.resp[HE].powi(2), v.resp[TR]),
        rel!("trace_resp_le_bures_resp_bound", le, |v| v.resp[TR], 1.0 - (1.0 - v.resp[BU]).powi(2)),
        // Bures chain.
        rel!("bures_geo_le_bures_meas", le, |v| v.geo[BU], v.meas[BU]),
        rel!("bures_meas_le_ginv_h_bures_geo", le, |v| v.meas[BU], gif(hf(v.geo[BU]))),
        rel!("ginv_h_bures_geo_le_bures_resp", le, |v| gif(hf(v.geo[BU])), v.resp[BU]),
        rel!("bures_resp_eq_g_bures_geo", eq, |v| v.resp[BU], gf(v.geo[BU])),
        rel!("g_bures_geo_le_g_bures_meas", le, |v| gf(v.geo[BU]), gf(v.meas[BU])),
        rel!("bures_geo_le_c_bures_resp", le, |v| v.geo[BU], C22 * v.resp[BU]),
        rel!("bures_meas_le_g_bures_geo", le, |v| v.meas[BU], gf(v.geo[BU])),
        rel!(
            "bures_meas_le_bures_resp_bound",
            le,
            |v| v.meas[BU],
            2.0 - SQRT_2 * (1.0 + (1.0 - v.resp[BU]).powi(2)).sqrt()
        ),
        // Hellinger chain.
        rel!("hellinger_geo_le_hellinger_meas", le, |v| v.geo[HE], v.meas[HE]),
        rel!("hellinger_meas_le_hellinger_resp", le, |v| v.meas[HE], v.resp[HE]),
        rel!("hellinger_resp_eq_g_hellinger_geo", eq, |v| v.resp[HE], gf(v.geo[HE])),
        rel!("g_hellinger_geo_le_g_hellinger_meas", le, |v| gf(v.geo[HE]), gf(v.meas[HE])),
        rel!("hellinger_geo_le_c_hellinger_resp", le, |v| v.geo[HE], C22 * v.resp[HE]),
        rel!("hellinger_meas_le_g_hellinger_geo", le, |v| v.meas[HE], gf(v.geo[HE])),
        // Response cross-distance chain.
        rel!("hellinger_resp_bound_le_bures_resp", le, |v| 1.0 - (1.0 - v.resp[HE]).max(0.0).sqrt(), v.resp[BU]),
        rel!("bures_resp_le_hellinger_resp", le, |v| v.resp[BU], v.resp[HE]),
        rel!("hellinger_resp_le_sqrt_trace_resp", le, |v| v.resp[HE], v.resp[TR].sqrt()),
        rel!(
            "sqrt_trace_resp_le_bures_resp_bound",
            le,
            |v| v.resp[TR].sqrt(),
            (2.0 * v.resp[BU] - v.resp[BU].powi(2)).max(0.0).sqrt()
        ),
        rel!(
            "bures_resp_bound_le_hellinger_resp_bound",
            le,
            |v| (2.0 * v.resp[BU] - v.resp[BU].powi(2)).max(0.0).sqrt(),
            (2.0 * v.resp[HE] - v.resp[HE].powi(2)).max(0.0).sqrt()
        ),
        // Geometric cross-distance chain.
        rel!("ginv_hellinger_geo_le_bures_geo", le, |v| gif(v.geo[HE]), v.geo[BU]),
        rel!("bures_geo_le_hellinger_geo", le, |v| v.geo[BU], v.geo[HE]),
        rel!("hellinger_geo_le_ginv_h_bures_geo", le, |v| v.geo[HE], gif(hf(v.geo[BU]))),
        rel!("bures_meas_le_hellinger_meas", le, |v| v.meas[BU], v.meas[HE]),
        // Trace against Bures and Hellinger through h.
        rel!("trace_geo_le_h_bures_geo", le, |v| v.geo[TR], hf(v.geo[BU])),
        rel!("h_bures_geo_le_h_hellinger_geo", le, |v| hf(v.geo[BU]), hf(v.geo[HE])),
        rel!("h_bures_geo_le_h_bures_meas", le, |v| hf(v.geo[BU]), hf(v.meas[BU])),
        rel!("min_h_le_h_hellinger_meas", le, |v| hf(v.geo[HE]).min(hf(v.meas[BU])), hf(v.meas[HE])),
        rel!("hellinger_geo_le_c_sqrt_trace_meas", le, |v| v.geo[HE], C22 * v.meas[TR].sqrt()),
        rel!("hellinger_meas_le_c_sqrt_trace_meas", conj, |v| v.meas[HE], C22 * v.meas[TR].sqrt()),
    ]
}

/// Relations for a qutrit A, on the measures computed through basis search.
fn qutrit_relations() -> Vec<Relation> {
    vec![
        rel!("hellinger_resp_eq_three_quarters_g_hellinger_geo", eq, |v| v.resp[HE], 0.75 * gf(v.geo[HE])),
        rel!("hs_resp_eq_three_halves_hs_geo", eq, |v| v.resp[HS], 1.5 * v.geo[HS]),
        rel!("hs_geo_eq_hs_meas", eq, |v| v.geo[HS], v.meas[HS]),
        rel!("hellinger_geo_le_hellinger_meas", le, |v| v.geo[HE], v.meas[HE]),
        rel!("hellinger_meas_le_g_hellinger_geo", le, |v| v.meas[HE], gf(v.geo[HE])),
        rel!("three_quarters_hellinger_meas_le_hellinger_resp", le, |v| 0.75 * v.meas[HE], v.resp[HE]),
        rel!("hellinger_resp_bound_le_bures_resp", le, |v| 1.0 - (1.0 - v.resp[HE]).max(0.0).sqrt(), v.resp[BU]),
        rel!("bures_resp_le_hellinger_resp", le, |v| v.resp[BU], v.resp[HE]),
        rel!("bures_meas_le_hellinger_meas", le, |v| v.meas[BU], v.meas[HE]),
        rel!(
            "bures_meas_le_bures_resp_bound",
            le,
            |v| v.meas[BU],
            2.0 - (2.0 / 3f64.sqrt()) * (1.0 + 2.0 * (1.0 - v.resp[BU]).powi(2)).sqrt()
        ),
        rel!("bures_resp_sq_le_hellinger_resp_sq", le, |v| v.resp[BU].powi(2), v.resp[HE].powi(2)),
        rel!("hellinger_resp_sq_le_trace_resp", le, |v| v.resp[HE].powi(2), v.resp[TR]),
        rel!("trace_resp_le_bures_resp_bound", le, |v| v.resp[TR], 1.0 - (1.0 - v.resp[BU]).powi(2)),
    ]
}

/// The relations that apply for a given dimension of A.
pub fn relation_registry(n_a: usize) -> Result<Vec<Relation>> {
    match n_a {
        2 => Ok(qubit_relations()),
        3 => Ok(qutrit_relations()),
        _ => Err(Error::UnsupportedDimension { n_a, what: "no relation registry beyond qutrits".into() }),
    }
}

/// Outcome of one relation on one state.
#[derive(Debug, Clone, Serialize)]
pub struct RelationCheck {
    pub relation: &'static str,
    pub kind: RelationKind,
    pub conjecture: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs` for inequalities, `|rhs - lhs|` for identities.
    pub slack: f64,
    pub satisfied: bool,
}

/// Tolerances of an audit.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AuditTolerances {
    pub inequality: f64,
    pub identity: f64,
}

impl AuditTolerances {
    /// Inequalities at `tol`; identities at `tol` or ten times the optimizer
    /// tolerance, whichever is looser.
    pub fn new(tol: f64, cfg: &OptimizerConfig) -> Self {
        Self { inequality: tol, identity: tol.max(10.0 * cfg.tol) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub n_a: usize,
    pub n_b: usize,
    pub tolerances: AuditTolerances,
    pub checks: Vec<RelationCheck>,
}

impl BoundReport {
    /// Failed relations, excluding conjectures.
    pub fn violations(&self) -> impl Iterator<Item = &RelationCheck> {
        self.checks.iter().filter(|c| !c.conjecture && !c.satisfied)
    }

    pub fn violation_count(&self) -> usize {
        self.violations().count()
    }

    /// Conjectured relations that failed.
    pub fn conjecture_counterexamples(&self) -> usize {
        self.checks.iter().filter(|c| c.conjecture && !c.satisfied).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// `relation,lhs,rhs,slack,satisfied` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("relation,lhs,rhs,slack,satisfied\n");
        for c in &self.checks {
            let _ = writeln!(out, "{},{:.17e},{:.17e},{:.17e},{}", c.relation, c.lhs, c.rhs, c.slack, c.satisfied);
        }
        out
    }
}

/// Checks the registry against precomputed measure values.
pub fn audit_values(values: &Values, tol: AuditTolerances) -> Result<BoundReport> {
    let checks = relation_registry(values.n_a)?
        .into_iter()
        .map(|r| {
            let (lhs, rhs) = (r.eval)(values);
            let (slack, satisfied) = match r.kind {
                RelationKind::Inequality => (rhs - lhs, rhs - lhs >= -tol.inequality),
                RelationKind::Identity => ((rhs - lhs).abs(), (rhs - lhs).abs() <= tol.identity),
            };
            RelationCheck {
                relation: r.name,
                kind: r.kind,
                conjecture: r.conjecture,
                lhs,
                rhs,
                slack,
                satisfied: satisfied && slack.is_finite(),
            }
        })
        .collect();
    Ok(BoundReport { n_a: values.n_a, n_b: values.n_b, tolerances: tol, checks })
}

/// Computes all measures of `rho` and checks every registered relation.
pub fn audit(rho: &DensityMatrix, tol: f64, cfg: &OptimizerConfig) -> Result<BoundReport> {
    relation_registry(rho.n_a())?;
    let table = all_measures(rho, cfg)?;
    audit_values(&Values::from_table(&table, rho.n_a(), rho.n_b()), AuditTolerances::new(tol, cfg))
}

/// Per-relation aggregate over a batch of audits.
#[derive(Debug, Clone, Serialize)]
pub struct RelationSummary {
    pub relation: &'static str,
    pub conjecture: bool,
    /// Smallest slack seen (for identities, the largest deviation).
    pub extreme_slack: f64,
    pub failures: usize,
}

/// Aggregate of many audits.
#[derive(Debug, Clone, Default, Serialize)]
pub struct BatchSummary {
    pub states: usize,
    pub violations: usize,
    pub conjecture_counterexamples: usize,
    pub relations: Vec<RelationSummary>,
}

impl BatchSummary {
    pub fn add(&mut self, report: &BoundReport) {
        if self.relations.is_empty() {
            self.relations = report
                .checks
                .iter()
                .map(|c| RelationSummary {
                    relation: c.relation,
                    conjecture: c.conjecture,
                    extreme_slack: c.slack,
                    failures: 0,
                })
                .collect();
        }
        self.states += 1;
        self.violations += report.violation_count();
        self.conjecture_counterexamples += report.conjecture_counterexamples();
        for (sum, c) in self.relations.iter_mut().zip(&report.checks) {
            sum.extreme_slack = match c.kind {
                RelationKind::Inequality => sum.extreme_slack.min(c.slack),
                RelationKind::Identity => sum.extreme_slack.max(c.slack),
            };
            sum.failures += usize::from(!c.satisfied);
        }
    }
}

/// Tolerance for the pure-state saturation identities.
pub const SATURATION_TOL: f64 = 1e-6;

/// Checks, as identities, the bounds that are tight on pure states. The
/// measures come from the pure-state closed forms for squared Schmidt
/// coefficients `mu`.
pub fn pure_state_saturation_check(mu: &[f64], cfg: &OptimizerConfig) -> Result<BoundReport> {
    let table = pure_state_measure_table(mu, cfg)?.values;
    let n = mu.len();
    let v = Values::from_table(&table, n, n);
    let mut pairs: Vec<(&'static str, f64, f64)> = vec![
        ("hellinger_resp_bound_eq_bures_resp", 1.0 - (1.0 - v.resp[HE]).max(0.0).sqrt(), v.resp[BU]),
        ("trace_resp_eq_bures_resp_bound", v.resp[TR], 1.0 - (1.0 - v.resp[BU]).powi(2)),
        ("hs_resp_eq_trace_resp", v.resp[HS], v.resp[TR]),
    ];
    if n <= 3 {
        let nf = n as f64;
        pairs.push((
            "bures_meas_eq_bures_resp_bound",
            v.meas[BU],
            2.0 - (2.0 / nf.sqrt()) * (1.0 + (nf - 1.0) * (1.0 - v.resp[BU]).powi(2)).sqrt(),
        ));
    }
    let checks = pairs
        .into_iter()
        .map(|(relation, lhs, rhs)| {
            let slack = (rhs - lhs).abs();
            RelationCheck {
                relation,
                kind: RelationKind::Identity,
                conjecture: false,
                lhs,
                rhs,
                slack,
                satisfied: slack <= SATURATION_TOL,
            }
        })
        .collect();
    Ok(BoundReport {
        n_a: n,
        n_b: n,
        tolerances: AuditTolerances { inequality: SATURATION_TOL, identity: SATURATION_TOL },
        checks,
    })
}
