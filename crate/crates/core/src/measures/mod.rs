//! Geometric, measurement-induced and response discords for the trace,
//! Hilbert-Schmidt, Bures and Hellinger distances.

pub mod basis;
pub mod closed;
pub mod cq;
pub mod optimize;
pub mod pure;

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{psd_sqrt, psd_trace_sqrt, trace_norm, ComplexMatrix, C64, ZERO};
use crate::states::DensityMatrix;

use basis::{block, block_hs_sqr, rotate_local};
use optimize::{eigenbasis, optimize_over_basis, OptimizerConfig, OptimizerReport, Sense};

/// Values in `[-NEG_CLIP, 0)` are rounding noise and reported as zero.
pub const NEG_CLIP: f64 = 1e-9;

pub(crate) fn clip_small_negative(v: f64) -> f64 {
    if v < 0.0 && v >= -NEG_CLIP {
        0.0
    } else {
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Distance {
    Trace,
    HilbertSchmidt,
    Bures,
    Hellinger,
}

impl Distance {
    pub const ALL: [Distance; 4] = [Distance::Trace, Distance::HilbertSchmidt, Distance::Bures, Distance::Hellinger];

    /// Short name used in tables and on the command line.
    pub fn short(self) -> &'static str {
        match self {
            Distance::Trace => "tr",
            Distance::HilbertSchmidt => "hs",
            Distance::Bures => "bu",
            Distance::Hellinger => "he",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tr" | "trace" => Ok(Distance::Trace),
            "hs" | "hilbert-schmidt" | "hilbertschmidt" => Ok(Distance::HilbertSchmidt),
            "bu" | "bures" => Ok(Distance::Bures),
            "he" | "hellinger" => Ok(Distance::Hellinger),
            other => Err(Error::Parse(format!("unknown distance '{other}'"))),
        }
    }

    /// Normalization of the discord of response: the largest squared
    /// distance between a state and its image under a local unitary.
    pub fn response_normalization(self) -> f64 {
        match self {
            Distance::Trace => 4.0,
            _ => 2.0,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MeasureKind {
    Geometric,
    MeasurementInduced,
    Response,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 3] = [MeasureKind::Geometric, MeasureKind::MeasurementInduced, MeasureKind::Response];

    pub fn short(self) -> &'static str {
        match self {
            MeasureKind::Geometric => "G",
            MeasureKind::MeasurementInduced => "M",
            MeasureKind::Response => "R",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "g" | "geo" | "geometric" => Ok(MeasureKind::Geometric),
            "m" | "meas" | "measurement" => Ok(MeasureKind::MeasurementInduced),
            "r" | "resp" | "response" => Ok(MeasureKind::Response),
            other => Err(Error::Parse(format!("unknown measure '{other}'"))),
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

fn check_same_system(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.n_a() != sigma.n_a() || rho.n_b() != sigma.n_b() {
        return Err(Error::DimensionMismatch(format!(
            "states live on {}x{} and {}x{}",
            rho.n_a(),
            rho.n_b(),
            sigma.n_a(),
            sigma.n_b()
        )));
    }
    Ok(())
}

/// Uhlmann fidelity `(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same_system(rho, sigma)?;
    let s = rho.sqrt()?;
    let m = s.matmul(sigma.matrix()).matmul(&s).hermitian_part();
    let f = psd_trace_sqrt(&m)?;
    Ok((f * f).min(1.0))
}

/// Distance between two states of the same system.
pub fn distance(rho: &DensityMatrix, sigma: &DensityMatrix, d: Distance) -> Result<f64> {
    check_same_system(rho, sigma)?;
    Ok(match d {
        Distance::Trace => trace_norm(&(rho.matrix() - sigma.matrix()))?,
        Distance::HilbertSchmidt => (rho.matrix() - sigma.matrix()).hs_norm(),
        Distance::Bures => (2.0 - 2.0 * fidelity(rho, sigma)?.sqrt()).max(0.0).sqrt(),
        Distance::Hellinger => (&rho.sqrt()? - &sigma.sqrt()?).hs_norm(),
    })
}

/// Value of a discord measure, with the optimizer report when a numerical
/// search was needed.
#[derive(Debug, Clone, Serialize)]
pub struct MeasureResult {
    pub value: f64,
    pub report: Option<OptimizerReport>,
}

impl MeasureResult {
    fn exact(value: f64) -> Self {
        Self { value: clip_small_negative(value), report: None }
    }

    fn searched(value: f64, report: OptimizerReport) -> Self {
        Self { value: clip_small_negative(value), report: Some(report) }
    }
}

/// Per-state data shared by all objectives.
struct Prepared<'a> {
    rho: &'a DensityMatrix,
    sqrt_rho: ComplexMatrix,
    hints: Vec<ComplexMatrix>,
}

impl<'a> Prepared<'a> {
    fn new(rho: &'a DensityMatrix) -> Result<Self> {
        let sqrt_rho = rho.sqrt()?;
        let mut hints = vec![eigenbasis(&rho.reduced_a())?];
        if rho.n_a() == 2 {
            hints.push(closed::hellinger_geo_qubit_basis(rho)?);
            hints.push(closed::hs_geo_operator_qubit_basis(rho.matrix(), rho.n_b())?);
        }
        Ok(Self { rho, sqrt_rho, hints })
    }

    fn n_a(&self) -> usize {
        self.rho.n_a()
    }

    fn search(
        &self,
        objective: impl Fn(&ComplexMatrix) -> f64,
        sense: Sense,
        cfg: &OptimizerConfig,
    ) -> Result<OptimizerReport> {
        optimize_over_basis(self.n_a(), objective, sense, &self.hints, cfg)
    }
}

/// `exp(-2 pi i j / n)` for `j = 1..=n`.
fn harmonic_phases(n: usize) -> Vec<C64> {
    (1..=n).map(|j| C64::from_polar(1.0, -2.0 * PI * j as f64 / n as f64)).collect()
}

fn sin_sq_weight(i: usize, j: usize, n: usize) -> f64 {
    let s = (PI * (i as f64 - j as f64) / n as f64).sin();
    s * s
}

/// `sum_i ||<a_i|X|a_i>||_HS^2`.
fn diag_block_weight(x: &ComplexMatrix, u: &ComplexMatrix, n_a: usize, n_b: usize) -> f64 {
    let y = rotate_local(x, u, n_b);
    (0..n_a).map(|i| block_hs_sqr(&y, i, i, n_b)).sum()
}

/// `sum_{i != j} sin^2(pi (i-j)/n) ||<a_i|X|a_j>||_HS^2`.
fn harmonic_offdiag_weight(x: &ComplexMatrix, u: &ComplexMatrix, n_a: usize, n_b: usize) -> f64 {
    let y = rotate_local(x, u, n_b);
    let mut s = 0.0;
    for i in 0..n_a {
        for j in 0..n_a {
            if i != j {
                s += sin_sq_weight(i, j, n_a) * block_hs_sqr(&y, i, j, n_b);
            }
        }
    }
    s
}

/// `|| Y (D (x) 1) Y ||_tr` with `Y` the rotated `sqrt(rho)` and `D` the
/// harmonic phases; this is `|| sqrt(rho) U sqrt(rho) ||_tr`.
fn bures_response_objective(s: &ComplexMatrix, u: &ComplexMatrix, n_a: usize, n_b: usize) -> f64 {
    let y = rotate_local(s, u, n_b);
    let ph = harmonic_phases(n_a);
    let mut yd = y.clone();
    for r in 0..n_a * n_b {
        for c in 0..n_a * n_b {
            yd[(r, c)] *= ph[c / n_b];
        }
    }
    let mut m = yd.matmul(&y);
    if n_a == 2 {
        // Real phases: the product is Hermitian up to rounding.
        m = m.hermitian_part();
    }
    trace_norm(&m).unwrap_or(f64::NAN)
}

/// `tr sqrt(sum_j (eta_j rho_j)^2)`.
fn bures_measurement_objective(s: &ComplexMatrix, u: &ComplexMatrix, n_a: usize, n_b: usize) -> f64 {
    let y = rotate_local(s, u, n_b);
    let d = n_a * n_b;
    let mut acc = ComplexMatrix::zeros(d, d);
    for j in 0..n_a {
        let col = y.submatrix(0, j * n_b, d, n_b);
        let row = y.submatrix(j * n_b, 0, n_b, d);
        let a = col.matmul(&row);
        acc = &acc + &a.matmul(&a);
    }
    psd_trace_sqrt(&acc.hermitian_part()).unwrap_or(f64::NAN)
}

/// `sum_i tr(<a_i|sqrt(rho)|a_i> sqrt(<a_i|rho|a_i>))`.
fn hellinger_measurement_objective(
    s: &ComplexMatrix,
    r: &ComplexMatrix,
    u: &ComplexMatrix,
    n_a: usize,
    n_b: usize,
) -> f64 {
    let ys = rotate_local(s, u, n_b);
    let yr = rotate_local(r, u, n_b);
    let mut total = 0.0;
    for i in 0..n_a {
        let b = block(&ys, i, i, n_b);
        let c = block(&yr, i, i, n_b).hermitian_part();
        match psd_sqrt(&c) {
            Ok(sc) => total += b.hs_inner(&sc).re,
            Err(_) => return f64::NAN,
        }
    }
    total
}

/// `|| rho - rho_post ||_tr^2` evaluated in the rotated frame.
fn trace_measurement_objective(r: &ComplexMatrix, u: &ComplexMatrix, n_a: usize, n_b: usize) -> f64 {
    let mut y = rotate_local(r, u, n_b);
    for i in 0..n_a {
        for p in 0..n_b {
            for q in 0..n_b {
                y[(i * n_b + p, i * n_b + q)] = ZERO;
            }
        }
    }
    let t = trace_norm(&y.hermitian_part()).unwrap_or(f64::NAN);
    t * t
}

/// `|| rho - U rho U^dagger ||_tr^2` with `U` the harmonic unitary of the basis.
fn trace_response_objective(r: &ComplexMatrix, u: &ComplexMatrix, n_a: usize, n_b: usize) -> f64 {
    let mut y = rotate_local(r, u, n_b);
    let ph = harmonic_phases(n_a);
    for row in 0..n_a * n_b {
        for col in 0..n_a * n_b {
            y[(row, col)] *= C64::new(1.0, 0.0) - ph[row / n_b] * ph[col / n_b].conj();
        }
    }
    let t = trace_norm(&y.hermitian_part()).unwrap_or(f64::NAN);
    t * t
}

/// `4 ||<a_1|rho|a_2>||_tr^2` for a qubit A.
fn trace_response_qubit_objective(r: &ComplexMatrix, u: &ComplexMatrix, n_b: usize) -> f64 {
    let y = rotate_local(r, u, n_b);
    let x12 = block(&y, 0, 1, n_b);
    let t = trace_norm(&x12).unwrap_or(f64::NAN);
    4.0 * t * t
}

fn unsupported(n_a: usize, what: &str) -> Error {
    Error::UnsupportedDimension { n_a, what: what.into() }
}

/// Geometric discord: squared distance to the closest classical-quantum state.
pub fn geo_discord(rho: &DensityMatrix, d: Distance, cfg: &OptimizerConfig) -> Result<MeasureResult> {
    let (n_a, n_b) = (rho.n_a(), rho.n_b());
    match d {
        Distance::Hellinger if n_a == 2 => Ok(MeasureResult::exact(closed::hellinger_geo_qubit(rho)?)),
        Distance::HilbertSchmidt if n_a == 2 => Ok(MeasureResult::exact(closed::hs_geo_qubit(rho)?)),
        Distance::Hellinger => {
            let p = Prepared::new(rho)?;
            let rep = p.search(|u| diag_block_weight(&p.sqrt_rho, u, n_a, n_b), Sense::Maximize, cfg)?;
            let w = rep.best_objective.min(1.0);
            Ok(MeasureResult::searched(2.0 - 2.0 * w.sqrt(), rep))
        }
        Distance::HilbertSchmidt => {
            let p = Prepared::new(rho)?;
            let rep = p.search(|u| diag_block_weight(rho.matrix(), u, n_a, n_b), Sense::Maximize, cfg)?;
            Ok(MeasureResult::searched(rho.purity() - rep.best_objective, rep))
        }
        Distance::Bures if n_a == 2 => {
            let p = Prepared::new(rho)?;
            let rep = p.search(|u| bures_response_objective(&p.sqrt_rho, u, n_a, n_b), Sense::Maximize, cfg)?;
            let success = (0.5 * (1.0 + rep.best_objective)).min(1.0);
            Ok(MeasureResult::searched(2.0 - 2.0 * success.sqrt(), rep))
        }
        Distance::Bures => Err(unsupported(n_a, "Bures geometric discord is only bracketed; use bures_geo_bounds")),
        Distance::Trace if n_a == 2 => disc_response(rho, Distance::Trace, cfg),
        Distance::Trace => Err(unsupported(n_a, "trace geometric discord needs a qubit A")),
    }
}

/// Bounds `(lower, upper)` on the Bures geometric discord for any `n_a`,
/// from the Hellinger geometric discord.
pub fn bures_geo_bounds(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<(f64, f64)> {
    let he = geo_discord(rho, Distance::Hellinger, cfg)?.value;
    Ok((crate::bounds::g_inv(he.min(2.0))?, he))
}

/// Measurement-induced geometric discord: squared distance to the
/// post-measurement state, minimized over local von Neumann measurements.
pub fn meas_induced_discord(rho: &DensityMatrix, d: Distance, cfg: &OptimizerConfig) -> Result<MeasureResult> {
    let (n_a, n_b) = (rho.n_a(), rho.n_b());
    match d {
        Distance::HilbertSchmidt => geo_discord(rho, d, cfg),
        Distance::Hellinger => {
            let p = Prepared::new(rho)?;
            let rep = p.search(
                |u| hellinger_measurement_objective(&p.sqrt_rho, rho.matrix(), u, n_a, n_b),
                Sense::Maximize,
                cfg,
            )?;
            Ok(MeasureResult::searched(2.0 - 2.0 * rep.best_objective.min(1.0), rep))
        }
        Distance::Bures => {
            let p = Prepared::new(rho)?;
            let rep = p.search(|u| bures_measurement_objective(&p.sqrt_rho, u, n_a, n_b), Sense::Maximize, cfg)?;
            Ok(MeasureResult::searched(2.0 - 2.0 * rep.best_objective.min(1.0), rep))
        }
        Distance::Trace => {
            let p = Prepared::new(rho)?;
            let rep = p.search(|u| trace_measurement_objective(rho.matrix(), u, n_a, n_b), Sense::Minimize, cfg)?;
            Ok(MeasureResult::searched(rep.best_objective, rep))
        }
    }
}

/// Discord of response: normalized squared distance to the image of the
/// state under the least disturbing local unitary with a harmonic spectrum.
pub fn disc_response(rho: &DensityMatrix, d: Distance, cfg: &OptimizerConfig) -> Result<MeasureResult> {
    let (n_a, n_b) = (rho.n_a(), rho.n_b());
    match d {
        Distance::Hellinger if n_a == 2 => Ok(MeasureResult::exact(closed::hellinger_response_qubit(rho)?)),
        Distance::HilbertSchmidt if n_a == 2 => Ok(MeasureResult::exact(2.0 * closed::hs_geo_qubit(rho)?)),
        Distance::Hellinger => {
            let p = Prepared::new(rho)?;
            let rep = p.search(|u| harmonic_offdiag_weight(&p.sqrt_rho, u, n_a, n_b), Sense::Minimize, cfg)?;
            Ok(MeasureResult::searched(2.0 * rep.best_objective, rep))
        }
        Distance::HilbertSchmidt => {
            let p = Prepared::new(rho)?;
            let rep = p.search(|u| harmonic_offdiag_weight(rho.matrix(), u, n_a, n_b), Sense::Minimize, cfg)?;
            Ok(MeasureResult::searched(2.0 * rep.best_objective, rep))
        }
        Distance::Bures => {
            let p = Prepared::new(rho)?;
            let rep = p.search(|u| bures_response_objective(&p.sqrt_rho, u, n_a, n_b), Sense::Maximize, cfg)?;
            Ok(MeasureResult::searched(1.0 - rep.best_objective.min(1.0), rep))
        }
        Distance::Trace if n_a == 2 => {
            let p = Prepared::new(rho)?;
            let rep = p.search(|u| trace_response_qubit_objective(rho.matrix(), u, n_b), Sense::Minimize, cfg)?;
            Ok(MeasureResult::searched(rep.best_objective, rep))
        }
        Distance::Trace => {
            let p = Prepared::new(rho)?;
            let rep = p.search(|u| trace_response_objective(rho.matrix(), u, n_a, n_b), Sense::Minimize, cfg)?;
            Ok(MeasureResult::searched(0.25 * rep.best_objective, rep))
        }
    }
}

pub fn measure(rho: &DensityMatrix, kind: MeasureKind, d: Distance, cfg: &OptimizerConfig) -> Result<MeasureResult> {
    match kind {
        MeasureKind::Geometric => geo_discord(rho, d, cfg),
        MeasureKind::MeasurementInduced => meas_induced_discord(rho, d, cfg),
        MeasureKind::Response => disc_response(rho, d, cfg),
    }
}

/// Skew information `-(1/2) tr([sqrt(rho), K]^2)` of an observable `K`.
pub fn skew_information(rho: &DensityMatrix, k: &ComplexMatrix) -> Result<f64> {
    if k.rows() != rho.dim() || k.cols() != rho.dim() {
        return Err(Error::DimensionMismatch("observable must act on the full system".into()));
    }
    let s = rho.sqrt()?;
    let c = &s.matmul(k) - &k.matmul(&s);
    Ok(-0.5 * c.matmul(&c).trace().re)
}

/// All twelve measures of one state. Entries that are not defined for the
/// state's dimensions are `None`.
#[derive(Debug, Clone, Serialize)]
pub struct MeasureTable {
    values: [[Option<f64>; 4]; 3],
}

impl MeasureTable {
    pub fn get(&self, kind: MeasureKind, d: Distance) -> Option<f64> {
        self.values[kind.index()][d.index()]
    }

    pub fn set(&mut self, kind: MeasureKind, d: Distance, v: Option<f64>) {
        self.values[kind.index()][d.index()] = v;
    }

    pub fn empty() -> Self {
        Self { values: [[None; 4]; 3] }
    }

    /// `(kind, distance, value)` in a fixed order.
    pub fn entries(&self) -> Vec<(MeasureKind, Distance, Option<f64>)> {
        MeasureKind::ALL
            .iter()
            .flat_map(|&k| Distance::ALL.iter().map(move |&d| (k, d, self.get(k, d))))
            .collect()
    }
}

/// Computes every measure that is defined for the state's dimensions.
pub fn all_measures(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<MeasureTable> {
    let mut t = MeasureTable::empty();
    for kind in MeasureKind::ALL {
        for d in Distance::ALL {
            match measure(rho, kind, d, cfg) {
                Ok(r) => t.set(kind, d, Some(r.value)),
                Err(Error::UnsupportedDimension { .. }) => t.set(kind, d, None),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(t)
}
