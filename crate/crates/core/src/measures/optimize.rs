//! Multi-start Nelder-Mead search over orthonormal bases of the measured
//! subsystem.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{expi_hermitian, herm_eig, ComplexMatrix, C64};
use crate::states::{gellmann_basis, haar_unitary};

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimizes `f` starting from the simplex `x0, x0 + step_k e_k`. Stops when
/// the spread of objective values over the simplex drops below `ftol` or the
/// evaluation budget runs out. Non-finite values count as `+inf`.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: &[f64],
    ftol: f64,
    max_evals: usize,
) -> NelderMeadResult {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for k in 0..n {
        let mut x = x0.to_vec();
        x[k] += step[k];
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    let mut converged = false;
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let spread = if worst.is_finite() { worst - best } else { f64::INFINITY };
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread <= ftol || diameter < 1e-14 {
            converged = true;
            break;
        }
        let centroid: Vec<f64> =
            (0..n).map(|k| simplex[..n].iter().map(|(x, _)| x[k]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (c - w)).collect()
        };
        let xr = along(1.0);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(2.0);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let xc = along(0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(-0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < fr.min(simplex[n].1) {
            simplex[n] = (xc, fc);
            continue;
        }
        let x_best = simplex[0].0.clone();
        for (x, v) in simplex.iter_mut().skip(1) {
            for (xi, bi) in x.iter_mut().zip(&x_best) {
                *xi = bi + 0.5 * (*xi - bi);
            }
            *v = eval(x, &mut evals);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    NelderMeadResult { x, value, evaluations: evals, converged }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizerConfig {
    /// Total number of starts; half structured, half Haar random.
    pub restarts: usize,
    /// Simplex spread tolerance on the objective.
    pub tol: f64,
    /// Evaluation budget per start.
    pub max_evals: usize,
    pub seed: u64,
    /// Fail with `OptimizerNotConverged` instead of returning the best
    /// unconverged value.
    pub strict: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { restarts: 16, tol: 1e-9, max_evals: 2000, seed: 0x5eed_d15c, strict: false }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizerReport {
    pub restarts: usize,
    pub best_objective: f64,
    /// Whether the start that produced the best value met the tolerance.
    pub converged: bool,
    /// Chart coordinates of the optimum, relative to its start.
    pub argmin: Vec<f64>,
    pub evaluations: usize,
    #[serde(skip)]
    pub best_basis: ComplexMatrix,
}

/// Basis vectors (columns) for the qubit chart: the first vector has Bloch
/// angles `(theta, phi)`, the second is orthogonal to it.
pub fn bloch_basis(theta: f64, phi: f64) -> ComplexMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = C64::from_polar(1.0, phi);
    let mut u = ComplexMatrix::zeros(2, 2);
    u[(0, 0)] = C64::new(c, 0.0);
    u[(1, 0)] = e * s;
    u[(0, 1)] = -e.conj() * s;
    u[(1, 1)] = C64::new(c, 0.0);
    u
}

/// Bloch angles of the first column of a qubit basis.
pub fn bloch_angles(u: &ComplexMatrix) -> (f64, f64) {
    let (a, b) = (u[(0, 0)], u[(1, 0)]);
    let z = a.norm_sqr() - b.norm_sqr();
    let xy = 2.0 * a.conj() * b;
    (z.clamp(-1.0, 1.0).acos(), xy.im.atan2(xy.re))
}

/// Basis rotated by the unit Bloch vector `u`: first column has Bloch vector `u`.
pub fn basis_from_bloch_vector(u: [f64; 3]) -> ComplexMatrix {
    let n = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    let z = if n > 0.0 { u[2] / n } else { 1.0 };
    bloch_basis(z.clamp(-1.0, 1.0).acos(), u[1].atan2(u[0]))
}

/// Discrete Fourier basis on `C^n`.
pub fn fourier_basis(n: usize) -> ComplexMatrix {
    let s = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |r, c| C64::from_polar(s, 2.0 * PI * (r * c) as f64 / n as f64))
}

/// Eigenbasis of a Hermitian matrix, eigenvectors as columns.
pub fn eigenbasis(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(herm_eig(m)?.vectors)
}

struct Chart {
    n: usize,
    generators: Vec<ComplexMatrix>,
}

impl Chart {
    fn new(n: usize) -> Self {
        let generators = if n == 2 { Vec::new() } else { gellmann_basis(n) };
        Self { n, generators }
    }

    fn dim(&self) -> usize {
        if self.n == 2 {
            2
        } else {
            self.n * self.n - 1
        }
    }

    /// Start coordinates: Bloch angles for qubits, the origin otherwise
    /// (where the chart is centred on the start basis).
    fn origin(&self, start: &ComplexMatrix) -> Vec<f64> {
        if self.n == 2 {
            let (t, p) = bloch_angles(start);
            vec![t, p]
        } else {
            vec![0.0; self.dim()]
        }
    }

    fn basis(&self, start: &ComplexMatrix, x: &[f64]) -> ComplexMatrix {
        if self.n == 2 {
            return bloch_basis(x[0], x[1]);
        }
        let mut h = ComplexMatrix::zeros(self.n, self.n);
        for (g, &c) in self.generators.iter().zip(x) {
            h = &h + &g.scale_re(c);
        }
        start.matmul(&expi_hermitian(&h).expect("generator is Hermitian"))
    }
}

/// Starting bases: caller hints, computational and Fourier bases, then Haar
/// random bases alternating with small perturbations of the structured ones.
/// The sequence for `k` restarts is a prefix of the one for `k + 1`, so more
/// restarts never give a worse optimum.
fn starting_bases(n: usize, hints: &[ComplexMatrix], restarts: usize, rng: &mut ChaCha8Rng) -> Vec<ComplexMatrix> {
    let mut base: Vec<ComplexMatrix> = hints.iter().filter(|h| h.rows() == n && h.cols() == n).cloned().collect();
    base.push(ComplexMatrix::identity(n));
    base.push(fourier_basis(n));
    let mut starts: Vec<ComplexMatrix> = base.iter().take(restarts).cloned().collect();
    let gens = gellmann_basis(n);
    let mut k = 0;
    while starts.len() < restarts {
        if (starts.len() - base.len()) % 2 == 0 {
            starts.push(haar_unitary(n, rng));
        } else {
            let mut h = ComplexMatrix::zeros(n, n);
            for g in &gens {
                let c: f64 = rand::Rng::gen_range(rng, -0.3..0.3);
                h = &h + &g.scale_re(c);
            }
            let pert = expi_hermitian(&h).expect("generator is Hermitian");
            starts.push(base[k % base.len()].matmul(&pert));
            k += 1;
        }
    }
    starts
}

/// Optimizes `objective` over orthonormal bases of `C^n` (columns of the
/// unitary passed to it). The objective must not depend on the order or
/// phases of the basis vectors.
pub fn optimize_over_basis(
    n: usize,
    objective: impl Fn(&ComplexMatrix) -> f64,
    sense: Sense,
    hints: &[ComplexMatrix],
    config: &OptimizerConfig,
) -> Result<OptimizerReport> {
    if n < 2 {
        return Err(Error::UnsupportedDimension { n_a: n, what: "basis optimization needs n >= 2".into() });
    }
    let restarts = config.restarts.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let starts = starting_bases(n, hints, restarts, &mut rng);
    let chart = Chart::new(n);
    let sign = match sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut best: Option<(f64, Vec<f64>, bool, usize)> = None;
    let mut total_evals = 0;
    for (idx, start) in starts.iter().enumerate() {
        let f = |x: &[f64]| sign * objective(&chart.basis(start, x));
        let x0 = chart.origin(start);
        let step = vec![0.4; chart.dim()];
        let first = nelder_mead(f, &x0, &step, config.tol, config.max_evals);
        // A second, smaller simplex guards against premature collapse.
        let budget = config.max_evals.saturating_sub(first.evaluations).max(chart.dim() + 2);
        let polish_step = vec![0.02; chart.dim()];
        let second = nelder_mead(f, &first.x, &polish_step, config.tol, budget);
        let (x, value) = if second.value <= first.value { (second.x, second.value) } else { (first.x, first.value) };
        let converged = first.converged && second.converged;
        total_evals += first.evaluations + second.evaluations;
        if best.as_ref().map_or(true, |b| value < b.0) {
            best = Some((value, x, converged, idx));
        }
    }
    let (value, x, converged, idx) = best.expect("at least one start");
    let best_objective = sign * value;
    if config.strict && !converged {
        return Err(Error::OptimizerNotConverged { best: best_objective, evaluations: total_evals });
    }
    Ok(OptimizerReport {
        restarts,
        best_objective,
        converged,
        best_basis: chart.basis(&starts[idx], &x),
        argmin: x,
        evaluations: total_evals,
    })
}
