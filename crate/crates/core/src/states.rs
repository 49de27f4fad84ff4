//! Bipartite density matrices on `C^{n_a} (x) C^{n_b}` and the state families
//! used throughout the crate.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    check_psd, complete_orthonormal, herm_eig, herm_eigenvalues, inner, kron, partial_trace, psd_sqrt,
    vec_norm, ComplexMatrix, Keep, C64, I, ONE, ZERO,
};
use crate::measures::closed::hellinger_response_qubit;

/// Tolerance for hermiticity and unit trace when validating states.
pub const STATE_TOL: f64 = 1e-8;

/// A validated density matrix of a bipartite system.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_a: usize,
    n_b: usize,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates hermiticity, positivity (eigenvalues down to -1e-10 are
    /// accepted as rounding) and unit trace.
    pub fn new(mat: ComplexMatrix, n_a: usize, n_b: usize) -> Result<Self> {
        let d = n_a * n_b;
        if n_a == 0 || n_b == 0 || mat.rows() != d || mat.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix cannot be a state of a {n_a}x{n_b} system",
                mat.rows(),
                mat.cols()
            )));
        }
        let dev = mat.hermitian_deviation();
        if dev > STATE_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = mat.trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized { trace: tr });
        }
        check_psd(&herm_eigenvalues(&mat)?)?;
        Ok(Self { n_a, n_b, mat: mat.hermitian_part() })
    }

    /// Internal constructor for matrices that are states by construction.
    pub(crate) fn new_unchecked(mat: ComplexMatrix, n_a: usize, n_b: usize) -> Self {
        debug_assert_eq!(mat.rows(), n_a * n_b);
        Self { n_a, n_b, mat: mat.hermitian_part() }
    }

    /// `|psi><psi|` for a unit vector.
    pub fn from_pure(v: &[C64], n_a: usize, n_b: usize) -> Result<Self> {
        if v.len() != n_a * n_b {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for a {n_a}x{n_b} system",
                v.len()
            )));
        }
        let norm = vec_norm(v);
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { trace: norm * norm });
        }
        Ok(Self::new_unchecked(ComplexMatrix::outer(v, v), n_a, n_b))
    }

    pub fn maximally_mixed(n_a: usize, n_b: usize) -> Self {
        let d = n_a * n_b;
        Self::new_unchecked(ComplexMatrix::identity(d).scale_re(1.0 / d as f64), n_a, n_b)
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn dim(&self) -> usize {
        self.n_a * self.n_b
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn purity(&self) -> f64 {
        self.mat.hs_inner(&self.mat).re
    }

    pub fn reduced_a(&self) -> ComplexMatrix {
        partial_trace(&self.mat, self.n_a, self.n_b, Keep::A).expect("dimensions checked at construction")
    }

    pub fn reduced_b(&self) -> ComplexMatrix {
        partial_trace(&self.mat, self.n_a, self.n_b, Keep::B).expect("dimensions checked at construction")
    }

    pub fn sqrt(&self) -> Result<ComplexMatrix> {
        psd_sqrt(&self.mat)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        herm_eigenvalues(&self.mat)
    }

    /// Number of eigenvalues above `1e-10`.
    pub fn rank(&self) -> Result<usize> {
        Ok(self.eigenvalues()?.iter().filter(|&&x| x > 1e-10).count())
    }

    /// `(U_a (x) U_b) rho (U_a (x) U_b)^dagger`.
    pub fn local_unitary(&self, u_a: &ComplexMatrix, u_b: &ComplexMatrix) -> Result<Self> {
        if u_a.rows() != self.n_a || u_b.rows() != self.n_b {
            return Err(Error::DimensionMismatch("local unitary dimensions".into()));
        }
        Ok(Self::new_unchecked(kron(u_a, u_b).conjugate_by(&self.mat), self.n_a, self.n_b))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&StateJson::from(self)).expect("state serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: StateJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.try_into()
    }
}

/// On-disk form of a state: `{ "n_a", "n_b", "re": [[..]], "im": [[..]] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateJson {
    pub n_a: usize,
    pub n_b: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&DensityMatrix> for StateJson {
    fn from(s: &DensityMatrix) -> Self {
        let d = s.dim();
        let m = s.matrix();
        StateJson {
            n_a: s.n_a,
            n_b: s.n_b,
            re: (0..d).map(|r| (0..d).map(|c| m[(r, c)].re).collect()).collect(),
            im: (0..d).map(|r| (0..d).map(|c| m[(r, c)].im).collect()).collect(),
        }
    }
}

impl TryFrom<StateJson> for DensityMatrix {
    type Error = Error;
    fn try_from(j: StateJson) -> Result<Self> {
        let mat = matrix_from_parts(&j.re, &j.im)?;
        DensityMatrix::new(mat, j.n_a, j.n_b)
    }
}

pub(crate) fn matrix_from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<ComplexMatrix> {
    let rows = re.len();
    let cols = re.first().map_or(0, Vec::len);
    if im.len() != rows || re.iter().chain(im).any(|r| r.len() != cols) {
        return Err(Error::Parse("real and imaginary parts must be rectangular and of equal shape".into()));
    }
    let data = re
        .iter()
        .zip(im)
        .flat_map(|(r, i)| r.iter().zip(i).map(|(&a, &b)| C64::new(a, b)))
        .collect();
    ComplexMatrix::from_vec(rows, cols, data).map_err(|e| Error::Parse(e.to_string()))
}

/// Schmidt form `sum_i sqrt(mu_i) |phi_i>|chi_i>` of a pure state. The
/// coefficients `mu` are the squared Schmidt coefficients, descending, and
/// there are `min(n_a, n_b)` of them (trailing ones may be zero).
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub mu: Vec<f64>,
    pub basis_a: Vec<Vec<C64>>,
    pub basis_b: Vec<Vec<C64>>,
}

impl SchmidtDecomposition {
    pub fn schmidt_number(&self) -> usize {
        self.mu.iter().filter(|&&m| m > 1e-12).count()
    }

    /// `K = 1 / sum_i mu_i^2`.
    pub fn schmidt_k(&self) -> f64 {
        1.0 / self.mu.iter().map(|m| m * m).sum::<f64>()
    }
}

pub fn schmidt(v: &[C64], n_a: usize, n_b: usize) -> Result<SchmidtDecomposition> {
    if v.len() != n_a * n_b {
        return Err(Error::DimensionMismatch(format!("vector of length {} for {n_a}x{n_b}", v.len())));
    }
    let norm = vec_norm(v);
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { trace: norm * norm });
    }
    let c = ComplexMatrix::from_fn(n_a, n_b, |i, k| v[i * n_b + k]);
    let eig = herm_eig(&c.matmul(&c.adjoint()))?;
    let m = n_a.min(n_b);
    let mut mu = Vec::with_capacity(m);
    let mut basis_a = Vec::with_capacity(m);
    let mut basis_b = Vec::with_capacity(m);
    for idx in (0..n_a).rev().take(m) {
        let lam = eig.values[idx].max(0.0);
        let phi = eig.vectors.column(idx);
        if lam > 1e-14 {
            let s = lam.sqrt();
            let chi: Vec<C64> = (0..n_b).map(|k| (0..n_a).map(|j| phi[j].conj() * c[(j, k)]).sum::<C64>() / s).collect();
            basis_b.push(chi);
            mu.push(lam);
        } else {
            mu.push(0.0);
        }
        basis_a.push(phi);
    }
    // Zero coefficients have no partner from the state itself.
    let nonzero = basis_b.len();
    let completed = complete_orthonormal(&basis_b, n_b);
    basis_b = completed.into_iter().take(m.max(nonzero)).collect();
    Ok(SchmidtDecomposition { mu, basis_a, basis_b })
}

pub fn schmidt_number(v: &[C64], n_a: usize, n_b: usize) -> Result<usize> {
    Ok(schmidt(v, n_a, n_b)?.schmidt_number())
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Uniformly distributed unit vector in `C^dim`.
pub fn random_pure_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        let n = vec_norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Haar-random unitary from the QR decomposition of a complex Ginibre
/// matrix, with the phases of R's diagonal fixed to be positive.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        for _ in 0..2 {
            for q in &cols {
                let ov = inner(q, &v);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= ov * y;
                }
            }
        }
        let nrm = vec_norm(&v);
        if nrm > 1e-10 {
            cols.push(v.into_iter().map(|z| z / nrm).collect());
        }
    }
    ComplexMatrix::from_columns(&cols)
}

/// Random state of rank at most `rank`, distributed as the partial trace of
/// a Haar-random pure state on the system plus a `rank`-dimensional ancilla.
pub fn random_haar_state<R: Rng + ?Sized>(n_a: usize, n_b: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    let d = n_a * n_b;
    if rank == 0 || rank > d {
        return Err(Error::BadRank { rank, dim: d });
    }
    let g = ComplexMatrix::from_fn(d, rank, |_, _| complex_gaussian(rng));
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    Ok(DensityMatrix::new_unchecked(m.scale_re(1.0 / tr), n_a, n_b))
}

/// Maximum number of spectrum draws before a fixed-purity request is
/// declared unreachable.
pub const FIXED_PURITY_ATTEMPTS: usize = 10_000;

/// Random state with prescribed purity and rank. The spectrum is drawn by
/// sampling `rank - 2` eigenvalues and solving the normalization and purity
/// constraints for the last two; the eigenbasis is Haar random.
pub fn random_fixed_purity_state<R: Rng + ?Sized>(
    n_a: usize,
    n_b: usize,
    purity: f64,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let d = n_a * n_b;
    if rank == 0 || rank > d {
        return Err(Error::BadRank { rank, dim: d });
    }
    if !(purity.is_finite() && purity <= 1.0 + 1e-12 && purity >= 1.0 / d as f64 - 1e-12) {
        return Err(Error::PurityOutOfRange { purity, lo: 1.0 / d as f64, hi: 1.0 });
    }
    let spectrum = fixed_purity_spectrum(purity, rank, rng)?;
    let u = haar_unitary(d, rng);
    let mut diag = spectrum;
    diag.resize(d, 0.0);
    let m = u.conjugate_by(&ComplexMatrix::from_diag(&diag));
    Ok(DensityMatrix::new_unchecked(m, n_a, n_b))
}

fn fixed_purity_spectrum<R: Rng + ?Sized>(purity: f64, rank: usize, rng: &mut R) -> Result<Vec<f64>> {
    let r = rank as f64;
    let unreachable = Error::UnachievablePurity { purity, rank };
    if purity < 1.0 / r - 1e-12 {
        return Err(unreachable);
    }
    match rank {
        1 => {
            if (purity - 1.0).abs() > 1e-12 {
                return Err(unreachable);
            }
            return Ok(vec![1.0]);
        }
        2 => {
            let s = (2.0 * purity - 1.0).max(0.0).sqrt();
            return Ok(vec![(1.0 + s) / 2.0, (1.0 - s) / 2.0]);
        }
        _ => {}
    }
    if purity <= 1.0 / r + 1e-12 {
        return Ok(vec![1.0 / r; rank]);
    }
    let free = rank - 2;
    // Half of the proposals spread the free eigenvalues around 1/r (needed
    // close to the minimal purity), half draw them from a small interval
    // whose width varies log-uniformly (needed close to purity one).
    let spread = (purity - 1.0 / r).sqrt();
    for attempt in 0..FIXED_PURITY_ATTEMPTS {
        let xs: Vec<f64> = if attempt % 2 == 0 {
            let width = (2.0 / r) * 10f64.powf(-4.0 * rng.gen::<f64>());
            (0..free).map(|_| width * rng.gen::<f64>()).collect()
        } else {
            (0..free).map(|_| 1.0 / r + spread * (2.0 * rng.gen::<f64>() - 1.0)).collect()
        };
        if xs.iter().any(|&x| x < 0.0) {
            continue;
        }
        let s = 1.0 - xs.iter().sum::<f64>();
        let q = purity - xs.iter().map(|x| x * x).sum::<f64>();
        let disc = 2.0 * q - s * s;
        if s <= 0.0 || disc < 0.0 {
            continue;
        }
        let root = disc.sqrt();
        let (p1, p2) = ((s + root) / 2.0, (s - root) / 2.0);
        if p2 < 0.0 {
            continue;
        }
        let mut spec = xs;
        spec.push(p1);
        spec.push(p2);
        return Ok(spec);
    }
    Err(unreachable)
}

/// The four Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus];

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "phi+" | "phiplus" => Ok(BellLabel::PhiPlus),
            "phi-" | "phiminus" => Ok(BellLabel::PhiMinus),
            "psi+" | "psiplus" => Ok(BellLabel::PsiPlus),
            "psi-" | "psiminus" => Ok(BellLabel::PsiMinus),
            other => Err(Error::Parse(format!("unknown Bell state '{other}'"))),
        }
    }
}

pub fn bell_vector(label: BellLabel) -> Vec<C64> {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    match label {
        BellLabel::PhiPlus => vec![h, ZERO, ZERO, h],
        BellLabel::PhiMinus => vec![h, ZERO, ZERO, -h],
        BellLabel::PsiPlus => vec![ZERO, h, h, ZERO],
        BellLabel::PsiMinus => vec![ZERO, h, -h, ZERO],
    }
}

pub fn bell_state(label: BellLabel) -> DensityMatrix {
    let v = bell_vector(label);
    DensityMatrix::new_unchecked(ComplexMatrix::outer(&v, &v), 2, 2)
}

/// Mixture `sum_k w_k |Bell_k><Bell_k|` with weights in the order
/// Phi+, Phi-, Psi+, Psi-.
pub fn bell_diagonal_state(weights: [f64; 4]) -> Result<DensityMatrix> {
    if weights.iter().any(|&w| w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::BadDistribution(format!("{weights:?} is not a probability vector")));
    }
    let mut m = ComplexMatrix::zeros(4, 4);
    for (w, label) in weights.iter().zip(BellLabel::ALL) {
        let v = bell_vector(label);
        m = &m + &ComplexMatrix::outer(&v, &v).scale_re(*w);
    }
    Ok(DensityMatrix::new_unchecked(m, 2, 2))
}

/// Which solution of the purity constraint a Werner state uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WernerBranch {
    /// Mixing parameter `a = 1 + sqrt((4P-1)/3)`, defined for `1/4 <= P <= 1/3`.
    Plus,
    /// Mixing parameter `a = 1 - sqrt((4P-1)/3)`, defined for `1/4 <= P <= 1`.
    Minus,
}

/// `a I/4 + (1-a) |Psi-><Psi-|` with `a` fixed by the purity.
pub fn werner_state(purity: f64, branch: WernerBranch) -> Result<DensityMatrix> {
    let hi = match branch {
        WernerBranch::Plus => 1.0 / 3.0,
        WernerBranch::Minus => 1.0,
    };
    if !(purity >= 0.25 - 1e-12 && purity <= hi + 1e-12) {
        return Err(Error::PurityOutOfBranch { purity, lo: 0.25, hi });
    }
    let t = ((4.0 * purity - 1.0) / 3.0).max(0.0).sqrt();
    let a = match branch {
        WernerBranch::Plus => 1.0 + t,
        WernerBranch::Minus => 1.0 - t,
    };
    let v = bell_vector(BellLabel::PsiMinus);
    let m = &ComplexMatrix::identity(4).scale_re(a / 4.0) + &ComplexMatrix::outer(&v, &v).scale_re(1.0 - a);
    Ok(DensityMatrix::new_unchecked(m, 2, 2))
}

fn check_two_qubit_purity(purity: f64) -> Result<()> {
    if !(purity >= 0.25 - 1e-12 && purity <= 1.0 + 1e-12) {
        return Err(Error::PurityOutOfRange { purity, lo: 0.25, hi: 1.0 });
    }
    Ok(())
}

/// Two-qubit Bell-diagonal state with the largest trace discord of response
/// at the given purity.
pub fn max_trace_discord_state(purity: f64) -> Result<DensityMatrix> {
    check_two_qubit_purity(purity)?;
    let p = purity.clamp(0.25, 1.0);
    let w = if p <= 0.375 {
        let s = (8.0 * p - 2.0).max(0.0).sqrt();
        [(1.0 + s) / 4.0, (1.0 - s) / 4.0, 0.25, 0.25]
    } else {
        let t = (6.0 * p - 2.0).sqrt();
        [(2.0 - t) / 6.0, (2.0 - t) / 6.0, (2.0 + 2.0 * t) / 6.0, 0.0]
    };
    bell_diagonal_state(w)
}

/// Analytic maximum of the trace discord of response over two-qubit states
/// of fixed purity.
pub fn max_trace_discord_value(purity: f64) -> Result<f64> {
    check_two_qubit_purity(purity)?;
    let p = purity.clamp(0.25, 1.0);
    Ok(if p <= 0.375 {
        (4.0 * p - 1.0) / 2.0
    } else {
        let s = (6.0 * p - 2.0).sqrt() + 1.0;
        s * s / 9.0
    })
}

/// Which family realizes the maximal Hellinger discord of response.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HellingerFamily {
    /// Werner states on the `a >= 1` branch (low purity).
    Werner,
    /// Rank-three family with `(b, phi)` found numerically.
    RankThree,
    /// Rank-two family with `b` fixed by the purity and `phi` in closed form.
    RankTwo,
}

#[derive(Debug, Clone)]
pub struct MaxHellingerState {
    pub state: DensityMatrix,
    pub family: HellingerFamily,
    /// Family parameters `(b, phi)`; `None` for Werner states.
    pub params: Option<(f64, f64)>,
    /// Hellinger discord of response of `state`.
    pub value: f64,
}

/// The rank-three search runs up to this purity. Its interior optimum beats
/// the rank-two family up to a purity of about 0.5042; beyond that the
/// optimum sits on the rank-two boundary of the family.
pub const RANK_THREE_LIMIT: f64 = 0.51;

/// Two-qubit state with (numerically) maximal Hellinger discord of response
/// at the given purity.
pub fn max_hellinger_discord_state(purity: f64) -> Result<MaxHellingerState> {
    check_two_qubit_purity(purity)?;
    let p = purity.clamp(0.25, 1.0);
    if p <= 1.0 / 3.0 {
        let state = werner_state(p, WernerBranch::Plus)?;
        let value = hellinger_response_qubit(&state)?;
        return Ok(MaxHellingerState { state, family: HellingerFamily::Werner, params: None, value });
    }
    let mut candidates = Vec::new();
    if p <= RANK_THREE_LIMIT {
        candidates.push(search_rank_three(p)?);
    }
    if p > 0.5 {
        let phi = rank_two_angle(p)?;
        let b = ((2.0 * p - 1.0).sqrt() + 1.0) / 4.0;
        let state = hellinger_family_state(p, b, phi, HellingerFamily::RankTwo).expect("rank-two family is feasible");
        let value = hellinger_response_qubit(&state)?;
        candidates.push(MaxHellingerState { state, family: HellingerFamily::RankTwo, params: Some((b, phi)), value });
    }
    Ok(candidates
        .into_iter()
        .max_by(|x, y| x.value.total_cmp(&y.value))
        .expect("at least one family applies for purity above 1/3"))
}

/// Members of the rank-three (`family = RankThree`) or rank-two family.
/// Returns `None` when `(b, phi)` is outside the feasible set.
pub fn hellinger_family_state(purity: f64, b: f64, phi: f64, family: HellingerFamily) -> Option<DensityMatrix> {
    let (d0, d3) = match family {
        HellingerFamily::RankTwo => (1.0 - 2.0 * b, 0.0),
        HellingerFamily::RankThree => {
            let arg = -12.0 * b * b + 4.0 * b + 2.0 * purity - 1.0;
            if arg < 0.0 {
                return None;
            }
            let a = 0.5 * arg.sqrt();
            (0.5 + a - b, 0.5 - a - b)
        }
        HellingerFamily::Werner => return None,
    };
    if b < 0.0 || d0 < 0.0 || d3 < 0.0 {
        return None;
    }
    let (c, s) = (phi.cos(), phi.sin());
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = C64::new(d0, 0.0);
    m[(1, 1)] = C64::new(2.0 * b * c * c, 0.0);
    m[(1, 2)] = C64::new(2.0 * b * c * s, 0.0);
    m[(2, 1)] = C64::new(2.0 * b * c * s, 0.0);
    m[(2, 2)] = C64::new(2.0 * b * s * s, 0.0);
    m[(3, 3)] = C64::new(d3, 0.0);
    Some(DensityMatrix::new_unchecked(m, 2, 2))
}

fn search_rank_three(p: f64) -> Result<MaxHellingerState> {
    let root = (6.0 * p - 2.0).max(0.0).sqrt();
    let (b_lo, b_hi) = (((1.0 - root) / 6.0).max(0.0), ((1.0 + root) / 6.0).min(0.5));
    let eval = |b: f64, phi: f64| -> f64 {
        match hellinger_family_state(p, b, phi, HellingerFamily::RankThree) {
            Some(s) => hellinger_response_qubit(&s).unwrap_or(f64::NEG_INFINITY),
            None => f64::NEG_INFINITY,
        }
    };
    const GRID: usize = 64;
    let mut best = (f64::NEG_INFINITY, b_lo, 0.0);
    for i in 0..GRID {
        let b = b_lo + (b_hi - b_lo) * i as f64 / (GRID - 1) as f64;
        for j in 0..GRID {
            let phi = FRAC_PI_2 * j as f64 / (GRID - 1) as f64;
            let v = eval(b, phi);
            if v > best.0 {
                best = (v, b, phi);
            }
        }
    }
    let step = [(b_hi - b_lo) / (GRID - 1) as f64, FRAC_PI_2 / (GRID - 1) as f64];
    let refined = crate::measures::optimize::nelder_mead(
        |x: &[f64]| -eval(x[0], x[1]),
        &[best.1, best.2],
        &step,
        1e-13,
        4000,
    );
    let (b, phi) = if -refined.value > best.0 { (refined.x[0], refined.x[1]) } else { (best.1, best.2) };
    let state = hellinger_family_state(p, b, phi, HellingerFamily::RankThree)
        .expect("refined point is feasible because infeasible points score -inf");
    let value = hellinger_response_qubit(&state)?;
    Ok(MaxHellingerState { state, family: HellingerFamily::RankThree, params: Some((b, phi)), value })
}

/// Optimal rotation angle of the rank-two family. Uses the closed-form
/// cosine and falls back to a one-dimensional search where it is singular
/// (purity one) or numerically unusable.
pub fn rank_two_angle(p: f64) -> Result<f64> {
    if let Some(c) = rank_two_cosine(p) {
        return Ok(c.acos());
    }
    if (p - 1.0).abs() < 1e-12 {
        return Ok(FRAC_PI_4);
    }
    let b = ((2.0 * p - 1.0).sqrt() + 1.0) / 4.0;
    let f = |phi: f64| match hellinger_family_state(p, b, phi, HellingerFamily::RankTwo) {
        Some(s) => -hellinger_response_qubit(&s).unwrap_or(f64::NEG_INFINITY),
        None => f64::INFINITY,
    };
    Ok(golden_section(f, 0.0, FRAC_PI_2, 1e-12))
}

/// Closed-form `cos(phi)` of the rank-two maximizer (the magnitude; the
/// sign only selects a locally equivalent state).
pub fn rank_two_cosine(p: f64) -> Option<f64> {
    if !(p > 0.5 && p < 1.0) {
        return None;
    }
    let a = (2.0 - 2.0 * p).sqrt();
    let q = (-4.0 * p * p + 6.0 * p - 2.0).max(0.0).sqrt();
    let inner = (p - 1.0) * (3.0 * p - 2.0 * a - 3.0 * (2.0 * p - 1.0).sqrt() + 2.0 * q);
    let bracket = -4.0 * p - a + q + 4.0 + 2.0 * inner.max(0.0).sqrt();
    let c = bracket.max(0.0).sqrt() / (2.0 * a);
    (c.is_finite() && c <= 1.0 && inner > -1e-12).then_some(c)
}

pub(crate) fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Generalized Gell-Mann matrices on `C^n`, ordered symmetric, antisymmetric,
/// then diagonal, and scaled so that `tr(g_p g_q) = n delta_pq`.
pub fn gellmann_basis(n: usize) -> Vec<ComplexMatrix> {
    let scale = (n as f64 / 2.0).sqrt();
    let mut out = Vec::with_capacity(n * n - 1);
    for j in 0..n {
        for k in (j + 1)..n {
            let mut m = ComplexMatrix::zeros(n, n);
            m[(j, k)] = ONE;
            m[(k, j)] = ONE;
            out.push(m.scale_re(scale));
        }
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let mut m = ComplexMatrix::zeros(n, n);
            m[(j, k)] = -I;
            m[(k, j)] = I;
            out.push(m.scale_re(scale));
        }
    }
    for l in 1..n {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; n];
        for d in diag.iter_mut().take(l) {
            *d = norm;
        }
        diag[l] = -(l as f64) * norm;
        out.push(ComplexMatrix::from_diag(&diag).scale_re(scale));
    }
    out
}

/// Pauli matrices `sigma_x, sigma_y, sigma_z`.
pub fn pauli() -> [ComplexMatrix; 3] {
    let g = gellmann_basis(2);
    [g[0].clone(), g[1].clone(), g[2].clone()]
}

/// Expansion of a Hermitian operator `X` on `C^2 (x) C^{n_b}` as
/// `X = (2 n_b)^{-1/2} (t0 + x.sigma (x) 1 + 1 (x) y.gamma + sum T_mp sigma_m (x) gamma_p)`
/// with `gamma` the scaled Gell-Mann matrices of [`gellmann_basis`].
#[derive(Debug, Clone, PartialEq)]
pub struct FanoDecomposition {
    pub n_b: usize,
    pub t0: f64,
    pub x: [f64; 3],
    pub y: Vec<f64>,
    /// Correlation matrix, 3 rows of length `n_b^2 - 1`.
    pub t: Vec<Vec<f64>>,
}

impl FanoDecomposition {
    /// `K = x x^T + T T^T`.
    pub fn k_matrix(&self) -> [[f64; 3]; 3] {
        let mut k = [[0.0; 3]; 3];
        for (m, row) in k.iter_mut().enumerate() {
            for (n, entry) in row.iter_mut().enumerate() {
                *entry = self.x[m] * self.x[n] + self.t[m].iter().zip(&self.t[n]).map(|(a, b)| a * b).sum::<f64>();
            }
        }
        k
    }

    /// Sum of squares of all coefficients; equals `tr X^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.t0 * self.t0
            + self.x.iter().map(|v| v * v).sum::<f64>()
            + self.y.iter().map(|v| v * v).sum::<f64>()
            + self.t.iter().flatten().map(|v| v * v).sum::<f64>()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let nb = self.n_b;
        let s = pauli();
        let g = gellmann_basis(nb);
        let id_a = ComplexMatrix::identity(2);
        let id_b = ComplexMatrix::identity(nb);
        let mut m = ComplexMatrix::identity(2 * nb).scale_re(self.t0);
        for k in 0..3 {
            m = &m + &kron(&s[k], &id_b).scale_re(self.x[k]);
        }
        for (p, gp) in g.iter().enumerate() {
            m = &m + &kron(&id_a, gp).scale_re(self.y[p]);
            for k in 0..3 {
                m = &m + &kron(&s[k], gp).scale_re(self.t[k][p]);
            }
        }
        m.scale_re(1.0 / ((2 * nb) as f64).sqrt())
    }
}

/// Coefficients of a Hermitian operator on `C^2 (x) C^{n_b}`, obtained by
/// projecting onto the product operator basis.
pub fn fano_decomposition(op: &ComplexMatrix, n_b: usize) -> Result<FanoDecomposition> {
    if op.rows() != 2 * n_b || op.cols() != 2 * n_b {
        return Err(Error::WrongDimension { expected: "qubit-qudit (2 x n_b)".into(), got: op.rows() });
    }
    let norm = ((2 * n_b) as f64).sqrt();
    let s = pauli();
    let g = gellmann_basis(n_b);
    let id_a = ComplexMatrix::identity(2);
    let id_b = ComplexMatrix::identity(n_b);
    let proj = |basis_el: &ComplexMatrix| basis_el.hs_inner(op).re / norm;
    let t0 = op.trace().re / norm;
    let x = [0, 1, 2].map(|k| proj(&kron(&s[k], &id_b)));
    let y = g.iter().map(|gp| proj(&kron(&id_a, gp))).collect();
    let t = (0..3).map(|k| g.iter().map(|gp| proj(&kron(&s[k], gp))).collect()).collect();
    Ok(FanoDecomposition { n_b, t0, x, y, t })
}

/// Decomposition of `sqrt(rho)` for a qubit-qudit state.
pub fn fano_sqrt_decomposition(rho: &DensityMatrix) -> Result<FanoDecomposition> {
    if rho.n_a() != 2 {
        return Err(Error::WrongDimension { expected: "qubit A".into(), got: rho.n_a() });
    }
    fano_decomposition(&rho.sqrt()?, rho.n_b())
}

/// `sum_ij q_ij |a_i><a_i| (x) |b_j^(i)><b_j^(i)|`, where `basis_a` holds the
/// vectors `a_i` as columns and `bases_b[i]` the vectors `b_j^(i)`.
pub fn classical_quantum_state(
    weights: &[Vec<f64>],
    basis_a: &ComplexMatrix,
    bases_b: &[ComplexMatrix],
) -> Result<DensityMatrix> {
    let n_a = basis_a.rows();
    let n_b = bases_b.first().map_or(0, ComplexMatrix::rows);
    if weights.len() != n_a || bases_b.len() != n_a || weights.iter().any(|w| w.len() != n_b) {
        return Err(Error::DimensionMismatch("weights must be n_a x n_b with one B basis per A vector".into()));
    }
    let total: f64 = weights.iter().flatten().sum();
    if weights.iter().flatten().any(|&w| w < 0.0) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::BadDistribution(format!("weights sum to {total} or contain negatives")));
    }
    let mut m = ComplexMatrix::zeros(n_a * n_b, n_a * n_b);
    for i in 0..n_a {
        let a = basis_a.column(i);
        let pa = ComplexMatrix::outer(&a, &a);
        for j in 0..n_b {
            let b = bases_b[i].column(j);
            m = &m + &kron(&pa, &ComplexMatrix::outer(&b, &b)).scale_re(weights[i][j]);
        }
    }
    Ok(DensityMatrix::new_unchecked(m, n_a, n_b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn rejects_invalid_matrices() {
        let m = ComplexMatrix::from_diag(&[0.5, 0.5, 0.5, 0.5]);
        assert!(matches!(DensityMatrix::new(m, 2, 2), Err(Error::NotNormalized { .. })));
        let m = ComplexMatrix::from_diag(&[1.2, -0.2, 0.0, 0.0]);
        assert!(matches!(DensityMatrix::new(m, 2, 2), Err(Error::NotPsd { .. })));
        let m = ComplexMatrix::identity(4).scale_re(0.25);
        assert!(matches!(DensityMatrix::new(m, 2, 3), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn schmidt_of_product_and_bell() {
        let prod = vec![ONE, ZERO, ZERO, ZERO];
        let s = schmidt(&prod, 2, 2).unwrap();
        assert!((s.mu[0] - 1.0).abs() < 1e-15 && s.mu[1] == 0.0);
        assert_eq!(s.schmidt_number(), 1);
        let s = schmidt(&bell_vector(BellLabel::PhiPlus), 2, 2).unwrap();
        assert!(s.mu.iter().all(|m| (m - 0.5).abs() < 1e-14));
        assert_eq!(s.schmidt_number(), 2);
    }

    #[test]
    fn schmidt_reconstructs_state() {
        let mut r = rng();
        for (na, nb) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let v = random_pure_vector(na * nb, &mut r);
            let s = schmidt(&v, na, nb).unwrap();
            let mut w = vec![ZERO; na * nb];
            for i in 0..s.mu.len() {
                for (a, b) in (0..na).flat_map(|a| (0..nb).map(move |b| (a, b))) {
                    w[a * nb + b] += s.mu[i].sqrt() * s.basis_a[i][a] * s.basis_b[i][b];
                }
            }
            let err: f64 = v.iter().zip(&w).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            assert!(err < 1e-12, "{na}x{nb}: {err}");
            assert!((s.mu.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_state_has_requested_rank() {
        let mut r = rng();
        for k in 1..=4 {
            let rho = random_haar_state(2, 2, k, &mut r).unwrap();
            assert_eq!(rho.rank().unwrap(), k);
        }
        assert!(matches!(random_haar_state(2, 2, 5, &mut r), Err(Error::BadRank { .. })));
    }

    #[test]
    fn fixed_purity_state_hits_target() {
        let mut r = rng();
        for &(p, k) in &[(0.3, 4), (0.26, 4), (0.6, 3), (0.6, 4), (0.95, 4), (0.5, 2), (0.8, 2), (0.34, 3)] {
            let rho = random_fixed_purity_state(2, 2, p, k, &mut r).unwrap();
            assert!((rho.purity() - p).abs() < 1e-12, "P={p} k={k}: {}", rho.purity());
            assert!(rho.rank().unwrap() <= k);
        }
        assert!(matches!(random_fixed_purity_state(2, 2, 0.3, 2, &mut r), Err(Error::UnachievablePurity { .. })));
        assert!(matches!(random_fixed_purity_state(2, 2, 0.9, 1, &mut r), Err(Error::UnachievablePurity { .. })));
    }

    #[test]
    fn werner_branches() {
        for &p in &[0.25, 0.3, 1.0 / 3.0] {
            let w = werner_state(p, WernerBranch::Plus).unwrap();
            assert!((w.purity() - p).abs() < 1e-13);
        }
        for &p in &[0.25, 0.5, 0.9, 1.0] {
            let w = werner_state(p, WernerBranch::Minus).unwrap();
            assert!((w.purity() - p).abs() < 1e-13);
        }
        assert!(matches!(werner_state(0.4, WernerBranch::Plus), Err(Error::PurityOutOfBranch { .. })));
        let singlet = werner_state(1.0, WernerBranch::Minus).unwrap();
        assert!(singlet.matrix().max_abs_diff(bell_state(BellLabel::PsiMinus).matrix()) < 1e-14);
    }

    #[test]
    fn max_trace_family_purity_and_endpoints() {
        for i in 0..=30 {
            let p = 0.25 + 0.75 * i as f64 / 30.0;
            let rho = max_trace_discord_state(p).unwrap();
            assert!((rho.purity() - p).abs() < 1e-13);
        }
        let mm = max_trace_discord_state(0.25).unwrap();
        assert!(mm.matrix().max_abs_diff(DensityMatrix::maximally_mixed(2, 2).matrix()) < 1e-15);
        let pure = max_trace_discord_state(1.0).unwrap();
        assert!(pure.matrix().max_abs_diff(bell_state(BellLabel::PsiPlus).matrix()) < 1e-15);
        assert!((max_trace_discord_value(0.375).unwrap() - 0.25).abs() < 1e-15);
        assert!((max_trace_discord_value(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(max_trace_discord_state(0.2).is_err());
    }

    #[test]
    fn gellmann_orthogonality() {
        for n in 2..=4 {
            let g = gellmann_basis(n);
            assert_eq!(g.len(), n * n - 1);
            for (p, gp) in g.iter().enumerate() {
                assert!(gp.trace().norm() < 1e-14);
                assert!(gp.is_hermitian(0.0));
                for (q, gq) in g.iter().enumerate() {
                    let expect = if p == q { n as f64 } else { 0.0 };
                    assert!((gp.hs_inner(gq).re - expect).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn fano_of_maximally_mixed_and_bell() {
        let f = fano_sqrt_decomposition(&DensityMatrix::maximally_mixed(2, 2)).unwrap();
        assert!((f.t0 - 1.0).abs() < 1e-14);
        assert!(f.x.iter().chain(&f.y).chain(f.t.iter().flatten()).all(|v| v.abs() < 1e-14));
        let f = fano_sqrt_decomposition(&bell_state(BellLabel::PhiPlus)).unwrap();
        assert!((f.t0 - 0.5).abs() < 1e-12);
        let diag: Vec<f64> = (0..3).map(|k| f.t[k][k]).collect();
        assert!((diag[0] - 0.5).abs() < 1e-12 && (diag[1] + 0.5).abs() < 1e-12 && (diag[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fano_roundtrip_and_normalization() {
        let mut r = rng();
        for nb in [2, 3] {
            let rho = random_haar_state(2, nb, 3, &mut r).unwrap();
            let f = fano_sqrt_decomposition(&rho).unwrap();
            assert!((f.norm_sqr() - 1.0).abs() < 1e-10);
            assert!(f.reconstruct().max_abs_diff(&rho.sqrt().unwrap()) < 1e-12);
        }
    }

    #[test]
    fn cq_state_construction() {
        let u = haar_unitary(2, &mut rng());
        let b = ComplexMatrix::identity(3);
        let w = vec![vec![0.2, 0.1, 0.1], vec![0.3, 0.2, 0.1]];
        let s = classical_quantum_state(&w, &u, &[b.clone(), b]).unwrap();
        assert!((s.matrix().trace().re - 1.0).abs() < 1e-14);
        assert!(DensityMatrix::new(s.matrix().clone(), 2, 3).is_ok());
    }

    #[test]
    fn json_roundtrip() {
        let rho = random_haar_state(2, 3, 2, &mut rng()).unwrap();
        let back = DensityMatrix::from_json(&rho.to_json()).unwrap();
        assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-15);
        assert!(matches!(DensityMatrix::from_json("{\"n_a\":2}"), Err(Error::Parse(_))));
    }
}
