//! Dense complex matrices and the handful of factorizations the rest of the
//! crate needs. Everything here works on small matrices (bipartite states of
//! a few qubits or qutrits), so the routines favour accuracy and simplicity
//! over asymptotic speed.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Tolerance used to decide whether a matrix handed to the eigensolver is
/// Hermitian, relative to its Hilbert-Schmidt norm.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Eigenvalues of a PSD matrix in `[-PSD_CLIP, 0)` are treated as rounding
/// noise and clipped to zero.
pub const PSD_CLIP: f64 = 1e-10;

/// Singular values below this fraction of the largest one are reported as 0.
pub const SVD_REL_CUTOFF: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting wrong lengths and
    /// non-finite entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {}x{} matrix, got {}",
                rows * cols,
                rows,
                cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::DimensionMismatch("matrix has non-finite entries".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Real matrix from row-major values.
    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), rows * cols, "from_real: wrong number of entries");
        Self { rows, cols, data: values.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    pub fn from_diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols, |r, c| columns[c][r])
    }

    /// `|v><w|`.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |r, c| v[r] * w[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    /// Hilbert-Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `tr(A^dagger B)`.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest entry of `|M - M^dagger|`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| (self[(r, c)] + self[(c, r)].conj()) * 0.5)
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |r, c| self[(r0 + r, c0 + c)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul: inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self[(r, c)] * v[c]).sum())
            .collect()
    }

    /// `A X A^dagger`.
    pub fn conjugate_by(&self, x: &Self) -> Self {
        self.matmul(x).matmul(&self.adjoint())
    }

    /// Real parts of the diagonal.
    pub fn diag_re(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].re).collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add: shapes differ");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub: shapes differ");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_re(-1.0)
    }
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermEig {
    /// `V f(Lambda) V^dagger`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        self.map_complex(|x| C64::new(f(x), 0.0))
    }

    pub fn map_complex(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<C64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |r, c| {
            (0..n).map(|k| v[(r, k)] * fv[k] * v[(c, k)].conj()).sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
pub fn herm_eig(m: &ComplexMatrix) -> Result<HermEig> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let norm = m.hs_norm();
    if !norm.is_finite() {
        return Err(Error::NotHermitian { deviation: f64::NAN });
    }
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL * norm.max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let n = m.rows;
    let mut a = m.hermitian_part();
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    let floor = f64::MIN_POSITIVE.max(1e-300);

    let mut converged = n <= 1;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-16 * norm || off < floor {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[(p, q)];
                let babs = b.norm();
                if babs <= 1e-18 * norm || babs < floor {
                    continue;
                }
                let phase = b / babs;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * babs);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = diag(1, conj(phase)) * [[c, s], [-s, c]]; A <- G^dagger A G.
                let ph_c = phase.conj();
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * ph_c * s;
                    a[(k, q)] = akp * s + akq * ph_c * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * phase * s;
                    a[(q, k)] = apk * s + aqk * phase * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(app - t * babs, 0.0);
                a[(q, q)] = C64::new(aqq + t * babs, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * ph_c * s;
                    v[(k, q)] = vkp * s + vkq * ph_c * c;
                }
            }
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure { sweeps: MAX_SWEEPS });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermEig { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn herm_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(herm_eig(m)?.values)
}

/// Squared singular values in descending order, computed as eigenvalues of
/// the smaller of `M^dagger M` and `M M^dagger`.
pub fn singular_values_squared(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let gram = if m.rows >= m.cols { m.adjoint().matmul(m) } else { m.matmul(&m.adjoint()) };
    let raw = herm_eigenvalues(&gram)?;
    let floor = psd_noise_floor(&raw);
    let mut vals: Vec<f64> = raw.into_iter().map(|x| if x <= floor { 0.0 } else { x }).collect();
    vals.reverse();
    Ok(vals)
}

/// Singular values in descending order. Values below
/// `SVD_REL_CUTOFF * sigma_1` are reported as exactly zero.
pub fn svd_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let mut s: Vec<f64> = singular_values_squared(m)?.into_iter().map(f64::sqrt).collect();
    let cut = s.first().copied().unwrap_or(0.0) * SVD_REL_CUTOFF;
    for x in &mut s {
        if *x < cut {
            *x = 0.0;
        }
    }
    Ok(s)
}

/// Principal square root of a positive semidefinite matrix.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(m)?;
    check_psd(&eig.values)?;
    let floor = psd_noise_floor(&eig.values);
    Ok(eig.map(|x| if x <= floor { 0.0 } else { x.sqrt() }))
}

/// Eigenvalues at or below this level are rounding noise from the
/// eigensolver; taking their square root would amplify them to ~1e-8.
fn psd_noise_floor(values: &[f64]) -> f64 {
    let max = values.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    max * 4.0 * f64::EPSILON * values.len().max(1) as f64
}

pub(crate) fn check_psd(values: &[f64]) -> Result<()> {
    if let Some(&min) = values.first() {
        if min < -PSD_CLIP {
            return Err(Error::NotPsd { eigenvalue: min });
        }
    }
    Ok(())
}

/// `tr sqrt(M)` for a positive semidefinite `M`.
pub fn psd_trace_sqrt(m: &ComplexMatrix) -> Result<f64> {
    let vals = herm_eigenvalues(m)?;
    check_psd(&vals)?;
    let floor = psd_noise_floor(&vals);
    Ok(vals.iter().filter(|&&x| x > floor).map(|x| x.sqrt()).sum())
}

/// Trace norm. Hermitian input goes through its eigenvalues, everything
/// else through singular values.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    if m.is_square() && m.hermitian_deviation() <= 1e-14 * m.hs_norm().max(1e-300) {
        return Ok(herm_eigenvalues(m)?.iter().map(|x| x.abs()).sum());
    }
    Ok(svd_values(m)?.iter().sum())
}

pub fn hs_norm(m: &ComplexMatrix) -> f64 {
    m.hs_norm()
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * br, a.cols * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Which factor of a bipartite operator survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    A,
    B,
}

fn check_bipartite(m: &ComplexMatrix, n_a: usize, n_b: usize) -> Result<()> {
    let d = n_a * n_b;
    if m.rows != d || m.cols != d || n_a == 0 || n_b == 0 {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, expected {d}x{d} for n_a={n_a}, n_b={n_b}",
            m.rows, m.cols
        )));
    }
    Ok(())
}

/// Partial trace of an operator on `C^{n_a} (x) C^{n_b}`.
pub fn partial_trace(m: &ComplexMatrix, n_a: usize, n_b: usize, keep: Keep) -> Result<ComplexMatrix> {
    check_bipartite(m, n_a, n_b)?;
    Ok(match keep {
        Keep::A => ComplexMatrix::from_fn(n_a, n_a, |i, j| {
            (0..n_b).map(|k| m[(i * n_b + k, j * n_b + k)]).sum()
        }),
        Keep::B => ComplexMatrix::from_fn(n_b, n_b, |k, l| {
            (0..n_a).map(|i| m[(i * n_b + k, i * n_b + l)]).sum()
        }),
    })
}

/// Realignment `<i,j| X^R |k,l> = <i,k| X |j,l>`, mapping an operator on
/// `C^{n_a} (x) C^{n_b}` to an `n_a^2 x n_b^2` matrix.
pub fn reshuffle(m: &ComplexMatrix, n_a: usize, n_b: usize) -> Result<ComplexMatrix> {
    check_bipartite(m, n_a, n_b)?;
    Ok(ComplexMatrix::from_fn(n_a * n_a, n_b * n_b, |r, c| {
        let (i, j) = (r / n_a, r % n_a);
        let (k, l) = (c / n_b, c % n_b);
        m[(i * n_b + k, j * n_b + l)]
    }))
}

/// Inverse of [`reshuffle`].
pub fn reshuffle_inverse(r: &ComplexMatrix, n_a: usize, n_b: usize) -> Result<ComplexMatrix> {
    if r.rows != n_a * n_a || r.cols != n_b * n_b {
        return Err(Error::DimensionMismatch(format!(
            "realigned matrix is {}x{}, expected {}x{}",
            r.rows,
            r.cols,
            n_a * n_a,
            n_b * n_b
        )));
    }
    let d = n_a * n_b;
    Ok(ComplexMatrix::from_fn(d, d, |row, col| {
        let (i, k) = (row / n_b, row % n_b);
        let (j, l) = (col / n_b, col % n_b);
        r[(i * n_a + j, k * n_b + l)]
    }))
}

/// `exp(i H)` for Hermitian `H`.
pub fn expi_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(herm_eig(h)?.map_complex(|x| C64::new(x.cos(), x.sin())))
}

/// `<v|w>`.
pub fn inner(v: &[C64], w: &[C64]) -> C64 {
    v.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal basis whose first vectors span `vectors` (assumed
/// orthonormal), completed against the computational basis.
pub fn complete_orthonormal(vectors: &[Vec<C64>], dim: usize) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = vectors.to_vec();
    for e in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = vec![ZERO; dim];
        v[e] = ONE;
        for _ in 0..2 {
            for b in &basis {
                let ov = inner(b, &v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= ov * y;
                }
            }
        }
        let nrm = vec_norm(&v);
        if nrm > 1e-8 {
            basis.push(v.iter().map(|z| z / nrm).collect());
        }
    }
    basis
}

/// Deviation of `U^dagger U` from the identity.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    u.adjoint().matmul(u).max_abs_diff(&ComplexMatrix::identity(u.cols))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eig_of_pauli_y() {
        let y = ComplexMatrix::from_vec(2, 2, vec![ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]).unwrap();
        let e = herm_eig(&y).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        assert!(e.reconstruct().max_abs_diff(&y) < 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_handles_degenerate_and_diagonal() {
        let m = ComplexMatrix::from_diag(&[2.0, 1.0, 2.0, 0.0]);
        let e = herm_eig(&m).unwrap();
        assert_eq!(e.values, vec![0.0, 1.0, 2.0, 2.0]);
        assert!(unitarity_defect(&e.vectors) < 1e-15);
    }

    #[test]
    fn psd_sqrt_of_projector_is_itself() {
        let v = vec![c(0.6, 0.0), c(0.0, 0.8)];
        let p = ComplexMatrix::outer(&v, &v);
        assert!(psd_sqrt(&p).unwrap().max_abs_diff(&p) < 1e-12);
    }

    #[test]
    fn psd_sqrt_rejects_negative() {
        let m = ComplexMatrix::from_diag(&[1.0, -0.1]);
        assert!(matches!(psd_sqrt(&m), Err(Error::NotPsd { .. })));
        let tiny = ComplexMatrix::from_diag(&[1.0, -1e-12]);
        assert!(psd_sqrt(&tiny).is_ok());
    }

    #[test]
    fn trace_norm_of_rank_one_outer_product() {
        let v = vec![c(1.0, 0.0), c(2.0, 1.0)];
        let w = vec![c(0.0, 1.0), c(-1.0, 0.0), c(3.0, 0.0)];
        let m = ComplexMatrix::outer(&v, &w);
        let expect = vec_norm(&v) * vec_norm(&w);
        assert!((trace_norm(&m).unwrap() - expect).abs() < 1e-12);
        let s = svd_values(&m).unwrap();
        assert_eq!(s[1], 0.0);
    }

    #[test]
    fn partial_trace_of_product() {
        let a = ComplexMatrix::from_real(2, 2, &[0.7, 0.1, 0.1, 0.3]);
        let b = ComplexMatrix::from_diag(&[0.5, 0.25, 0.25]);
        let ab = kron(&a, &b);
        assert!(partial_trace(&ab, 2, 3, Keep::A).unwrap().max_abs_diff(&a) < 1e-15);
        assert!(partial_trace(&ab, 2, 3, Keep::B).unwrap().max_abs_diff(&b) < 1e-15);
        assert!(partial_trace(&ab, 3, 3, Keep::A).is_err());
    }

    #[test]
    fn reshuffle_of_product_is_outer_of_vectorizations() {
        let a = ComplexMatrix::from_vec(2, 2, vec![c(1.0, 0.0), c(0.0, 2.0), c(3.0, 0.0), c(0.0, -1.0)]).unwrap();
        let b = ComplexMatrix::from_real(2, 2, &[5.0, 6.0, 7.0, 8.0]);
        let r = reshuffle(&kron(&a, &b), 2, 2).unwrap();
        let va: Vec<C64> = a.data().to_vec();
        let vb: Vec<C64> = b.data().iter().map(|z| z.conj()).collect();
        assert!(r.max_abs_diff(&ComplexMatrix::outer(&va, &vb)) < 1e-15);
    }

    #[test]
    fn reshuffle_roundtrip_rectangular() {
        let m = ComplexMatrix::from_fn(6, 6, |r, c| c64(r as f64 - c as f64, (r * c) as f64));
        let r = reshuffle(&m, 2, 3).unwrap();
        assert_eq!((r.rows(), r.cols()), (4, 9));
        assert_eq!(reshuffle_inverse(&r, 2, 3).unwrap(), m);
    }

    fn c64(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn complete_orthonormal_fills_basis() {
        let v = vec![c(0.6, 0.0), c(0.0, 0.8), ZERO];
        let basis = complete_orthonormal(&[v], 3);
        assert_eq!(basis.len(), 3);
        let u = ComplexMatrix::from_columns(&basis);
        assert!(unitarity_defect(&u) < 1e-12);
    }

    #[test]
    fn expi_of_zero_is_identity() {
        let z = ComplexMatrix::zeros(3, 3);
        assert!(expi_hermitian(&z).unwrap().max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
    }
}
