//! Closed-form expressions available when subsystem A is a qubit.

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, kron, partial_trace, ComplexMatrix, Keep, C64};
use crate::states::{fano_decomposition, pauli, DensityMatrix, FanoDecomposition};

use super::clip_small_negative;
use super::optimize::basis_from_bloch_vector;

fn require_qubit(n_a: usize) -> Result<()> {
    if n_a != 2 {
        return Err(Error::WrongDimension { expected: "qubit A".into(), got: n_a });
    }
    Ok(())
}

/// Largest eigenvalue and its eigenvector for a real symmetric 3x3 matrix.
pub(crate) fn top_eigenpair(k: &[[f64; 3]; 3]) -> Result<(f64, [f64; 3])> {
    let m = ComplexMatrix::from_fn(3, 3, |r, c| C64::new(k[r][c], 0.0));
    let e = herm_eig(&m)?;
    let v = e.vectors.column(2);
    // The eigenvector of a real symmetric matrix is real up to a global phase.
    let phase = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
    let phase = if phase.norm() > 0.0 { phase.conj() / phase.norm() } else { C64::new(1.0, 0.0) };
    Ok((e.values[2], [0, 1, 2].map(|i| (v[i] * phase).re)))
}

/// `t0^2 + |y|^2 + k_max`, the maximal weight of `sqrt(rho)` on the
/// block-diagonal part for any local basis, and the optimal Bloch vector.
fn sqrt_block_weight(f: &FanoDecomposition) -> Result<(f64, [f64; 3])> {
    let (kmax, u) = top_eigenpair(&f.k_matrix())?;
    Ok((f.t0 * f.t0 + f.y.iter().map(|v| v * v).sum::<f64>() + kmax, u))
}

/// Hellinger geometric discord of a qubit-qudit state.
pub fn hellinger_geo_qubit(rho: &DensityMatrix) -> Result<f64> {
    require_qubit(rho.n_a())?;
    let f = fano_decomposition(&rho.sqrt()?, rho.n_b())?;
    let (w, _) = sqrt_block_weight(&f)?;
    Ok(clip_small_negative(2.0 - 2.0 * w.min(1.0).sqrt()))
}

/// Optimal local basis for the Hellinger geometric discord of a qubit-qudit state.
pub fn hellinger_geo_qubit_basis(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    require_qubit(rho.n_a())?;
    let f = fano_decomposition(&rho.sqrt()?, rho.n_b())?;
    let (_, u) = sqrt_block_weight(&f)?;
    Ok(basis_from_bloch_vector(u))
}

/// Hellinger discord of response (local quantum uncertainty) of a
/// qubit-qudit state, from the decomposition of `sqrt(rho)`.
pub fn hellinger_response_qubit(rho: &DensityMatrix) -> Result<f64> {
    require_qubit(rho.n_a())?;
    let f = fano_decomposition(&rho.sqrt()?, rho.n_b())?;
    let (w, _) = sqrt_block_weight(&f)?;
    Ok(clip_small_negative(2.0 - 2.0 * w.min(1.0)))
}

/// The same quantity as [`hellinger_response_qubit`] through the matrix
/// `W_ij = tr(sqrt(rho) sigma_i sqrt(rho) sigma_j)`: `1 - lambda_max(W)`.
pub fn lqu_w_matrix(rho: &DensityMatrix) -> Result<f64> {
    require_qubit(rho.n_a())?;
    let s = rho.sqrt()?;
    let id_b = ComplexMatrix::identity(rho.n_b());
    let sig: Vec<ComplexMatrix> = pauli().iter().map(|p| kron(p, &id_b)).collect();
    let ss: Vec<ComplexMatrix> = sig.iter().map(|p| s.matmul(p)).collect();
    let mut w = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            w[i][j] = ss[i].matmul(&ss[j]).trace().re;
        }
    }
    for i in 0..3 {
        for j in 0..i {
            let avg = 0.5 * (w[i][j] + w[j][i]);
            w[i][j] = avg;
            w[j][i] = avg;
        }
    }
    let (lmax, _) = top_eigenpair(&w)?;
    Ok(clip_small_negative(1.0 - lmax))
}

/// Operator blocks `X_0 = tr_A X` and `X_m = tr_A((sigma_m (x) 1) X)` and the
/// Gram matrix `G_mn = Re tr(X_m X_n)`.
fn block_gram(x: &ComplexMatrix, n_b: usize) -> Result<(f64, [[f64; 3]; 3])> {
    let id_b = ComplexMatrix::identity(n_b);
    let x0 = partial_trace(x, 2, n_b, Keep::B)?;
    let xs: Vec<ComplexMatrix> = pauli()
        .iter()
        .map(|p| partial_trace(&kron(p, &id_b).matmul(x), 2, n_b, Keep::B))
        .collect::<Result<_>>()?;
    let mut g = [[0.0; 3]; 3];
    for m in 0..3 {
        for n in 0..3 {
            g[m][n] = xs[m].matmul(&xs[n]).trace().re;
        }
    }
    Ok((x0.matmul(&x0).trace().re, g))
}

/// Hilbert-Schmidt geometric discord of any Hermitian operator `X` on
/// `C^2 (x) C^{n_b}`: `tr X^2 - max_basis sum_i tr <a_i|X|a_i>^2`.
pub fn hs_geo_operator_qubit(x: &ComplexMatrix, n_b: usize) -> Result<f64> {
    if x.rows() != 2 * n_b || x.cols() != 2 * n_b {
        return Err(Error::WrongDimension { expected: "qubit A".into(), got: x.rows() / n_b.max(1) });
    }
    let (tr_x0_sq, g) = block_gram(x, n_b)?;
    let (lmax, _) = top_eigenpair(&g)?;
    let total = x.hs_inner(x).re;
    Ok(clip_small_negative(total - 0.5 * (tr_x0_sq + lmax)))
}

/// Optimal basis for [`hs_geo_operator_qubit`].
pub fn hs_geo_operator_qubit_basis(x: &ComplexMatrix, n_b: usize) -> Result<ComplexMatrix> {
    let (_, g) = block_gram(x, n_b)?;
    let (_, u) = top_eigenpair(&g)?;
    Ok(basis_from_bloch_vector(u))
}

/// Hilbert-Schmidt geometric discord of a qubit-qudit state.
pub fn hs_geo_qubit(rho: &DensityMatrix) -> Result<f64> {
    require_qubit(rho.n_a())?;
    hs_geo_operator_qubit(rho.matrix(), rho.n_b())
}
