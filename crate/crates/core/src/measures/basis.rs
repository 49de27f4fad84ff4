//! Operators seen through a local basis `{|a_i>}` of subsystem A.

use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix};
use crate::states::DensityMatrix;

/// Weights below this are treated as absent from the ensemble.
pub const ZERO_WEIGHT: f64 = 1e-12;

/// `(U^dagger (x) 1) X (U (x) 1)`: block `(i, j)` of the result is
/// `<a_i| X |a_j>`, an operator on B.
pub fn rotate_local(x: &ComplexMatrix, basis: &ComplexMatrix, n_b: usize) -> ComplexMatrix {
    let w = kron(basis, &ComplexMatrix::identity(n_b));
    w.adjoint().matmul(x).matmul(&w)
}

/// Block `(i, j)` of a matrix produced by [`rotate_local`].
pub fn block(rotated: &ComplexMatrix, i: usize, j: usize, n_b: usize) -> ComplexMatrix {
    rotated.submatrix(i * n_b, j * n_b, n_b, n_b)
}

/// Squared Hilbert-Schmidt norm of block `(i, j)` without copying it.
pub fn block_hs_sqr(rotated: &ComplexMatrix, i: usize, j: usize, n_b: usize) -> f64 {
    let mut s = 0.0;
    for r in 0..n_b {
        for c in 0..n_b {
            s += rotated[(i * n_b + r, j * n_b + c)].norm_sqr();
        }
    }
    s
}

fn check_basis(basis: &ComplexMatrix, n_a: usize) -> Result<()> {
    if basis.rows() != n_a || basis.cols() != n_a {
        return Err(Error::DimensionMismatch(format!(
            "basis is {}x{}, subsystem A has dimension {n_a}",
            basis.rows(),
            basis.cols()
        )));
    }
    Ok(())
}

/// `sum_i (P_i (x) 1) rho (P_i (x) 1)` for the projectors `P_i = |a_i><a_i|`.
pub fn post_measurement_state(rho: &DensityMatrix, basis: &ComplexMatrix) -> Result<DensityMatrix> {
    check_basis(basis, rho.n_a())?;
    Ok(DensityMatrix::new_unchecked(dephase(rho.matrix(), basis, rho.n_a(), rho.n_b()), rho.n_a(), rho.n_b()))
}

/// Removes the off-diagonal blocks of `x` in the given local basis.
pub(crate) fn dephase(x: &ComplexMatrix, basis: &ComplexMatrix, n_a: usize, n_b: usize) -> ComplexMatrix {
    let mut y = rotate_local(x, basis, n_b);
    for i in 0..n_a {
        for j in 0..n_a {
            if i == j {
                continue;
            }
            for r in 0..n_b {
                for c in 0..n_b {
                    y[(i * n_b + r, j * n_b + c)] = crate::linalg::ZERO;
                }
            }
        }
    }
    let w = kron(basis, &ComplexMatrix::identity(n_b));
    w.matmul(&y).matmul(&w.adjoint())
}

/// The ensemble `{eta_i, rho_i}` with `eta_i = <a_i|rho_A|a_i>` and
/// `eta_i rho_i = sqrt(rho) (P_i (x) 1) sqrt(rho)`.
#[derive(Debug, Clone)]
pub struct DiscriminationEnsemble {
    pub weights: Vec<f64>,
    /// `eta_i rho_i`, kept unnormalized so zero-weight members stay defined.
    pub weighted_states: Vec<ComplexMatrix>,
}

impl DiscriminationEnsemble {
    /// Normalized member `rho_i`, or `None` when its weight is below
    /// [`ZERO_WEIGHT`].
    pub fn state(&self, i: usize) -> Option<ComplexMatrix> {
        (self.weights[i] >= ZERO_WEIGHT).then(|| self.weighted_states[i].scale_re(1.0 / self.weights[i]))
    }
}

pub fn ensemble_from_basis(rho: &DensityMatrix, basis: &ComplexMatrix) -> Result<DiscriminationEnsemble> {
    check_basis(basis, rho.n_a())?;
    Ok(ensemble_from_sqrt(&rho.sqrt()?, basis, rho.n_a(), rho.n_b()))
}

pub(crate) fn ensemble_from_sqrt(
    sqrt_rho: &ComplexMatrix,
    basis: &ComplexMatrix,
    n_a: usize,
    n_b: usize,
) -> DiscriminationEnsemble {
    let id_b = ComplexMatrix::identity(n_b);
    let mut weights = Vec::with_capacity(n_a);
    let mut weighted_states = Vec::with_capacity(n_a);
    for i in 0..n_a {
        let a = basis.column(i);
        let p = kron(&ComplexMatrix::outer(&a, &a), &id_b);
        let m = sqrt_rho.matmul(&p).matmul(sqrt_rho);
        weights.push(m.trace().re);
        weighted_states.push(m);
    }
    DiscriminationEnsemble { weights, weighted_states }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell_state, random_haar_state, BellLabel};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ensemble_weights_match_marginal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_haar_state(2, 3, 4, &mut rng).unwrap();
        let u = crate::states::haar_unitary(2, &mut rng);
        let ens = ensemble_from_basis(&rho, &u).unwrap();
        let ra = rho.reduced_a();
        for i in 0..2 {
            let a = u.column(i);
            let expect = crate::linalg::inner(&a, &ra.mul_vec(&a)).re;
            assert!((ens.weights[i] - expect).abs() < 1e-12);
            let s = ens.state(i).unwrap();
            assert!((s.trace().re - 1.0).abs() < 1e-12);
        }
        let sum = &ens.weighted_states[0] + &ens.weighted_states[1];
        assert!(sum.max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn post_measurement_of_bell_is_classical() {
        let pm = post_measurement_state(&bell_state(BellLabel::PhiPlus), &ComplexMatrix::identity(2)).unwrap();
        let expect = ComplexMatrix::from_diag(&[0.5, 0.0, 0.0, 0.5]);
        assert!(pm.matrix().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn zero_weight_member_is_marked() {
        let rho = DensityMatrix::new(ComplexMatrix::from_diag(&[0.5, 0.5, 0.0, 0.0]), 2, 2).unwrap();
        let ens = ensemble_from_basis(&rho, &ComplexMatrix::identity(2)).unwrap();
        assert!(ens.state(0).is_some());
        assert!(ens.state(1).is_none());
    }
}
