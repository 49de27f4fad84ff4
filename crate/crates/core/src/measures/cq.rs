//! Classical-quantum states closest to a given state.

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, kron, ComplexMatrix};
use crate::states::{schmidt, DensityMatrix};

use super::basis::{block, post_measurement_state, rotate_local};
use super::closed;
use super::optimize::{eigenbasis, optimize_over_basis, OptimizerConfig, OptimizerReport, Sense};

fn searched_basis(
    rho: &DensityMatrix,
    x: &ComplexMatrix,
    cfg: &OptimizerConfig,
) -> Result<ComplexMatrix> {
    let (n_a, n_b) = (rho.n_a(), rho.n_b());
    let objective = |u: &ComplexMatrix| {
        let y = rotate_local(x, u, n_b);
        (0..n_a).map(|i| super::basis::block_hs_sqr(&y, i, i, n_b)).sum::<f64>()
    };
    let hints = [eigenbasis(&rho.reduced_a())?];
    let rep: OptimizerReport = optimize_over_basis(n_a, objective, Sense::Maximize, &hints, cfg)?;
    if !rep.converged {
        return Err(Error::OptimizerNotConverged { best: rep.best_objective, evaluations: rep.evaluations });
    }
    Ok(rep.best_basis)
}

/// Closest classical-quantum state for the Hellinger or Hilbert-Schmidt
/// distance (any state), or for the Bures distance (pure states only).
pub fn closest_cq_state(rho: &DensityMatrix, d: super::Distance, cfg: &OptimizerConfig) -> Result<DensityMatrix> {
    use super::Distance::*;
    let (n_a, n_b) = (rho.n_a(), rho.n_b());
    match d {
        Hellinger => {
            let s = rho.sqrt()?;
            let basis = if n_a == 2 { closed::hellinger_geo_qubit_basis(rho)? } else { searched_basis(rho, &s, cfg)? };
            let y = rotate_local(&s, &basis, n_b);
            let mut m = ComplexMatrix::zeros(n_a * n_b, n_a * n_b);
            for i in 0..n_a {
                let b = block(&y, i, i, n_b);
                let a = basis.column(i);
                m = &m + &kron(&ComplexMatrix::outer(&a, &a), &b.matmul(&b));
            }
            let tr = m.trace().re;
            Ok(DensityMatrix::new_unchecked(m.scale_re(1.0 / tr), n_a, n_b))
        }
        HilbertSchmidt => {
            let basis = if n_a == 2 {
                closed::hs_geo_operator_qubit_basis(rho.matrix(), n_b)?
            } else {
                searched_basis(rho, rho.matrix(), cfg)?
            };
            post_measurement_state(rho, &basis)
        }
        Bures => {
            if (rho.purity() - 1.0).abs() > 1e-9 {
                return Err(Error::Unsupported("closest Bures classical-quantum state is only known for pure states".into()));
            }
            let eig = herm_eig(rho.matrix())?;
            let psi = eig.vectors.column(rho.dim() - 1);
            let sd = schmidt(&psi, n_a, n_b)?;
            let prod = crate::linalg::kron_vec(&sd.basis_a[0], &sd.basis_b[0]);
            Ok(DensityMatrix::new_unchecked(ComplexMatrix::outer(&prod, &prod), n_a, n_b))
        }
        Trace => Err(Error::Unsupported("closest classical-quantum state for the trace distance".into())),
    }
}
