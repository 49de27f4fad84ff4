//! Closed forms of all measures on pure states, in terms of the squared
//! Schmidt coefficients.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

use super::optimize::{optimize_over_basis, OptimizerConfig, Sense};
use super::{Distance, MeasureKind, MeasureTable};

#[derive(Debug, Clone, Serialize)]
pub struct PureStateTable {
    /// `K = 1 / sum mu_i^2`.
    pub schmidt_k: f64,
    pub mu_max: f64,
    /// Entanglement of response `1 - max_U |tr(rho_A U)|^2`.
    pub entanglement_of_response: f64,
    pub values: MeasureTable,
}

fn check_distribution(mu: &[f64]) -> Result<()> {
    if mu.len() < 2 {
        return Err(Error::BadDistribution("need at least two Schmidt coefficients".into()));
    }
    let sum: f64 = mu.iter().sum();
    if mu.iter().any(|&m| !(m >= -1e-15)) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::BadDistribution(format!("{mu:?} does not sum to one")));
    }
    Ok(())
}

/// `1 - max |sum_j e^{-2 pi i j/n} <v_j| diag(mu) |v_j>|^2` over bases `{v_j}`.
pub fn entanglement_of_response(mu: &[f64], cfg: &OptimizerConfig) -> Result<f64> {
    check_distribution(mu)?;
    let n = mu.len();
    let phases: Vec<C64> =
        (1..=n).map(|j| C64::from_polar(1.0, -2.0 * std::f64::consts::PI * j as f64 / n as f64)).collect();
    let objective = |v: &ComplexMatrix| {
        let mut z = C64::new(0.0, 0.0);
        for (j, ph) in phases.iter().enumerate() {
            let w: f64 = (0..n).map(|i| mu[i] * v[(i, j)].norm_sqr()).sum();
            z += ph * w;
        }
        z.norm_sqr()
    };
    let rep = optimize_over_basis(n, objective, Sense::Maximize, &[ComplexMatrix::identity(n)], cfg)?;
    Ok((1.0 - rep.best_objective).clamp(0.0, 1.0))
}

/// The twelve measures of a pure state with squared Schmidt coefficients
/// `mu` (one per dimension of A). Trace geometric and measurement-induced
/// discords are only filled in for a qubit A.
pub fn pure_state_measure_table(mu: &[f64], cfg: &OptimizerConfig) -> Result<PureStateTable> {
    check_distribution(mu)?;
    let k = 1.0 / mu.iter().map(|m| m * m).sum::<f64>();
    let mu_max = mu.iter().copied().fold(0.0, f64::max);
    let e_r = entanglement_of_response(mu, cfg)?;
    let sum32: f64 = mu.iter().map(|m| m.max(0.0).powf(1.5)).sum();
    let qubit = mu.len() == 2;

    let mut t = MeasureTable::empty();
    use Distance::*;
    use MeasureKind::*;
    t.set(Geometric, Bures, Some(2.0 - 2.0 * mu_max.sqrt()));
    t.set(Geometric, Hellinger, Some(2.0 - 2.0 / k.sqrt()));
    t.set(Geometric, HilbertSchmidt, Some(1.0 - 1.0 / k));
    t.set(Geometric, Trace, qubit.then_some(e_r));
    t.set(MeasurementInduced, Bures, Some(2.0 - 2.0 / k.sqrt()));
    t.set(MeasurementInduced, Hellinger, Some(2.0 - 2.0 * sum32));
    t.set(MeasurementInduced, HilbertSchmidt, Some(1.0 - 1.0 / k));
    t.set(MeasurementInduced, Trace, qubit.then_some(e_r));
    t.set(Response, Bures, Some(1.0 - (1.0 - e_r).sqrt()));
    t.set(Response, Hellinger, Some(e_r));
    t.set(Response, HilbertSchmidt, Some(e_r));
    t.set(Response, Trace, Some(e_r));
    Ok(PureStateTable { schmidt_k: k, mu_max, entanglement_of_response: e_r, values: t })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_entanglement_of_response() {
        let cfg = OptimizerConfig::default();
        for &m in &[0.5, 0.7, 0.9, 1.0] {
            let e = entanglement_of_response(&[m, 1.0 - m], &cfg).unwrap();
            assert!((e - 4.0 * m * (1.0 - m)).abs() < 1e-9, "{m}: {e}");
        }
    }

    #[test]
    fn maximally_entangled_qutrit_has_unit_response() {
        let e = entanglement_of_response(&[1.0 / 3.0; 3], &OptimizerConfig::default()).unwrap();
        assert!((e - 1.0).abs() < 1e-9);
    }

    #[test]
    fn product_state_row_is_zero() {
        let t = pure_state_measure_table(&[1.0, 0.0], &OptimizerConfig::default()).unwrap();
        for (_, _, v) in t.values.entries() {
            assert!(v.unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_coefficients() {
        let cfg = OptimizerConfig::default();
        assert!(pure_state_measure_table(&[0.5, 0.6], &cfg).is_err());
        assert!(pure_state_measure_table(&[1.0], &cfg).is_err());
    }
}
