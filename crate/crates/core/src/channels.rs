//! Quantum channels in Kraus form, their superoperator and Jamiolkowski
//! representations, and the reshuffling bound on the Hilbert-Schmidt
//! geometric discord.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron, reshuffle, singular_values_squared, svd_values, ComplexMatrix};
use crate::measures::closed::hellinger_geo_qubit;
use crate::measures::optimize::OptimizerConfig;
use crate::measures::{geo_discord, Distance};
use crate::states::{gellmann_basis, haar_unitary, DensityMatrix};

/// Allowed deviation of `sum K^dagger K` from the identity.
pub const TP_TOL: f64 = 1e-9;
/// Singular values below this fraction of the largest do not count toward
/// the rank of a superoperator.
pub const RANK_REL_CUTOFF: f64 = 1e-10;
/// Jamiolkowski states with Hellinger geometric discord below this are
/// classified as classical-quantum.
pub const CQ_TOL: f64 = 1e-6;

/// A completely positive trace-preserving map `C^{n_in} -> C^{n_out}`.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    n_in: usize,
    n_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl QuantumChannel {
    pub fn new(n_in: usize, n_out: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::DimensionMismatch("a channel needs at least one Kraus operator".into()));
        }
        if let Some(k) = kraus.iter().find(|k| k.rows() != n_out || k.cols() != n_in) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator is {}x{}, expected {n_out}x{n_in}",
                k.rows(),
                k.cols()
            )));
        }
        let mut sum = ComplexMatrix::zeros(n_in, n_in);
        for k in &kraus {
            sum = &sum + &k.adjoint().matmul(k);
        }
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(n_in));
        if deviation > TP_TOL {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(Self { n_in, n_out, kraus })
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn identity(n: usize) -> Self {
        Self { n_in: n, n_out: n, kraus: vec![ComplexMatrix::identity(n)] }
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        let n = u.rows();
        Self::new(n, n, vec![u])
    }

    /// `rho -> (1 - p) rho + p tr(rho) 1/n`. `p = 1` is completely depolarizing.
    pub fn depolarizing(n: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::DomainError { function: "depolarizing", value: p });
        }
        let mut kraus = vec![ComplexMatrix::identity(n).scale_re((1.0 - p).sqrt())];
        let w = (p / n as f64).sqrt();
        if w > 0.0 {
            for i in 0..n {
                for j in 0..n {
                    let mut e = ComplexMatrix::zeros(n, n);
                    e[(i, j)] = crate::linalg::ONE;
                    kraus.push(e.scale_re(w));
                }
            }
        }
        Self::new(n, n, kraus)
    }

    /// Projective measurement in the computational basis, outcome discarded.
    pub fn measure_computational(n: usize) -> Self {
        let kraus = (0..n)
            .map(|i| {
                let mut p = ComplexMatrix::zeros(n, n);
                p[(i, i)] = crate::linalg::ONE;
                p
            })
            .collect();
        Self { n_in: n, n_out: n, kraus }
    }

    /// Random channel with `n_kraus` Kraus operators, from the blocks of a
    /// Haar-random isometry `C^{n_in} -> C^{n_out} (x) C^{n_kraus}`.
    pub fn random<R: Rng + ?Sized>(n_in: usize, n_out: usize, n_kraus: usize, rng: &mut R) -> Result<Self> {
        let big = n_out * n_kraus;
        if n_kraus == 0 || big < n_in {
            return Err(Error::DimensionMismatch(format!(
                "{n_kraus} Kraus operators cannot form a channel from {n_in} to {n_out} dimensions"
            )));
        }
        let u = haar_unitary(big, rng);
        let kraus = (0..n_kraus)
            .map(|k| ComplexMatrix::from_fn(n_out, n_in, |r, c| u[(k * n_out + r, c)]))
            .collect();
        Self::new(n_in, n_out, kraus)
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.n_in || rho.cols() != self.n_in {
            return Err(Error::DimensionMismatch(format!("channel input is {}, got {}", self.n_in, rho.rows())));
        }
        let mut out = ComplexMatrix::zeros(self.n_out, self.n_out);
        for k in &self.kraus {
            out = &out + &k.conjugate_by(rho);
        }
        Ok(out)
    }

    /// `(id (x) Phi)(rho)`, acting on the B side.
    pub fn apply_local_b(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.n_b() != self.n_in {
            return Err(Error::DimensionMismatch(format!("channel input is {}, B is {}", self.n_in, rho.n_b())));
        }
        let id = ComplexMatrix::identity(rho.n_a());
        let d = rho.n_a() * self.n_out;
        let mut out = ComplexMatrix::zeros(d, d);
        for k in &self.kraus {
            out = &out + &kron(&id, k).conjugate_by(rho.matrix());
        }
        Ok(DensityMatrix::new_unchecked(out, rho.n_a(), self.n_out))
    }

    /// `(Phi (x) id)(rho)`, acting on the A side.
    pub fn apply_local_a(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.n_a() != self.n_in {
            return Err(Error::DimensionMismatch(format!("channel input is {}, A is {}", self.n_in, rho.n_a())));
        }
        let id = ComplexMatrix::identity(rho.n_b());
        let d = self.n_out * rho.n_b();
        let mut out = ComplexMatrix::zeros(d, d);
        for k in &self.kraus {
            out = &out + &kron(k, &id).conjugate_by(rho.matrix());
        }
        Ok(DensityMatrix::new_unchecked(out, self.n_out, rho.n_b()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ChannelJson::from(self)).expect("channel serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ChannelJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let kraus = raw
            .kraus
            .iter()
            .map(|k| crate::states::matrix_from_parts(&k.re, &k.im))
            .collect::<Result<Vec<_>>>()?;
        Self::new(raw.n_in, raw.n_out, kraus)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct KrausJson {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ChannelJson {
    n_in: usize,
    n_out: usize,
    kraus: Vec<KrausJson>,
}

impl From<&QuantumChannel> for ChannelJson {
    fn from(ch: &QuantumChannel) -> Self {
        let part = |k: &ComplexMatrix, f: fn(crate::linalg::C64) -> f64| {
            (0..k.rows()).map(|r| (0..k.cols()).map(|c| f(k[(r, c)])).collect()).collect()
        };
        ChannelJson {
            n_in: ch.n_in,
            n_out: ch.n_out,
            kraus: ch.kraus.iter().map(|k| KrausJson { re: part(k, |z| z.re), im: part(k, |z| z.im) }).collect(),
        }
    }
}

/// Matrix of the channel acting on row-major vectorized operators:
/// `<i,j| S |k,l> = <i| Phi(|k><l|) |j>`, i.e. `S = sum_K K (x) conj(K)`.
pub fn superoperator(ch: &QuantumChannel) -> ComplexMatrix {
    let n = ch.n_out * ch.n_out;
    let mut s = ComplexMatrix::zeros(n, ch.n_in * ch.n_in);
    for k in &ch.kraus {
        s = &s + &kron(k, &k.conj());
    }
    s
}

/// `(Phi (x) id)(|psi+><psi+|)` with `|psi+> = sum_i |ii> / sqrt(n)`.
pub fn jamiolkowski_state(ch: &QuantumChannel) -> Result<DensityMatrix> {
    if ch.n_in != ch.n_out {
        return Err(Error::DimensionMismatch(format!(
            "Jamiolkowski state needs a square channel, got {} -> {}",
            ch.n_in, ch.n_out
        )));
    }
    let n = ch.n_in;
    let mut v = vec![crate::linalg::ZERO; n * n];
    for i in 0..n {
        v[i * n + i] = crate::linalg::C64::new(1.0 / (n as f64).sqrt(), 0.0);
    }
    let psi = DensityMatrix::from_pure(&v, n, n)?;
    ch.apply_local_a(&psi)
}

/// Sum of all but the `n_a` largest squared singular values of the
/// reshuffled state: a lower bound on the Hilbert-Schmidt geometric discord.
pub fn hs_discord_lower_bound(rho: &DensityMatrix) -> Result<f64> {
    let r = reshuffle(rho.matrix(), rho.n_a(), rho.n_b())?;
    let mu = singular_values_squared(&r)?;
    Ok(mu.iter().skip(rho.n_a()).sum())
}

/// Largest deviation of the marginals from maximally mixed, in max-abs norm.
pub fn marginal_deviation(rho: &DensityMatrix) -> f64 {
    let a = ComplexMatrix::identity(rho.n_a()).scale_re(1.0 / rho.n_a() as f64);
    let b = ComplexMatrix::identity(rho.n_b()).scale_re(1.0 / rho.n_b() as f64);
    rho.reduced_a().max_abs_diff(&a).max(rho.reduced_b().max_abs_diff(&b))
}

/// Hilbert-Schmidt geometric discord of a qubit-qudit state with maximally
/// mixed marginals: the two smallest squared singular values of the
/// reshuffled state beyond the top two.
pub fn hs_discord_mm_marginals(rho: &DensityMatrix) -> Result<f64> {
    if rho.n_a() != 2 {
        return Err(Error::UnsupportedDimension { n_a: rho.n_a(), what: "needs a qubit A".into() });
    }
    let deviation = marginal_deviation(rho);
    if deviation > 1e-9 {
        return Err(Error::MarginalsNotMaximallyMixed { deviation });
    }
    let r = reshuffle(rho.matrix(), 2, rho.n_b())?;
    let mu = singular_values_squared(&r)?;
    Ok(mu[2] + mu[3])
}

/// Correlation matrix `M_mp = tr(rho s_m (x) g_p)` in orthonormal Hermitian
/// bases of both sides, the identity element first (real, `n_a^2 x n_b^2`).
pub fn correlation_matrix(rho: &DensityMatrix) -> Vec<Vec<f64>> {
    let basis = |n: usize| {
        let mut out = vec![ComplexMatrix::identity(n).scale_re(1.0 / (n as f64).sqrt())];
        out.extend(gellmann_basis(n).into_iter().map(|g| g.scale_re(1.0 / (n as f64).sqrt())));
        out
    };
    let (sa, gb) = (basis(rho.n_a()), basis(rho.n_b()));
    sa.iter()
        .map(|s| gb.iter().map(|g| kron(s, g).hs_inner(rho.matrix()).re).collect())
        .collect()
}

/// The same quantity as [`hs_discord_mm_marginals`] from the correlation
/// matrix with its identity row and column removed.
pub fn hs_discord_mm_correlations(rho: &DensityMatrix) -> Result<f64> {
    let m = correlation_matrix(rho);
    let rows = m.len() - 1;
    let cols = m[0].len() - 1;
    let reduced = ComplexMatrix::from_fn(rows, cols, |r, c| crate::linalg::C64::new(m[r + 1][c + 1], 0.0));
    let mu = singular_values_squared(&reduced)?;
    Ok(mu.iter().skip(1).take(2).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    /// The channel keeps some quantum correlations; `residual_bound` lower-
    /// bounds the Hilbert-Schmidt geometric discord of its Jamiolkowski state.
    NotQuantumnessBreaking { residual_bound: f64 },
    QuantumnessBreaking,
    /// The classical-quantum test could not be decided numerically.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelReport {
    pub n: usize,
    pub superoperator_rank: usize,
    /// Hellinger geometric discord of the Jamiolkowski state, when computed.
    pub jamiolkowski_discord: Option<f64>,
    pub residual_bound: f64,
    pub verdict: Verdict,
}

/// Decides whether a channel on A destroys all quantum correlations of every
/// input. A superoperator of rank above `n` rules it out directly; otherwise
/// the Jamiolkowski state is tested for being classical-quantum.
pub fn quantumness_breaking_verdict(ch: &QuantumChannel, cfg: &OptimizerConfig) -> Result<ChannelReport> {
    let j = jamiolkowski_state(ch)?;
    let n = ch.n_in;
    let sv = svd_values(&superoperator(ch))?;
    let cutoff = RANK_REL_CUTOFF * sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > cutoff).count();
    let residual_bound = hs_discord_lower_bound(&j)?;
    if rank > n {
        return Ok(ChannelReport {
            n,
            superoperator_rank: rank,
            jamiolkowski_discord: None,
            residual_bound,
            verdict: Verdict::NotQuantumnessBreaking { residual_bound },
        });
    }
    let (discord, settled) = if n == 2 {
        (hellinger_geo_qubit(&j)?, true)
    } else {
        let r = geo_discord(&j, Distance::Hellinger, cfg)?;
        (r.value, r.report.map_or(true, |rep| rep.converged))
    };
    let verdict = if !settled {
        Verdict::Inconclusive
    } else if discord < CQ_TOL {
        Verdict::QuantumnessBreaking
    } else {
        Verdict::NotQuantumnessBreaking { residual_bound }
    };
    Ok(ChannelReport { n, superoperator_rank: rank, jamiolkowski_discord: Some(discord), residual_bound, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell_state, BellLabel};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_non_trace_preserving() {
        let k = ComplexMatrix::identity(2).scale_re(0.9);
        assert!(matches!(QuantumChannel::new(2, 2, vec![k]), Err(Error::NotTracePreserving { .. })));
        assert!(QuantumChannel::new(2, 2, vec![]).is_err());
    }

    #[test]
    fn identity_superoperator_and_jamiolkowski() {
        let ch = QuantumChannel::identity(2);
        assert!(superoperator(&ch).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        let j = jamiolkowski_state(&ch).unwrap();
        assert!(j.matrix().max_abs_diff(bell_state(BellLabel::PhiPlus).matrix()) < 1e-15);
    }

    #[test]
    fn completely_depolarizing_maps_to_identity() {
        let ch = QuantumChannel::depolarizing(3, 1.0).unwrap();
        let s = superoperator(&ch);
        assert_eq!(svd_values(&s).unwrap().iter().filter(|&&x| x > 1e-10).count(), 1);
        let j = jamiolkowski_state(&ch).unwrap();
        assert!(j.matrix().max_abs_diff(&ComplexMatrix::identity(9).scale_re(1.0 / 9.0)) < 1e-15);
    }

    #[test]
    fn reshuffled_superoperator_is_scaled_jamiolkowski() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2, 3] {
            let ch = QuantumChannel::random(n, n, 2, &mut rng).unwrap();
            let r = reshuffle(&superoperator(&ch), n, n).unwrap();
            let j = jamiolkowski_state(&ch).unwrap();
            assert!(r.max_abs_diff(&j.matrix().scale_re(n as f64)) < 1e-12);
        }
    }

    #[test]
    fn verdicts_for_basic_channels() {
        let cfg = OptimizerConfig::default();
        let v = |ch: &QuantumChannel| quantumness_breaking_verdict(ch, &cfg).unwrap().verdict;
        assert!(matches!(v(&QuantumChannel::identity(2)), Verdict::NotQuantumnessBreaking { .. }));
        assert_eq!(v(&QuantumChannel::depolarizing(2, 1.0).unwrap()), Verdict::QuantumnessBreaking);
        assert_eq!(v(&QuantumChannel::measure_computational(2)), Verdict::QuantumnessBreaking);
    }

    #[test]
    fn json_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ch = QuantumChannel::random(2, 3, 2, &mut rng).unwrap();
        let back = QuantumChannel::from_json(&ch.to_json()).unwrap();
        assert!(superoperator(&ch).max_abs_diff(&superoperator(&back)) < 1e-15);
    }

    #[test]
    fn correlation_matrix_for_bell_state() {
        let rho = bell_state(BellLabel::PsiMinus);
        let m = correlation_matrix(&rho);
        assert!((m[0][0] - 0.5).abs() < 1e-15);
        assert!((hs_discord_mm_marginals(&rho).unwrap() - 0.5).abs() < 1e-12);
        assert!((hs_discord_mm_correlations(&rho).unwrap() - 0.5).abs() < 1e-12);
    }
}
