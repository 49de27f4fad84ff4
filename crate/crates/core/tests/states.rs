use geodiscord::cli::sample_rng;
use geodiscord::measures::closed::hellinger_response_qubit;
use geodiscord::measures::optimize::OptimizerConfig;
use geodiscord::measures::{disc_response, Distance};
use geodiscord::states::{
    fano_decomposition, max_hellinger_discord_state, random_fixed_purity_state, random_haar_state, random_pure_vector,
    rank_two_cosine, schmidt, werner_state, DensityMatrix, HellingerFamily, WernerBranch,
};
use geodiscord::Error;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fixed_purity_states_hit_purity_and_rank(seed in 0u64..10_000, rank in 2usize..=4, t in 0.0..1.0f64) {
        let lo = 1.0 / rank as f64;
        let purity = lo + (1.0 - lo) * 0.98 * t;
        let rho = random_fixed_purity_state(2, 2, purity, rank, &mut sample_rng(seed, 0)).unwrap();
        prop_assert!((rho.purity() - purity).abs() < 1e-9);
        prop_assert!(rho.rank().unwrap() <= rank);
        prop_assert!(rho.eigenvalues().unwrap()[0] > -1e-12);
    }

    #[test]
    fn haar_states_are_valid(seed in 0u64..10_000, n_b in 2usize..4, r in 1usize..7) {
        let rank = r.min(2 * n_b);
        let rho = random_haar_state(2, n_b, rank, &mut sample_rng(seed, 1)).unwrap();
        prop_assert!(DensityMatrix::new(rho.matrix().clone(), 2, n_b).is_ok());
        prop_assert_eq!(rho.rank().unwrap(), rank);
    }

    #[test]
    fn schmidt_coefficients_give_reduced_spectrum(seed in 0u64..10_000) {
        let v = random_pure_vector(6, &mut sample_rng(seed, 2));
        let sd = schmidt(&v, 2, 3).unwrap();
        let rho = DensityMatrix::from_pure(&v, 2, 3).unwrap();
        let mut spec = geodiscord::linalg::herm_eigenvalues(&rho.reduced_a()).unwrap();
        spec.reverse();
        for (m, s) in sd.mu.iter().zip(&spec) {
            prop_assert!((m - s).abs() < 1e-10);
        }
    }

    #[test]
    fn fano_decomposition_roundtrips(seed in 0u64..10_000, n_b in 2usize..4) {
        let rho = random_haar_state(2, n_b, 2 * n_b, &mut sample_rng(seed, 3)).unwrap();
        let f = fano_decomposition(rho.matrix(), n_b).unwrap();
        prop_assert!(f.reconstruct().max_abs_diff(rho.matrix()) < 1e-12);
    }
}

#[test]
fn unreachable_purity_is_an_error() {
    let mut rng = sample_rng(0, 0);
    assert!(matches!(
        random_fixed_purity_state(2, 2, 0.3, 2, &mut rng),
        Err(Error::UnachievablePurity { .. } | Error::PurityOutOfRange { .. })
    ));
    assert!(matches!(random_fixed_purity_state(2, 2, 1.2, 4, &mut rng), Err(Error::PurityOutOfRange { .. })));
}

#[test]
fn werner_branch_limits() {
    assert!(matches!(werner_state(0.5, WernerBranch::Plus), Err(Error::PurityOutOfBranch { .. })));
    for p in [0.25, 0.3, 1.0 / 3.0] {
        let w = werner_state(p, WernerBranch::Plus).unwrap();
        assert!((w.purity() - p).abs() < 1e-12);
    }
}

#[test]
fn max_hellinger_family_values() {
    // Low-purity Werner branch and its end point.
    let low = max_hellinger_discord_state(0.3).unwrap();
    assert_eq!(low.family, HellingerFamily::Werner);
    assert!((low.value - 0.104629).abs() < 1e-6, "{}", low.value);
    assert!((max_hellinger_discord_state(1.0 / 3.0).unwrap().value - 1.0 / 3.0).abs() < 1e-9);
    // Rank-two family: closed-form angle against the state it produces.
    let hi = max_hellinger_discord_state(0.7).unwrap();
    assert_eq!(hi.family, HellingerFamily::RankTwo);
    let (_, phi) = hi.params.unwrap();
    assert!((phi.cos().abs() - 0.81105).abs() < 1e-5);
    assert!((rank_two_cosine(0.7).unwrap().abs() - 0.81105).abs() < 1e-5);
    // Just above 1/2 the rank-three interior optimum still wins.
    let mid = max_hellinger_discord_state(0.503).unwrap();
    assert_eq!(mid.family, HellingerFamily::RankThree);
    assert!((mid.value - 0.539614).abs() < 1e-5, "{}", mid.value);
    assert_eq!(max_hellinger_discord_state(0.5045).unwrap().family, HellingerFamily::RankTwo);
    // Pure end: a Bell state.
    assert!((max_hellinger_discord_state(1.0).unwrap().value - 1.0).abs() < 1e-9);
}

#[test]
fn max_hellinger_family_dominates_random_states() {
    let cfg = OptimizerConfig::default();
    for (k, &p) in [0.3, 0.45, 0.6, 0.8].iter().enumerate() {
        let best = max_hellinger_discord_state(p).unwrap();
        assert!((best.state.purity() - p).abs() < 1e-9);
        assert!((hellinger_response_qubit(&best.state).unwrap() - best.value).abs() < 1e-12);
        for i in 0..200 {
            let rank = [2, 3, 4][i % 3].max((1.0 / p).ceil() as usize);
            let rho = random_fixed_purity_state(2, 2, p, rank, &mut sample_rng(77 + k as u64, i)).unwrap();
            let v = disc_response(&rho, Distance::Hellinger, &cfg).unwrap().value;
            assert!(v <= best.value + 1e-4, "P={p}: {v} > {}", best.value);
        }
    }
}
