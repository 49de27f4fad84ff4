use std::f64::consts::{PI, SQRT_2};

use geodiscord::cli::sample_rng;
use geodiscord::linalg::{ComplexMatrix, C64};
use geodiscord::measures::basis::{ensemble_from_basis, post_measurement_state};
use geodiscord::measures::closed::hellinger_geo_qubit;
use geodiscord::measures::cq::closest_cq_state;
use geodiscord::measures::optimize::{bloch_basis, OptimizerConfig};
use geodiscord::measures::pure::pure_state_measure_table;
use geodiscord::measures::{
    all_measures, disc_response, distance, fidelity, geo_discord, meas_induced_discord, Distance, MeasureKind,
};
use geodiscord::states::{random_haar_state, random_pure_vector, schmidt, DensityMatrix};
use proptest::prelude::*;

fn cfg() -> OptimizerConfig {
    OptimizerConfig::default()
}

fn state(seed: u64, n_a: usize, n_b: usize, rank: usize) -> DensityMatrix {
    random_haar_state(n_a, n_b, rank, &mut sample_rng(seed, 0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fidelity_is_symmetric_and_bounded(a in 0u64..5000, b in 0u64..5000, ra in 1usize..=4, rb in 1usize..=4) {
        let (x, y) = (state(a, 2, 2, ra), state(b + 7, 2, 2, rb));
        let f = fidelity(&x, &y).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        prop_assert!((f - fidelity(&y, &x).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn distances_satisfy_triangle_inequality(a in 0u64..5000, r in 1usize..=4) {
        let (x, y, z) = (state(a, 2, 2, r), state(a + 1, 2, 2, 4), state(a + 2, 2, 2, 2));
        for d in Distance::ALL {
            let (xy, yz, xz) = (distance(&x, &y, d).unwrap(), distance(&y, &z, d).unwrap(), distance(&x, &z, d).unwrap());
            prop_assert!(xz <= xy + yz + 1e-8, "{d}");
            prop_assert!((xy - distance(&y, &x, d).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn geometric_below_measurement_induced(seed in 0u64..5000, n_b in 2usize..4, r in 1usize..=6) {
        let rho = state(seed, 2, n_b, r.min(2 * n_b));
        for d in Distance::ALL {
            let g = geo_discord(&rho, d, &cfg()).unwrap().value;
            let m = meas_induced_discord(&rho, d, &cfg()).unwrap().value;
            prop_assert!(g <= m + 1e-7, "{d}: {g} > {m}");
        }
    }

    #[test]
    fn ensemble_reconstructs_state(seed in 0u64..5000, t in 0.0..PI, p in 0.0..(2.0 * PI)) {
        let rho = state(seed, 2, 3, 3);
        let ens = ensemble_from_basis(&rho, &bloch_basis(t, p)).unwrap();
        prop_assert!((ens.weights.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let mut sum = ComplexMatrix::zeros(6, 6);
        for w in &ens.weighted_states {
            sum = &sum + w;
        }
        prop_assert!(sum.max_abs_diff(rho.matrix()) < 1e-9);
    }

    #[test]
    fn post_measurement_is_idempotent(seed in 0u64..5000, t in 0.0..PI, p in 0.0..(2.0 * PI)) {
        let rho = state(seed, 2, 2, 4);
        let basis = bloch_basis(t, p);
        let once = post_measurement_state(&rho, &basis).unwrap();
        let twice = post_measurement_state(&once, &basis).unwrap();
        prop_assert!(once.matrix().max_abs_diff(twice.matrix()) < 1e-12);
        prop_assert!((once.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closest_cq_state_attains_discord(seed in 0u64..5000, n_b in 2usize..4) {
        let rho = state(seed, 2, n_b, 2 * n_b);
        for d in [Distance::Hellinger, Distance::HilbertSchmidt] {
            let chi = closest_cq_state(&rho, d, &cfg()).unwrap();
            let dist = distance(&rho, &chi, d).unwrap();
            let g = geo_discord(&rho, d, &cfg()).unwrap().value;
            prop_assert!((dist * dist - g).abs() < 1e-6, "{d}: {} vs {g}", dist * dist);
        }
    }
}

#[test]
fn fidelity_with_pure_state_is_expectation() {
    let v = random_pure_vector(4, &mut sample_rng(1, 0));
    let psi = DensityMatrix::from_pure(&v, 2, 2).unwrap();
    let sigma = state(2, 2, 2, 4);
    let expect = sigma.matrix().mul_vec(&v).iter().zip(&v).map(|(a, b)| b.conj() * a).sum::<C64>().re;
    assert!((fidelity(&psi, &sigma).unwrap() - expect).abs() < 1e-10);
}

#[test]
fn pure_state_table_examples() {
    let t = pure_state_measure_table(&[0.8, 0.2], &cfg()).unwrap().values;
    let k_inv: f64 = 0.68;
    let dghe = t.get(MeasureKind::Geometric, Distance::Hellinger).unwrap();
    assert!((dghe - (2.0 - 2.0 * k_inv.sqrt())).abs() < 1e-12);
    assert!((dghe - 0.350758).abs() < 1e-6);
    let bell = pure_state_measure_table(&[0.5, 0.5], &cfg()).unwrap().values;
    assert!((bell.get(MeasureKind::Geometric, Distance::Bures).unwrap() - (2.0 - SQRT_2)).abs() < 1e-12);
    assert!((bell.get(MeasureKind::MeasurementInduced, Distance::Hellinger).unwrap() - (2.0 - SQRT_2)).abs() < 1e-12);
    for d in Distance::ALL {
        assert!((bell.get(MeasureKind::Response, d).unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn qutrit_searches_recover_pure_closed_forms() {
    for seed in 0..5 {
        let v = random_pure_vector(9, &mut sample_rng(seed, 9));
        let mu = schmidt(&v, 3, 3).unwrap().mu;
        let rho = DensityMatrix::from_pure(&v, 3, 3).unwrap();
        let expected = pure_state_measure_table(&mu, &cfg()).unwrap().values;
        let mhe = meas_induced_discord(&rho, Distance::Hellinger, &cfg()).unwrap().value;
        let want = expected.get(MeasureKind::MeasurementInduced, Distance::Hellinger).unwrap();
        assert!((mhe - want).abs() < 1e-6, "{mhe} vs {want}");
        let ghe = geo_discord(&rho, Distance::Hellinger, &cfg()).unwrap().value;
        assert!((ghe - expected.get(MeasureKind::Geometric, Distance::Hellinger).unwrap()).abs() < 1e-6);
        let rhe = disc_response(&rho, Distance::Hellinger, &cfg()).unwrap().value;
        assert!((rhe - expected.get(MeasureKind::Response, Distance::Hellinger).unwrap()).abs() < 1e-6);
    }
}

#[test]
fn hellinger_closed_form_matches_grid_search() {
    // Independent route: maximize sum_i tr(<a_i|sqrt(rho)|a_i>^2) over a grid
    // of qubit bases, then refine the grid around the best point.
    for seed in 0..10 {
        let rho = state(seed, 2, 2, 1 + seed as usize % 4);
        let s = rho.sqrt().unwrap();
        let weight = |t: f64, p: f64| {
            let y = geodiscord::measures::basis::rotate_local(&s, &bloch_basis(t, p), 2);
            (0..2).map(|i| geodiscord::measures::basis::block_hs_sqr(&y, i, i, 2)).sum::<f64>()
        };
        let (mut bt, mut bp, mut best) = (0.0, 0.0, f64::NEG_INFINITY);
        for i in 0..=90 {
            for j in 0..180 {
                let (t, p) = (PI * i as f64 / 90.0, 2.0 * PI * j as f64 / 180.0);
                let w = weight(t, p);
                if w > best {
                    (bt, bp, best) = (t, p, w);
                }
            }
        }
        let mut h = PI / 90.0;
        for _ in 0..40 {
            let (ct, cp) = (bt, bp);
            for a in -4..=4 {
                for b in -4..=4 {
                    let (t, p) = (ct + h * a as f64 / 4.0, cp + h * b as f64 / 4.0);
                    let w = weight(t, p);
                    if w > best {
                        (bt, bp, best) = (t, p, w);
                    }
                }
            }
            h *= 0.5;
        }
        let grid = 2.0 - 2.0 * best.sqrt();
        assert!((hellinger_geo_qubit(&rho).unwrap() - grid).abs() < 1e-5);
    }
}

#[test]
fn product_states_have_no_discord() {
    let a = random_pure_vector(2, &mut sample_rng(3, 0));
    let b = random_pure_vector(3, &mut sample_rng(4, 0));
    let v = geodiscord::linalg::kron_vec(&a, &b);
    let rho = DensityMatrix::from_pure(&v, 2, 3).unwrap();
    for (_, _, value) in all_measures(&rho, &cfg()).unwrap().entries() {
        if let Some(x) = value {
            assert!(x.abs() < 1e-8, "{x}");
        }
    }
}
