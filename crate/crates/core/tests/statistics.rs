mod common;

use common::normal_cdf_by_quadrature;
use roadmatch::geometry::row_counts;
use roadmatch::matcher::{classify_values, pair_errors, snr_scale};
use roadmatch::rng::{fill_rademacher, rng_from_seed};
use roadmatch::{
    cell_noise_variance, euclid_classify, gramian_weights, ml_classify, std_normal_cdf, synthesize_observation,
    visible_whole_cells, AmplitudeVector, CameraConfig,
};

#[test]
fn normal_cdf_matches_quadrature() {
    for i in -800..=800 {
        let x = i as f64 / 100.0;
        let diff = (std_normal_cdf(x) - normal_cdf_by_quadrature(x)).abs();
        assert!(diff <= 1e-12, "x = {x}: {diff:e}");
    }
    assert!((std_normal_cdf(1.959963985) - 0.975).abs() < 1e-10);
}

#[test]
fn synthesized_noise_has_model_moments() {
    let cfg = CameraConfig::default();
    let cells = visible_whole_cells(&cfg, 20.0, -10.0).unwrap();
    let n = cells.len();
    assert_eq!(row_counts(&cells).len(), 8);
    let truth =
        AmplitudeVector::new((0..n).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect(), cells.clone()).unwrap();
    let sigma2: Vec<f64> = cells.iter().map(|c| cell_noise_variance(&c.region, &cfg).unwrap()).collect();

    let reps = 100_000;
    // track the nearest cell, the farthest cell and one pair for covariance
    let (near, far) = (0, n - 1);
    let mut sum = [0.0f64; 2];
    let mut sq = [0.0f64; 2];
    let mut cross = 0.0;
    for seed in 0..reps {
        let obs = synthesize_observation(&truth, &cfg, seed).unwrap();
        let e0 = (obs.values[near] - truth.values[near]) / sigma2[near].sqrt();
        let e1 = (obs.values[far] - truth.values[far]) / sigma2[far].sqrt();
        sum[0] += e0;
        sum[1] += e1;
        sq[0] += e0 * e0;
        sq[1] += e1 * e1;
        cross += e0 * e1;
    }
    let r = reps as f64;
    for k in 0..2 {
        let mean = sum[k] / r;
        let var = sq[k] / r - mean * mean;
        assert!(mean.abs() < 4.0 / r.sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "variance ratio {var}");
    }
    let corr = cross / r - (sum[0] / r) * (sum[1] / r);
    assert!(corr.abs() < 4.0 / r.sqrt(), "correlation {corr}");
}

#[test]
fn synthesis_is_reproducible_per_seed() {
    let cfg = CameraConfig::default();
    let cells = visible_whole_cells(&cfg, 20.0, -10.0).unwrap();
    let truth = AmplitudeVector::new(vec![0.5; cells.len()], cells).unwrap();
    let a = synthesize_observation(&truth, &cfg, 42).unwrap();
    let b = synthesize_observation(&truth, &cfg, 42).unwrap();
    let c = synthesize_observation(&truth, &cfg, 43).unwrap();
    assert_eq!(a.values, b.values);
    assert_ne!(a.values, c.values);
}

/// Monte Carlo error rate of both rules on one fixed pair against the
/// closed form.
#[test]
fn pairwise_errors_match_simulation() {
    let cfg = CameraConfig::default();
    let cells = visible_whole_cells(&cfg, 20.0, -10.0).unwrap();
    let n = cells.len();
    let g = gramian_weights(&cells, &cfg).unwrap();
    for (amp, seed) in [(0.8, 5u64), (1.5, 9)] {
        let mut rng = rng_from_seed(seed);
        let mut us = vec![0.0; n];
        let mut uh = vec![0.0; n];
        fill_rademacher(&mut rng, amp, &mut us);
        fill_rademacher(&mut rng, amp, &mut uh);
        let expected = pair_errors(&us, &uh, &g.g, snr_scale(&cfg)).unwrap();

        let u_star = AmplitudeVector::new(us.clone(), cells.clone()).unwrap();
        let cands = [u_star.clone(), AmplitudeVector::new(uh.clone(), cells.clone()).unwrap()];
        let trials = 100_000u64;
        let (mut wrong_ml, mut wrong_eu) = (0u64, 0u64);
        for t in 0..trials {
            let obs = synthesize_observation(&u_star, &cfg, 1_000_000 * seed + t).unwrap();
            wrong_ml += (ml_classify(&obs, &cands, &g).unwrap().best_index != 0) as u64;
            wrong_eu += (euclid_classify(&obs, &cands).unwrap().best_index != 0) as u64;
        }
        for (count, p) in [(wrong_ml, expected.generalized), (wrong_eu, expected.standard)] {
            let emp = count as f64 / trials as f64;
            let se = (p * (1.0 - p) / trials as f64).sqrt().max(1.0 / trials as f64);
            assert!((emp - p).abs() <= 3.0 * se, "amplitude {amp}: empirical {emp} vs analytic {p}");
        }
    }
}

#[test]
fn weighted_rule_never_loses_on_a_pair() {
    let cfg = CameraConfig::default();
    let cells = visible_whole_cells(&cfg, 20.0, -10.0).unwrap();
    let g = gramian_weights(&cells, &cfg).unwrap();
    let mut rng = rng_from_seed(77);
    let mut us = vec![0.0; cells.len()];
    let mut uh = vec![0.0; cells.len()];
    for _ in 0..2000 {
        fill_rademacher(&mut rng, 1.0, &mut us);
        fill_rademacher(&mut rng, 1.0, &mut uh);
        if us == uh {
            continue;
        }
        let e = pair_errors(&us, &uh, &g.g, snr_scale(&cfg)).unwrap();
        assert!(e.generalized <= e.standard * (1.0 + 1e-12));
    }
}

#[test]
fn classify_values_breaks_exact_ties_to_first() {
    let v = [0.0, 0.0];
    let a = [1.0, 0.0];
    let b = [0.0, 1.0];
    let r = classify_values(&v, &[&a, &b], None).unwrap();
    assert_eq!(r.best_index, 0);
    assert!(r.tie);
}
