//! Structural properties of the estimator and the sampling model.

use proptest::prelude::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use anchorloc::estimator::{self, AnchorReading, EstimatorConfig, Point, WeightModel};
use anchorloc::pathloss::{self, PathLossParams};

fn reference_params() -> PathLossParams {
    PathLossParams::new(1.0, -33.44, 3.567).unwrap()
}

fn traced_config() -> EstimatorConfig {
    let mut config = EstimatorConfig::new(0.02, reference_params());
    config.record_trace = true;
    config.stop_tol = 0.0;
    config.max_iters = 80;
    config
}

/// Deterministic readings derived from a proptest seed.
///
/// Noise levels and anchor distances are kept in the regime where the 0.02
/// step size is dynamically stable for both weightings: when the iteration
/// map is locally expanding, rounding differences between two algebraically
/// identical runs grow exponentially and no equivariance tolerance holds.
fn readings_from_seed(seed: u64) -> (Vec<AnchorReading>, Point) {
    let params = reference_params();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth = Point::new(rng.random_range(10.0..25.0), rng.random_range(10.0..25.0));
    let readings = (0..6)
        .map(|_| {
            let pos = loop {
                let p = Point::new(rng.random_range(0.0..35.0), rng.random_range(0.0..35.0));
                if truth.distance_to(p) > 8.0 {
                    break p;
                }
            };
            let sigma_a = rng.random_range(0.5..4.0);
            let sigma_p = rng.random_range(2.0..3.5);
            let noise: f64 = rng.sample(StandardNormal);
            let nx: f64 = rng.sample(StandardNormal);
            let ny: f64 = rng.sample(StandardNormal);
            AnchorReading {
                pos: Point::new(pos.x + sigma_a * nx, pos.y + sigma_a * ny),
                sigma_a,
                rssi_dbm: pathloss::mean_rssi_dbm(truth.distance_to(pos), &params).unwrap()
                    + sigma_p * noise,
                sigma_p,
            }
        })
        .collect();
    let init = Point::new(rng.random_range(1.0..34.0), rng.random_range(1.0..34.0));
    (readings, init)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Translating every reported position and the init translates every
    /// iterate (up to float rounding at the shifted magnitudes).
    #[test]
    fn translation_equivariance(seed in 0u64..1_000_000, tx in -8.0f64..8.0, ty in -8.0f64..8.0) {
        let (readings, init) = readings_from_seed(seed);
        let config = traced_config();
        let shifted: Vec<AnchorReading> = readings
            .iter()
            .map(|r| AnchorReading { pos: Point::new(r.pos.x + tx, r.pos.y + ty), ..*r })
            .collect();
        for model in [WeightModel::AnchorAware, WeightModel::RssiOnly] {
            let base = estimator::estimate_position(&readings, init, &config, model).unwrap();
            let moved = estimator::estimate_position(
                &shifted,
                Point::new(init.x + tx, init.y + ty),
                &config,
                model,
            )
            .unwrap();
            prop_assert_eq!(base.iterations_used, moved.iterations_used);
            let base_trace = base.trace.unwrap();
            let moved_trace = moved.trace.unwrap();
            for (a, b) in base_trace.iter().zip(&moved_trace) {
                prop_assert!((a.0.x + tx - b.0.x).abs() < 1e-9, "x drift {}", a.0.x + tx - b.0.x);
                prop_assert!((a.0.y + ty - b.0.y).abs() < 1e-9, "y drift {}", a.0.y + ty - b.0.y);
            }
        }
    }

    /// Rotating the reported positions about the init point rotates the
    /// final estimate (RSSI values are rotation-invariant).
    #[test]
    fn rotation_equivariance(seed in 0u64..1_000_000, angle in 0.05f64..6.2) {
        let (readings, init) = readings_from_seed(seed);
        let config = traced_config();
        let (s, c) = angle.sin_cos();
        let rotate = |p: Point| {
            let dx = p.x - init.x;
            let dy = p.y - init.y;
            Point::new(init.x + c * dx - s * dy, init.y + s * dx + c * dy)
        };
        let rotated: Vec<AnchorReading> = readings
            .iter()
            .map(|r| AnchorReading { pos: rotate(r.pos), ..*r })
            .collect();
        for model in [WeightModel::AnchorAware, WeightModel::RssiOnly] {
            let base = estimator::estimate_position(&readings, init, &config, model).unwrap();
            let moved = estimator::estimate_position(&rotated, init, &config, model).unwrap();
            prop_assert_eq!(base.iterations_used, moved.iterations_used);
            let want = rotate(base.position);
            let err = want.distance_to(moved.position);
            prop_assert!(err < 1e-9, "rotated-estimate mismatch {err}");
        }
    }
}

/// The sampling chain obeys the declared log-normal distance model: with
/// RSSI noise sigma_p, the log of the inverted distance is centered on the
/// true log-distance with spread sigma_d(sigma_p, eta).
#[test]
fn inverted_distance_is_lognormal_with_declared_spread() {
    let params = reference_params();
    let d_true = 12.0;
    let sigma_p = 2.0;
    let expected_spread = pathloss::sigma_d(sigma_p, params.eta);
    let mean_rssi = pathloss::mean_rssi_dbm(d_true, &params).unwrap();
    let n = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(515);
    let mut sum = 0.0;
    let mut sq_sum = 0.0;
    for _ in 0..n {
        let noise: f64 = rng.sample(StandardNormal);
        let d_tilde = pathloss::invert_rssi_to_distance(mean_rssi + sigma_p * noise, &params);
        let log_ratio = (d_tilde / d_true).ln();
        sum += log_ratio;
        sq_sum += log_ratio * log_ratio;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = sq_sum / nf - mean * mean;
    let se_mean = expected_spread / nf.sqrt();
    assert!(
        mean.abs() < 3.0 * se_mean,
        "log-ratio mean {mean}, se {se_mean}"
    );
    let rel_var = var / (expected_spread * expected_spread);
    assert!(
        (rel_var - 1.0).abs() < 0.02,
        "log-ratio variance ratio {rel_var}"
    );
}
