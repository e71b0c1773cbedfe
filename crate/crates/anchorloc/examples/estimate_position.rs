//! Locate a blind node from six noisy anchor readings.
//!
//! Synthesizes one set of readings (perturbed anchor positions plus noisy
//! RSSI), then runs the anchor-aware estimator and the RSSI-only-weighted
//! baseline from the same distant initial guess.
//!
//! ```bash
//! cargo run --example estimate_position
//! ```

use anchorloc::estimator::{
    estimate_position_anchor_aware, estimate_position_rssi_only, EstimatorConfig, Point,
};
use anchorloc::pathloss::PathLossParams;
use anchorloc::simulator::sample_anchor_reading;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let params = PathLossParams::new(1.0, -33.44, 3.567).unwrap();
    let truth = Point::new(14.0, 16.0);
    let anchors = [
        (Point::new(4.0, 5.0), 4.0),
        (Point::new(28.0, 3.0), 1.0),
        (Point::new(33.0, 18.0), 1.0),
        (Point::new(25.0, 31.0), 2.0),
        (Point::new(8.0, 29.0), 5.0),
        (Point::new(2.0, 15.0), 5.0),
    ];
    let sigma_p = 2.0;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let readings: Vec<_> = anchors
        .iter()
        .map(|&(pos, sigma_a)| {
            sample_anchor_reading(pos, sigma_a, truth, sigma_p, &params, &mut rng).unwrap()
        })
        .collect();

    println!("true position: {truth}");
    for (r, &(pos, _)) in readings.iter().zip(&anchors) {
        println!(
            "anchor truly at {pos}, reported {} (sigma_a {} m), rssi {:.1} dBm",
            r.pos, r.sigma_a, r.rssi_dbm
        );
    }

    let mut config = EstimatorConfig::new(0.05, params);
    config.stop_tol = 1e-5;
    let init = Point::new(33.0, 33.0);

    let aware = estimate_position_anchor_aware(&readings, init, &config).unwrap();
    let rssi = estimate_position_rssi_only(&readings, init, &config).unwrap();

    println!("\ninit {init}, {} iterations allowed", config.max_iters);
    println!(
        "anchor-aware weighting: {} ({:.2} m off, {} iterations, converged {})",
        aware.position,
        aware.position.distance_to(truth),
        aware.iterations_used,
        aware.converged
    );
    println!(
        "rssi-only weighting:    {} ({:.2} m off, {} iterations, converged {})",
        rssi.position,
        rssi.position.distance_to(truth),
        rssi.iterations_used,
        rssi.converged
    );
}
