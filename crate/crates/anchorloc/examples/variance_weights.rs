//! Inspect the residual-variance weights.
//!
//! Each anchor's squared residual is divided by an estimated variance with
//! two parts: the Rice-distribution variance of the distance to a
//! Gaussian-perturbed anchor, and the log-normal variance of the
//! RSSI-induced distance. This prints both parts over a grid so you can see
//! which noise source dominates where.
//!
//! ```bash
//! cargo run --example variance_weights
//! ```

use anchorloc::estimator::error_weight;
use anchorloc::pathloss::{lognormal_distance_variance, sigma_d};
use anchorloc::specfun::rice_variance;

fn main() {
    let eta = 3.567;

    println!("Rice variance of the distance to a perturbed anchor (m^2):");
    println!(
        "{:>10} {:>10} {:>10} {:>10}",
        "dist (m)", "sa=1", "sa=3", "sa=6"
    );
    for d in [0.0, 2.0, 5.0, 10.0, 20.0, 35.0] {
        println!(
            "{d:>10} {:>10.3} {:>10.3} {:>10.3}",
            rice_variance(d, 1.0),
            rice_variance(d, 3.0),
            rice_variance(d, 6.0)
        );
    }

    println!("\nLog-normal variance of the RSSI-induced distance (m^2):");
    println!(
        "{:>10} {:>10} {:>10} {:>10}",
        "dist (m)", "sp=1", "sp=2", "sp=5"
    );
    for d in [2.0, 5.0, 10.0, 20.0, 35.0] {
        println!(
            "{d:>10} {:>10.3} {:>10.3} {:>10.3}",
            lognormal_distance_variance(d, sigma_d(1.0, eta)),
            lognormal_distance_variance(d, sigma_d(2.0, eta)),
            lognormal_distance_variance(d, sigma_d(5.0, eta))
        );
    }

    println!("\nCombined weight at distance 10 m (rssi-induced distance 10 m):");
    for (sa, sp) in [(0.0, 2.0), (1.0, 2.0), (3.0, 2.0), (6.0, 2.0), (6.0, 0.5)] {
        let w = error_weight(10.0, 10.0, sa, sigma_d(sp, eta));
        println!("  sigma_a = {sa} m, sigma_p = {sp} dBm -> weight {w:.3} m^2");
    }
    println!("\nLarger weight = less influence on the position estimate.");
}
