//! RMSE lower bound on a symmetric ring of anchors.
//!
//! Six anchors sit on a radius-10 circle around the blind node. With
//! near-zero anchor-position noise the bound collapses to the closed form
//! `2 d / sqrt(b M)`; with real anchor noise it loosens. The table sweeps
//! the RSSI noise for both cases.
//!
//! ```bash
//! cargo run --example bound_ring
//! ```

use anchorloc::crlb::{precision_factor, rmse_lower_bound_at, NoiseSpec, ParameterVector};
use anchorloc::estimator::Point;
use anchorloc::pathloss::PathLossParams;

fn main() {
    let params = PathLossParams::new(1.0, -33.44, 3.567).unwrap();
    let m = 6;
    let radius = 10.0;
    let blind = Point::new(17.0, 17.0);
    let anchors: Vec<Point> = (0..m)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            Point::new(blind.x + radius * ang.cos(), blind.y + radius * ang.sin())
        })
        .collect();
    let theta = ParameterVector::new(blind, anchors);

    println!("ring of {m} anchors, radius {radius} m");
    println!(
        "{:>12} {:>16} {:>16} {:>16}",
        "sigma_p dBm", "bound sa~0 (m)", "closed form (m)", "bound sa=3 (m)"
    );
    for sigma_p in [0.5, 1.0, 2.0, 3.0, 5.0] {
        let near_zero =
            rmse_lower_bound_at(&theta, &NoiseSpec::homogeneous(m, 1e-6, sigma_p, params)).unwrap();
        let with_noise =
            rmse_lower_bound_at(&theta, &NoiseSpec::homogeneous(m, 3.0, sigma_p, params)).unwrap();
        let closed_form = 2.0 * radius / (precision_factor(sigma_p, params.eta) * m as f64).sqrt();
        println!("{sigma_p:>12} {near_zero:>16.4} {closed_form:>16.4} {with_noise:>16.4}");
    }
}
