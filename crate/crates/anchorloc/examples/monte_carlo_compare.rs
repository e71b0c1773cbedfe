//! Paired Monte-Carlo comparison of the two estimators on a scenario file.
//!
//! Loads a scenario (default: the heterogeneous 6 m / 3 m arrangement),
//! sweeps the RSSI noise levels from its noise section, and prints RMSE per
//! algorithm with the anchor-aware gain and the RMSE lower bound.
//!
//! ```bash
//! cargo run --release --example monte_carlo_compare
//! cargo run --release --example monte_carlo_compare -- scenarios/semicircle_fixed.toml 1000
//! ```

use std::path::{Path, PathBuf};

use anchorloc::config;
use anchorloc::simulator;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let path: PathBuf = args.get(1).map(PathBuf::from).unwrap_or_else(|| {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/arbitrary_hetero_6_3.toml")
    });
    let trials: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(300);
    let seed = 1;

    let loaded = config::load(&path).expect("scenario loads");
    let sweep = loaded
        .sigma_p_sweep
        .clone()
        .unwrap_or_else(|| vec![loaded.scenario.noise.sigma_p]);
    println!(
        "scenario {} ({} anchors), {trials} trials per cell, seed {seed}",
        loaded.scenario.id,
        loaded.scenario.anchor_count()
    );

    let cells = simulator::sweep(&loaded.scenario, &sweep, trials, seed).expect("runs");
    println!(
        "{:>12} {:>14} {:>14} {:>8} {:>10}",
        "sigma_p dBm", "aware rmse", "rssi rmse", "gain", "bound"
    );
    for cell in &cells {
        let aware = cell.anchor_aware.rmse_m;
        let rssi = cell.rssi_only.rmse_m;
        let bound = cell
            .crlb_m
            .map(|b| format!("{b:>10.3}"))
            .unwrap_or_else(|| format!("{:>10}", "-"));
        println!(
            "{:>12} {aware:>14.3} {rssi:>14.3} {:>7.1}% {bound}",
            cell.sigma_p_dbm,
            (rssi - aware) / rssi * 100.0
        );
    }
}
