//! Emit the results CSV for a noise sweep, exactly as the `anchorloc run`
//! command would.
//!
//! ```bash
//! cargo run --release --example sweep_noise > results.csv
//! ```

use std::path::Path;

use anchorloc::config;
use anchorloc::report;
use anchorloc::simulator;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/semicircle_fixed.toml");
    let scenario = config::load_scenario(&path).expect("scenario loads");
    let seed = 1;
    let cells = simulator::sweep(&scenario, &[1.0, 2.0, 3.0, 4.0, 5.0], 300, seed).expect("runs");
    print!("{}", report::results_csv(&scenario.id, &cells, seed));
}
