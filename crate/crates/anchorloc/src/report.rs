//! CSV rendering of experiment results.
//!
//! One results row per `(algorithm, sigma_p)` cell, plus a two-column
//! histogram sidecar per cell and algorithm. All numeric fields are rendered
//! with six significant digits so repeated runs are byte-identical.

use crate::estimator::WeightModel;
use crate::simulator::{Histogram, SummaryStats};

/// Column contract of the results CSV.
pub const CSV_HEADER: &str =
    "scenario_id,algorithm,sigma_p_dbm,n_trials,rmse_m,mean_error_m,converged_frac,crlb_m,seed";

/// Header of every histogram sidecar file.
pub const HISTOGRAM_HEADER: &str = "bin_left_m,count";

/// Decimal rendering with `digits` significant digits (more for values so
/// large that rounding to them would need exponent notation).
pub fn format_significant(x: f64, digits: u32) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return format!("{:.*}", digits as usize - 1, 0.0);
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

fn float_field(x: f64) -> String {
    format_significant(x, 6)
}

/// Render the results table for one scenario: for each cell, one row per
/// algorithm (anchor-aware first). `crlb_m` is left empty when undefined.
pub fn results_csv(scenario_id: &str, cells: &[SummaryStats], seed: u64) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for cell in cells {
        for model in [WeightModel::AnchorAware, WeightModel::RssiOnly] {
            let stats = match model {
                WeightModel::AnchorAware => &cell.anchor_aware,
                WeightModel::RssiOnly => &cell.rssi_only,
            };
            let crlb = cell.crlb_m.map(float_field).unwrap_or_default();
            out.push_str(&format!(
                "{scenario_id},{},{},{},{},{},{},{crlb},{seed}\n",
                model.label(),
                float_field(cell.sigma_p_dbm),
                cell.n_trials,
                float_field(stats.rmse_m),
                float_field(stats.mean_error_m),
                float_field(stats.converged_fraction),
            ));
        }
    }
    out
}

/// Render one histogram sidecar: `bin_left_m,count` rows.
pub fn histogram_csv(histogram: &Histogram) -> String {
    let mut out = String::from(HISTOGRAM_HEADER);
    out.push('\n');
    for (i, count) in histogram.counts.iter().enumerate() {
        out.push_str(&format!("{},{count}\n", histogram.bin_left(i)));
    }
    out
}

/// File name for one cell's histogram sidecar.
pub fn histogram_filename(scenario_id: &str, sigma_p: f64, model: WeightModel) -> String {
    format!("{scenario_id}_sp{sigma_p}_{}.csv", model.label())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_rendering() {
        assert_eq!(format_significant(1.0541364, 6), "1.05414");
        assert_eq!(format_significant(359.96951, 6), "359.970");
        assert_eq!(format_significant(0.0043214999, 6), "0.00432150");
        assert_eq!(format_significant(2.0, 6), "2.00000");
        assert_eq!(format_significant(0.0, 6), "0.00000");
        assert_eq!(format_significant(1234567.0, 6), "1234567");
    }

    #[test]
    fn histogram_rows_render_bin_edges() {
        let mut h = Histogram::new();
        h.record(0.2);
        h.record(0.7);
        h.record(25.0);
        let text = histogram_csv(&h);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(HISTOGRAM_HEADER));
        assert_eq!(lines.next(), Some("0,1"));
        assert_eq!(lines.next(), Some("0.5,1"));
        assert!(text.ends_with("19.5,1\n"));
    }

    #[test]
    fn filenames_are_stable() {
        assert_eq!(
            histogram_filename("fig3", 2.0, WeightModel::AnchorAware),
            "fig3_sp2_anchor_aware.csv"
        );
        assert_eq!(
            histogram_filename("fig3", 2.5, WeightModel::RssiOnly),
            "fig3_sp2.5_rssi_only.csv"
        );
    }
}
