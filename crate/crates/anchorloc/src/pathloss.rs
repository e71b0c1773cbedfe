//! Log-normal shadowing path-loss model.
//!
//! Mean received power falls off as `10 * eta * log10(d / d0)` below the
//! reference power, and the dBm-scale measurement noise is Gaussian. Inverting
//! the mean curve at a noisy reading therefore yields a log-normally
//! distributed distance estimate; the helpers here expose both the inversion
//! and the moments of that distribution.

use std::f64::consts::LN_10;
use std::fmt;

/// Parameters of the log-distance shadowing model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossParams {
    /// Reference distance in meters (`> 0`).
    pub d0: f64,
    /// Received power at the reference distance, in dBm.
    pub p0_dbm: f64,
    /// Path-loss exponent (`> 0`).
    pub eta: f64,
}

impl PathLossParams {
    pub fn new(d0: f64, p0_dbm: f64, eta: f64) -> Result<Self, PathLossError> {
        let params = Self { d0, p0_dbm, eta };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), PathLossError> {
        if !self.d0.is_finite() || self.d0 <= 0.0 {
            return Err(PathLossError::InvalidReferenceDistance(self.d0));
        }
        if !self.eta.is_finite() || self.eta <= 0.0 {
            return Err(PathLossError::InvalidExponent(self.eta));
        }
        if !self.p0_dbm.is_finite() {
            return Err(PathLossError::InvalidReferencePower(self.p0_dbm));
        }
        Ok(())
    }
}

/// An RSSI-induced distance estimate together with its log-scale spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceEstimate {
    /// Distance obtained by inverting the mean path-loss curve, in meters.
    pub d_tilde: f64,
    /// Standard deviation of `ln(d_tilde / d)`, dimensionless.
    pub sigma_d: f64,
}

impl DistanceEstimate {
    /// Build the estimate for a dBm reading with known measurement spread.
    pub fn from_rssi(p_dbm: f64, sigma_p: f64, params: &PathLossParams) -> Self {
        Self {
            d_tilde: invert_rssi_to_distance(p_dbm, params),
            sigma_d: sigma_d(sigma_p, params.eta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathLossError {
    InvalidReferenceDistance(f64),
    InvalidExponent(f64),
    InvalidReferencePower(f64),
    NonPositiveDistance(f64),
}

impl fmt::Display for PathLossError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathLossError::InvalidReferenceDistance(d0) => {
                write!(f, "reference distance d0 must be positive, got {d0}")
            }
            PathLossError::InvalidExponent(eta) => {
                write!(f, "path-loss exponent eta must be positive, got {eta}")
            }
            PathLossError::InvalidReferencePower(p0) => {
                write!(f, "reference power p0_dbm must be finite, got {p0}")
            }
            PathLossError::NonPositiveDistance(d) => {
                write!(f, "distance must be positive, got {d}")
            }
        }
    }
}

impl std::error::Error for PathLossError {}

/// Mean received power at distance `d` in dBm:
/// `p0_dbm - 10 * eta * log10(d / d0)`.
pub fn mean_rssi_dbm(d: f64, params: &PathLossParams) -> Result<f64, PathLossError> {
    if d.is_nan() || d <= 0.0 {
        return Err(PathLossError::NonPositiveDistance(d));
    }
    Ok(params.p0_dbm - 10.0 * params.eta * (d / params.d0).log10())
}

/// Distance at which the mean path-loss curve gives the received power
/// `p_dbm`: `d0 * 10^((p0_dbm - p_dbm) / (10 eta))`.
///
/// Strictly decreasing in `p_dbm` — a stronger signal means a closer anchor —
/// and the exact inverse of [`mean_rssi_dbm`].
pub fn invert_rssi_to_distance(p_dbm: f64, params: &PathLossParams) -> f64 {
    params.d0 * 10f64.powf((params.p0_dbm - p_dbm) / (10.0 * params.eta))
}

/// Standard deviation of the natural-log distance error induced by a dBm
/// measurement spread of `sigma_p`: `(ln 10 / (10 eta)) * sigma_p`.
pub fn sigma_d(sigma_p: f64, eta: f64) -> f64 {
    LN_10 / (10.0 * eta) * sigma_p
}

/// Variance of a log-normal distance estimate around true distance `d`:
/// `d^2 * (exp(2 sigma_d^2) - exp(sigma_d^2))`.
pub fn lognormal_distance_variance(d: f64, sigma_d: f64) -> f64 {
    let s2 = sigma_d * sigma_d;
    d * d * ((2.0 * s2).exp() - s2.exp())
}
