//! Weighted-least-squares position estimation by gradient descent.
//!
//! Each anchor contributes a squared residual between the distance to its
//! *reported* position and the distance inferred from its RSSI, divided by an
//! estimate of that residual's variance. Two weightings are provided:
//!
//! - [`WeightModel::AnchorAware`] — the variance combines the Rice-distributed
//!   spread of the distance to a Gaussian-perturbed anchor with the log-normal
//!   spread of the RSSI-induced distance;
//! - [`WeightModel::RssiOnly`] — only the log-normal RSSI term, i.e. the
//!   anchor positions are trusted exactly. This is the classic weighted
//!   circular-multilateration baseline.
//!
//! Weights are re-evaluated at the current iterate every iteration but are
//! treated as constants inside the gradient, so the gradient here is the
//! exact derivative of the *frozen-weight* cost.

use std::fmt;

use crate::pathloss::{self, DistanceEstimate, PathLossError, PathLossParams};
use crate::specfun;

/// Weights are clamped below by this value (m^2) so the noiseless case stays
/// well-posed: with zero noise every variance estimate collapses to zero and
/// the cost would divide by it.
pub const WEIGHT_FLOOR: f64 = 1e-9;

/// Anchors closer to the iterate than this (m) are skipped for the iteration;
/// the `1/distance` factor in the gradient is singular there.
pub const POSITION_EPS: f64 = 1e-9;

/// A 2-D Cartesian position in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_to(&self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.3}, {:.3})", self.x, self.y)
    }
}

/// What the blind node receives from one anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnchorReading {
    /// Reported (noise-corrupted) anchor position.
    pub pos: Point,
    /// Standard deviation of the anchor-position noise per axis, meters.
    pub sigma_a: f64,
    /// Measured received power, dBm.
    pub rssi_dbm: f64,
    /// Standard deviation of the dBm measurement noise.
    pub sigma_p: f64,
}

/// Which variance model weights the residuals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightModel {
    /// Anchor-position (Rice) term plus the RSSI-induced log-normal term.
    AnchorAware,
    /// RSSI-induced log-normal term only.
    RssiOnly,
}

impl WeightModel {
    /// Stable identifier used in CSV output and file names.
    pub fn label(&self) -> &'static str {
        match self {
            WeightModel::AnchorAware => "anchor_aware",
            WeightModel::RssiOnly => "rssi_only",
        }
    }
}

/// Gradient-descent settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    /// Step size of the descent, m^2 per unit gradient. No universal default
    /// exists; scenario files ship tuned values.
    pub step_size: f64,
    /// Iteration budget.
    pub max_iters: u32,
    /// Stop once the update step is shorter than this (m). Set to 0 to always
    /// run the full iteration budget.
    pub stop_tol: f64,
    /// Path-loss model used to invert RSSI readings.
    pub params: PathLossParams,
    /// Record `(position, cost)` after every iteration.
    pub record_trace: bool,
    /// Halve the step size after five consecutive cost increases. Off by
    /// default; plain gradient descent is the reference behavior.
    pub adaptive_halving: bool,
}

impl EstimatorConfig {
    pub fn new(step_size: f64, params: PathLossParams) -> Self {
        Self {
            step_size,
            max_iters: 300,
            stop_tol: 1e-4,
            params,
            record_trace: false,
            adaptive_halving: false,
        }
    }
}

/// Outcome of one estimation run.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub position: Point,
    /// Number of gradient steps actually performed (`<= max_iters`).
    pub iterations_used: u32,
    /// Whether the stop tolerance was met before the budget ran out.
    pub converged: bool,
    /// Per-iteration `(position, cost)` when requested via `record_trace`.
    pub trace: Option<Vec<(Point, f64)>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorError {
    /// Multilateration needs at least three anchors.
    TooFewAnchors {
        need: usize,
        have: usize,
    },
    /// Cost/gradient evaluation needs at least one reading.
    NoReadings,
    NonFiniteInit(Point),
    InvalidReading {
        index: usize,
        reason: &'static str,
    },
    PathLoss(PathLossError),
}

impl fmt::Display for EstimatorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorError::TooFewAnchors { need, have } => {
                write!(f, "need at least {need} anchor readings, got {have}")
            }
            EstimatorError::NoReadings => write!(f, "no anchor readings"),
            EstimatorError::NonFiniteInit(p) => {
                write!(f, "initial estimate has non-finite coordinates {p}")
            }
            EstimatorError::InvalidReading { index, reason } => {
                write!(f, "reading {index}: {reason}")
            }
            EstimatorError::PathLoss(e) => write!(f, "path-loss parameters: {e}"),
        }
    }
}

impl std::error::Error for EstimatorError {}

impl From<PathLossError> for EstimatorError {
    fn from(e: PathLossError) -> Self {
        EstimatorError::PathLoss(e)
    }
}

/// Variance estimate for one residual: Rice term for the perturbed anchor
/// distance `delta_bar` plus the log-normal term for the RSSI-induced
/// distance `d_tilde`, clamped below by [`WEIGHT_FLOOR`].
pub fn error_weight(delta_bar: f64, d_tilde: f64, sigma_a: f64, sigma_d: f64) -> f64 {
    let w = specfun::rice_variance(delta_bar, sigma_a)
        + pathloss::lognormal_distance_variance(d_tilde, sigma_d);
    w.max(WEIGHT_FLOOR)
}

/// One anchor with its iteration-independent pieces precomputed.
struct PreparedAnchor {
    pos: Point,
    sigma_a: f64,
    d_tilde: f64,
    /// Log-normal RSSI-distance variance; does not change across iterations
    /// because it is evaluated at `d_tilde`.
    rssi_var: f64,
}

impl PreparedAnchor {
    fn weight(&self, delta_bar: f64, model: WeightModel) -> f64 {
        let w = match model {
            WeightModel::AnchorAware => {
                specfun::rice_variance(delta_bar, self.sigma_a) + self.rssi_var
            }
            WeightModel::RssiOnly => self.rssi_var,
        };
        w.max(WEIGHT_FLOOR)
    }
}

fn prepare(
    readings: &[AnchorReading],
    params: &PathLossParams,
) -> Result<Vec<PreparedAnchor>, EstimatorError> {
    params.validate()?;
    readings
        .iter()
        .enumerate()
        .map(|(index, r)| {
            if !r.pos.is_finite() {
                return Err(EstimatorError::InvalidReading {
                    index,
                    reason: "non-finite reported position",
                });
            }
            if !r.sigma_a.is_finite() || r.sigma_a < 0.0 {
                return Err(EstimatorError::InvalidReading {
                    index,
                    reason: "sigma_a must be finite and non-negative",
                });
            }
            if !r.sigma_p.is_finite() || r.sigma_p < 0.0 {
                return Err(EstimatorError::InvalidReading {
                    index,
                    reason: "sigma_p must be finite and non-negative",
                });
            }
            if !r.rssi_dbm.is_finite() {
                return Err(EstimatorError::InvalidReading {
                    index,
                    reason: "non-finite rssi",
                });
            }
            let est = DistanceEstimate::from_rssi(r.rssi_dbm, r.sigma_p, params);
            if !est.d_tilde.is_finite() || est.d_tilde <= 0.0 {
                return Err(EstimatorError::InvalidReading {
                    index,
                    reason: "rssi implies a non-finite distance",
                });
            }
            Ok(PreparedAnchor {
                pos: r.pos,
                sigma_a: r.sigma_a,
                d_tilde: est.d_tilde,
                rssi_var: pathloss::lognormal_distance_variance(est.d_tilde, est.sigma_d),
            })
        })
        .collect()
}

fn cost_prepared(prep: &[PreparedAnchor], estimate: Point, model: WeightModel) -> f64 {
    prep.iter()
        .map(|a| {
            let delta_bar = estimate.distance_to(a.pos);
            let res = delta_bar - a.d_tilde;
            res * res / a.weight(delta_bar, model)
        })
        .sum()
}

fn gradient_prepared(prep: &[PreparedAnchor], estimate: Point, model: WeightModel) -> (f64, f64) {
    let mut gx = 0.0;
    let mut gy = 0.0;
    for a in prep {
        let dx = a.pos.x - estimate.x;
        let dy = a.pos.y - estimate.y;
        let delta_bar = dx.hypot(dy);
        if delta_bar < POSITION_EPS {
            continue;
        }
        let w = a.weight(delta_bar, model);
        let common = -2.0 * (delta_bar - a.d_tilde) / (w * delta_bar);
        gx += common * dx;
        gy += common * dy;
    }
    (gx, gy)
}

/// Weighted sum of squared residuals at `estimate`, weights evaluated there.
pub fn cost(
    estimate: Point,
    readings: &[AnchorReading],
    config: &EstimatorConfig,
    model: WeightModel,
) -> Result<f64, EstimatorError> {
    if readings.is_empty() {
        return Err(EstimatorError::NoReadings);
    }
    let prep = prepare(readings, &config.params)?;
    Ok(cost_prepared(&prep, estimate, model))
}

/// The per-anchor weights at `estimate`, in reading order.
pub fn weights_at(
    estimate: Point,
    readings: &[AnchorReading],
    config: &EstimatorConfig,
    model: WeightModel,
) -> Result<Vec<f64>, EstimatorError> {
    if readings.is_empty() {
        return Err(EstimatorError::NoReadings);
    }
    let prep = prepare(readings, &config.params)?;
    Ok(prep
        .iter()
        .map(|a| a.weight(estimate.distance_to(a.pos), model))
        .collect())
}

/// The cost with externally supplied (frozen) weights. [`gradient`] is the
/// exact derivative of this quantity when `weights` are taken at the same
/// point.
pub fn cost_frozen(
    estimate: Point,
    readings: &[AnchorReading],
    config: &EstimatorConfig,
    weights: &[f64],
) -> Result<f64, EstimatorError> {
    if readings.is_empty() {
        return Err(EstimatorError::NoReadings);
    }
    if weights.len() != readings.len() {
        return Err(EstimatorError::InvalidReading {
            index: weights.len(),
            reason: "weight count does not match reading count",
        });
    }
    let prep = prepare(readings, &config.params)?;
    Ok(prep
        .iter()
        .zip(weights)
        .map(|(a, &w)| {
            let res = estimate.distance_to(a.pos) - a.d_tilde;
            res * res / w
        })
        .sum())
}

/// Gradient of the frozen-weight cost at `estimate`, with the weights
/// themselves evaluated at `estimate`.
///
/// Anchors within [`POSITION_EPS`] of the estimate are skipped: the
/// `1/distance` factor is singular there.
pub fn gradient(
    estimate: Point,
    readings: &[AnchorReading],
    config: &EstimatorConfig,
    model: WeightModel,
) -> Result<(f64, f64), EstimatorError> {
    if readings.is_empty() {
        return Err(EstimatorError::NoReadings);
    }
    let prep = prepare(readings, &config.params)?;
    Ok(gradient_prepared(&prep, estimate, model))
}

/// Run gradient descent from `init` under the given weight model.
pub fn estimate_position(
    readings: &[AnchorReading],
    init: Point,
    config: &EstimatorConfig,
    model: WeightModel,
) -> Result<EstimateResult, EstimatorError> {
    if readings.len() < 3 {
        return Err(EstimatorError::TooFewAnchors {
            need: 3,
            have: readings.len(),
        });
    }
    if !init.is_finite() {
        return Err(EstimatorError::NonFiniteInit(init));
    }
    let prep = prepare(readings, &config.params)?;

    let mut pos = init;
    let mut step_size = config.step_size;
    let mut trace = config.record_trace.then(Vec::new);
    let mut converged = false;
    let mut iterations_used = 0;
    let mut last_cost = f64::INFINITY;
    let mut rising = 0u32;

    for k in 1..=config.max_iters {
        let (gx, gy) = gradient_prepared(&prep, pos, model);
        let next = Point::new(pos.x - step_size * gx, pos.y - step_size * gy);
        let step_len = next.distance_to(pos);
        pos = next;
        iterations_used = k;

        if trace.is_some() || config.adaptive_halving {
            let c = cost_prepared(&prep, pos, model);
            if let Some(t) = trace.as_mut() {
                t.push((pos, c));
            }
            if config.adaptive_halving {
                if c > last_cost {
                    rising += 1;
                    if rising >= 5 {
                        step_size *= 0.5;
                        rising = 0;
                    }
                } else {
                    rising = 0;
                }
                last_cost = c;
            }
        }

        if !pos.is_finite() {
            break;
        }
        if step_len < config.stop_tol {
            converged = true;
            break;
        }
    }

    Ok(EstimateResult {
        position: pos,
        iterations_used,
        converged,
        trace,
    })
}

/// The estimator whose weights account for anchor-position noise in addition
/// to RSSI noise.
pub fn estimate_position_anchor_aware(
    readings: &[AnchorReading],
    init: Point,
    config: &EstimatorConfig,
) -> Result<EstimateResult, EstimatorError> {
    estimate_position(readings, init, config, WeightModel::AnchorAware)
}

/// The RSSI-only-weighted estimator used as the comparison baseline.
pub fn estimate_position_rssi_only(
    readings: &[AnchorReading],
    init: Point,
    config: &EstimatorConfig,
) -> Result<EstimateResult, EstimatorError> {
    estimate_position(readings, init, config, WeightModel::RssiOnly)
}
