//! Scenario description, noise sampling, and deterministic Monte-Carlo
//! trials.
//!
//! Every random draw flows from a per-trial ChaCha substream derived by
//! hashing `(master_seed, trial_index, stream_tag)`, so trials are
//! reproducible bit for bit, independent of execution order, and safe to run
//! in parallel. Within a trial both estimators consume identical readings and
//! the identical initial estimate — the comparison is paired by design.

use rayon::prelude::*;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::crlb::{self, NoiseSpec, ParameterVector};
use crate::estimator::{self, AnchorReading, EstimatorConfig, EstimatorError, Point, WeightModel};
use crate::pathloss::{self, PathLossError, PathLossParams};

/// Axis-aligned rectangle in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Self {
        Self {
            x_min,
            y_min,
            x_max,
            y_max,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.x_min.is_finite()
            && self.y_min.is_finite()
            && self.x_max.is_finite()
            && self.y_max.is_finite()
            && self.x_max >= self.x_min
            && self.y_max >= self.y_min
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x_min >= self.x_min
            && other.x_max <= self.x_max
            && other.y_min >= self.y_min
            && other.y_max <= self.y_max
    }

    /// Uniform draw; degenerate (zero-area) rectangles yield their corner.
    pub fn sample(&self, rng: &mut impl Rng) -> Point {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        Point::new(
            self.x_min + u * (self.x_max - self.x_min),
            self.y_min + v * (self.y_max - self.y_min),
        )
    }
}

/// One rectangle that receives `count` uniformly placed anchors per trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnchorRegion {
    pub rect: Rect,
    pub count: usize,
}

/// Where the anchors are.
#[derive(Debug, Clone, PartialEq)]
pub enum PlacementSpec {
    /// The same anchor positions in every trial.
    Fixed(Vec<Point>),
    /// Anchors re-drawn uniformly within their regions each trial.
    RegionRandom(Vec<AnchorRegion>),
}

impl PlacementSpec {
    pub fn anchor_count(&self) -> usize {
        match self {
            PlacementSpec::Fixed(points) => points.len(),
            PlacementSpec::RegionRandom(regions) => regions.iter().map(|r| r.count).sum(),
        }
    }
}

/// Per-anchor position-noise assignment.
#[derive(Debug, Clone, PartialEq)]
pub enum SigmaAField {
    /// One level everywhere.
    Homogeneous(f64),
    /// First region containing the anchor's true position wins; `default`
    /// applies outside all regions.
    PerRegion {
        regions: Vec<(Rect, f64)>,
        default: Option<f64>,
    },
}

impl SigmaAField {
    pub fn resolve(&self, pos: Point) -> Option<f64> {
        match self {
            SigmaAField::Homogeneous(s) => Some(*s),
            SigmaAField::PerRegion { regions, default } => regions
                .iter()
                .find(|(rect, _)| rect.contains(pos))
                .map(|(_, s)| *s)
                .or(*default),
        }
    }

    fn values(&self) -> Vec<f64> {
        match self {
            SigmaAField::Homogeneous(s) => vec![*s],
            SigmaAField::PerRegion { regions, default } => {
                let mut v: Vec<f64> = regions.iter().map(|(_, s)| *s).collect();
                if let Some(d) = default {
                    v.push(*d);
                }
                v
            }
        }
    }
}

/// Noise levels for one experiment cell.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseField {
    pub sigma_a: SigmaAField,
    /// Shared RSSI noise in dBm; this is the quantity swept by [`sweep`].
    pub sigma_p: f64,
}

/// Either a fixed point or a per-trial uniform draw from a rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointSpec {
    At(Point),
    Within(Rect),
}

impl PointSpec {
    fn realize(&self, rng: &mut impl Rng) -> Point {
        match self {
            PointSpec::At(p) => *p,
            PointSpec::Within(r) => r.sample(rng),
        }
    }

    fn inside(&self, world: &Rect) -> bool {
        match self {
            PointSpec::At(p) => world.contains(*p),
            PointSpec::Within(r) => world.contains_rect(r),
        }
    }
}

/// Complete declarative description of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub world: Rect,
    pub anchors: PlacementSpec,
    pub noise: NoiseField,
    pub blind_truth: PointSpec,
    pub init: PointSpec,
    /// Gradient-descent settings; `estimator.params` is the path-loss model
    /// shared by sampling, estimation, and the bound.
    pub estimator: EstimatorConfig,
}

impl Scenario {
    pub fn pathloss(&self) -> &PathLossParams {
        &self.estimator.params
    }

    pub fn anchor_count(&self) -> usize {
        self.anchors.anchor_count()
    }

    /// Same scenario at a different RSSI noise level.
    pub fn with_sigma_p(&self, sigma_p: f64) -> Scenario {
        let mut s = self.clone();
        s.noise.sigma_p = sigma_p;
        s
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let fail = |field: &str, message: String| {
            Err(ScenarioError {
                field: field.to_string(),
                message,
            })
        };
        if !self.world.is_valid() {
            return fail("world", format!("invalid rectangle {:?}", self.world));
        }
        if self.anchor_count() < 3 {
            return fail(
                "anchors",
                format!("need at least 3 anchors, got {}", self.anchor_count()),
            );
        }
        match &self.anchors {
            PlacementSpec::Fixed(points) => {
                for (i, p) in points.iter().enumerate() {
                    if !p.is_finite() || !self.world.contains(*p) {
                        return fail(
                            "anchors.fixed",
                            format!("anchor {i} at {p} is outside the world box"),
                        );
                    }
                    if self.noise.sigma_a.resolve(*p).is_none() {
                        return fail(
                            "noise.sigma_a",
                            format!("anchor {i} at {p} has no sigma_a assignment"),
                        );
                    }
                }
            }
            PlacementSpec::RegionRandom(regions) => {
                for (i, r) in regions.iter().enumerate() {
                    if !r.rect.is_valid() || !self.world.contains_rect(&r.rect) {
                        return fail(
                            "anchors.regions",
                            format!("region {i} is invalid or outside the world box"),
                        );
                    }
                    if r.count == 0 {
                        return fail(
                            "anchors.regions",
                            format!("region {i} has a zero anchor count"),
                        );
                    }
                    let covered = match &self.noise.sigma_a {
                        SigmaAField::Homogeneous(_) => true,
                        SigmaAField::PerRegion {
                            regions: noise_regions,
                            default,
                        } => {
                            default.is_some()
                                || noise_regions
                                    .iter()
                                    .any(|(rect, _)| rect.contains_rect(&r.rect))
                        }
                    };
                    if !covered {
                        return fail(
                            "noise.sigma_a",
                            format!("anchor region {i} is not covered by any sigma_a region and no default is set"),
                        );
                    }
                }
            }
        }
        for s in self.noise.sigma_a.values() {
            if !s.is_finite() || s < 0.0 {
                return fail(
                    "noise.sigma_a",
                    format!("sigma_a must be finite and >= 0, got {s}"),
                );
            }
        }
        if let SigmaAField::PerRegion { regions, .. } = &self.noise.sigma_a {
            for (i, (rect, _)) in regions.iter().enumerate() {
                if !rect.is_valid() {
                    return fail("noise.sigma_a", format!("sigma_a region {i} is invalid"));
                }
            }
        }
        if !self.noise.sigma_p.is_finite() || self.noise.sigma_p < 0.0 {
            return fail(
                "noise.sigma_p",
                format!(
                    "sigma_p must be finite and >= 0, got {}",
                    self.noise.sigma_p
                ),
            );
        }
        if !self.blind_truth.inside(&self.world) {
            return fail("blind.truth", "must lie inside the world box".to_string());
        }
        if !self.init.inside(&self.world) {
            return fail("blind.init", "must lie inside the world box".to_string());
        }
        if !self.estimator.step_size.is_finite() || self.estimator.step_size <= 0.0 {
            return fail(
                "estimator.step_size",
                format!("must be positive, got {}", self.estimator.step_size),
            );
        }
        if self.estimator.max_iters < 1 {
            return fail("estimator.max_iters", "must be at least 1".to_string());
        }
        if !self.estimator.stop_tol.is_finite() || self.estimator.stop_tol < 0.0 {
            return fail(
                "estimator.stop_tol",
                format!("must be finite and >= 0, got {}", self.estimator.stop_tol),
            );
        }
        if let Err(e) = self.estimator.params.validate() {
            return fail("pathloss", e.to_string());
        }
        Ok(())
    }
}

/// A violated scenario invariant, named after the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioError {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for ScenarioError {}

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    Scenario(ScenarioError),
    Estimator(EstimatorError),
    PathLoss(PathLossError),
    /// A sampled layout put an anchor exactly on the blind node.
    CoincidentAnchor {
        trial: u64,
        anchor: usize,
    },
}

impl std::fmt::Display for SimError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SimError::Scenario(e) => write!(f, "scenario: {e}"),
            SimError::Estimator(e) => write!(f, "estimator: {e}"),
            SimError::PathLoss(e) => write!(f, "path loss: {e}"),
            SimError::CoincidentAnchor { trial, anchor } => {
                write!(
                    f,
                    "trial {trial}: anchor {anchor} coincides with the blind node"
                )
            }
        }
    }
}

impl std::error::Error for SimError {}

impl From<ScenarioError> for SimError {
    fn from(e: ScenarioError) -> Self {
        SimError::Scenario(e)
    }
}

impl From<EstimatorError> for SimError {
    fn from(e: EstimatorError) -> Self {
        SimError::Estimator(e)
    }
}

impl From<PathLossError> for SimError {
    fn from(e: PathLossError) -> Self {
        SimError::PathLoss(e)
    }
}

// Stream tags for the per-trial RNG substreams.
const STREAM_PLACEMENT: u64 = 1;
const STREAM_BLIND: u64 = 2;
const STREAM_INIT: u64 = 3;
const STREAM_READINGS: u64 = 4;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic ChaCha substream for `(master_seed, trial_index, stream)`.
pub(crate) fn substream(master_seed: u64, trial_index: u64, stream: u64) -> ChaCha8Rng {
    let mut state = mix64(master_seed ^ 0x517C_C1B7_2722_0A95);
    state = mix64(state.wrapping_add(mix64(trial_index)));
    state = mix64(state.wrapping_add(mix64(stream)));
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        state = mix64(state.wrapping_add(0x9E37_79B9_7F4A_7C15));
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// Draw one anchor's reading: reported position = truth plus isotropic
/// `N(0, sigma_a)` noise, RSSI = mean path-loss value at the true distance
/// plus `N(0, sigma_p)` noise. All draws are independent.
pub fn sample_anchor_reading(
    true_pos: Point,
    sigma_a: f64,
    blind_true: Point,
    sigma_p: f64,
    params: &PathLossParams,
    rng: &mut impl Rng,
) -> Result<AnchorReading, PathLossError> {
    let mean = pathloss::mean_rssi_dbm(true_pos.distance_to(blind_true), params)?;
    let nx: f64 = rng.sample(StandardNormal);
    let ny: f64 = rng.sample(StandardNormal);
    let np: f64 = rng.sample(StandardNormal);
    Ok(AnchorReading {
        pos: Point::new(true_pos.x + sigma_a * nx, true_pos.y + sigma_a * ny),
        sigma_a,
        rssi_dbm: mean + sigma_p * np,
        sigma_p,
    })
}

/// Everything one trial runs on.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSetup {
    pub anchors_true: Vec<Point>,
    /// Position-noise level of each anchor, in placement order.
    pub sigma_a: Vec<f64>,
    pub blind_truth: Point,
    pub init: Point,
    pub readings: Vec<AnchorReading>,
}

/// Realize the trial layout and sample all readings, deterministically in
/// `(master_seed, trial_index)`.
pub fn instantiate(
    scenario: &Scenario,
    trial_index: u64,
    master_seed: u64,
) -> Result<TrialSetup, SimError> {
    let anchors_true = match &scenario.anchors {
        PlacementSpec::Fixed(points) => points.clone(),
        PlacementSpec::RegionRandom(regions) => {
            let mut rng = substream(master_seed, trial_index, STREAM_PLACEMENT);
            let mut points = Vec::with_capacity(scenario.anchor_count());
            for region in regions {
                for _ in 0..region.count {
                    points.push(region.rect.sample(&mut rng));
                }
            }
            points
        }
    };
    let blind_truth =
        scenario
            .blind_truth
            .realize(&mut substream(master_seed, trial_index, STREAM_BLIND));
    let init = scenario
        .init
        .realize(&mut substream(master_seed, trial_index, STREAM_INIT));

    let sigma_a: Vec<f64> = anchors_true
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            scenario.noise.sigma_a.resolve(p).ok_or_else(|| {
                SimError::Scenario(ScenarioError {
                    field: "noise.sigma_a".to_string(),
                    message: format!("anchor {i} at {p} has no sigma_a assignment"),
                })
            })
        })
        .collect::<Result<_, _>>()?;

    let mut rng = substream(master_seed, trial_index, STREAM_READINGS);
    let readings: Vec<AnchorReading> = anchors_true
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            sample_anchor_reading(
                p,
                sigma_a[i],
                blind_truth,
                scenario.noise.sigma_p,
                scenario.pathloss(),
                &mut rng,
            )
            .map_err(|_| SimError::CoincidentAnchor {
                trial: trial_index,
                anchor: i,
            })
        })
        .collect::<Result<_, _>>()?;

    Ok(TrialSetup {
        anchors_true,
        sigma_a,
        blind_truth,
        init,
        readings,
    })
}

/// One algorithm's result on one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgoTrialOutcome {
    pub estimate: Point,
    /// Euclidean distance between estimate and truth, meters.
    pub error_m: f64,
    pub iterations_used: u32,
    pub converged: bool,
}

/// Both algorithms run on identical inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial_index: u64,
    pub setup: TrialSetup,
    pub anchor_aware: AlgoTrialOutcome,
    pub rssi_only: AlgoTrialOutcome,
}

impl TrialResult {
    pub fn outcome(&self, model: WeightModel) -> &AlgoTrialOutcome {
        match model {
            WeightModel::AnchorAware => &self.anchor_aware,
            WeightModel::RssiOnly => &self.rssi_only,
        }
    }
}

fn run_model(
    setup: &TrialSetup,
    config: &EstimatorConfig,
    model: WeightModel,
) -> Result<AlgoTrialOutcome, EstimatorError> {
    let res = estimator::estimate_position(&setup.readings, setup.init, config, model)?;
    Ok(AlgoTrialOutcome {
        estimate: res.position,
        error_m: res.position.distance_to(setup.blind_truth),
        iterations_used: res.iterations_used,
        converged: res.converged,
    })
}

/// Instantiate one trial and run both estimators on it.
pub fn run_trial(
    scenario: &Scenario,
    trial_index: u64,
    master_seed: u64,
) -> Result<TrialResult, SimError> {
    let setup = instantiate(scenario, trial_index, master_seed)?;
    let anchor_aware = run_model(&setup, &scenario.estimator, WeightModel::AnchorAware)?;
    let rssi_only = run_model(&setup, &scenario.estimator, WeightModel::RssiOnly)?;
    Ok(TrialResult {
        trial_index,
        setup,
        anchor_aware,
        rssi_only,
    })
}

/// Histogram bin width in meters.
pub const HIST_BIN_WIDTH: f64 = 0.5;
/// Histogram upper edge in meters; larger errors land in the last bin.
pub const HIST_MAX: f64 = 20.0;

/// Fixed-bin error histogram on `[0, 20]` m with 0.5 m bins.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new() -> Self {
        Self {
            counts: vec![0; (HIST_MAX / HIST_BIN_WIDTH) as usize],
        }
    }

    pub fn record(&mut self, error_m: f64) {
        let last = self.counts.len() - 1;
        let idx = if error_m.is_finite() && error_m >= 0.0 {
            ((error_m / HIST_BIN_WIDTH) as usize).min(last)
        } else {
            last
        };
        self.counts[idx] += 1;
    }

    pub fn bin_left(&self, idx: usize) -> f64 {
        idx as f64 * HIST_BIN_WIDTH
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

impl Default for Histogram {
    fn default() -> Self {
        Self::new()
    }
}

/// Aggregate over trials for one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgoStats {
    pub rmse_m: f64,
    pub mean_error_m: f64,
    pub converged_fraction: f64,
    pub histogram: Histogram,
}

/// Aggregate over trials for one `(scenario, sigma_p)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub n_trials: u64,
    pub sigma_p_dbm: f64,
    pub anchor_aware: AlgoStats,
    pub rssi_only: AlgoStats,
    /// RMSE lower bound for the cell: evaluated at the true layout when the
    /// geometry is fixed, averaged over per-trial layouts otherwise. `None`
    /// whenever any noise level is zero (the bound is undefined there).
    pub crlb_m: Option<f64>,
}

fn aggregate(trials: &[TrialResult], model: WeightModel) -> AlgoStats {
    let n = trials.len() as f64;
    let mut sq_sum = 0.0;
    let mut sum = 0.0;
    let mut converged = 0u64;
    let mut histogram = Histogram::new();
    for t in trials {
        let o = t.outcome(model);
        sq_sum += o.error_m * o.error_m;
        sum += o.error_m;
        converged += o.converged as u64;
        histogram.record(o.error_m);
    }
    AlgoStats {
        rmse_m: (sq_sum / n).sqrt(),
        mean_error_m: sum / n,
        converged_fraction: converged as f64 / n,
        histogram,
    }
}

fn sigma_field_all_positive(scenario: &Scenario) -> bool {
    scenario.noise.sigma_p > 0.0 && scenario.noise.sigma_a.values().iter().all(|&s| s > 0.0)
}

/// RMSE lower bound at one realized layout, or `None` when it is undefined
/// there (zero noise, coincident or collinear geometry).
pub fn layout_bound(setup: &TrialSetup, sigma_p: f64, params: &PathLossParams) -> Option<f64> {
    let theta = ParameterVector::new(setup.blind_truth, setup.anchors_true.clone());
    let noise = NoiseSpec {
        sigma_a: setup.sigma_a.clone(),
        sigma_p: vec![sigma_p; setup.anchors_true.len()],
        params: *params,
    };
    crlb::rmse_lower_bound_at(&theta, &noise).ok()
}

fn cell_crlb(scenario: &Scenario, trials: &[TrialResult]) -> Option<f64> {
    if !sigma_field_all_positive(scenario) {
        return None;
    }
    let sigma_p = scenario.noise.sigma_p;
    let fixed_layout = matches!(scenario.anchors, PlacementSpec::Fixed(_))
        && matches!(scenario.blind_truth, PointSpec::At(_));
    if fixed_layout {
        return layout_bound(&trials.first()?.setup, sigma_p, scenario.pathloss());
    }
    // geometry varies per trial: average the per-trial bounds
    let bounds: Vec<f64> = trials
        .iter()
        .filter_map(|t| layout_bound(&t.setup, sigma_p, scenario.pathloss()))
        .collect();
    if bounds.is_empty() {
        None
    } else {
        Some(bounds.iter().sum::<f64>() / bounds.len() as f64)
    }
}

/// Run every trial (in parallel) and aggregate.
pub fn run_monte_carlo(
    scenario: &Scenario,
    n_trials: u64,
    master_seed: u64,
) -> Result<SummaryStats, SimError> {
    scenario.validate()?;
    let results: Vec<Result<TrialResult, SimError>> = (0..n_trials)
        .into_par_iter()
        .map(|trial| run_trial(scenario, trial, master_seed))
        .collect();
    let mut trials = Vec::with_capacity(n_trials as usize);
    for r in results {
        trials.push(r?);
    }
    let crlb_m = cell_crlb(scenario, &trials);
    Ok(SummaryStats {
        n_trials,
        sigma_p_dbm: scenario.noise.sigma_p,
        anchor_aware: aggregate(&trials, WeightModel::AnchorAware),
        rssi_only: aggregate(&trials, WeightModel::RssiOnly),
        crlb_m,
    })
}

/// One [`run_monte_carlo`] per RSSI noise level. Cell `k` is seeded with
/// `master_seed + k`, so a single-value sweep reproduces `run_monte_carlo`
/// exactly while distinct cells use unrelated substreams.
pub fn sweep(
    scenario: &Scenario,
    sigma_p_values: &[f64],
    n_trials: u64,
    master_seed: u64,
) -> Result<Vec<SummaryStats>, SimError> {
    sigma_p_values
        .iter()
        .enumerate()
        .map(|(k, &sigma_p)| {
            run_monte_carlo(
                &scenario.with_sigma_p(sigma_p),
                n_trials,
                master_seed.wrapping_add(k as u64),
            )
        })
        .collect()
}
