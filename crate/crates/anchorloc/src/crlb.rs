//! Fisher information and the lower bound on localization RMSE.
//!
//! The observation model per anchor is: reported position = true position
//! plus isotropic Gaussian noise, and RSSI in dBm = mean path-loss value plus
//! Gaussian noise. The unknown parameter vector stacks the blind-node
//! position with the true anchor positions as nuisance parameters, ordered
//! `[x_b, y_b, x_1, y_1, ..., x_M, y_M]`.
//!
//! The information matrix is assembled from closed forms
//! ([`fisher_information`]); the analytic Hessian of the log-likelihood
//! ([`log_likelihood_hessian`]) exists purely as a verification oracle — the
//! two are derived independently and the test suite checks that the negated
//! expected Hessian reproduces the closed forms.

use std::f64::consts::{LN_10, PI};
use std::fmt;

use crate::estimator::Point;
use crate::pathloss::{self, PathLossError, PathLossParams};

/// 2x2 matrix in row-major order.
pub type Mat2 = [[f64; 2]; 2];

/// Unknowns: the blind-node position plus the true anchor positions.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector {
    pub blind: Point,
    pub anchors_true: Vec<Point>,
}

impl ParameterVector {
    pub fn new(blind: Point, anchors_true: Vec<Point>) -> Self {
        Self {
            blind,
            anchors_true,
        }
    }

    pub fn num_anchors(&self) -> usize {
        self.anchors_true.len()
    }
}

/// One anchor's contribution to the observation vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnchorObservation {
    pub rssi_dbm: f64,
    pub reported: Point,
}

/// Per-anchor noise levels plus the shared path-loss model.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    /// Anchor-position noise per axis, meters; strictly positive.
    pub sigma_a: Vec<f64>,
    /// RSSI noise in dBm; strictly positive.
    pub sigma_p: Vec<f64>,
    pub params: PathLossParams,
}

impl NoiseSpec {
    /// Same noise level for every one of `m` anchors.
    pub fn homogeneous(m: usize, sigma_a: f64, sigma_p: f64, params: PathLossParams) -> Self {
        Self {
            sigma_a: vec![sigma_a; m],
            sigma_p: vec![sigma_p; m],
            params,
        }
    }
}

/// The partitioned Fisher information matrix.
///
/// `f11` is the 2x2 blind-position block; `f12_blocks[i]` is the 2x2 coupling
/// of the blind position to anchor `i` (the full F12 is these side by side);
/// `f22_blocks[i]` is anchor `i`'s diagonal block of the block-diagonal F22.
#[derive(Debug, Clone, PartialEq)]
pub struct FimBlocks {
    pub f11: Mat2,
    pub f12_blocks: Vec<Mat2>,
    pub f22_blocks: Vec<Mat2>,
}

impl FimBlocks {
    pub fn num_anchors(&self) -> usize {
        self.f22_blocks.len()
    }

    /// The full `(2M+2) x (2M+2)` matrix, for verification against the
    /// sampled Hessian and for dense-inversion cross-checks.
    #[allow(clippy::needless_range_loop)]
    pub fn assemble_dense(&self) -> Vec<Vec<f64>> {
        let m = self.num_anchors();
        let n = 2 * m + 2;
        let mut f = vec![vec![0.0; n]; n];
        for r in 0..2 {
            for c in 0..2 {
                f[r][c] = self.f11[r][c];
            }
        }
        for (i, block) in self.f12_blocks.iter().enumerate() {
            let off = 2 + 2 * i;
            for r in 0..2 {
                for c in 0..2 {
                    f[r][off + c] = block[r][c];
                    f[off + c][r] = block[r][c];
                }
            }
        }
        for (i, block) in self.f22_blocks.iter().enumerate() {
            let off = 2 + 2 * i;
            for r in 0..2 {
                for c in 0..2 {
                    f[off + r][off + c] = block[r][c];
                }
            }
        }
        f
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CrlbError {
    EmptyGeometry,
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// Blind node coincides with a true anchor position.
    DegenerateDistance {
        index: usize,
    },
    /// Noise standard deviations must be strictly positive here.
    NonPositiveSigma {
        which: &'static str,
        index: usize,
    },
    NonFiniteObservation {
        index: usize,
    },
    /// The effective 2x2 information about the blind position is numerically
    /// singular (condition number above 1e12), e.g. all anchors collinear
    /// with the blind node.
    SingularGeometry {
        cond: f64,
    },
    PathLoss(PathLossError),
}

impl fmt::Display for CrlbError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrlbError::EmptyGeometry => write!(f, "at least one anchor is required"),
            CrlbError::LengthMismatch {
                what,
                expected,
                got,
            } => {
                write!(f, "{what}: expected length {expected}, got {got}")
            }
            CrlbError::DegenerateDistance { index } => {
                write!(f, "anchor {index} coincides with the blind position")
            }
            CrlbError::NonPositiveSigma { which, index } => {
                write!(f, "{which} for anchor {index} must be strictly positive")
            }
            CrlbError::NonFiniteObservation { index } => {
                write!(f, "observation {index} is not finite")
            }
            CrlbError::SingularGeometry { cond } => {
                write!(f, "singular geometry (condition number {cond:.3e})")
            }
            CrlbError::PathLoss(e) => write!(f, "path-loss parameters: {e}"),
        }
    }
}

impl std::error::Error for CrlbError {}

impl From<PathLossError> for CrlbError {
    fn from(e: PathLossError) -> Self {
        CrlbError::PathLoss(e)
    }
}

/// `(10 eta / (sigma_p ln 10))^2` — the precision of the RSSI-induced
/// log-distance ratio. Equal to `1 / sigma_d^2`.
pub fn precision_factor(sigma_p: f64, eta: f64) -> f64 {
    let b = 10.0 * eta / (sigma_p * LN_10);
    b * b
}

/// Condition-number ceiling beyond which the Schur complement is treated as
/// singular.
const MAX_CONDITION: f64 = 1e12;

struct AnchorGeometry {
    dx: f64,
    dy: f64,
    d2: f64,
    b: f64,
    sigma_a: f64,
}

fn check_noise(theta: &ParameterVector, noise: &NoiseSpec) -> Result<(), CrlbError> {
    let m = theta.num_anchors();
    if m == 0 {
        return Err(CrlbError::EmptyGeometry);
    }
    if noise.sigma_a.len() != m {
        return Err(CrlbError::LengthMismatch {
            what: "sigma_a",
            expected: m,
            got: noise.sigma_a.len(),
        });
    }
    if noise.sigma_p.len() != m {
        return Err(CrlbError::LengthMismatch {
            what: "sigma_p",
            expected: m,
            got: noise.sigma_p.len(),
        });
    }
    noise.params.validate()?;
    for (i, &s) in noise.sigma_a.iter().enumerate() {
        if !s.is_finite() || s <= 0.0 {
            return Err(CrlbError::NonPositiveSigma {
                which: "sigma_a",
                index: i,
            });
        }
    }
    for (i, &s) in noise.sigma_p.iter().enumerate() {
        if !s.is_finite() || s <= 0.0 {
            return Err(CrlbError::NonPositiveSigma {
                which: "sigma_p",
                index: i,
            });
        }
    }
    Ok(())
}

fn geometry(theta: &ParameterVector, noise: &NoiseSpec) -> Result<Vec<AnchorGeometry>, CrlbError> {
    check_noise(theta, noise)?;
    theta
        .anchors_true
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let dx = a.x - theta.blind.x;
            let dy = a.y - theta.blind.y;
            let d2 = dx * dx + dy * dy;
            if d2.is_nan() || d2 <= 0.0 {
                return Err(CrlbError::DegenerateDistance { index: i });
            }
            Ok(AnchorGeometry {
                dx,
                dy,
                d2,
                b: precision_factor(noise.sigma_p[i], noise.params.eta),
                sigma_a: noise.sigma_a[i],
            })
        })
        .collect()
}

fn check_observations(obs: &[AnchorObservation], m: usize) -> Result<(), CrlbError> {
    if obs.len() != m {
        return Err(CrlbError::LengthMismatch {
            what: "observations",
            expected: m,
            got: obs.len(),
        });
    }
    for (i, o) in obs.iter().enumerate() {
        if !o.rssi_dbm.is_finite() || !o.reported.is_finite() {
            return Err(CrlbError::NonFiniteObservation { index: i });
        }
    }
    Ok(())
}

/// Log-likelihood of the parameters given one observation per anchor.
///
/// The RSSI term is written through the squared-log distance ratio,
/// `-(b/8) ln^2(d^2 / d_tilde^2)`, which is the dBm-domain Gaussian density
/// expressed in distance form; the position terms are plain Gaussians.
pub fn log_likelihood(
    theta: &ParameterVector,
    obs: &[AnchorObservation],
    noise: &NoiseSpec,
) -> Result<f64, CrlbError> {
    let geo = geometry(theta, noise)?;
    check_observations(obs, geo.len())?;
    let mut ll = 0.0;
    for (i, g) in geo.iter().enumerate() {
        let o = &obs[i];
        let d_tilde = pathloss::invert_rssi_to_distance(o.rssi_dbm, &noise.params);
        let log_ratio = (g.d2 / (d_tilde * d_tilde)).ln();
        ll += -0.5 * (2.0 * PI * noise.sigma_p[i] * noise.sigma_p[i]).ln()
            - g.b / 8.0 * log_ratio * log_ratio;
        let var_a = g.sigma_a * g.sigma_a;
        let rx = o.reported.x - theta.anchors_true[i].x;
        let ry = o.reported.y - theta.anchors_true[i].y;
        ll += -(2.0 * PI * var_a).ln() - (rx * rx + ry * ry) / (2.0 * var_a);
    }
    Ok(ll)
}

/// Analytic Hessian of [`log_likelihood`] with respect to the parameter
/// vector, in the `[x_b, y_b, x_1, y_1, ...]` ordering.
///
/// Exactly symmetric by construction, with exact zeros between different
/// anchors' blocks.
#[allow(clippy::needless_range_loop)]
pub fn log_likelihood_hessian(
    theta: &ParameterVector,
    obs: &[AnchorObservation],
    noise: &NoiseSpec,
) -> Result<Vec<Vec<f64>>, CrlbError> {
    let geo = geometry(theta, noise)?;
    check_observations(obs, geo.len())?;
    let m = geo.len();
    let n = 2 * m + 2;
    let mut h = vec![vec![0.0; n]; n];

    let set = |h: &mut Vec<Vec<f64>>, r: usize, c: usize, v: f64| {
        h[r][c] = v;
        h[c][r] = v;
    };

    for (i, g) in geo.iter().enumerate() {
        let d_tilde = pathloss::invert_rssi_to_distance(obs[i].rssi_dbm, &noise.params);
        let log_ratio = (g.d2 / (d_tilde * d_tilde)).ln();
        let d4 = g.d2 * g.d2;
        let half_inv_d2 = 0.5 / g.d2;

        // second derivatives of the RSSI term w.r.t. the blind coordinates;
        // by symmetry of d in (blind, anchor) the same quantities carry over
        // to the anchor coordinates with sign flips.
        let axx = -g.b * g.dx * g.dx / d4 + g.b * log_ratio * (g.dx * g.dx / d4 - half_inv_d2);
        let ayy = -g.b * g.dy * g.dy / d4 + g.b * log_ratio * (g.dy * g.dy / d4 - half_inv_d2);
        let axy = g.b * g.dx * g.dy / d4 * (log_ratio - 1.0);

        let xi = 2 + 2 * i;
        let yi = xi + 1;
        let inv_var_a = 1.0 / (g.sigma_a * g.sigma_a);

        h[0][0] += axx;
        h[1][1] += ayy;
        h[0][1] += axy;

        set(&mut h, 0, xi, -axx);
        set(&mut h, 1, yi, -ayy);
        set(&mut h, 0, yi, -axy);
        set(&mut h, 1, xi, -axy);

        set(&mut h, xi, xi, axx - inv_var_a);
        set(&mut h, yi, yi, ayy - inv_var_a);
        set(&mut h, xi, yi, axy);
    }
    h[1][0] = h[0][1];
    Ok(h)
}

/// Fisher information blocks at the true geometry.
///
/// `F11 = sum_i (b_i / d_i^4) Q_i`, `F12_i = -(b_i / d_i^4) Q_i`,
/// `F22_i = (b_i / d_i^4) Q_i + I / sigma_a_i^2`, where `Q_i` is the
/// outer-product block of the anchor offset from the blind node.
pub fn fisher_information(
    theta: &ParameterVector,
    noise: &NoiseSpec,
) -> Result<FimBlocks, CrlbError> {
    let geo = geometry(theta, noise)?;
    let mut f11 = [[0.0; 2]; 2];
    let mut f12_blocks = Vec::with_capacity(geo.len());
    let mut f22_blocks = Vec::with_capacity(geo.len());
    for g in &geo {
        let d4 = g.d2 * g.d2;
        let s = g.b / d4;
        let q = [
            [s * g.dx * g.dx, s * g.dx * g.dy],
            [s * g.dx * g.dy, s * g.dy * g.dy],
        ];
        for r in 0..2 {
            for c in 0..2 {
                f11[r][c] += q[r][c];
            }
        }
        f12_blocks.push([[-q[0][0], -q[0][1]], [-q[1][0], -q[1][1]]]);
        let inv_var_a = 1.0 / (g.sigma_a * g.sigma_a);
        f22_blocks.push([
            [q[0][0] + inv_var_a, q[0][1]],
            [q[1][0], q[1][1] + inv_var_a],
        ]);
    }
    Ok(FimBlocks {
        f11,
        f12_blocks,
        f22_blocks,
    })
}

fn mat2_mul(a: Mat2, b: Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn mat2_det(a: Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

fn mat2_inv(a: Mat2) -> Option<Mat2> {
    let det = mat2_det(a);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let inv = 1.0 / det;
    Some([
        [a[1][1] * inv, -a[0][1] * inv],
        [-a[1][0] * inv, a[0][0] * inv],
    ])
}

/// Condition number of a symmetric positive 2x2 matrix; infinity when it is
/// not positive definite.
fn sym2_condition(a: Mat2) -> f64 {
    let tr = a[0][0] + a[1][1];
    let det = mat2_det(a);
    if det <= 0.0 || tr <= 0.0 {
        return f64::INFINITY;
    }
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    let lo = 0.5 * (tr - disc);
    let hi = 0.5 * (tr + disc);
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Lower bound, in meters, on the RMSE of any unbiased estimate of the blind
/// position: `sqrt(trace((F11 - F12 F22^-1 F12^T)^-1))`.
///
/// `F22^-1` is applied block by block (2x2 adjugate inversions), so the whole
/// computation is linear in the anchor count.
pub fn rmse_lower_bound(blocks: &FimBlocks) -> Result<f64, CrlbError> {
    let mut schur = blocks.f11;
    for (f12, f22) in blocks.f12_blocks.iter().zip(&blocks.f22_blocks) {
        let inv = mat2_inv(*f22).ok_or(CrlbError::SingularGeometry {
            cond: f64::INFINITY,
        })?;
        let corr = mat2_mul(mat2_mul(*f12, inv), *f12);
        for r in 0..2 {
            for c in 0..2 {
                schur[r][c] -= corr[r][c];
            }
        }
    }
    let cond = sym2_condition(schur);
    if cond > MAX_CONDITION {
        return Err(CrlbError::SingularGeometry { cond });
    }
    // trace(S^-1) = trace(adj(S)) / det(S) for 2x2
    let trace_inv = (schur[0][0] + schur[1][1]) / mat2_det(schur);
    Ok(trace_inv.sqrt())
}

/// Convenience: the bound straight from a geometry and noise description.
pub fn rmse_lower_bound_at(theta: &ParameterVector, noise: &NoiseSpec) -> Result<f64, CrlbError> {
    rmse_lower_bound(&fisher_information(theta, noise)?)
}
