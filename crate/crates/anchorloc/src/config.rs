//! TOML scenario files.
//!
//! A scenario document names the world box, the path-loss model, anchor
//! placement (a fixed list or regions with counts), the blind node's truth
//! and initial estimate (points or regions), noise levels, and the estimator
//! settings. Everything except anchors, blind, and the step size has
//! defaults; the step size must be tuned per scenario and therefore has none.
//!
//! ```toml
//! id = "demo"
//!
//! [anchors]
//! fixed = [[3.0, 3.0], [32.0, 4.0], [30.0, 31.0], [4.0, 29.0], [17.0, 2.0], [16.0, 33.0]]
//!
//! [blind]
//! truth = [14.0, 15.0]
//! init = [33.0, 33.0]
//!
//! [noise]
//! sigma_a = 1.0
//! sigma_p = 2.0
//!
//! [estimator]
//! step_size = 0.5
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::estimator::{EstimatorConfig, Point};
use crate::pathloss::PathLossParams;
use crate::simulator::{
    AnchorRegion, NoiseField, PlacementSpec, PointSpec, Rect, Scenario, SigmaAField,
};

/// Reference distance of the default path-loss model, meters.
pub const DEFAULT_D0: f64 = 1.0;
/// Received power at the reference distance of the default model, dBm.
pub const DEFAULT_P0_DBM: f64 = -33.44;
/// Path-loss exponent of the default model.
pub const DEFAULT_ETA: f64 = 3.567;
/// Default iteration budget.
pub const DEFAULT_MAX_ITERS: u32 = 300;
/// Default stop tolerance on the update step length, meters.
pub const DEFAULT_STOP_TOL: f64 = 1e-4;

#[derive(Debug)]
pub enum ConfigError {
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// TOML syntax or type error; the message carries line/column context.
    Parse { path: PathBuf, message: String },
    /// A structurally valid document that violates a scenario invariant.
    Validation { field: String, message: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, source } => {
                write!(f, "{}: {source}", path.display())
            }
            ConfigError::Parse { path, message } => {
                write!(f, "{}: {message}", path.display())
            }
            ConfigError::Validation { field, message } => {
                write!(f, "{field}: {message}")
            }
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub world: Option<WorldSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pathloss: Option<PathLossSection>,
    pub anchors: AnchorsSection,
    pub blind: BlindSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSection>,
    pub estimator: EstimatorSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldSection {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0_dbm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorsSection {
    /// Fixed anchor positions as `[x, y]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed: Option<Vec<[f64; 2]>>,
    /// Regions with per-trial random placement.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regions: Option<Vec<AnchorRegionEntry>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorRegionEntry {
    /// `[x_min, y_min, x_max, y_max]`.
    pub rect: [f64; 4],
    pub count: usize,
    /// Position-noise level for anchors placed in this region.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_a: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlindSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_region: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_region: Option<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    /// Shared RSSI noise in dBm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_p: Option<f64>,
    /// RSSI noise levels to sweep; `run` executes one cell per value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<f64>>,
    /// Homogeneous (default) position-noise level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_a: Option<f64>,
    /// Region-dependent position noise for heterogeneous setups.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_a_regions: Option<Vec<SigmaARegionEntry>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaARegionEntry {
    pub rect: [f64; 4],
    pub sigma_a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSection {
    /// Gradient-descent step size. Required: the usable range depends on the
    /// noise levels, so there is no sensible universal default.
    pub step_size: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adaptive_halving: Option<bool>,
}

/// A parsed scenario plus the optional sweep list from its noise section.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub sigma_p_sweep: Option<Vec<f64>>,
}

fn rect4(r: [f64; 4]) -> Rect {
    Rect::new(r[0], r[1], r[2], r[3])
}

fn rect_to4(r: &Rect) -> [f64; 4] {
    [r.x_min, r.y_min, r.x_max, r.y_max]
}

impl ScenarioFile {
    /// Resolve defaults and build a validated [`Scenario`].
    pub fn into_scenario(self, fallback_id: &str) -> Result<LoadedScenario, ConfigError> {
        let id = self.id.unwrap_or_else(|| fallback_id.to_string());
        let world = self
            .world
            .map(|w| Rect::new(w.x_min, w.y_min, w.x_max, w.y_max))
            .unwrap_or(Rect::new(0.0, 0.0, 35.0, 35.0));

        let pl = self.pathloss.unwrap_or(PathLossSection {
            d0: None,
            p0_dbm: None,
            eta: None,
        });
        let params = PathLossParams {
            d0: pl.d0.unwrap_or(DEFAULT_D0),
            p0_dbm: pl.p0_dbm.unwrap_or(DEFAULT_P0_DBM),
            eta: pl.eta.unwrap_or(DEFAULT_ETA),
        };

        let noise = self.noise.unwrap_or(NoiseSection {
            sigma_p: None,
            sweep: None,
            sigma_a: None,
            sigma_a_regions: None,
        });

        let mut sigma_regions: Vec<(Rect, f64)> = Vec::new();
        let anchors = match (self.anchors.fixed, self.anchors.regions) {
            (Some(points), None) => {
                PlacementSpec::Fixed(points.iter().map(|p| Point::new(p[0], p[1])).collect())
            }
            (None, Some(regions)) => PlacementSpec::RegionRandom(
                regions
                    .iter()
                    .map(|r| {
                        let rect = rect4(r.rect);
                        if let Some(s) = r.sigma_a {
                            sigma_regions.push((rect, s));
                        }
                        AnchorRegion {
                            rect,
                            count: r.count,
                        }
                    })
                    .collect(),
            ),
            (Some(_), Some(_)) => {
                return Err(ConfigError::Validation {
                    field: "anchors".to_string(),
                    message: "specify either a fixed list or regions, not both".to_string(),
                })
            }
            (None, None) => {
                return Err(ConfigError::Validation {
                    field: "anchors".to_string(),
                    message: "a fixed list or regions is required".to_string(),
                })
            }
        };

        if let Some(extra) = noise.sigma_a_regions {
            sigma_regions.extend(extra.iter().map(|e| (rect4(e.rect), e.sigma_a)));
        }
        let sigma_a = if sigma_regions.is_empty() {
            SigmaAField::Homogeneous(noise.sigma_a.unwrap_or(0.0))
        } else {
            SigmaAField::PerRegion {
                regions: sigma_regions,
                default: noise.sigma_a,
            }
        };

        let sweep = noise.sweep;
        if let Some(values) = &sweep {
            if values.is_empty() {
                return Err(ConfigError::Validation {
                    field: "noise.sweep".to_string(),
                    message: "sweep list must not be empty".to_string(),
                });
            }
        }
        let sigma_p = noise
            .sigma_p
            .or_else(|| sweep.as_ref().map(|v| v[0]))
            .unwrap_or(0.0);

        let blind_truth = match (self.blind.truth, self.blind.truth_region) {
            (Some(p), None) => PointSpec::At(Point::new(p[0], p[1])),
            (None, Some(r)) => PointSpec::Within(rect4(r)),
            _ => {
                return Err(ConfigError::Validation {
                    field: "blind.truth".to_string(),
                    message: "exactly one of truth / truth_region is required".to_string(),
                })
            }
        };
        let init = match (self.blind.init, self.blind.init_region) {
            (Some(p), None) => PointSpec::At(Point::new(p[0], p[1])),
            (None, Some(r)) => PointSpec::Within(rect4(r)),
            _ => {
                return Err(ConfigError::Validation {
                    field: "blind.init".to_string(),
                    message: "exactly one of init / init_region is required".to_string(),
                })
            }
        };

        let mut estimator = EstimatorConfig::new(self.estimator.step_size, params);
        estimator.max_iters = self.estimator.max_iters.unwrap_or(DEFAULT_MAX_ITERS);
        estimator.stop_tol = self.estimator.stop_tol.unwrap_or(DEFAULT_STOP_TOL);
        estimator.adaptive_halving = self.estimator.adaptive_halving.unwrap_or(false);

        let scenario = Scenario {
            id,
            world,
            anchors,
            noise: NoiseField { sigma_a, sigma_p },
            blind_truth,
            init,
            estimator,
        };
        scenario.validate().map_err(|e| ConfigError::Validation {
            field: e.field,
            message: e.message,
        })?;
        Ok(LoadedScenario {
            scenario,
            sigma_p_sweep: sweep,
        })
    }
}

/// Parse and validate a scenario document, returning the sweep list as well.
pub fn load(path: &Path) -> Result<LoadedScenario, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: ScenarioFile = toml::from_str(&text).map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".to_string());
    file.into_scenario(&stem)
}

/// Parse and validate a scenario document.
pub fn load_scenario(path: &Path) -> Result<Scenario, ConfigError> {
    Ok(load(path)?.scenario)
}

/// Render a scenario back into its document form. Reparsing the result gives
/// an equal [`Scenario`].
pub fn scenario_to_file(scenario: &Scenario, sweep: Option<Vec<f64>>) -> ScenarioFile {
    let (fixed, regions) = match &scenario.anchors {
        PlacementSpec::Fixed(points) => (Some(points.iter().map(|p| [p.x, p.y]).collect()), None),
        PlacementSpec::RegionRandom(regs) => (
            None,
            Some(
                regs.iter()
                    .map(|r| AnchorRegionEntry {
                        rect: rect_to4(&r.rect),
                        count: r.count,
                        sigma_a: None,
                    })
                    .collect(),
            ),
        ),
    };
    let (sigma_a, sigma_a_regions) = match &scenario.noise.sigma_a {
        SigmaAField::Homogeneous(s) => (Some(*s), None),
        SigmaAField::PerRegion { regions, default } => (
            *default,
            Some(
                regions
                    .iter()
                    .map(|(rect, s)| SigmaARegionEntry {
                        rect: rect_to4(rect),
                        sigma_a: *s,
                    })
                    .collect(),
            ),
        ),
    };
    let (truth, truth_region) = match scenario.blind_truth {
        PointSpec::At(p) => (Some([p.x, p.y]), None),
        PointSpec::Within(r) => (None, Some(rect_to4(&r))),
    };
    let (init, init_region) = match scenario.init {
        PointSpec::At(p) => (Some([p.x, p.y]), None),
        PointSpec::Within(r) => (None, Some(rect_to4(&r))),
    };
    ScenarioFile {
        id: Some(scenario.id.clone()),
        world: Some(WorldSection {
            x_min: scenario.world.x_min,
            y_min: scenario.world.y_min,
            x_max: scenario.world.x_max,
            y_max: scenario.world.y_max,
        }),
        pathloss: Some(PathLossSection {
            d0: Some(scenario.pathloss().d0),
            p0_dbm: Some(scenario.pathloss().p0_dbm),
            eta: Some(scenario.pathloss().eta),
        }),
        anchors: AnchorsSection { fixed, regions },
        blind: BlindSection {
            truth,
            truth_region,
            init,
            init_region,
        },
        noise: Some(NoiseSection {
            sigma_p: Some(scenario.noise.sigma_p),
            sweep,
            sigma_a,
            sigma_a_regions,
        }),
        estimator: EstimatorSection {
            step_size: scenario.estimator.step_size,
            max_iters: Some(scenario.estimator.max_iters),
            stop_tol: Some(scenario.estimator.stop_tol),
            adaptive_halving: Some(scenario.estimator.adaptive_halving),
        },
    }
}

/// Serialize a scenario document to TOML text.
pub fn to_toml_string(file: &ScenarioFile) -> Result<String, ConfigError> {
    toml::to_string(file).map_err(|e| ConfigError::Parse {
        path: PathBuf::from("<serialize>"),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<LoadedScenario, ConfigError> {
        let file: ScenarioFile = toml::from_str(text).expect("syntax");
        file.into_scenario("inline")
    }

    const MINIMAL: &str = r#"
[anchors]
fixed = [[3.0, 3.0], [32.0, 4.0], [30.0, 31.0], [4.0, 29.0], [17.0, 2.0], [16.0, 33.0]]

[blind]
truth = [14.0, 15.0]
init = [33.0, 33.0]

[estimator]
step_size = 0.5
"#;

    #[test]
    fn minimal_file_gets_the_reference_defaults() {
        let loaded = parse(MINIMAL).unwrap();
        let s = &loaded.scenario;
        assert_eq!(s.pathloss().d0, DEFAULT_D0);
        assert_eq!(s.pathloss().p0_dbm, DEFAULT_P0_DBM);
        assert_eq!(s.pathloss().eta, DEFAULT_ETA);
        assert_eq!(s.estimator.max_iters, DEFAULT_MAX_ITERS);
        assert_eq!(s.estimator.stop_tol, DEFAULT_STOP_TOL);
        assert_eq!(s.world, Rect::new(0.0, 0.0, 35.0, 35.0));
        assert_eq!(s.noise.sigma_p, 0.0);
        assert_eq!(s.noise.sigma_a, SigmaAField::Homogeneous(0.0));
        assert_eq!(s.id, "inline");
        assert_eq!(loaded.sigma_p_sweep, None);
    }

    #[test]
    fn bad_eta_is_named_in_the_error() {
        let text = format!("{MINIMAL}\n[pathloss]\neta = -1.0\n");
        match parse(&text) {
            Err(ConfigError::Validation { field, .. }) => assert_eq!(field, "pathloss"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn missing_step_size_is_a_parse_error() {
        let text = MINIMAL.replace("step_size = 0.5", "max_iters = 100");
        let err = toml::from_str::<ScenarioFile>(&text).unwrap_err();
        assert!(err.to_string().contains("step_size"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let text = format!("{MINIMAL}\nbogus_key = 3\n");
        let err = toml::from_str::<ScenarioFile>(&text).unwrap_err();
        assert!(err.to_string().contains("bogus_key"), "{err}");
    }

    #[test]
    fn sweep_list_is_surfaced_and_seeds_sigma_p() {
        let text = format!("{MINIMAL}\n[noise]\nsweep = [1.0, 2.0, 3.0]\n");
        let loaded = parse(&text).unwrap();
        assert_eq!(loaded.sigma_p_sweep, Some(vec![1.0, 2.0, 3.0]));
        assert_eq!(loaded.scenario.noise.sigma_p, 1.0);
    }

    #[test]
    fn region_sigma_a_beats_the_default() {
        let text = r#"
[[anchors.regions]]
rect = [1.0, 1.0, 9.0, 9.0]
count = 3
sigma_a = 5.0

[[anchors.regions]]
rect = [24.0, 24.0, 34.0, 34.0]
count = 3

[blind]
truth = [14.0, 15.0]
init = [33.0, 2.0]

[noise]
sigma_a = 1.5
sigma_p = 2.0

[estimator]
step_size = 0.5
"#;
        let loaded = parse(text).unwrap();
        match &loaded.scenario.noise.sigma_a {
            SigmaAField::PerRegion { regions, default } => {
                assert_eq!(regions.len(), 1);
                assert_eq!(regions[0].1, 5.0);
                assert_eq!(*default, Some(1.5));
            }
            other => panic!("unexpected field {other:?}"),
        }
    }

    #[test]
    fn roundtrip_through_toml_preserves_the_scenario() {
        for text in [
            MINIMAL.to_string(),
            format!("{MINIMAL}\n[noise]\nsigma_a = 2.0\nsigma_p = 3.0\n"),
        ] {
            let loaded = parse(&text).unwrap();
            let serialized = to_toml_string(&scenario_to_file(
                &loaded.scenario,
                loaded.sigma_p_sweep.clone(),
            ))
            .unwrap();
            let reparsed: ScenarioFile = toml::from_str(&serialized).unwrap();
            let reloaded = reparsed.into_scenario("other-stem").unwrap();
            assert_eq!(reloaded.scenario, loaded.scenario);
            assert_eq!(reloaded.sigma_p_sweep, loaded.sigma_p_sweep);
        }
    }
}
