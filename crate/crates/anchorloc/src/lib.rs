//! Self-localization from RSSI measurements and imprecisely known anchor
//! positions.
//!
//! A blind node hears `M >= 3` anchors. Each anchor reports its own position
//! (corrupted by Gaussian GPS-style noise) and is heard at some received
//! power (corrupted by log-normal shadowing). This crate provides:
//!
//! - [`pathloss`] — the log-distance shadowing model, its inversion from a
//!   dBm reading to a distance estimate, and the induced log-normal
//!   distance-error statistics;
//! - [`specfun`] — the modified Bessel machinery behind the Rice-distribution
//!   variance of the distance to a perturbed anchor;
//! - [`estimator`] — a weighted-least-squares gradient-descent position
//!   estimator whose weights account for *both* noise sources, plus the
//!   RSSI-only-weighted variant it is benchmarked against;
//! - [`crlb`] — the Fisher information of the observation model (anchor
//!   positions treated as nuisance parameters) and the resulting lower bound
//!   on localization RMSE;
//! - [`simulator`] — deterministic, seeded Monte-Carlo trials with paired
//!   algorithm comparison, RMSE/histogram aggregation, and noise sweeps;
//! - [`config`] / [`report`] / [`cli`] — TOML scenario files, CSV emission,
//!   and the `anchorloc` command-line front end.
//!
//! The `examples/` directory has a runnable demo per capability; the
//! `scenarios/` directory ships ready-made experiment files.

pub mod cli;
pub mod config;
pub mod crlb;
pub mod estimator;
pub mod pathloss;
pub mod report;
pub mod simulator;
pub mod specfun;

pub use estimator::{AnchorReading, EstimateResult, EstimatorConfig, Point};
pub use pathloss::PathLossParams;
pub use simulator::{Scenario, SummaryStats};
