//! Scenario files (TOML) and grid specifications.
//!
//! ```toml
//! antennas = 4
//! frame_length_s = 200.0
//! p_ave_w = 1.0
//! noise_power_dbm = -90.0      # or noise_power_w = 1e-12
//! eta = 0.8
//!
//! [path_loss]                  # optional, these are the defaults
//! reference_gain = 1e-3
//! exponent = 3.0
//!
//! [[er]]
//! distance_m = 6.0             # or beta = 4.6296e-6; beta wins if both are given
//! rho_re = 1.0
//! rho_im = 0.0
//! theta = 1.0
//! ```

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WetError};
use crate::scenario::{dbm_to_watts, ErProfile, PathLossModel, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub antennas: Option<usize>,
    pub frame_length_s: Option<f64>,
    pub p_ave_w: Option<f64>,
    pub noise_power_w: Option<f64>,
    pub noise_power_dbm: Option<f64>,
    pub eta: Option<f64>,
    pub rho_scaling: Option<bool>,
    pub path_loss: Option<PathLossFile>,
    #[serde(default)]
    pub er: Vec<ErFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossFile {
    pub reference_gain: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErFile {
    pub distance_m: Option<f64>,
    pub beta: Option<f64>,
    #[serde(default = "one")]
    pub rho_re: f64,
    #[serde(default)]
    pub rho_im: f64,
    pub theta: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl ScenarioFile {
    pub fn into_scenario(self) -> Result<Scenario> {
        let model = match self.path_loss {
            Some(p) => {
                if !(p.reference_gain > 0.0) {
                    return Err(WetError::field("path_loss.reference_gain", "must be positive"));
                }
                if !(p.exponent >= 0.0) {
                    return Err(WetError::field("path_loss.exponent", "must be nonnegative"));
                }
                PathLossModel {
                    reference_gain: p.reference_gain,
                    exponent: p.exponent,
                }
            }
            None => PathLossModel::default(),
        };
        let mut b = Scenario::builder();
        if let Some(m) = self.antennas {
            b = b.antennas(m);
        }
        if let Some(t) = self.frame_length_s {
            b = b.frame_length(t);
        }
        if let Some(p) = self.p_ave_w {
            b = b.p_ave(p);
        }
        match (self.noise_power_w, self.noise_power_dbm) {
            (Some(_), Some(_)) => {
                return Err(WetError::field(
                    "noise_power_w",
                    "give either noise_power_w or noise_power_dbm, not both",
                ))
            }
            (Some(w), None) => b = b.noise_power(w),
            (None, Some(dbm)) => b = b.noise_power(dbm_to_watts(dbm)),
            (None, None) => {}
        }
        if let Some(eta) = self.eta {
            b = b.eta(eta);
        }
        if let Some(on) = self.rho_scaling {
            b = b.rho_scaling(on);
        }
        for (i, er) in self.er.into_iter().enumerate() {
            let mut p = match (er.beta, er.distance_m) {
                (Some(beta), d) => ErProfile {
                    distance_m: d,
                    ..ErProfile::with_beta(beta)
                },
                (None, Some(d)) => ErProfile::at_distance(d, &model)
                    .map_err(|_| WetError::field(format!("er[{i}].distance_m"), "must be positive"))?,
                (None, None) => {
                    return Err(WetError::field(
                        format!("er[{i}]"),
                        "needs distance_m or beta",
                    ))
                }
            };
            p = p.rho(Complex64::new(er.rho_re, er.rho_im));
            if let Some(t) = er.theta {
                p = p.theta(t);
            }
            b = b.er(p);
        }
        b.build()
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| WetError::Parse(e.to_string()))?;
    file.into_scenario()
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| WetError::Parse(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}

/// Inclusive arithmetic grid `start:stop:step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite()) || stop < start {
            return Err(WetError::field("q-grid", format!("need start <= stop, got {start}:{stop}")));
        }
        if !(step > 0.0) || !step.is_finite() {
            return Err(WetError::field("q-grid", format!("step must be positive, got {step}")));
        }
        if (stop - start) / step > 1e7 {
            return Err(WetError::field("q-grid", "more than 10^7 points"));
        }
        Ok(Self { start, stop, step })
    }

    pub fn points(&self) -> Vec<f64> {
        // index-based to avoid accumulating rounding; tolerate stop landing a hair off-grid
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl std::str::FromStr for Grid {
    type Err = WetError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(WetError::field("q-grid", format!("expected start:stop:step, got `{s}`")));
        }
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| WetError::field("q-grid", format!("`{p}` is not a number")))
        };
        Grid::new(num(parts[0])?, num(parts[1])?, num(parts[2])?)
    }
}
