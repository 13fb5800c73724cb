//! System parameters shared by every other module.
//!
//! Units: one symbol period is one second, so energies are joules and the
//! training energy `q = tau * p1` is directly a joule quantity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WetError};

/// Log-distance path loss `reference_gain * d^-exponent` with a 1 m reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossModel {
    pub reference_gain: f64,
    pub exponent: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        // 30 dB at 1 m, exponent 3
        Self {
            reference_gain: 1e-3,
            exponent: 3.0,
        }
    }
}

impl PathLossModel {
    pub fn gain(&self, distance_m: f64) -> Result<f64> {
        path_loss(distance_m, self)
    }
}

pub fn path_loss(distance_m: f64, model: &PathLossModel) -> Result<f64> {
    if !(distance_m > 0.0) || !distance_m.is_finite() {
        return Err(WetError::field(
            "distance_m",
            format!("must be positive and finite, got {distance_m}"),
        ));
    }
    if !(model.reference_gain > 0.0) {
        return Err(WetError::field("reference_gain", "must be positive"));
    }
    Ok(model.reference_gain * distance_m.powf(-model.exponent))
}

pub fn dbm_to_watts(level_dbm: f64) -> f64 {
    10f64.powf((level_dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// One energy receiver (backscatter tag).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErProfile {
    /// Distance to the transmitter in meters, when known.
    pub distance_m: Option<f64>,
    /// Long-term path loss (power gain) of both forward and backward channel.
    pub beta: f64,
    /// Backscatter reflection coefficient.
    pub rho: Complex64,
    /// Weighted-sum-energy weight; `None` resolves to `1/K` when the scenario is built.
    pub theta: Option<f64>,
}

impl ErProfile {
    pub fn with_beta(beta: f64) -> Self {
        Self {
            distance_m: None,
            beta,
            rho: Complex64::new(1.0, 0.0),
            theta: None,
        }
    }

    pub fn at_distance(distance_m: f64, model: &PathLossModel) -> Result<Self> {
        Ok(Self {
            distance_m: Some(distance_m),
            ..Self::with_beta(path_loss(distance_m, model)?)
        })
    }

    pub fn rho(mut self, rho: Complex64) -> Self {
        self.rho = rho;
        self
    }

    pub fn theta(mut self, theta: f64) -> Self {
        self.theta = Some(theta);
        self
    }
}

/// Full system description. Immutable once built; use the `with_*` methods
/// to derive variants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    antennas: usize,
    frame_length: f64,
    p_ave: f64,
    noise_power: f64,
    eta: f64,
    rho_scaling: bool,
    ers: Vec<ErProfile>,
}

#[derive(Debug, Clone)]
pub struct ScenarioBuilder {
    antennas: usize,
    frame_length: f64,
    p_ave: f64,
    noise_power: f64,
    eta: f64,
    rho_scaling: bool,
    ers: Vec<ErProfile>,
}

impl Default for ScenarioBuilder {
    fn default() -> Self {
        Self {
            antennas: 4,
            frame_length: 200.0,
            p_ave: 1.0,
            noise_power: dbm_to_watts(-90.0),
            eta: 0.8,
            rho_scaling: true,
            ers: Vec::new(),
        }
    }
}

impl ScenarioBuilder {
    pub fn antennas(mut self, m: usize) -> Self {
        self.antennas = m;
        self
    }
    pub fn frame_length(mut self, t: f64) -> Self {
        self.frame_length = t;
        self
    }
    pub fn p_ave(mut self, p: f64) -> Self {
        self.p_ave = p;
        self
    }
    pub fn noise_power(mut self, watts: f64) -> Self {
        self.noise_power = watts;
        self
    }
    pub fn eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }
    /// Fold `|rho_k|^2` into the channel-estimation SNR (default on).
    pub fn rho_scaling(mut self, on: bool) -> Self {
        self.rho_scaling = on;
        self
    }
    pub fn er(mut self, er: ErProfile) -> Self {
        self.ers.push(er);
        self
    }
    pub fn ers(mut self, ers: impl IntoIterator<Item = ErProfile>) -> Self {
        self.ers.extend(ers);
        self
    }

    pub fn build(self) -> Result<Scenario> {
        let ScenarioBuilder {
            antennas,
            frame_length,
            p_ave,
            noise_power,
            eta,
            rho_scaling,
            mut ers,
        } = self;
        if antennas == 0 {
            return Err(WetError::field("antennas", "must be at least 1"));
        }
        if ers.is_empty() {
            return Err(WetError::field("er", "at least one ER is required"));
        }
        positive("frame_length_s", frame_length)?;
        positive("p_ave_w", p_ave)?;
        positive("noise_power_w", noise_power)?;
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(WetError::field("eta", format!("must lie in (0, 1], got {eta}")));
        }
        let k = ers.len();
        for (i, er) in ers.iter_mut().enumerate() {
            positive(&format!("er[{i}].beta"), er.beta)?;
            if let Some(d) = er.distance_m {
                positive(&format!("er[{i}].distance_m"), d)?;
            }
            let mag = er.rho.norm();
            if !(mag > 0.0 && mag <= 1.0) {
                return Err(WetError::field(
                    format!("er[{i}].rho"),
                    format!("|rho| must lie in (0, 1], got {mag}"),
                ));
            }
            let theta = er.theta.unwrap_or(1.0 / k as f64);
            if !(theta >= 0.0) || !theta.is_finite() {
                return Err(WetError::field(
                    format!("er[{i}].theta"),
                    "must be nonnegative",
                ));
            }
            er.theta = Some(theta);
        }
        Ok(Scenario {
            antennas,
            frame_length,
            p_ave,
            noise_power,
            eta,
            rho_scaling,
            ers,
        })
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(WetError::field(field, format!("must be positive, got {v}")))
    }
}

impl Scenario {
    pub fn builder() -> ScenarioBuilder {
        ScenarioBuilder::default()
    }

    fn to_builder(&self) -> ScenarioBuilder {
        ScenarioBuilder {
            antennas: self.antennas,
            frame_length: self.frame_length,
            p_ave: self.p_ave,
            noise_power: self.noise_power,
            eta: self.eta,
            rho_scaling: self.rho_scaling,
            ers: self.ers.clone(),
        }
    }

    /// Number of transmit antennas M.
    pub fn antennas(&self) -> usize {
        self.antennas
    }
    /// Number of energy receivers K.
    pub fn num_ers(&self) -> usize {
        self.ers.len()
    }
    /// Frame length T in symbol periods (seconds).
    pub fn frame_length(&self) -> f64 {
        self.frame_length
    }
    pub fn p_ave(&self) -> f64 {
        self.p_ave
    }
    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn rho_scaling(&self) -> bool {
        self.rho_scaling
    }
    pub fn ers(&self) -> &[ErProfile] {
        &self.ers
    }
    pub fn beta(&self, k: usize) -> f64 {
        self.ers[k].beta
    }
    pub fn rho(&self, k: usize) -> Complex64 {
        self.ers[k].rho
    }
    pub fn theta(&self, k: usize) -> f64 {
        self.ers[k].theta.expect("theta resolved at build time")
    }

    /// Energy budget of one frame, `p_ave * T`.
    pub fn frame_energy(&self) -> f64 {
        self.p_ave * self.frame_length
    }

    /// Noise variance seen by the estimator of ER `k`'s channel: `sigma^2 / |rho_k|^2`
    /// when reflection scaling is on, `sigma^2` otherwise.
    pub fn effective_noise(&self, k: usize) -> f64 {
        if self.rho_scaling {
            self.noise_power / self.rho(k).norm_sqr()
        } else {
            self.noise_power
        }
    }

    /// Training SNR `beta_k^2 q / (K M sigma_eff^2)`, the single argument every
    /// harvested-energy expression depends on.
    pub fn training_snr(&self, k: usize, q: f64) -> f64 {
        let beta = self.beta(k);
        beta * beta * q / (self.estimation_load() * self.effective_noise(k))
    }

    /// `K * M`, the number of channel coefficients sharing the training energy.
    pub fn estimation_load(&self) -> f64 {
        (self.num_ers() * self.antennas) as f64
    }

    pub fn with_antennas(&self, m: usize) -> Result<Scenario> {
        self.to_builder().antennas(m).build()
    }

    pub fn with_eta(&self, eta: f64) -> Result<Scenario> {
        self.to_builder().eta(eta).build()
    }

    pub fn with_noise_power(&self, watts: f64) -> Result<Scenario> {
        self.to_builder().noise_power(watts).build()
    }

    pub fn with_rho_scaling(&self, on: bool) -> Result<Scenario> {
        self.to_builder().rho_scaling(on).build()
    }

    /// Replace the ER list. Weights left unset resolve to `1/K` of the new list.
    pub fn with_ers(&self, ers: Vec<ErProfile>) -> Result<Scenario> {
        let mut b = self.to_builder();
        b.ers = ers;
        b.build()
    }

    /// Keep only the listed ERs (in order).
    pub fn subset(&self, indices: &[usize]) -> Result<Scenario> {
        let ers = indices
            .iter()
            .map(|&i| {
                self.ers.get(i).copied().ok_or_else(|| {
                    WetError::field("er", format!("index {i} out of range"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        self.with_ers(ers)
    }

    pub fn check_training_energy(&self, q: f64) -> Result<()> {
        if q >= 0.0 && q <= self.frame_energy() {
            Ok(())
        } else {
            Err(WetError::TrainingEnergy {
                q,
                range: format!("[0, {}]", self.frame_energy()),
            })
        }
    }
}

/// WET-phase transmit power `(p_ave T - q) / (T - tau)`.
pub fn wet_power(scenario: &Scenario, q: f64, tau: f64) -> Result<f64> {
    scenario.check_training_energy(q)?;
    let t = scenario.frame_length();
    if !(tau > 0.0 && tau < t) {
        return Err(WetError::Domain(format!(
            "CE duration tau={tau} must lie in (0, T={t})"
        )));
    }
    Ok((scenario.frame_energy() - q) / (t - tau))
}

/// Training energy and beam weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub q: f64,
    pub xi: Vec<f64>,
}

/// Slack allowed on `sum(xi) <= 1` for rounding.
pub const WEIGHT_SUM_SLACK: f64 = 1e-9;

impl Allocation {
    pub fn new(scenario: &Scenario, q: f64, xi: Vec<f64>) -> Result<Self> {
        let a = Self { q, xi };
        a.validate(scenario)?;
        Ok(a)
    }

    pub fn uniform(scenario: &Scenario, q: f64) -> Result<Self> {
        let k = scenario.num_ers();
        Self::new(scenario, q, vec![1.0 / k as f64; k])
    }

    /// All energy into one beam.
    pub fn one_hot(scenario: &Scenario, q: f64, k: usize) -> Result<Self> {
        let mut xi = vec![0.0; scenario.num_ers()];
        *xi.get_mut(k)
            .ok_or_else(|| WetError::InfeasibleWeights(format!("ER index {k} out of range")))? = 1.0;
        Self::new(scenario, q, xi)
    }

    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        scenario.check_training_energy(self.q)?;
        check_weights(scenario, &self.xi)
    }
}

pub fn check_weights(scenario: &Scenario, xi: &[f64]) -> Result<()> {
    if xi.len() != scenario.num_ers() {
        return Err(WetError::InfeasibleWeights(format!(
            "expected {} weights, got {}",
            scenario.num_ers(),
            xi.len()
        )));
    }
    if let Some(bad) = xi.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
        return Err(WetError::InfeasibleWeights(format!("negative weight {bad}")));
    }
    let sum: f64 = xi.iter().sum();
    if sum > 1.0 + WEIGHT_SUM_SLACK {
        return Err(WetError::InfeasibleWeights(format!("weights sum to {sum} > 1")));
    }
    Ok(())
}
