//! Rayleigh channel draws and least-squares backscatter channel estimation.
//!
//! The ET sends `X_l = sqrt(p1) I_M` for `L` repetitions in each of the `K`
//! estimation slots; only the sufficient statistic (the sum over repetitions)
//! is sampled, which gives `a_hat = rho h g + n` with `n ~ CN(0, sigma^2/(L p1))`.
//! The direct ET-to-ET path is taken as perfectly cancelled.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Result, WetError};
use crate::scenario::Scenario;

/// Forward channels `h[k][m]` and backward channels `g[k]` for all ERs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelRealization {
    pub h: Vec<Vec<Complex64>>,
    pub g: Vec<Complex64>,
}

/// A draw from `CN(0, variance)`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * scale, im * scale)
}

/// Draw per ER: `g_k` first, then `h_k0 .. h_k(M-1)`, all `CN(0, beta_k)`.
pub fn sample_channels<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> ChannelRealization {
    let k = scenario.num_ers();
    let m = scenario.antennas();
    let mut h = Vec::with_capacity(k);
    let mut g = Vec::with_capacity(k);
    for er in 0..k {
        let beta = scenario.beta(er);
        g.push(complex_normal(rng, beta));
        h.push((0..m).map(|_| complex_normal(rng, beta)).collect());
    }
    ChannelRealization { h, g }
}

/// Channel-estimation schedule: `L` pilot repetitions per antenna and slot at power `p1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CePlan {
    pub pilot_repetitions: usize,
    pub pilot_power: f64,
    /// CE duration `tau = K M L` in symbol periods.
    pub tau: f64,
    /// Training energy `q = tau p1` in joules.
    pub q: f64,
}

impl CePlan {
    pub fn new(scenario: &Scenario, pilot_repetitions: usize, pilot_power: f64) -> Result<Self> {
        if pilot_repetitions == 0 {
            return Err(WetError::field("pilot_repetitions", "must be at least 1"));
        }
        if !(pilot_power > 0.0) || !pilot_power.is_finite() {
            return Err(WetError::field("pilot_power", "must be positive"));
        }
        let tau = scenario.estimation_load() * pilot_repetitions as f64;
        if tau >= scenario.frame_length() {
            return Err(WetError::Domain(format!(
                "CE duration {tau} leaves no time for energy transfer in a frame of {}",
                scenario.frame_length()
            )));
        }
        let q = tau * pilot_power;
        scenario.check_training_energy(q)?;
        Ok(Self {
            pilot_repetitions,
            pilot_power,
            tau,
            q,
        })
    }

    /// Plan spending exactly `q` joules with `L` repetitions.
    pub fn for_training_energy(scenario: &Scenario, q: f64, pilot_repetitions: usize) -> Result<Self> {
        if !(q > 0.0) {
            return Err(WetError::TrainingEnergy {
                q,
                range: "(0, p_ave T]".into(),
            });
        }
        let tau = scenario.estimation_load() * pilot_repetitions as f64;
        Self::new(scenario, pilot_repetitions, q / tau)
    }

    /// Variance of the equivalent estimation noise, `sigma^2 / (L p1)`.
    pub fn noise_var_per_entry(&self, scenario: &Scenario) -> f64 {
        scenario.noise_power() / (self.pilot_repetitions as f64 * self.pilot_power)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BackscatterEstimate {
    /// `a_hat[k][m]`, LS estimate of `rho_k h_mk g_k`.
    pub a_hat: Vec<Vec<Complex64>>,
    pub noise_var_per_entry: f64,
    pub pilot_repetitions: usize,
    pub pilot_power: f64,
}

/// LS estimate from caller-supplied unit-variance noise `noise[k][m] ~ CN(0, 1)`.
pub fn ls_estimate(
    scenario: &Scenario,
    realization: &ChannelRealization,
    plan: &CePlan,
    unit_noise: &[Vec<Complex64>],
) -> BackscatterEstimate {
    let var = plan.noise_var_per_entry(scenario);
    let sd = var.sqrt();
    let a_hat = realization
        .h
        .iter()
        .zip(&realization.g)
        .zip(unit_noise)
        .enumerate()
        .map(|(k, ((h_k, g_k), n_k))| {
            let gain = scenario.rho(k) * g_k;
            h_k.iter().zip(n_k).map(|(h, n)| gain * h + n * sd).collect()
        })
        .collect();
    BackscatterEstimate {
        a_hat,
        noise_var_per_entry: var,
        pilot_repetitions: plan.pilot_repetitions,
        pilot_power: plan.pilot_power,
    }
}

/// Unit-variance estimation noise, drawn ER-major.
pub fn sample_unit_noise<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> Vec<Vec<Complex64>> {
    (0..scenario.num_ers())
        .map(|_| {
            (0..scenario.antennas())
                .map(|_| complex_normal(rng, 1.0))
                .collect()
        })
        .collect()
}

pub fn estimate_backscatter<R: Rng + ?Sized>(
    scenario: &Scenario,
    realization: &ChannelRealization,
    plan: &CePlan,
    rng: &mut R,
) -> BackscatterEstimate {
    let noise = sample_unit_noise(scenario, rng);
    ls_estimate(scenario, realization, plan, &noise)
}

/// Variance of the forward-channel error `a_hat/(rho g) - h` given `|g_k|^2`:
/// `K M sigma_eff^2 / (|g_k|^2 q)`.
pub fn conditional_error_variance(scenario: &Scenario, q: f64, g_mag_sq: f64, k: usize) -> Result<f64> {
    if !(q > 0.0) {
        return Err(WetError::TrainingEnergy {
            q,
            range: "(0, p_ave T]".into(),
        });
    }
    if !(g_mag_sq > 0.0) {
        return Err(WetError::Domain(format!("|g|^2 must be positive, got {g_mag_sq}")));
    }
    Ok(scenario.estimation_load() * scenario.effective_noise(k) / (g_mag_sq * q))
}
