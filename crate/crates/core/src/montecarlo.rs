//! Monte Carlo estimate of the harvested energy: draw channels, estimate the
//! backscatter channel by LS, form the beam from the estimate and measure the
//! energy delivered through the true channel.
//!
//! Run `r` draws everything from stream `r` of the seeded generator and the
//! per-run samples are reduced in run order, so estimates do not depend on the
//! number of worker threads.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{estimate_backscatter, sample_channels, BackscatterEstimate, CePlan, ChannelRealization};
use crate::energy::{energy_unchecked, Bracket};
use crate::error::{Result, WetError};
use crate::rng::stream_rng;
use crate::scenario::{check_weights, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McConfig {
    pub runs: usize,
    pub seed: u64,
    /// Pilot repetitions `L` per antenna and slot.
    pub pilot_repetitions: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            runs: 100_000,
            seed: 0,
            pilot_repetitions: 1,
        }
    }
}

/// Per-ER sample mean and its standard error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
    pub runs: usize,
}

/// Unit-norm MRT beam `conj(a) / |a|`.
pub fn beamformer_single(a_hat: &[Complex64]) -> Option<Vec<Complex64>> {
    let norm = a_hat.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return None;
    }
    Some(a_hat.iter().map(|a| a.conj() / norm).collect())
}

/// `w = sum_k sqrt(xi_k) conj(a_k) / |a_k|`.
pub fn beamformer_multi(estimate: &BackscatterEstimate, xi: &[f64]) -> Result<Vec<Complex64>> {
    let m = estimate.a_hat.first().map_or(0, Vec::len);
    let mut w = vec![Complex64::new(0.0, 0.0); m];
    for (k, (a_k, &x)) in estimate.a_hat.iter().zip(xi).enumerate() {
        if x == 0.0 {
            continue;
        }
        let u = beamformer_single(a_k).ok_or(WetError::DegenerateEstimate(k))?;
        let s = x.sqrt();
        for (wm, um) in w.iter_mut().zip(u) {
            *wm += um * s;
        }
    }
    Ok(w)
}

/// Energy each ER harvests from beam `w`: `eta (p_ave T - q) |h_k^T w|^2`.
pub fn harvest_sample(scenario: &Scenario, q: f64, w: &[Complex64], realization: &ChannelRealization) -> Vec<f64> {
    let scale = scenario.eta() * (scenario.frame_energy() - q);
    realization
        .h
        .iter()
        .map(|h_k| {
            let y: Complex64 = h_k.iter().zip(w).map(|(h, w)| h * w).sum();
            scale * y.norm_sqr()
        })
        .collect()
}

/// Omnidirectional energy, `eta p_ave T |h_k|^2 / M`.
pub fn omni_sample(scenario: &Scenario, realization: &ChannelRealization) -> Vec<f64> {
    let scale = scenario.eta() * scenario.frame_energy() / scenario.antennas() as f64;
    realization
        .h
        .iter()
        .map(|h_k| scale * h_k.iter().map(|h| h.norm_sqr()).sum::<f64>())
        .collect()
}

/// Energies harvested in one run.
pub fn simulate_run(scenario: &Scenario, q: f64, xi: &[f64], plan: Option<&CePlan>, seed: u64, run: u64) -> Result<Vec<f64>> {
    let mut rng = stream_rng(seed, run);
    let real = sample_channels(scenario, &mut rng);
    match plan {
        None => Ok(omni_sample(scenario, &real)),
        Some(plan) => {
            let est = estimate_backscatter(scenario, &real, plan, &mut rng);
            let w = beamformer_multi(&est, xi)?;
            Ok(harvest_sample(scenario, q, &w, &real))
        }
    }
}

/// Monte Carlo mean of the harvested energy at `(q, xi)`. At `q = 0` the ET
/// has no estimate and transmits omnidirectionally.
pub fn simulate_energy(scenario: &Scenario, q: f64, xi: &[f64], config: &McConfig) -> Result<McEstimate> {
    scenario.check_training_energy(q)?;
    check_weights(scenario, xi)?;
    if config.runs < 2 {
        return Err(WetError::field("runs", "need at least 2 runs"));
    }
    let plan = if q > 0.0 {
        Some(CePlan::for_training_energy(scenario, q, config.pilot_repetitions)?)
    } else {
        None
    };
    let samples: Vec<Vec<f64>> = (0..config.runs as u64)
        .into_par_iter()
        .map(|r| simulate_run(scenario, q, xi, plan.as_ref(), config.seed, r))
        .collect::<Result<_>>()?;

    let n = config.runs as f64;
    let mut mean = Vec::with_capacity(scenario.num_ers());
    let mut std_error = Vec::with_capacity(scenario.num_ers());
    let mut column = vec![0.0; config.runs];
    for k in 0..scenario.num_ers() {
        for (c, s) in column.iter_mut().zip(&samples) {
            *c = s[k];
        }
        let mu = pairwise_sum(&column) / n;
        for c in column.iter_mut() {
            *c = (*c - mu) * (*c - mu);
        }
        let var = pairwise_sum(&column) / (n - 1.0);
        mean.push(mu);
        std_error.push((var / n).sqrt());
    }
    Ok(McEstimate {
        mean,
        std_error,
        runs: config.runs,
    })
}

/// Pairwise (cascade) summation, error growing with `log n` rather than `n`.
pub fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 16 {
        x.iter().sum()
    } else {
        let mid = x.len() / 2;
        pairwise_sum(&x[..mid]) + pairwise_sum(&x[mid..])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub q: f64,
    pub mc: McEstimate,
    pub exact: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Simulated and closed-form energies over a grid of training energies.
pub fn simulate_sweep(scenario: &Scenario, q_grid: &[f64], xi: &[f64], config: &McConfig) -> Result<Vec<SweepRow>> {
    q_grid
        .iter()
        .map(|&q| {
            let mc = simulate_energy(scenario, q, xi, config)?;
            Ok(SweepRow {
                q,
                mc,
                exact: energy_unchecked(scenario, q, xi, Bracket::Exact),
                lower: energy_unchecked(scenario, q, xi, Bracket::Lower),
                upper: energy_unchecked(scenario, q, xi, Bracket::Upper),
            })
        })
        .collect()
}
