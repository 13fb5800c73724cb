//! Closed-form harvested energy as a function of training energy `q` and beam
//! weights `xi`.
//!
//! Every expression has the shape
//!
//! ```text
//! E_k(q, xi_k) = eta * beta_k * (p_ave T - q) * [(M - 1) * G(x_k) * xi_k + 1]
//! ```
//!
//! with `x_k = beta_k^2 q / (K M sigma_eff^2)` the training SNR and `G` a
//! beamforming-gain bracket that differs between the exact expectation and
//! its bounds. `G(0) = 0`, so `q = 0` yields the omnidirectional level.

use serde::Serialize;

use crate::error::Result;
use crate::scenario::{check_weights, Scenario};
use crate::specfun::{one_minus_expectation, one_minus_log1p_ratio};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Bracket {
    /// `1 - E[1/(1 + x Y)]`, `Y ~ Exp(1)`, via the exponential integral.
    Exact,
    /// `1 - ln(1+x)/x`; the objective used by every optimizer.
    Lower,
    /// `1 - ln(1+2x)/(2x)`.
    Upper,
    /// `x/(1+x)`: known backward channel (conventional radio link) at the same SNR.
    Jensen,
}

impl Bracket {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Bracket::Exact => one_minus_expectation(x),
            Bracket::Lower => one_minus_log1p_ratio(x),
            Bracket::Upper => one_minus_log1p_ratio(2.0 * x),
            Bracket::Jensen => {
                if x > 0.0 {
                    x / (1.0 + x)
                } else {
                    0.0
                }
            }
        }
    }
}

/// Harvested energy per ER (joules, `eta` applied).
pub fn energy_with(scenario: &Scenario, q: f64, xi: &[f64], bracket: Bracket) -> Result<Vec<f64>> {
    scenario.check_training_energy(q)?;
    check_weights(scenario, xi)?;
    Ok(energy_unchecked(scenario, q, xi, bracket))
}

pub(crate) fn energy_unchecked(scenario: &Scenario, q: f64, xi: &[f64], bracket: Bracket) -> Vec<f64> {
    let m1 = (scenario.antennas() - 1) as f64;
    let wet = scenario.frame_energy() - q;
    xi.iter()
        .enumerate()
        .map(|(k, &w)| {
            let g = bracket.eval(scenario.training_snr(k, q));
            scenario.eta() * scenario.beta(k) * wet * (m1 * g * w + 1.0)
        })
        .collect()
}

pub fn energy_exact(scenario: &Scenario, q: f64, xi: &[f64]) -> Result<Vec<f64>> {
    energy_with(scenario, q, xi, Bracket::Exact)
}

pub fn energy_lower(scenario: &Scenario, q: f64, xi: &[f64]) -> Result<Vec<f64>> {
    energy_with(scenario, q, xi, Bracket::Lower)
}

pub fn energy_upper(scenario: &Scenario, q: f64, xi: &[f64]) -> Result<Vec<f64>> {
    energy_with(scenario, q, xi, Bracket::Upper)
}

/// Single-beam energy (`xi_k = 1`) when the backward channel is known.
pub fn energy_jensen_upper(scenario: &Scenario, q: f64) -> Result<Vec<f64>> {
    scenario.check_training_energy(q)?;
    let ones = vec![1.0; scenario.num_ers()];
    Ok(energy_unchecked(scenario, q, &ones, Bracket::Jensen))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Baselines {
    /// MRT with perfect forward CSI and no training cost, `eta M beta_k p_ave T`.
    pub perfect_csi: Vec<f64>,
    /// Omnidirectional transmission, `eta beta_k p_ave T`.
    pub omni: Vec<f64>,
}

pub fn baselines(scenario: &Scenario) -> Baselines {
    let m = scenario.antennas() as f64;
    let omni: Vec<f64> = (0..scenario.num_ers())
        .map(|k| scenario.eta() * scenario.beta(k) * scenario.frame_energy())
        .collect();
    Baselines {
        perfect_csi: omni.iter().map(|e| e * m).collect(),
        omni,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub exact: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub jensen_upper: Vec<f64>,
    pub omni: Vec<f64>,
    pub perfect_csi: Vec<f64>,
}

pub fn energy_report(scenario: &Scenario, q: f64, xi: &[f64]) -> Result<EnergyReport> {
    let base = baselines(scenario);
    Ok(EnergyReport {
        exact: energy_exact(scenario, q, xi)?,
        lower: energy_lower(scenario, q, xi)?,
        upper: energy_upper(scenario, q, xi)?,
        jensen_upper: energy_jensen_upper(scenario, q)?,
        omni: base.omni,
        perfect_csi: base.perfect_csi,
    })
}

/// Weighted-sum coefficient of `xi_k`:
/// `theta_k beta_k (M-1) (p_ave T - q) [1 - ln(1+x_k)/x_k]`. No `eta`.
pub fn alpha(scenario: &Scenario, q: f64, k: usize) -> Result<f64> {
    scenario.check_training_energy(q)?;
    Ok(scenario.theta(k) * b_coeff(scenario, q, k))
}

fn b_coeff(scenario: &Scenario, q: f64, k: usize) -> f64 {
    let m1 = (scenario.antennas() - 1) as f64;
    scenario.beta(k)
        * m1
        * (scenario.frame_energy() - q)
        * Bracket::Lower.eval(scenario.training_snr(k, q))
}

/// Proportional-fair coefficients with `E~_k = eta (b_k xi_k + d_k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PfeCoeffs {
    pub b: Vec<f64>,
    pub d: Vec<f64>,
}

pub fn pfe_coeffs(scenario: &Scenario, q: f64) -> Result<PfeCoeffs> {
    scenario.check_training_energy(q)?;
    Ok(pfe_coeffs_unchecked(scenario, q))
}

pub(crate) fn pfe_coeffs_unchecked(scenario: &Scenario, q: f64) -> PfeCoeffs {
    let k = scenario.num_ers();
    PfeCoeffs {
        b: (0..k).map(|i| b_coeff(scenario, q, i)).collect(),
        d: (0..k)
            .map(|i| scenario.beta(i) * (scenario.frame_energy() - q))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{ErProfile, PathLossModel};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn single() -> Scenario {
        Scenario::builder()
            .antennas(4)
            .noise_power(1e-12)
            .eta(0.8)
            .er(ErProfile::with_beta(4.6296e-6))
            .build()
            .unwrap()
    }

    fn pair(d2: f64) -> Scenario {
        let pl = PathLossModel::default();
        Scenario::builder()
            .noise_power(1e-12)
            .er(ErProfile::at_distance(4.0, &pl).unwrap())
            .er(ErProfile::at_distance(d2, &pl).unwrap())
            .build()
            .unwrap()
    }

    #[test]
    fn single_er_reference_point() {
        let s = single();
        let e = energy_exact(&s, 9.2, &[1.0]).unwrap()[0];
        assert!(rel(e, 2.68e-3) < 0.05, "{e}");
        let lo = energy_lower(&s, 9.2, &[1.0]).unwrap()[0];
        assert!(rel(lo, 2.66e-3) < 0.01, "{lo}");
        let up = energy_upper(&s, 9.2, &[1.0]).unwrap()[0];
        assert!(up > e && up < 3.0e-3);
        let jn = energy_jensen_upper(&s, 9.2).unwrap()[0];
        assert!(jn >= e && jn > 2.68e-3);
    }

    #[test]
    fn zero_training_gives_omni_level() {
        let s = single();
        let omni = 0.8 * 4.6296e-6 * 200.0;
        for f in [energy_exact, energy_lower, energy_upper] {
            assert!(rel(f(&s, 0.0, &[1.0]).unwrap()[0], omni) < 1e-15);
            assert!(rel(f(&s, 0.0, &[0.3]).unwrap()[0], omni) < 1e-15);
        }
        assert!(rel(energy_jensen_upper(&s, 0.0).unwrap()[0], omni) < 1e-15);
        assert!(rel(omni, 7.4e-4) < 0.001);
    }

    #[test]
    fn full_budget_on_training_leaves_nothing() {
        let s = single();
        assert_eq!(energy_exact(&s, 200.0, &[1.0]).unwrap()[0], 0.0);
    }

    #[test]
    fn one_antenna_has_no_beamforming_gain() {
        let s = single().with_antennas(1).unwrap();
        for &q in &[0.5, 9.2, 100.0] {
            for &xi in &[0.0, 0.5, 1.0] {
                let e = energy_exact(&s, q, &[xi]).unwrap()[0];
                assert!(rel(e, 0.8 * 4.6296e-6 * (200.0 - q)) < 1e-14);
            }
        }
    }

    #[test]
    fn lower_bound_two_er_point() {
        let s = pair(4.0);
        let e = energy_lower(&s, 3.83, &[0.5, 0.5]).unwrap();
        assert!(rel(e[0], 5.98e-3) < 0.003, "{e:?}");
        assert!(rel(e[0], 6.052e-3) < 0.03);
    }

    #[test]
    fn baselines_reference() {
        let b = baselines(&single());
        assert!(rel(b.perfect_csi[0], 2.96e-3) < 0.001);
        assert!(rel(b.perfect_csi[0], 4.0 * b.omni[0]) < 1e-15);
        let b = baselines(&pair(4.0));
        assert!(rel(b.perfect_csi[0], 1.0e-2) < 1e-12);
    }

    #[test]
    fn infeasible_inputs_rejected() {
        let s = pair(5.0);
        assert!(energy_exact(&s, -0.1, &[0.5, 0.5]).is_err());
        assert!(energy_exact(&s, 201.0, &[0.5, 0.5]).is_err());
        assert!(energy_exact(&s, 1.0, &[0.7, 0.5]).is_err());
        assert!(energy_exact(&s, 1.0, &[0.5]).is_err());
    }

    #[test]
    fn alpha_vanishes_at_endpoints_and_is_positive_inside() {
        let s = pair(6.0);
        for k in 0..2 {
            assert_eq!(alpha(&s, 0.0, k).unwrap(), 0.0);
            assert_eq!(alpha(&s, 200.0, k).unwrap(), 0.0);
            // linear in q near zero
            let ratio = alpha(&s, 1e-12, k).unwrap() / alpha(&s, 1e-9, k).unwrap();
            assert!((ratio - 1e-3).abs() < 1e-6);
            for i in 1..200 {
                assert!(alpha(&s, i as f64 - 0.5, k).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn alpha_is_concave_on_grid() {
        let s = pair(6.0);
        let h = 0.05;
        for k in 0..2 {
            let f: Vec<f64> = (1..3999).map(|i| alpha(&s, i as f64 * h, k).unwrap()).collect();
            for w in f.windows(3) {
                let second = w[0] - 2.0 * w[1] + w[2];
                assert!(second <= 1e-18, "second difference {second}");
            }
        }
    }

    #[test]
    fn pfe_coeffs_reproduce_lower_bound() {
        let s = pair(7.0);
        let c = pfe_coeffs(&s, 0.0).unwrap();
        assert_eq!(c.d[0], s.beta(0) * 200.0);
        for &(q, x1) in &[(1.0, 0.2), (5.46, 0.5112), (40.0, 0.9)] {
            let c = pfe_coeffs(&s, q).unwrap();
            let xi = [x1, 1.0 - x1];
            let lo = energy_lower(&s, q, &xi).unwrap();
            for k in 0..2 {
                assert!(c.b[k] > 0.0);
                assert!(rel(0.8 * (c.b[k] * xi[k] + c.d[k]), lo[k]) < 1e-13);
            }
        }
    }

    #[test]
    fn energy_affine_in_weight() {
        let s = pair(5.0);
        let e = |x: f64| energy_exact(&s, 6.0, &[x, 1.0 - x]).unwrap()[0];
        let (a, b, c) = (e(0.1), e(0.4), e(0.9));
        let slope1 = (b - a) / 0.3;
        let slope2 = (c - b) / 0.5;
        assert!(rel(slope1, slope2) < 1e-10);
    }
}
