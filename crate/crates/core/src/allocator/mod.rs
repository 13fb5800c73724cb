//! Training-energy and beam-weight allocation.
//!
//! All solvers work on objectives with `eta` divided out, so the returned
//! allocation does not depend on the harvester efficiency; reported utilities
//! and energies include it.

mod bcd;
pub mod scalar;
mod waterfill;

use serde::Serialize;

pub use bcd::{solve_pfe, solve_q_given_xi, BcdOptions, BcdStep, BcdTrace, QStep};
pub use waterfill::{kkt_residuals, waterfill, waterfill_coeffs, KktResiduals, WaterFill};

use crate::energy::{alpha, energy_exact, energy_lower};
use crate::error::{Result, WetError};
use crate::scenario::{Allocation, Scenario};
use scalar::{bisect_root, golden_section_max};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub allocation: Allocation,
    /// Objective value at `allocation`.
    pub utility: f64,
    /// Lower-bound harvested energy per ER (joules).
    pub per_er_energy: Vec<f64>,
    pub exact_energy: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Training was not worth its cost and `q = 0`.
    pub omnidirectional: bool,
}

impl SolveResult {
    fn at(scenario: &Scenario, allocation: Allocation, utility: f64, iterations: usize) -> Result<Self> {
        Ok(Self {
            per_er_energy: energy_lower(scenario, allocation.q, &allocation.xi)?,
            exact_energy: energy_exact(scenario, allocation.q, &allocation.xi)?,
            omnidirectional: allocation.q == 0.0,
            allocation,
            utility,
            iterations,
            converged: true,
        })
    }
}

/// `sum theta_k E~_k` with lower-bound energies.
pub fn wse_utility(scenario: &Scenario, allocation: &Allocation) -> Result<f64> {
    let e = energy_lower(scenario, allocation.q, &allocation.xi)?;
    Ok(e.iter().enumerate().map(|(k, e)| scenario.theta(k) * e).sum())
}

/// `sum ln E~_k` with lower-bound energies.
pub fn pfe_utility(scenario: &Scenario, allocation: &Allocation) -> Result<f64> {
    let e = energy_lower(scenario, allocation.q, &allocation.xi)?;
    Ok(e.iter().map(|e| e.ln()).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SingleErMethod {
    /// Bisection on the stationarity condition.
    StationaryRoot,
    /// Golden-section search on the energy itself.
    GoldenSection,
}

/// Noise level at and above which training never pays off for a single ER:
/// `beta^2 T p_ave (M-1) / (2M)`.
pub fn single_er_noise_threshold(scenario: &Scenario) -> f64 {
    let m = scenario.antennas() as f64;
    let b = scenario.beta(0);
    b * b * scenario.frame_length() * scenario.p_ave() * (m - 1.0) / (2.0 * m)
}

/// Stationarity function in `x = beta^2 q / (M sigma^2)`, divided by `x^2`:
/// `c2 p [(x+1)ln(x+1) - x]/x^2 - c1 x - c1 (1 - c2)`.
/// Positive where the lower-bound energy increases in `q`.
fn stationarity(x: f64, p: f64, c1: f64, c2: f64) -> f64 {
    let h = if x < 1e-3 {
        // [(x+1)ln(x+1) - x]/x^2 = sum_{n>=2} (-x)^(n-2) / (n(n-1))
        0.5 - x / 6.0 + x * x / 12.0 - x * x * x / 20.0 + x * x * x * x / 30.0
    } else {
        ((x + 1.0) * x.ln_1p() - x) / (x * x)
    };
    c2 * p * h - c1 * x - c1 * (1.0 - c2)
}

struct SingleParams {
    p: f64,
    c1: f64,
    c2: f64,
    /// `q` per unit `x`
    q_per_x: f64,
}

fn single_params(scenario: &Scenario) -> SingleParams {
    let m = scenario.antennas() as f64;
    let b = scenario.beta(0);
    let sigma2 = scenario.effective_noise(0);
    SingleParams {
        p: scenario.p_ave(),
        c1: m * sigma2 / (b * b * scenario.frame_length()),
        c2: (m - 1.0) / m,
        q_per_x: m * sigma2 / (b * b),
    }
}

/// Slope of the single-ER lower-bound energy, `dE~/dq` in J/J.
pub fn single_er_slope(scenario: &Scenario, q: f64) -> Result<f64> {
    require_single(scenario)?;
    scenario.check_training_energy(q)?;
    let sp = single_params(scenario);
    let x = q / sp.q_per_x;
    // dE/dx = eta M beta T F(x) / (x^2 (x+1)), F = x^2 * stationarity
    let m = scenario.antennas() as f64;
    let de_dx = scenario.eta() * m * scenario.beta(0) * scenario.frame_length()
        * stationarity(x, sp.p, sp.c1, sp.c2)
        / (x + 1.0);
    Ok(de_dx / sp.q_per_x)
}

fn require_single(scenario: &Scenario) -> Result<()> {
    if scenario.num_ers() != 1 {
        return Err(WetError::Unsupported(format!(
            "single-ER solver needs exactly one ER, scenario has {}",
            scenario.num_ers()
        )));
    }
    Ok(())
}

pub fn solve_single_er(scenario: &Scenario) -> Result<SolveResult> {
    solve_single_er_with(scenario, SingleErMethod::StationaryRoot)
}

pub fn solve_single_er_with(scenario: &Scenario, method: SingleErMethod) -> Result<SolveResult> {
    require_single(scenario)?;
    let sp = single_params(scenario);
    let pt = scenario.frame_energy();
    let (q, iterations) = match method {
        SingleErMethod::StationaryRoot => {
            if stationarity(0.0, sp.p, sp.c1, sp.c2) <= 0.0 {
                (0.0, 0)
            } else {
                let root = bisect_root(|x| stationarity(x, sp.p, sp.c1, sp.c2), 0.0, sp.p / sp.c1, 0.0)?;
                ((root.x * sp.q_per_x).min(pt), root.iterations)
            }
        }
        SingleErMethod::GoldenSection => {
            let f = |q: f64| -> f64 { objective_single(scenario, q) };
            let best = golden_section_max(f, 0.0, pt, 1e-10 * pt);
            if best.value > f(0.0) {
                (best.x, best.iterations)
            } else {
                (0.0, best.iterations)
            }
        }
    };
    let allocation = Allocation { q, xi: vec![1.0] };
    let utility = energy_lower(scenario, q, &allocation.xi)?[0];
    SolveResult::at(scenario, allocation, utility, iterations)
}

fn objective_single(scenario: &Scenario, q: f64) -> f64 {
    crate::energy::energy_unchecked(scenario, q, &[1.0], crate::energy::Bracket::Lower)[0]
}

/// Weighted-sum energy: all power into one beam. For each candidate ER the
/// training energy maximizing `alpha_k(q) + (p_ave T - q) sum theta beta`
/// is found; the best candidate wins, ties going to the lower index, and
/// `q = 0` is kept when no candidate beats omnidirectional transmission.
pub fn solve_wse(scenario: &Scenario) -> Result<SolveResult> {
    let k = scenario.num_ers();
    let sum_theta_beta: f64 = (0..k).map(|i| scenario.theta(i) * scenario.beta(i)).sum();
    if !(sum_theta_beta > 0.0) {
        return Err(WetError::field("theta", "at least one weight must be positive"));
    }
    let pt = scenario.frame_energy();
    let omni = pt * sum_theta_beta;
    let mut best: Option<(usize, f64, f64)> = None;
    let mut iterations = 0;
    for cand in 0..k {
        if scenario.theta(cand) == 0.0 {
            continue;
        }
        let f = |q: f64| alpha(scenario, q, cand).unwrap_or(f64::NEG_INFINITY) + (pt - q) * sum_theta_beta;
        let opt = golden_section_max(f, 0.0, pt, 1e-10 * pt);
        iterations += opt.iterations;
        if best.is_none_or(|(_, _, v)| opt.value > v) {
            best = Some((cand, opt.x, opt.value));
        }
    }
    let (cand, q, _) = match best {
        Some((c, q, v)) if v > omni => (c, q, v),
        Some((c, _, _)) => (c, 0.0, omni),
        None => unreachable!("positive weight sum implies a candidate"),
    };
    let allocation = Allocation::one_hot(scenario, q, cand)?;
    let utility = wse_utility(scenario, &allocation)?;
    SolveResult::at(scenario, allocation, utility, iterations)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AntennaPoint {
    pub antennas: usize,
    pub wse: SolveResult,
    pub pfe: SolveResult,
}

/// Both multi-ER solvers at each antenna count.
pub fn antenna_sweep(scenario: &Scenario, antennas: &[usize], options: &BcdOptions) -> Result<Vec<AntennaPoint>> {
    antennas
        .iter()
        .map(|&m| {
            let s = scenario.with_antennas(m)?;
            Ok(AntennaPoint {
                antennas: m,
                wse: solve_wse(&s)?,
                pfe: solve_pfe(&s, options)?.0,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{ErProfile, PathLossModel};

    fn single() -> Scenario {
        Scenario::builder()
            .noise_power(1e-12)
            .er(ErProfile::with_beta(4.6296e-6))
            .build()
            .unwrap()
    }

    fn pair(d2: f64) -> Scenario {
        let pl = PathLossModel::default();
        Scenario::builder()
            .noise_power(1e-12)
            .er(ErProfile::at_distance(4.0, &pl).unwrap().theta(0.5))
            .er(ErProfile::at_distance(d2, &pl).unwrap().theta(0.5))
            .build()
            .unwrap()
    }

    #[test]
    fn single_er_optimum() {
        let r = solve_single_er(&single()).unwrap();
        assert!((r.allocation.q - 9.2).abs() < 0.1, "{}", r.allocation.q);
        assert!(!r.omnidirectional);
        let g = solve_single_er_with(&single(), SingleErMethod::GoldenSection).unwrap();
        assert!((g.allocation.q - r.allocation.q).abs() < 1e-5);
        assert!(r.utility >= g.utility * (1.0 - 1e-14));
    }

    #[test]
    fn slope_changes_sign_at_optimum() {
        let s = single();
        let q = solve_single_er(&s).unwrap().allocation.q;
        assert!(single_er_slope(&s, q * 0.99).unwrap() > 0.0);
        assert!(single_er_slope(&s, q * 1.01).unwrap() < 0.0);
        // against a central difference
        let h = 1e-4;
        let fd = (objective_single(&s, 5.0 + h) - objective_single(&s, 5.0 - h)) / (2.0 * h);
        let an = single_er_slope(&s, 5.0).unwrap();
        assert!(((fd - an) / an).abs() < 1e-6);
    }

    #[test]
    fn noise_threshold_gives_omni() {
        let s = single();
        let th = single_er_noise_threshold(&s);
        let at = s.with_noise_power(th * 1.000_001).unwrap();
        let r = solve_single_er(&at).unwrap();
        assert_eq!(r.allocation.q, 0.0);
        assert!(r.omnidirectional);
        let below = s.with_noise_power(th * 0.9).unwrap();
        assert!(solve_single_er(&below).unwrap().allocation.q > 0.0);
        let one = s.with_antennas(1).unwrap();
        assert_eq!(solve_single_er(&one).unwrap().allocation.q, 0.0);
    }

    #[test]
    fn single_solver_rejects_pairs() {
        assert!(solve_single_er(&pair(5.0)).is_err());
        assert!(single_er_slope(&pair(5.0), 1.0).is_err());
    }

    #[test]
    fn wse_picks_the_near_er() {
        let pl = PathLossModel::default();
        let s = Scenario::builder()
            .noise_power(1e-12)
            .er(ErProfile::at_distance(4.0, &pl).unwrap().theta(0.3))
            .er(ErProfile::at_distance(6.0, &pl).unwrap().theta(0.7))
            .build()
            .unwrap();
        let r = solve_wse(&s).unwrap();
        assert_eq!(r.allocation.xi, vec![1.0, 0.0]);
        assert!((r.allocation.q - 4.0).abs() < 0.05, "{}", r.allocation.q);
    }

    #[test]
    fn wse_tie_goes_to_lower_index() {
        let r = solve_wse(&pair(4.0)).unwrap();
        assert_eq!(r.allocation.xi, vec![1.0, 0.0]);
    }

    #[test]
    fn wse_matches_single_for_one_er() {
        let s = single();
        let a = solve_wse(&s).unwrap();
        let b = solve_single_er(&s).unwrap();
        assert!((a.allocation.q - b.allocation.q).abs() < 1e-5);
    }

    #[test]
    fn wse_zero_weights_rejected() {
        let pl = PathLossModel::default();
        let s = Scenario::builder()
            .er(ErProfile::at_distance(4.0, &pl).unwrap().theta(0.0))
            .er(ErProfile::at_distance(5.0, &pl).unwrap().theta(0.0))
            .build();
        if let Ok(s) = s {
            assert!(solve_wse(&s).is_err());
        }
    }

    #[test]
    fn antenna_sweep_grows_energy() {
        let pts = antenna_sweep(&pair(6.0), &[2, 4, 8], &BcdOptions::default()).unwrap();
        assert_eq!(pts.len(), 3);
        for w in pts.windows(2) {
            assert!(w[1].wse.utility > w[0].wse.utility);
            assert!(w[1].pfe.utility > w[0].pfe.utility);
        }
    }
}
