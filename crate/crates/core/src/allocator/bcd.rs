//! Block coordinate descent for the proportional-fair problem, alternating
//! water-filling in `xi` with a scalar search in `q`.

use serde::Serialize;

use super::scalar::golden_section_max;
use super::waterfill::waterfill;
use super::{pfe_utility, SolveResult};
use crate::energy::{energy_exact, energy_lower, pfe_coeffs_unchecked};
use crate::error::{Result, WetError};
use crate::scenario::{check_weights, Allocation, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BcdOptions {
    /// Stop when the objective changes by at most this much.
    pub epsilon: f64,
    /// Starting training energy; `0.05 p_ave T` when unset.
    pub q0: Option<f64>,
    /// Starting weights; uniform when unset.
    pub xi0: Option<Vec<f64>>,
    pub max_iterations: usize,
}

impl Default for BcdOptions {
    fn default() -> Self {
        Self {
            epsilon: 1e-9,
            q0: None,
            xi0: None,
            max_iterations: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BcdStep {
    pub q: f64,
    pub xi: Vec<f64>,
    /// `sum ln E~_k` in ln(joules).
    pub utility: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BcdTrace {
    pub steps: Vec<BcdStep>,
}

impl BcdTrace {
    pub fn utilities(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.utility).collect()
    }
}

/// `sum ln(b_k xi_k + d_k)`, the objective without the `K ln eta` offset.
pub(crate) fn pfe_objective(scenario: &Scenario, q: f64, xi: &[f64]) -> f64 {
    let c = pfe_coeffs_unchecked(scenario, q);
    c.b.iter()
        .zip(&c.d)
        .zip(xi)
        .map(|((b, d), x)| (b * x + d).ln())
        .sum()
}

fn eta_offset(scenario: &Scenario) -> f64 {
    scenario.num_ers() as f64 * scenario.eta().ln()
}

/// Best training energy for fixed weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QStep {
    pub q: f64,
    /// `sum ln E~_k` at `q`.
    pub utility: f64,
    pub iterations: usize,
    /// `q = 0` beat every interior point.
    pub omnidirectional: bool,
}

/// Golden-section search on `(0, p_ave T)` to `1e-6 p_ave T`, then compared
/// against the omnidirectional point `q = 0`.
pub fn solve_q_given_xi(scenario: &Scenario, xi: &[f64]) -> Result<QStep> {
    check_weights(scenario, xi)?;
    let (q, u, iterations, omni) = q_step(scenario, xi);
    Ok(QStep {
        q,
        utility: u + eta_offset(scenario),
        iterations,
        omnidirectional: omni,
    })
}

fn q_step(scenario: &Scenario, xi: &[f64]) -> (f64, f64, usize, bool) {
    let pt = scenario.frame_energy();
    let best = golden_section_max(|q| pfe_objective(scenario, q, xi), 0.0, pt, 1e-6 * pt);
    let omni = pfe_objective(scenario, 0.0, xi);
    if best.value > omni {
        (best.x, best.value, best.iterations, false)
    } else {
        (0.0, omni, best.iterations, true)
    }
}

pub fn solve_pfe(scenario: &Scenario, options: &BcdOptions) -> Result<(SolveResult, BcdTrace)> {
    let pt = scenario.frame_energy();
    let k = scenario.num_ers();
    if !(options.epsilon > 0.0) {
        return Err(WetError::field("epsilon", "must be positive"));
    }
    if options.max_iterations == 0 {
        return Err(WetError::field("max_iterations", "must be at least 1"));
    }
    let mut q = options.q0.unwrap_or(0.05 * pt);
    if !(q > 0.0 && q < pt) {
        return Err(WetError::TrainingEnergy {
            q,
            range: format!("(0, {pt})"),
        });
    }
    let mut xi = options.xi0.clone().unwrap_or_else(|| vec![1.0 / k as f64; k]);
    check_weights(scenario, &xi)?;

    let offset = eta_offset(scenario);
    let mut trace = BcdTrace::default();
    let mut u_prev = pfe_objective(scenario, q, &xi);
    trace.steps.push(BcdStep {
        q,
        xi: xi.clone(),
        utility: u_prev + offset,
    });

    let mut converged = false;
    let mut omni = false;
    let mut iterations = 0;
    while iterations < options.max_iterations {
        iterations += 1;
        // both blocks keep their old value unless the update is no worse, so
        // rounding in either step cannot make the trace decrease
        let xi_new = waterfill(scenario, q)?.xi;
        let u_wf = pfe_objective(scenario, q, &xi_new);
        let u_mid = if u_wf >= u_prev {
            xi = xi_new;
            u_wf
        } else {
            u_prev
        };
        let (q_new, u_q, _, q_omni) = q_step(scenario, &xi);
        if q_omni {
            q = 0.0;
            xi = vec![1.0 / k as f64; k];
            omni = true;
            converged = true;
            trace.steps.push(BcdStep {
                q,
                xi: xi.clone(),
                utility: u_q + offset,
            });
            break;
        }
        let u_new = if u_q >= u_mid {
            q = q_new;
            u_q
        } else {
            u_mid
        };
        trace.steps.push(BcdStep {
            q,
            xi: xi.clone(),
            utility: u_new + offset,
        });
        if (u_new - u_prev).abs() <= options.epsilon {
            converged = true;
            break;
        }
        u_prev = u_new;
    }

    let allocation = Allocation { q, xi };
    let result = SolveResult {
        utility: pfe_utility(scenario, &allocation)?,
        per_er_energy: energy_lower(scenario, allocation.q, &allocation.xi)?,
        exact_energy: energy_exact(scenario, allocation.q, &allocation.xi)?,
        allocation,
        iterations,
        converged,
        omnidirectional: omni,
    };
    Ok((result, trace))
}
