//! Ready-made experiment drivers: the distance sweep of the two-ER
//! proportional-fair problem, the antenna sweep and the Monte Carlo oracle
//! point set.

use serde::Serialize;

use crate::allocator::{solve_pfe, BcdOptions, BcdTrace};
use crate::energy::{energy_exact, energy_lower};
use crate::error::{Result, WetError};
use crate::montecarlo::{simulate_energy, McConfig};
use crate::scenario::{Allocation, ErProfile, PathLossModel, Scenario};

/// One row of the distance sweep: BCD optimum with ER 2 at `d2` meters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceRow {
    pub d2: f64,
    pub q: f64,
    pub xi: Vec<f64>,
    pub lower: Vec<f64>,
    pub exact: Vec<f64>,
    pub utility: f64,
    pub iterations: usize,
    pub converged: bool,
    pub mc_mean: Option<Vec<f64>>,
    pub mc_std_error: Option<Vec<f64>>,
    #[serde(skip)]
    pub trace: BcdTrace,
}

/// Solves the proportional-fair problem with the last ER moved to each of
/// `distances`, optionally checking the optimum by simulation.
pub fn distance_sweep(
    template: &Scenario,
    model: &PathLossModel,
    distances: &[f64],
    options: &BcdOptions,
    mc: Option<&McConfig>,
) -> Result<Vec<DistanceRow>> {
    if template.num_ers() < 2 {
        return Err(WetError::Unsupported("distance sweep needs at least two ERs".into()));
    }
    let last = template.num_ers() - 1;
    distances
        .iter()
        .map(|&d| {
            let mut ers = template.ers().to_vec();
            let old = ers[last];
            ers[last] = ErProfile {
                rho: old.rho,
                theta: old.theta,
                ..ErProfile::at_distance(d, model)?
            };
            let s = template.with_ers(ers)?;
            let (r, trace) = solve_pfe(&s, options)?;
            let (mc_mean, mc_std_error) = match mc {
                Some(cfg) => {
                    let e = simulate_energy(&s, r.allocation.q, &r.allocation.xi, cfg)?;
                    (Some(e.mean), Some(e.std_error))
                }
                None => (None, None),
            };
            Ok(DistanceRow {
                d2: d,
                q: r.allocation.q,
                xi: r.allocation.xi,
                lower: r.per_er_energy,
                exact: r.exact_energy,
                utility: r.utility,
                iterations: r.iterations,
                converged: r.converged,
                mc_mean,
                mc_std_error,
                trace,
            })
        })
        .collect()
}

/// The two-ER template used by the distance sweep: ER 1 at 4 m, ER 2 at 6 m.
pub fn two_er_template() -> Scenario {
    let pl = PathLossModel::default();
    Scenario::builder()
        .noise_power(1e-12)
        .er(ErProfile::at_distance(4.0, &pl).expect("positive distance").theta(0.3))
        .er(ErProfile::at_distance(6.0, &pl).expect("positive distance").theta(0.7))
        .build()
        .expect("valid template")
}

/// A labelled `(scenario, allocation)` at which simulation and closed form are compared.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OraclePoint {
    pub label: String,
    #[serde(skip)]
    pub scenario: Scenario,
    pub allocation: Allocation,
}

/// At least 20 points over `K in {1, 2}` and `M in {2, 4, 8}`, spanning low to
/// high training SNR. Two-ER weights always sum to one.
pub fn oracle_points() -> Vec<OraclePoint> {
    let pl = PathLossModel::default();
    let mut out = Vec::new();
    for &m in &[2usize, 4, 8] {
        let single = Scenario::builder()
            .antennas(m)
            .noise_power(1e-12)
            .er(ErProfile::at_distance(6.0, &pl).expect("positive distance"))
            .build()
            .expect("valid scenario");
        for &q in &[0.05, 0.5, 9.2, 60.0] {
            out.push(OraclePoint {
                label: format!("K=1 M={m} q={q}"),
                allocation: Allocation { q, xi: vec![1.0] },
                scenario: single.clone(),
            });
        }
        let pair = two_er_template().with_antennas(m).expect("valid scenario");
        for &q in &[1.0, 4.0, 30.0] {
            for xi in [[0.5, 0.5], [0.8, 0.2], [1.0, 0.0]] {
                out.push(OraclePoint {
                    label: format!("K=2 M={m} q={q} xi=({}, {})", xi[0], xi[1]),
                    allocation: Allocation { q, xi: xi.to_vec() },
                    scenario: pair.clone(),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheck {
    pub label: String,
    pub er: usize,
    pub q: f64,
    pub mc_mean: f64,
    pub mc_std_error: f64,
    pub exact: f64,
    pub lower: f64,
    /// `(mc - exact) / std_error`
    pub z: f64,
    pub pass: bool,
}

/// Compares simulation with the exact closed form at every point, per ER;
/// a check passes when `|z| <= z_limit`.
pub fn check_oracle(points: &[OraclePoint], config: &McConfig, z_limit: f64) -> Result<Vec<OracleCheck>> {
    let mut out = Vec::new();
    for p in points {
        let a = &p.allocation;
        let mc = simulate_energy(&p.scenario, a.q, &a.xi, config)?;
        let exact = energy_exact(&p.scenario, a.q, &a.xi)?;
        let lower = energy_lower(&p.scenario, a.q, &a.xi)?;
        for k in 0..p.scenario.num_ers() {
            let z = (mc.mean[k] - exact[k]) / mc.std_error[k];
            out.push(OracleCheck {
                label: p.label.clone(),
                er: k + 1,
                q: a.q,
                mc_mean: mc.mean[k],
                mc_std_error: mc.std_error[k],
                exact: exact[k],
                lower: lower[k],
                z,
                pass: z.abs() <= z_limit,
            });
        }
    }
    Ok(out)
}
