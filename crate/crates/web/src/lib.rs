//! Browser bindings. Each exported function takes plain numbers and returns a
//! JSON string for the page script; the `*_json` functions behind them are
//! ordinary Rust and are what the tests exercise.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use bswet_core::allocator::{solve_pfe, solve_single_er, solve_wse, waterfill, BcdOptions};
use bswet_core::energy::{baselines, pfe_coeffs, Bracket};
use bswet_core::scenario::dbm_to_watts;
use bswet_core::{ErProfile, PathLossModel, Result, Scenario};

#[derive(Serialize)]
struct Curve {
    q: Vec<f64>,
    exact: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    omni: f64,
    perfect_csi: f64,
    q_star: f64,
    e_star: f64,
}

fn scenario(antennas: usize, noise_dbm: f64, eta: f64, distances: &[f64], theta: Option<&[f64]>) -> Result<Scenario> {
    let pl = PathLossModel::default();
    let mut b = Scenario::builder()
        .antennas(antennas)
        .noise_power(dbm_to_watts(noise_dbm))
        .eta(eta);
    for (i, &d) in distances.iter().enumerate() {
        let mut er = ErProfile::at_distance(d, &pl)?;
        if let Some(t) = theta {
            er = er.theta(t[i]);
        }
        b = b.er(er);
    }
    b.build()
}

fn json<T: Serialize>(v: &T) -> std::result::Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// Harvested energy of one ER against training energy, with the optimum.
pub fn energy_curve_json(antennas: usize, distance_m: f64, noise_dbm: f64, eta: f64, points: usize) -> std::result::Result<String, String> {
    let s = scenario(antennas, noise_dbm, eta, &[distance_m], None).map_err(|e| e.to_string())?;
    let points = points.clamp(2, 2000);
    let pt = s.frame_energy();
    // denser near zero where the curve bends
    let q: Vec<f64> = (0..points)
        .map(|i| pt * 0.25 * (i as f64 / (points - 1) as f64).powi(2))
        .collect();
    let eval = |br: Bracket| -> Vec<f64> {
        q.iter()
            .map(|&q| {
                let x = s.training_snr(0, q);
                s.eta() * s.beta(0) * (pt - q) * ((s.antennas() - 1) as f64 * br.eval(x) + 1.0)
            })
            .collect()
    };
    let base = baselines(&s);
    let opt = solve_single_er(&s).map_err(|e| e.to_string())?;
    json(&Curve {
        exact: eval(Bracket::Exact),
        lower: eval(Bracket::Lower),
        upper: eval(Bracket::Upper),
        q,
        omni: base.omni[0],
        perfect_csi: base.perfect_csi[0],
        q_star: opt.allocation.q,
        e_star: opt.exact_energy[0],
    })
}

#[derive(Serialize)]
struct PairResult {
    objective: &'static str,
    q: f64,
    xi: Vec<f64>,
    energy: Vec<f64>,
    iterations: usize,
}

/// Weighted-sum and proportional-fair allocations for two ERs.
pub fn allocate_pair_json(antennas: usize, d1: f64, d2: f64, theta1: f64, noise_dbm: f64) -> std::result::Result<String, String> {
    let theta = [theta1, 1.0 - theta1];
    let s = scenario(antennas, noise_dbm, 0.8, &[d1, d2], Some(&theta)).map_err(|e| e.to_string())?;
    let wse = solve_wse(&s).map_err(|e| e.to_string())?;
    let (pfe, _) = solve_pfe(&s, &BcdOptions::default()).map_err(|e| e.to_string())?;
    json(&[
        PairResult {
            objective: "weighted-sum",
            q: wse.allocation.q,
            xi: wse.allocation.xi,
            energy: wse.per_er_energy,
            iterations: wse.iterations,
        },
        PairResult {
            objective: "proportional-fair",
            q: pfe.allocation.q,
            xi: pfe.allocation.xi,
            energy: pfe.per_er_energy,
            iterations: pfe.iterations,
        },
    ])
}

#[derive(Serialize)]
struct Split {
    xi: Vec<f64>,
    breakpoints: Vec<f64>,
    level: f64,
}

/// Water-filling beam split for ERs at the given distances (comma separated).
pub fn waterfill_json(distances: &str, antennas: usize, q: f64, noise_dbm: f64) -> std::result::Result<String, String> {
    let d: Vec<f64> = distances
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a distance")))
        .collect::<std::result::Result<_, _>>()?;
    let s = scenario(antennas, noise_dbm, 0.8, &d, None).map_err(|e| e.to_string())?;
    let w = waterfill(&s, q).map_err(|e| e.to_string())?;
    let c = pfe_coeffs(&s, q).map_err(|e| e.to_string())?;
    json(&Split {
        breakpoints: c.d.iter().zip(&c.b).map(|(d, b)| d / b).collect(),
        xi: w.xi,
        level: w.level,
    })
}

#[wasm_bindgen]
pub fn energy_curve(antennas: usize, distance_m: f64, noise_dbm: f64, eta: f64, points: usize) -> std::result::Result<String, JsError> {
    energy_curve_json(antennas, distance_m, noise_dbm, eta, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn allocate_pair(antennas: usize, d1: f64, d2: f64, theta1: f64, noise_dbm: f64) -> std::result::Result<String, JsError> {
    allocate_pair_json(antennas, d1, d2, theta1, noise_dbm).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn waterfill_split(distances: &str, antennas: usize, q: f64, noise_dbm: f64) -> std::result::Result<String, JsError> {
    waterfill_json(distances, antennas, q, noise_dbm).map_err(|e| JsError::new(&e))
}
