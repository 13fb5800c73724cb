//! Closed-form beam weights for the proportional-fair problem at fixed `q`:
//! maximize `sum ln(b_k xi_k + d_k)` subject to `sum xi_k <= 1`, `xi_k >= 0`.

use serde::Serialize;

use crate::energy::pfe_coeffs_unchecked;
use crate::error::{Result, WetError};
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaterFill {
    pub xi: Vec<f64>,
    /// Water level `1/nu`; infinite when no ER can gain from beamforming.
    pub level: f64,
    pub active: usize,
}

/// Water-filling over breakpoints `r_k = d_k / b_k`: `xi_k = max(0, L - r_k)`
/// with `L` chosen so that the weights sum to one.
pub fn waterfill_coeffs(b: &[f64], d: &[f64]) -> Result<WaterFill> {
    if b.len() != d.len() || b.is_empty() {
        return Err(WetError::Domain(format!(
            "coefficient lengths {} and {} must match and be non-zero",
            b.len(),
            d.len()
        )));
    }
    if b.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(WetError::Domain("b coefficients must be finite and non-negative".into()));
    }
    if d.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(WetError::Domain("d coefficients must be finite and positive".into()));
    }
    let k = b.len();
    if b.iter().all(|&v| v == 0.0) {
        return Ok(WaterFill {
            xi: vec![1.0 / k as f64; k],
            level: f64::INFINITY,
            active: k,
        });
    }
    let r: Vec<f64> = b
        .iter()
        .zip(d)
        .map(|(&bk, &dk)| if bk > 0.0 { dk / bk } else { f64::INFINITY })
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| r[i].total_cmp(&r[j]).then(i.cmp(&j)));

    let mut partial = 0.0;
    let mut level = f64::NAN;
    let mut active = 0;
    for (n, &i) in order.iter().enumerate() {
        if !r[i].is_finite() {
            break;
        }
        let candidate = (1.0 + partial + r[i]) / (n + 1) as f64;
        if candidate <= r[i] {
            break;
        }
        partial += r[i];
        level = candidate;
        active = n + 1;
    }
    let xi = r.iter().map(|&rk| (level - rk).max(0.0)).collect();
    Ok(WaterFill { xi, level, active })
}

/// Water-filling at training energy `q`, which must lie strictly inside `(0, p_ave T)`.
pub fn waterfill(scenario: &Scenario, q: f64) -> Result<WaterFill> {
    if !(q > 0.0 && q < scenario.frame_energy()) {
        return Err(WetError::TrainingEnergy {
            q,
            range: format!("(0, {})", scenario.frame_energy()),
        });
    }
    let c = pfe_coeffs_unchecked(scenario, q);
    waterfill_coeffs(&c.b, &c.d)
}

/// Relative KKT residuals of a weight vector for the fixed-`q` problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KktResiduals {
    /// `max_k xi_k |1 - L b_k/(b_k xi_k + d_k)|`
    pub stationarity: f64,
    /// `max_k max(0, L b_k/(b_k xi_k + d_k) - 1)`: negative multiplier on `xi_k >= 0`.
    pub dual: f64,
    /// `|sum xi - 1|`
    pub budget: f64,
    /// Most negative weight, or zero.
    pub primal: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.stationarity.max(self.dual).max(self.budget).max(self.primal)
    }
}

pub fn kkt_residuals(b: &[f64], d: &[f64], xi: &[f64], level: f64) -> KktResiduals {
    let mut out = KktResiduals {
        stationarity: 0.0,
        dual: 0.0,
        budget: (xi.iter().sum::<f64>() - 1.0).abs(),
        primal: 0.0,
    };
    for ((&bk, &dk), &x) in b.iter().zip(d).zip(xi) {
        out.primal = out.primal.max(-x);
        if !level.is_finite() {
            continue;
        }
        let marginal = level * bk / (bk * x + dk);
        out.stationarity = out.stationarity.max(x * (1.0 - marginal).abs());
        out.dual = out.dual.max(marginal - 1.0);
    }
    out
}
