//! CSV and JSON output.
//!
//! Column schemas (ER indices are 1-based, energies in joules):
//!
//! - sweep: `q, mc_mean_k, mc_stderr_k, exact_k, lower_k, upper_k` for each ER `k`
//! - distance sweep: `d2_m, q, xi_k, lower_k, exact_k, utility, iterations, converged`,
//!   then `mc_mean_k, mc_stderr_k` when simulated
//! - antenna sweep: `antennas, wse_q, wse_xi_k, wse_energy_k, pfe_q, pfe_xi_k, pfe_energy_k`
//! - oracle: `label, er, q, mc_mean, mc_stderr, exact, lower, z, pass`
//!
//! Floats are written in shortest round-trip form, so identical inputs give
//! byte-identical files.

use serde::Serialize;

use crate::allocator::AntennaPoint;
use crate::error::{Result, WetError};
use crate::experiments::{DistanceRow, OracleCheck};
use crate::montecarlo::SweepRow;

fn num(v: f64) -> String {
    if v == 0.0 || (1e-3..1e6).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn per_er(prefix: &str, k: usize) -> impl Iterator<Item = String> + '_ {
    (1..=k).map(move |i| format!("{prefix}_{i}"))
}

struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    fn new(header: Vec<String>) -> Result<Self> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&header).map_err(io)?;
        Ok(Self { writer })
    }

    fn row(&mut self, fields: Vec<String>) -> Result<()> {
        self.writer.write_record(&fields).map_err(io)
    }

    fn finish(self) -> Result<String> {
        let bytes = self.writer.into_inner().map_err(|e| WetError::Unsupported(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| WetError::Unsupported(e.to_string()))
    }
}

fn io(e: csv::Error) -> WetError {
    WetError::Unsupported(format!("csv: {e}"))
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let k = rows.first().map_or(0, |r| r.exact.len());
    let mut header = vec!["q".to_string()];
    header.extend(per_er("mc_mean", k));
    header.extend(per_er("mc_stderr", k));
    header.extend(per_er("exact", k));
    header.extend(per_er("lower", k));
    header.extend(per_er("upper", k));
    let mut t = Table::new(header)?;
    for r in rows {
        let mut f = vec![num(r.q)];
        for col in [&r.mc.mean, &r.mc.std_error, &r.exact, &r.lower, &r.upper] {
            f.extend(col.iter().map(|v| num(*v)));
        }
        t.row(f)?;
    }
    t.finish()
}

pub fn distance_csv(rows: &[DistanceRow]) -> Result<String> {
    let k = rows.first().map_or(0, |r| r.xi.len());
    let simulated = rows.first().is_some_and(|r| r.mc_mean.is_some());
    let mut header = vec!["d2_m".to_string(), "q".to_string()];
    header.extend(per_er("xi", k));
    header.extend(per_er("lower", k));
    header.extend(per_er("exact", k));
    header.extend(["utility", "iterations", "converged"].map(String::from));
    if simulated {
        header.extend(per_er("mc_mean", k));
        header.extend(per_er("mc_stderr", k));
    }
    let mut t = Table::new(header)?;
    for r in rows {
        let mut f = vec![num(r.d2), num(r.q)];
        for col in [&r.xi, &r.lower, &r.exact] {
            f.extend(col.iter().map(|v| num(*v)));
        }
        f.push(num(r.utility));
        f.push(r.iterations.to_string());
        f.push(r.converged.to_string());
        if let (Some(m), Some(s)) = (&r.mc_mean, &r.mc_std_error) {
            f.extend(m.iter().chain(s).map(|v| num(*v)));
        }
        t.row(f)?;
    }
    t.finish()
}

pub fn antenna_csv(points: &[AntennaPoint]) -> Result<String> {
    let k = points.first().map_or(0, |p| p.wse.allocation.xi.len());
    let mut header = vec!["antennas".to_string(), "wse_q".to_string()];
    header.extend(per_er("wse_xi", k));
    header.extend(per_er("wse_energy", k));
    header.push("pfe_q".into());
    header.extend(per_er("pfe_xi", k));
    header.extend(per_er("pfe_energy", k));
    let mut t = Table::new(header)?;
    for p in points {
        let mut f = vec![p.antennas.to_string(), num(p.wse.allocation.q)];
        f.extend(p.wse.allocation.xi.iter().chain(&p.wse.per_er_energy).map(|v| num(*v)));
        f.push(num(p.pfe.allocation.q));
        f.extend(p.pfe.allocation.xi.iter().chain(&p.pfe.per_er_energy).map(|v| num(*v)));
        t.row(f)?;
    }
    t.finish()
}

pub fn oracle_csv(checks: &[OracleCheck]) -> Result<String> {
    let header = ["label", "er", "q", "mc_mean", "mc_stderr", "exact", "lower", "z", "pass"]
        .map(String::from)
        .to_vec();
    let mut t = Table::new(header)?;
    for c in checks {
        t.row(vec![
            c.label.clone(),
            c.er.to_string(),
            num(c.q),
            num(c.mc_mean),
            num(c.mc_std_error),
            num(c.exact),
            num(c.lower),
            format!("{:.3}", c.z),
            c.pass.to_string(),
        ])?;
    }
    t.finish()
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| WetError::Unsupported(format!("json: {e}")))
}
