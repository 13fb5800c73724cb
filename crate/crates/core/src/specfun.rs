//! Exponential integral `E1(t) = ∫_t^∞ e^{-u}/u du` and the expectation
//! `E[1/(1 + c|X|^2)]` for `X ~ CN(0, beta)` built on it.

use crate::error::{Result, WetError};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const EPS: f64 = 1e-16;
const MAX_TERMS: usize = 500;

/// Series below this argument, continued fraction above.
const SERIES_CROSSOVER: f64 = 1.0;

/// Upper incomplete gamma function of order zero, `Γ(0, t) = E1(t)`.
pub fn gamma1(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(WetError::Domain(format!("gamma1 needs t > 0, got {t}")));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    Ok(if t <= SERIES_CROSSOVER {
        e1_series(t)
    } else {
        e1_scaled_cf(t) * (-t).exp()
    })
}

/// `e^t E1(t)`, finite for every `t > 0`.
pub fn scaled_gamma1(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(WetError::Domain(format!("scaled_gamma1 needs t > 0, got {t}")));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    Ok(if t <= SERIES_CROSSOVER {
        t.exp() * e1_series(t)
    } else {
        e1_scaled_cf(t)
    })
}

fn e1_series(t: f64) -> f64 {
    // E1(t) = -γ - ln t - Σ_{n≥1} (-t)^n / (n n!)
    let mut sum = 0.0;
    let mut fact_pow = 1.0; // (-t)^n / n!
    for n in 1..MAX_TERMS {
        fact_pow *= -t / n as f64;
        let term = fact_pow / n as f64;
        sum += term;
        if term.abs() < EPS * sum.abs().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - t.ln() - sum
}

/// Modified Lentz evaluation of `e^t E1(t) = 1/(t+1- 1²/(t+3- 2²/(t+5- ...)))`.
fn e1_scaled_cf(t: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = t + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_TERMS {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// `E[1/(1 + c|X|^2)]` for `X ~ CN(0, beta)`, i.e. `e^s E1(s) s` with `s = 1/(c beta)`.
///
/// Tends to 1 as `c beta -> 0` and stays strictly between
/// `ln(1+2cβ)/(2cβ)` and `ln(1+cβ)/(cβ)`.
pub fn expectation_inv_one_plus(c: f64, beta: f64) -> Result<f64> {
    if !(c > 0.0 && beta > 0.0) {
        return Err(WetError::Domain(format!(
            "expectation needs c > 0 and beta > 0, got c={c}, beta={beta}"
        )));
    }
    Ok(1.0 - one_minus_expectation(c * beta))
}

/// Largest argument for which the leading-order asymptotic form is used.
const LARGE_SNR: f64 = 1e12;
/// Above this `s = 1/x` the asymptotic series of `s e^s E1(s)` is used.
const ASYMPTOTIC_S: f64 = 40.0;

/// `1 - E[1/(1 + x Y)]` with `Y ~ Exp(1)`, accurate for every `x >= 0`.
///
/// This is the beamforming-gain bracket of the exact harvested energy, with
/// `x` the training SNR.
pub fn one_minus_expectation(x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    if x > LARGE_SNR {
        // s e^s E1(s) ~ s(ln(1/s) - γ) for s -> 0
        return 1.0 - (x.ln() - EULER_GAMMA) / x;
    }
    let s = 1.0 / x;
    if s >= ASYMPTOTIC_S {
        // 1 - s e^s E1(s) = Σ_{n≥1} (-1)^{n+1} n! / s^n, truncated at its smallest term
        let mut term = 1.0;
        let mut sum = 0.0;
        for n in 1..MAX_TERMS {
            let next = term * n as f64 / s;
            if n > 1 && next.abs() >= term.abs() {
                break;
            }
            term = next;
            sum += if n % 2 == 1 { term } else { -term };
            if term < EPS * sum.abs() {
                break;
            }
        }
        return sum;
    }
    1.0 - s * scaled_gamma1(s).expect("s > 0")
}

/// `ln(1+x)/x`, continuous at 0.
pub fn log1p_ratio(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x / 2.0 + x * x / 3.0 - x * x * x / 4.0
    } else {
        x.ln_1p() / x
    }
}

/// `1 - ln(1+x)/x` without cancellation for small `x`.
pub fn one_minus_log1p_ratio(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        x / 2.0 - x * x / 3.0 + x * x * x / 4.0 - x * x * x * x / 5.0
    } else {
        1.0 - x.ln_1p() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_argument() {
        assert!(gamma1(0.0).is_err());
        assert!(gamma1(-1.0).is_err());
        assert!(gamma1(f64::NAN).is_err());
        assert!(expectation_inv_one_plus(0.0, 1.0).is_err());
        assert!(expectation_inv_one_plus(1.0, -1.0).is_err());
    }

    #[test]
    fn crossover_is_continuous() {
        let below = e1_series(1.0);
        let above = e1_scaled_cf(1.0) * (-1.0f64).exp();
        assert!(((below - above) / below).abs() < 1e-13);
    }

    #[test]
    fn large_argument_decays() {
        let v = gamma1(50.0).unwrap();
        assert!(v > 0.0 && v < (-50.0f64).exp() / 50.0);
        assert_eq!(gamma1(f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn expectation_limits() {
        assert!((expectation_inv_one_plus(1e-300, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((expectation_inv_one_plus(1e-10, 1.0).unwrap() - 1.0).abs() < 1e-9);
        let big = expectation_inv_one_plus(1e15, 1.0).unwrap();
        assert!(big > 0.0 && big < 1e-13);
    }

    #[test]
    fn bracket_regimes_join() {
        // asymptotic series vs continued fraction around s = 40
        for &s in &[39.0, 39.999, 40.0, 40.001, 41.0] {
            let x: f64 = 1.0 / s;
            let cf = 1.0 - s * e1_scaled_cf(s);
            let joined = one_minus_expectation(x);
            assert!(((cf - joined) / joined).abs() < 1e-12, "s={s}");
        }
        let x = LARGE_SNR;
        let a = one_minus_expectation(x * 0.999_999);
        let b = one_minus_expectation(x * 1.000_001);
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn log_ratios_smooth_at_switch() {
        for &x in &[9.9e-5f64, 1e-4, 1.01e-4] {
            let direct = 1.0 - x.ln_1p() / x;
            assert!(((one_minus_log1p_ratio(x) - direct) / direct).abs() < 1e-9);
            assert!((log1p_ratio(x) - x.ln_1p() / x).abs() < 1e-15);
        }
        assert_eq!(one_minus_log1p_ratio(0.0), 0.0);
        assert_eq!(log1p_ratio(0.0), 1.0);
    }
}
