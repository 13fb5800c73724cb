//! One-dimensional solvers shared by the allocation problems.

use crate::error::{Result, WetError};

/// `(sqrt(5) - 1) / 2`
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarOptimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Golden-section search for the maximum of a unimodal `f` on the open
/// interval `(lo, hi)`. Only interior points are evaluated.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> ScalarOptimum {
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;
    while b - a > tol && iterations < 10_000 {
        iterations += 1;
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    let (x, value) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    ScalarOptimum {
        x,
        value,
        iterations,
    }
}

/// Bisection for a sign change of `f` on `[lo, hi]`, stopping when the bracket
/// is narrower than `tol`.
pub fn bisect_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<ScalarOptimum> {
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(ScalarOptimum { x: a, value: 0.0, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(ScalarOptimum { x: b, value: 0.0, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(WetError::Domain(format!(
            "no sign change on [{lo}, {hi}]: f = {fa}, {fb}"
        )));
    }
    let neg_at_a = fa < 0.0;
    let mut iterations = 0;
    let mut mid = 0.5 * (a + b);
    let mut fm = f(mid);
    while b - a > tol && iterations < 2_000 {
        iterations += 1;
        if fm == 0.0 {
            break;
        }
        if (fm < 0.0) == neg_at_a {
            a = mid;
        } else {
            b = mid;
        }
        let next = 0.5 * (a + b);
        if next == mid {
            break;
        }
        mid = next;
        fm = f(mid);
    }
    Ok(ScalarOptimum {
        x: mid,
        value: fm,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let r = golden_section_max(|x| -(x - 2.5).powi(2), 0.0, 10.0, 1e-9);
        assert!((r.x - 2.5).abs() < 1e-8);
        assert!(r.iterations > 10);
    }

    #[test]
    fn golden_handles_peak_at_boundary() {
        let r = golden_section_max(|x| -x, 0.0, 1.0, 1e-10);
        assert!(r.x < 1e-9 && r.x > 0.0);
    }

    #[test]
    fn bisection_finds_root() {
        let r = bisect_root(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-13);
        let r = bisect_root(|x| 2.0 - x * x, 0.0, 2.0, 1e-14).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect_root(|x| x * x + 1.0, -1.0, 1.0, 1e-9).is_err());
    }
}
