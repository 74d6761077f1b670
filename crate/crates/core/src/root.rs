//! Bisection for monotone decreasing functions.

use crate::{Error, Result};

/// Result of a bracketing solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

/// Finds `inf { s in [lo, hi] : f(s) <= 0 }` for a decreasing `f`.
///
/// The returned bracket satisfies `f(lo) > 0 >= f(hi)` (or `lo == hi` when
/// `f(lo) <= 0` already) and `hi - lo <= tol`.
pub fn bisect_decreasing<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo <= hi) || !(tol > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "bad bisection setup [{lo}, {hi}] tol {tol}"
        )));
    }
    let f_lo = f(lo)?;
    if f_lo <= 0.0 {
        return Ok(Root { value: lo, lo, hi: lo, iterations: 0 });
    }
    let f_hi = f(hi)?;
    if f_hi > 0.0 || f_hi.is_nan() || f_lo.is_nan() {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }
    let (mut a, mut b) = (lo, hi);
    let mut iterations = 0;
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let v = f(m)?;
        if v.is_nan() {
            return Err(Error::Domain(alloc::format!("objective is NaN at {m}")));
        }
        if v > 0.0 {
            a = m;
        } else {
            b = m;
        }
        iterations += 1;
    }
    Ok(Root { value: 0.5 * (a + b), lo: a, hi: b, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_square_root() {
        let r = bisect_decreasing(|x| Ok(2.0 - x * x), 0.0, 2.0, 1e-13).unwrap();
        assert!((r.value - core::f64::consts::SQRT_2).abs() < 1e-12);
        assert!(r.lo <= core::f64::consts::SQRT_2 && core::f64::consts::SQRT_2 <= r.hi);
    }

    #[test]
    fn degenerate_and_failing_cases() {
        let r = bisect_decreasing(|x| Ok(-x), 0.0, 1.0, 1e-12).unwrap();
        assert_eq!((r.value, r.lo, r.hi), (0.0, 0.0, 0.0));
        let e = bisect_decreasing(|_| Ok(1.0), 0.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(e, Error::NoSignChange { .. }));
    }
}
