//! Symbolic threshold functions `phi(n)` for limsup events.
//!
//! Only three families are supported, written as tiny expressions:
//! `n^a`, `n*log(n+1)^c` and `B^n`. There is deliberately no general
//! expression evaluator.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{math, Error, Result};

/// A nondecreasing threshold function tending to infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhiFamily {
    /// `n^a` with `a > 0`.
    Power { a: f64 },
    /// `n * log(n+1)^c` with `c >= 0`.
    NLog { c: f64 },
    /// `b^n` with `b > 1`.
    Geometric { b: f64 },
}

impl PhiFamily {
    /// Validates the parameters so the function is nondecreasing and unbounded.
    pub fn validated(self) -> Result<Self> {
        let ok = match self {
            PhiFamily::Power { a } => a.is_finite() && a > 0.0,
            PhiFamily::NLog { c } => c.is_finite() && c >= 0.0,
            PhiFamily::Geometric { b } => b.is_finite() && b > 1.0,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::InvalidParameter(format!(
                "{self} is not nondecreasing with limit infinity"
            )))
        }
    }

    /// `phi(n)` as a float (may be `inf` for huge geometric values).
    pub fn eval(&self, n: u64) -> f64 {
        let x = n as f64;
        match *self {
            PhiFamily::Power { a } => int_pow(x, a).unwrap_or_else(|| math::powf(x, a)),
            PhiFamily::NLog { c } => {
                let l = math::ln1p(x);
                x * int_pow(l, c).unwrap_or_else(|| math::powf(l, c))
            }
            PhiFamily::Geometric { b } => int_pow(b, x).unwrap_or_else(|| math::powf(b, x)),
        }
    }

    /// `ln phi(n)`, finite even when `phi(n)` overflows.
    pub fn ln_eval(&self, n: u64) -> f64 {
        let x = n as f64;
        match *self {
            PhiFamily::Power { a } => a * math::ln(x),
            PhiFamily::NLog { c } => math::ln(x) + c * math::ln(math::ln1p(x)),
            PhiFamily::Geometric { b } => x * math::ln(b),
        }
    }

    /// `[phi(1), ..., phi(n_max)]`.
    pub fn tabulate(&self, n_max: u64) -> Vec<f64> {
        (1..=n_max).map(|n| self.eval(n)).collect()
    }

    /// Upper bound for `sum_{n > n0} (phi(n) + n log^2 phi(n)) / phi(n)^2` by
    /// the integral test, where a closed form is available.
    ///
    /// Only the power family with `a > 1` is handled; the summand is then
    /// `n^{-a} + a^2 n^{1-2a} ln^2 n`, which is decreasing once
    /// `ln n >= 2/(2a-1)`. Returns `None` when the series diverges, the
    /// family has no implemented bound, or `n0` is before the decreasing range.
    pub fn series_tail_upper(&self, n0: u64) -> Option<f64> {
        let PhiFamily::Power { a } = *self else {
            return None;
        };
        if a <= 1.0 || n0 < 2 {
            return None;
        }
        let ln_n = math::ln(n0 as f64);
        if ln_n < 2.0 / (2.0 * a - 1.0) {
            return None;
        }
        let x = n0 as f64;
        let first = math::powf(x, 1.0 - a) / (a - 1.0);
        let p = 2.0 * a - 2.0;
        let second = a * a
            * math::powf(x, -p)
            * (ln_n * ln_n / p + 2.0 * ln_n / (p * p) + 2.0 / (p * p * p));
        Some(first + second)
    }
}

/// `x^y` by repeated squaring when `y` is a small nonnegative integer, so
/// that thresholds such as `n^2` are exact.
fn int_pow(x: f64, y: f64) -> Option<f64> {
    if y < 0.0 || y > 64.0 || y != math::floor(y) {
        return None;
    }
    let mut e = y as u32;
    let (mut base, mut acc) = (x, 1.0);
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    Some(acc)
}

impl fmt::Display for PhiFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiFamily::Power { a } => write!(f, "n^{a}"),
            PhiFamily::NLog { c } => write!(f, "n*log(n+1)^{c}"),
            PhiFamily::Geometric { b } => write!(f, "{b}^n"),
        }
    }
}

fn parse_num(s: &str, whole: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::InvalidParameter(format!("bad number {s:?} in phi spec {whole:?}")))
}

impl FromStr for PhiFamily {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let s: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
        let family = if let Some(rest) = s.strip_prefix("n*log(n+1)") {
            let c = match rest.strip_prefix('^') {
                Some(c) => parse_num(c, spec)?,
                None if rest.is_empty() => 1.0,
                None => return Err(bad_spec(spec)),
            };
            PhiFamily::NLog { c }
        } else if let Some(a) = s.strip_prefix("n^") {
            PhiFamily::Power { a: parse_num(a, spec)? }
        } else if s == "n" {
            PhiFamily::Power { a: 1.0 }
        } else if let Some(b) = s.strip_suffix("^n") {
            PhiFamily::Geometric { b: parse_num(b, spec)? }
        } else {
            return Err(bad_spec(spec));
        };
        family.validated()
    }
}

fn bad_spec(spec: &str) -> Error {
    Error::InvalidParameter(format!(
        "phi spec {spec:?} is not one of n^a, n*log(n+1)^c, B^n"
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn parses_the_three_families() {
        assert_eq!("n^0.4".parse::<PhiFamily>().unwrap(), PhiFamily::Power { a: 0.4 });
        assert_eq!("n ^ 2".parse::<PhiFamily>().unwrap(), PhiFamily::Power { a: 2.0 });
        assert_eq!(
            "n*log(n+1)^1.5".parse::<PhiFamily>().unwrap(),
            PhiFamily::NLog { c: 1.5 }
        );
        assert_eq!("n*log(n+1)".parse::<PhiFamily>().unwrap(), PhiFamily::NLog { c: 1.0 });
        assert_eq!("2^n".parse::<PhiFamily>().unwrap(), PhiFamily::Geometric { b: 2.0 });
        for bad in ["5", "n^0", "1^n", "0.5^n", "n^-1", "sin(n)", "n*log(n+1)^x", ""] {
            assert!(bad.parse::<PhiFamily>().is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        for s in ["n^0.4", "n*log(n+1)^1.5", "2^n", "n^2"] {
            let f: PhiFamily = s.parse().unwrap();
            assert_eq!(f.to_string().parse::<PhiFamily>().unwrap(), f);
        }
    }

    #[test]
    fn values() {
        let sq = PhiFamily::Power { a: 2.0 };
        assert_eq!(sq.eval(1000), 1e6);
        let g = PhiFamily::Geometric { b: 2.0 };
        assert_eq!(g.eval(30), (1u64 << 30) as f64);
        assert!((g.ln_eval(5000) - 5000.0 * math::LN_2).abs() < 1e-9);
        let nl = PhiFamily::NLog { c: 1.0 };
        assert!((nl.eval(3) - 3.0 * math::ln(4.0)).abs() < 1e-12);
        assert_eq!(sq.tabulate(3), [1.0, 4.0, 9.0]);
    }

    #[test]
    fn integral_tail_bound() {
        let sq = PhiFamily::Power { a: 2.0 };
        let t = sq.series_tail_upper(1000).unwrap();
        let direct: f64 = (1001..2_000_000u64)
            .map(|n| {
                let p = sq.eval(n);
                let l = math::ln(p);
                (p + n as f64 * l * l) / (p * p)
            })
            .sum();
        assert!(direct < t && t < 1.5 * direct + 1e-6);
        assert!(PhiFamily::Power { a: 0.4 }.series_tail_upper(1000).is_none());
        assert!(PhiFamily::NLog { c: 2.0 }.series_tail_upper(1000).is_none());
    }
}
