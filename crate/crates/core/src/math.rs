//! Floating-point helpers that behave identically with and without `std`.
//!
//! Everything routes through `libm` so results are bit-identical on every
//! target, which the reproducibility guarantees of the CLI rely on.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub const LN_2: f64 = core::f64::consts::LN_2;

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn expm1(x: f64) -> f64 {
    libm::expm1(x)
}

#[inline]
pub fn ln1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn exp2(x: f64) -> f64 {
    libm::exp2(x)
}

#[inline]
pub fn ldexp(x: f64, e: i32) -> f64 {
    libm::scalbn(x, e)
}

/// Natural logarithm of a positive big integer, accurate to a few ulps
/// regardless of its size.
pub fn ln_biguint(x: &BigUint) -> f64 {
    debug_assert!(!x.is_zero());
    let bits = x.bits();
    if bits <= 1000 {
        ln(x.to_f64().unwrap_or(f64::INFINITY))
    } else {
        let shift = bits - 64;
        let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
        ln(top) + shift as f64 * LN_2
    }
}

/// Natural logarithm of a positive rational.
pub fn ln_rational(x: &BigRational) -> f64 {
    debug_assert!(x.is_positive());
    ln_biguint(x.numer().magnitude()) - ln_biguint(x.denom().magnitude())
}

/// Largest f64 not exceeding `x`.
pub fn biguint_to_f64_down(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        return x.to_u64().map(|v| v as f64).unwrap_or(0.0);
    }
    let shift = bits - 53;
    let top = (x >> shift).to_u64().unwrap_or(0) as f64;
    ldexp(top, shift as i32)
}

/// Smallest f64 not below `x`.
pub fn biguint_to_f64_up(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        return x.to_u64().map(|v| v as f64).unwrap_or(0.0);
    }
    let shift = bits - 53;
    let top = x >> shift;
    let exact = (&top << shift) == *x;
    let top = top.to_u64().unwrap_or(0) + u64::from(!exact);
    ldexp(top as f64, shift as i32)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if abs(self.sum) >= abs(x) {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.carry);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn ln_of_huge_integers() {
        let x = BigUint::from(1u8) << 5000u32;
        let got = ln_biguint(&x);
        assert!((got - 5000.0 * LN_2).abs() < 1e-9);
        let r = BigRational::new(BigInt::from(1), BigInt::from(1) << 3000u32);
        assert!((ln_rational(&r) + 3000.0 * LN_2).abs() < 1e-9);
    }

    #[test]
    fn directed_conversions_bracket_the_integer() {
        let x = (BigUint::from(1u8) << 80u32) + BigUint::from(12345u32);
        let lo = biguint_to_f64_down(&x);
        let hi = biguint_to_f64_up(&x);
        assert!(lo < hi);
        let lo_b = BigUint::from(lo as u128);
        let hi_b = BigUint::from(hi as u128);
        assert!(lo_b <= x && x <= hi_b);
        let small = BigUint::from(1u64 << 52);
        assert_eq!(biguint_to_f64_down(&small), biguint_to_f64_up(&small));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1.0);
        for _ in 0..1000 {
            s.add(1e-17);
        }
        assert!((s.value() - (1.0 + 1e-14)).abs() < 1e-18);
    }
}
