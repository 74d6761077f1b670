//! Outward-rounded `f64` interval arithmetic.
//!
//! Every operation computes the round-to-nearest result and then widens it
//! by one ulp on each side. That is slightly wasteful but never wrong, and
//! it needs no control over the hardware rounding mode.

use core::ops::{Add, Div, Mul, Sub};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::math;

/// A closed interval `[lo, hi]` known to contain some real number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
}

#[inline]
fn down(x: f64) -> f64 {
    if x == 0.0 {
        // Exact zero stays exact; the operations below produce exact zeros
        // only from exact zero inputs.
        0.0
    } else {
        x.next_down()
    }
}

#[inline]
fn up(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.next_up()
    }
}

impl Enclosure {
    pub const ZERO: Enclosure = Enclosure { lo: 0.0, hi: 0.0 };

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "bad enclosure [{lo}, {hi}]");
        Enclosure { lo, hi }
    }

    /// An exactly representable value.
    pub fn exact(x: f64) -> Self {
        Enclosure { lo: x, hi: x }
    }

    /// Encloses an integer given as `u64`.
    pub fn from_u64(x: u64) -> Self {
        let f = x as f64;
        if f as u64 == x && f < 18446744073709551615.0 {
            Enclosure::exact(f)
        } else {
            Enclosure { lo: f.next_down(), hi: f.next_up() }
        }
    }

    pub fn from_biguint(x: &BigUint) -> Self {
        Enclosure {
            lo: math::biguint_to_f64_down(x),
            hi: math::biguint_to_f64_up(x),
        }
    }

    /// Encloses a nonnegative rational.
    pub fn from_rational(x: &BigRational) -> Self {
        debug_assert!(!x.is_negative());
        if x.is_zero() {
            return Enclosure::ZERO;
        }
        let n = Enclosure::from_biguint(x.numer().magnitude());
        let d = Enclosure::from_biguint(x.denom().magnitude());
        if n.hi.is_finite() && d.hi.is_finite() && d.lo > 0.0 {
            return n / d;
        }
        // Huge numerator or denominator: t = floor(x 2^k) has about 64 bits
        // and x lies in [t, t + 1] 2^-k.
        let (nm, dm) = (x.numer().magnitude(), x.denom().magnitude());
        let k = dm.bits() as i64 - nm.bits() as i64 + 64;
        let t = if k >= 0 { (nm << k as u64) / dm } else { nm / (dm << (-k) as u64) };
        let e = (-k).clamp(i32::MIN as i64, i32::MAX as i64) as i32;
        let lo = math::ldexp(math::biguint_to_f64_down(&t), e);
        let hi = math::ldexp(math::biguint_to_f64_up(&(t + 1u32)), e);
        // Scaling into the subnormal range rounds; widen by one step.
        if lo < f64::MIN_POSITIVE {
            return Enclosure { lo: 0.0, hi: hi.next_up() };
        }
        Enclosure { lo, hi }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Hull of two enclosures.
    pub fn hull(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Reciprocal of a positive enclosure.
    pub fn recip(self) -> Enclosure {
        debug_assert!(self.lo > 0.0);
        Enclosure {
            lo: down(1.0 / self.hi),
            hi: up(1.0 / self.lo),
        }
    }

    /// Square of a nonnegative enclosure.
    pub fn sqr(self) -> Enclosure {
        self * self
    }

    /// `x * 2^e`, exact unless it overflows or underflows.
    pub fn scale2(self, e: i32) -> Enclosure {
        Enclosure {
            lo: down(math::ldexp(self.lo, e)),
            hi: up(math::ldexp(self.hi, e)),
        }
    }

    /// Enclosure of the real logarithm; the inputs must be positive.
    pub fn ln(self) -> Enclosure {
        debug_assert!(self.lo > 0.0);
        // libm's log is accurate to within 1 ulp; widen by two.
        let lo = math::ln(self.lo);
        let hi = math::ln(self.hi);
        Enclosure {
            lo: down(down(lo)),
            hi: up(up(hi)),
        }
    }
}

impl Add for Enclosure {
    type Output = Enclosure;
    #[inline]
    fn add(self, o: Enclosure) -> Enclosure {
        Enclosure {
            lo: down(self.lo + o.lo),
            hi: up(self.hi + o.hi),
        }
    }
}

impl Sub for Enclosure {
    type Output = Enclosure;
    #[inline]
    fn sub(self, o: Enclosure) -> Enclosure {
        Enclosure {
            lo: down(self.lo - o.hi),
            hi: up(self.hi - o.lo),
        }
    }
}

impl Mul for Enclosure {
    type Output = Enclosure;
    #[inline]
    fn mul(self, o: Enclosure) -> Enclosure {
        if self.lo >= 0.0 && o.lo >= 0.0 {
            return Enclosure {
                lo: down(self.lo * o.lo),
                hi: up(self.hi * o.hi),
            };
        }
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Enclosure { lo: down(lo), hi: up(hi) }
    }
}

impl Div for Enclosure {
    type Output = Enclosure;
    #[inline]
    fn div(self, o: Enclosure) -> Enclosure {
        debug_assert!(o.lo > 0.0, "division by an enclosure containing zero");
        if self.lo >= 0.0 {
            Enclosure {
                lo: down(self.lo / o.hi),
                hi: up(self.hi / o.lo),
            }
        } else {
            self * o.recip()
        }
    }
}

/// Sums enclosures in fixed-size blocks so rounding slack grows with the
/// square root of the term count rather than linearly.
#[derive(Clone, Debug)]
pub struct BlockSum {
    total: Enclosure,
    block: Enclosure,
    in_block: usize,
}

impl Default for BlockSum {
    fn default() -> Self {
        BlockSum::new()
    }
}

impl BlockSum {
    const BLOCK: usize = 1024;

    pub fn new() -> Self {
        BlockSum {
            total: Enclosure::ZERO,
            block: Enclosure::ZERO,
            in_block: 0,
        }
    }

    #[inline]
    pub fn add(&mut self, x: Enclosure) {
        self.block = self.block + x;
        self.in_block += 1;
        if self.in_block == Self::BLOCK {
            self.total = self.total + self.block;
            self.block = Enclosure::ZERO;
            self.in_block = 0;
        }
    }

    pub fn value(&self) -> Enclosure {
        self.total + self.block
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn arithmetic_contains_exact_results() {
        let third = Enclosure::exact(1.0) / Enclosure::exact(3.0);
        assert!(third.lo < third.hi);
        let back = third * Enclosure::exact(3.0);
        assert!(back.contains(1.0));
        let d = Enclosure::exact(1.0) - third;
        assert!(d.lo < 2.0 / 3.0 + 1e-15 && d.hi > 2.0 / 3.0 - 1e-15);
        let l = Enclosure::exact(2.0).ln();
        assert!(l.contains(core::f64::consts::LN_2));
    }

    #[test]
    fn rationals_are_enclosed() {
        let x = BigRational::new(BigInt::from(1), BigInt::from(7));
        let e = Enclosure::from_rational(&x);
        assert!(e.lo < 1.0 / 7.0 + 1e-17 && e.hi > 1.0 / 7.0 - 1e-17);
        let huge = BigRational::new(BigInt::from(3), BigInt::from(1) << 2000u32);
        let e = Enclosure::from_rational(&huge);
        assert!(e.lo == 0.0 && e.hi > 0.0 && e.hi < 1e-300);
    }

    #[test]
    fn block_sum_is_tight() {
        let mut s = BlockSum::new();
        for _ in 0..100_000 {
            s.add(Enclosure::exact(0.1));
        }
        let v = s.value();
        assert!(v.contains(10_000.0));
        assert!(v.width() / 10_000.0 < 1e-11);
    }
}
