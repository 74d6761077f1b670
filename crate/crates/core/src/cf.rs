//! Exact continued-fraction arithmetic.
//!
//! Everything here is arbitrary-precision and exact. The other modules use
//! this layer as their oracle.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// A finite sequence of partial quotients `(a_1, ..., a_n)`, each at least 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    quotients: Vec<BigUint>,
}

impl Word {
    pub fn empty() -> Self {
        Word { quotients: Vec::new() }
    }

    /// Builds a word, rejecting zero entries.
    pub fn new(quotients: Vec<BigUint>) -> Result<Self> {
        if let Some(i) = quotients.iter().position(Zero::is_zero) {
            return Err(Error::InvalidParameter(format!(
                "partial quotient a_{} is zero",
                i + 1
            )));
        }
        Ok(Word { quotients })
    }

    pub fn from_u64s(quotients: &[u64]) -> Result<Self> {
        Word::new(quotients.iter().map(|&a| BigUint::from(a)).collect())
    }

    pub fn order(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    pub fn quotients(&self) -> &[BigUint] {
        &self.quotients
    }

    /// Appends one quotient. Panics on zero, which is a programming error.
    pub fn push(&mut self, a: BigUint) {
        assert!(!a.is_zero(), "partial quotients are positive");
        self.quotients.push(a);
    }

    pub fn pushed(&self, a: BigUint) -> Word {
        let mut w = self.clone();
        w.push(a);
        w
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut quotients = self.quotients.clone();
        quotients.extend_from_slice(&other.quotients);
        Word { quotients }
    }

    /// Drops the first `k` quotients.
    pub fn shifted(&self, k: usize) -> Word {
        Word {
            quotients: self.quotients[k.min(self.order())..].to_vec(),
        }
    }

    /// The value `1/(a_1 + 1/(a_2 + ... + 1/a_n))`, evaluated innermost first.
    /// The empty word evaluates to 0.
    pub fn evaluate(&self) -> BigRational {
        let mut acc = BigRational::zero();
        for a in self.quotients.iter().rev() {
            acc = (BigRational::from_integer(BigInt::from(a.clone())) + acc).recip();
        }
        acc
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.quotients.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Continuants `p_i, q_i` of a word, including the seed rows `i = -1, 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuantTable {
    p: Vec<BigUint>,
    q: Vec<BigUint>,
}

impl ContinuantTable {
    /// Order `n` of the underlying word.
    pub fn order(&self) -> usize {
        self.q.len() - 2
    }

    /// `p_i` for `-1 <= i <= n`.
    pub fn p(&self, i: isize) -> &BigUint {
        &self.p[(i + 1) as usize]
    }

    /// `q_i` for `-1 <= i <= n`.
    pub fn q(&self, i: isize) -> &BigUint {
        &self.q[(i + 1) as usize]
    }

    /// Rows `(p_i, q_i)` for `i = -1..=n`.
    pub fn rows(&self) -> impl Iterator<Item = (&BigUint, &BigUint)> {
        self.p.iter().zip(self.q.iter())
    }

    /// The last convergent `p_n / q_n`.
    pub fn convergent(&self) -> BigRational {
        let n = self.order() as isize;
        BigRational::new(BigInt::from(self.p(n).clone()), BigInt::from(self.q(n).clone()))
    }

    /// `p_{i} q_{i+1} - p_{i+1} q_{i}` for `-1 <= i < n`.
    pub fn determinant(&self, i: isize) -> BigInt {
        let a = BigInt::from(self.p(i) * self.q(i + 1));
        let b = BigInt::from(self.p(i + 1) * self.q(i));
        a - b
    }
}

/// Computes the continuant table of `w`.
pub fn continuants(w: &Word) -> ContinuantTable {
    let n = w.order();
    let mut p = Vec::with_capacity(n + 2);
    let mut q = Vec::with_capacity(n + 2);
    p.push(BigUint::one());
    p.push(BigUint::zero());
    q.push(BigUint::zero());
    q.push(BigUint::one());
    for (i, a) in w.quotients().iter().enumerate() {
        let pn = a * &p[i + 1] + &p[i];
        let qn = a * &q[i + 1] + &q[i];
        p.push(pn);
        q.push(qn);
    }
    ContinuantTable { p, q }
}

/// The last two rows `(p_n, p_{n-1}, q_n, q_{n-1})` without storing the table.
pub fn last_continuants(w: &Word) -> (BigUint, BigUint, BigUint, BigUint) {
    let (mut p1, mut p0) = (BigUint::one(), BigUint::zero());
    let (mut q1, mut q0) = (BigUint::zero(), BigUint::one());
    for a in w.quotients() {
        let p = a * &p0 + &p1;
        let q = a * &q0 + &q1;
        p1 = core::mem::replace(&mut p0, p);
        q1 = core::mem::replace(&mut q0, q);
    }
    (p0, p1, q0, q1)
}

/// Which endpoint of a [`RationalInterval`] belongs to it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClosedSide {
    Left,
    Right,
}

/// A half-open interval with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalInterval {
    pub left: BigRational,
    pub right: BigRational,
    pub closed: ClosedSide,
    pub order: usize,
}

impl RationalInterval {
    pub fn length(&self) -> BigRational {
        &self.right - &self.left
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        match self.closed {
            ClosedSide::Left => &self.left <= x && x < &self.right,
            ClosedSide::Right => &self.left < x && x <= &self.right,
        }
    }

    /// Closure containment of `other` in `self`.
    pub fn encloses(&self, other: &RationalInterval) -> bool {
        self.left <= other.left && other.right <= self.right
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.closed {
            ClosedSide::Left => write!(f, "[{}, {})", self.left, self.right),
            ClosedSide::Right => write!(f, "({}, {}]", self.left, self.right),
        }
    }
}

fn ratio(n: BigUint, d: BigUint) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The cylinder `I_n(w)` of all points whose expansion starts with `w`.
///
/// The endpoints are `p_n/q_n` and `(p_n+p_{n-1})/(q_n+q_{n-1})`. For even
/// `n` the first is the left end and the interval is closed there; for odd
/// `n` the order and the closed side flip. The empty word gives `[0, 1)`.
pub fn cylinder(w: &Word) -> RationalInterval {
    let n = w.order();
    let (p, p1, q, q1) = last_continuants(w);
    let a = ratio(p.clone(), q.clone());
    let b = ratio(p + p1, q + q1);
    if n % 2 == 0 {
        RationalInterval { left: a, right: b, closed: ClosedSide::Left, order: n }
    } else {
        RationalInterval { left: b, right: a, closed: ClosedSide::Right, order: n }
    }
}

/// `|I_n(w)| = 1/(q_n (q_n + q_{n-1}))`.
pub fn cylinder_length(w: &Word) -> BigRational {
    let (_, _, q, q1) = last_continuants(w);
    let d = &q * (&q + q1);
    ratio(BigUint::one(), d)
}

/// Exact measure of `{x in I_n(w) : a_{n+1}(x) >= m}`, which is
/// `1/(q_n (m q_n + q_{n-1}))`.
pub fn tail_measure(w: &Word, m: &BigUint) -> Result<BigRational> {
    if m.is_zero() {
        return Err(Error::InvalidParameter("tail threshold must be at least 1".into()));
    }
    let (_, _, q, q1) = last_continuants(w);
    let d = &q * (m * &q + q1);
    Ok(ratio(BigUint::one(), d))
}

fn unit_interval_check(x: &BigRational, allow_zero: bool) -> Result<()> {
    let ok_low = if allow_zero { !x.is_negative() } else { x.is_positive() };
    if !ok_low || x >= &BigRational::one() {
        let range = if allow_zero { "[0,1)" } else { "(0,1)" };
        return Err(Error::Domain(format!("{x} is not in {range}")));
    }
    Ok(())
}

/// Canonical expansion of a rational in `(0,1)` by Euclid's algorithm.
///
/// The final quotient is at least 2 except for `x = 1/1`, which is out of
/// range anyway, so the result is the unique form without a trailing 1.
pub fn cf_expand(x: &BigRational) -> Result<Word> {
    unit_interval_check(x, false)?;
    let mut num = x.numer().magnitude().clone();
    let mut den = x.denom().magnitude().clone();
    let mut quotients = Vec::new();
    // x = num/den in (0,1): each step takes den/num.
    while !num.is_zero() {
        let (a, r) = den.div_rem(&num);
        quotients.push(a);
        den = core::mem::replace(&mut num, r);
    }
    Ok(Word { quotients })
}

/// `T^k(x)` for the Gauss map `T(x) = 1/x mod 1`, with `T(0) = 0`.
pub fn gauss_iterate(x: &BigRational, k: usize) -> Result<BigRational> {
    unit_interval_check(x, true)?;
    let mut num = x.numer().magnitude().clone();
    let mut den = x.denom().magnitude().clone();
    for _ in 0..k {
        if num.is_zero() {
            break;
        }
        let r = &den % &num;
        den = core::mem::replace(&mut num, r);
    }
    Ok(ratio(num, den))
}

/// Compares the sub-cylinders `I_{n+1}(w a)` and `I_{n+1}(w b)`: returns the
/// order of their positions on the real line.
pub fn child_order(w: &Word, a: &BigUint, b: &BigUint) -> Ordering {
    let c = a.cmp(b);
    if w.order() % 2 == 0 {
        c.reverse()
    } else {
        c
    }
}

/// Converts a rational to `f64` with a relative error of a few ulps, also
/// when numerator and denominator are far outside the `f64` range.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    let n = x.numer().magnitude();
    let d = x.denom().magnitude();
    if n.is_zero() {
        return 0.0;
    }
    let v = if n.bits() <= 53 && d.bits() <= 53 {
        n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
    } else {
        // A 64- or 65-bit quotient scaled back by a power of two.
        let shift = d.bits() as i64 - n.bits() as i64 + 64;
        let t = if shift >= 0 { (n << shift as u64) / d } else { n / (d << (-shift) as u64) };
        let t = t.to_f64().unwrap_or(f64::NAN);
        let e = (-shift).clamp(i32::MIN as i64, i32::MAX as i64) as i32;
        crate::math::ldexp(t, e)
    };
    if x.is_negative() {
        -v
    } else {
        v
    }
}
