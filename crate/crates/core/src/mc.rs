//! Monte Carlo sampling of partial quotients of uniform random reals.
//!
//! A sample is a dyadic rational `u / 2^bits` with `u` drawn from ChaCha8
//! (stream = sample index), expanded exactly by Euclid. Only the first
//! `usable = bits / 4` quotients are exposed; a random rational with
//! `bits`-bit denominator has about `0.58 bits` quotients, so the exposed
//! ones are never affected by termination.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::RangeInclusive;
use core::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::measure::an_bound;
use crate::phi::PhiFamily;
use crate::{math, Error, Executor, Result, Sequential};

/// Smallest supported precision per sample.
pub const MIN_BITS: u32 = 256;
/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Parameters of a reproducible family of random samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SampleStream {
    pub seed: u64,
    pub bits: u32,
    pub count: u64,
    /// Number of quotients exposed per sample.
    pub usable: usize,
}

impl SampleStream {
    pub fn new(seed: u64, bits: u32, count: u64) -> Result<Self> {
        if bits < MIN_BITS {
            return Err(Error::InvalidParameter(format!("bits = {bits} is below {MIN_BITS}")));
        }
        if count == 0 {
            return Err(Error::InvalidParameter("sample count must be positive".into()));
        }
        Ok(SampleStream { seed, bits, count, usable: (bits / 4) as usize })
    }

    /// The smallest stream (in multiples of 64 bits) exposing `a_{n+1}`.
    pub fn covering(seed: u64, n_max: usize, count: u64) -> Result<Self> {
        let need = (4 * (n_max as u64 + 1)).max(MIN_BITS as u64);
        let bits = u32::try_from(need.div_ceil(64) * 64)
            .map_err(|_| Error::InvalidParameter(format!("n = {n_max} needs too many bits")))?;
        Self::new(seed, bits, count)
    }

    /// The numerator `u` of sample `index`.
    pub fn numerator(&self, index: u64) -> BigUint {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let words = self.bits.div_ceil(32) as usize;
        let mut digits: Vec<u32> = (0..words).map(|_| rng.next_u32()).collect();
        let extra = words as u32 * 32 - self.bits;
        if extra > 0 {
            if let Some(top) = digits.last_mut() {
                *top >>= extra;
            }
        }
        BigUint::new(digits)
    }

    /// The first `usable` quotients of sample `index`; quotients beyond
    /// `u64::MAX` are saturated.
    pub fn sample(&self, index: u64) -> Vec<u64> {
        let u = self.numerator(index);
        let mut out = Vec::with_capacity(self.usable);
        if !u.is_zero() {
            quotients_of(BigUint::from(1u32) << self.bits, u, self.usable, &mut out);
        }
        out
    }
}

/// All samples of a stream, in index order.
pub fn sample_quotients(stream: &SampleStream) -> Vec<Vec<u64>> {
    sample_quotients_with(&Sequential, stream)
}

pub fn sample_quotients_with<E: Executor>(exec: &E, stream: &SampleStream) -> Vec<Vec<u64>> {
    exec.map(stream.count as usize, |i| stream.sample(i as u64))
}

fn push_saturating(out: &mut Vec<u64>, q: &BigUint) {
    out.push(q.to_u64().unwrap_or(u64::MAX));
}

/// Partial quotients of `x / y` (`x > y > 0`) by Lehmer's method: runs of
/// quotients are found from the leading 63 bits and applied to the full
/// numbers as one 2x2 matrix.
pub fn quotients_of(mut x: BigUint, mut y: BigUint, limit: usize, out: &mut Vec<u64>) {
    while out.len() < limit && !y.is_zero() {
        if x.bits() <= 127 {
            let (mut a, mut b) = (x.to_u128().unwrap_or(0), y.to_u128().unwrap_or(0));
            while out.len() < limit && b != 0 {
                let q = a / b;
                out.push(u64::try_from(q).unwrap_or(u64::MAX));
                (a, b) = (b, a - q * b);
            }
            return;
        }
        let shift = x.bits() - 63;
        let mut xh = (&x >> shift).to_i128().unwrap_or(0);
        let mut yh = (&y >> shift).to_i128().unwrap_or(0);
        let (mut a, mut b, mut c, mut d) = (1i128, 0i128, 0i128, 1i128);
        while out.len() < limit {
            let (den1, den2) = (yh + c, yh + d);
            if den1 <= 0 || den2 <= 0 || xh + a < 0 || xh + b < 0 {
                break;
            }
            let q = (xh + a) / den1;
            if q != (xh + b) / den2 {
                break;
            }
            out.push(q as u64);
            (a, c) = (c, a - q * c);
            (b, d) = (d, b - q * d);
            (xh, yh) = (yh, xh - q * yh);
        }
        if b == 0 {
            let (q, r) = x.div_rem(&y);
            push_saturating(out, &q);
            x = core::mem::replace(&mut y, r);
        } else {
            let (xi, yi) = (BigInt::from(x), BigInt::from(y));
            let nx = &xi * a + &yi * b;
            let ny = xi * c + yi * d;
            x = nx.to_biguint().unwrap_or_default();
            y = ny.to_biguint().unwrap_or_default();
        }
    }
}

/// Plain Euclid, used as a reference for [`quotients_of`].
pub fn quotients_euclid(mut x: BigUint, mut y: BigUint, limit: usize) -> Vec<u64> {
    let mut out = Vec::new();
    while out.len() < limit && !y.is_zero() {
        let (q, r) = x.div_rem(&y);
        push_saturating(&mut out, &q);
        x = core::mem::replace(&mut y, r);
    }
    out
}

/// The four limsup events.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EventTag {
    /// `a_n >= phi(n)`.
    E1,
    /// `a_n a_{n+1} >= phi(n)`.
    E2,
    /// Two indices `k != l <= n` with `a_k, a_l >= phi(n)`.
    F1,
    /// `a_k a_{k+1} >= phi(n)` for some `k < n`, and `a_n a_{n+1} >= phi(n)`.
    F2,
}

impl EventTag {
    pub const ALL: [EventTag; 4] = [EventTag::E1, EventTag::E2, EventTag::F1, EventTag::F2];

    pub fn name(self) -> &'static str {
        match self {
            EventTag::E1 => "E1",
            EventTag::E2 => "E2",
            EventTag::F1 => "F1",
            EventTag::F2 => "F2",
        }
    }

    /// Whether `a_{n+1}` is read.
    fn looks_ahead(self) -> bool {
        matches!(self, EventTag::E2 | EventTag::F2)
    }
}

impl fmt::Display for EventTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EventTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "E1" => Ok(EventTag::E1),
            "E2" => Ok(EventTag::E2),
            "F1" => Ok(EventTag::F1),
            "F2" => Ok(EventTag::F2),
            _ => Err(Error::InvalidParameter(format!(
                "unknown event family {s:?}; expected E1, E2, F1 or F2"
            ))),
        }
    }
}

/// An event with its threshold function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EventFamily {
    pub tag: EventTag,
    pub phi: PhiFamily,
}

impl EventFamily {
    pub fn new(tag: EventTag, phi: PhiFamily) -> Result<Self> {
        Ok(EventFamily { tag, phi: phi.validated()? })
    }
}

/// `ceil(phi(n))` as an integer threshold: for integer `x`,
/// `x >= phi(n)` iff `x >= ceil(phi(n))`.
fn threshold(phi: f64) -> u128 {
    if phi >= 3.4e38 {
        u128::MAX
    } else {
        math::ceil(phi.max(0.0)) as u128
    }
}

fn check_window(tag: EventTag, window: &RangeInclusive<usize>, available: usize) -> Result<()> {
    let (&lo, &hi) = (window.start(), window.end());
    if lo == 0 || lo > hi {
        return Err(Error::InvalidParameter(format!("window {lo}..={hi} must satisfy 1 <= start <= end")));
    }
    let need = if tag.looks_ahead() { hi + 1 } else { hi };
    if need > available {
        return Err(Error::InvalidParameter(format!(
            "window end {hi} needs {need} quotients but only {available} are usable"
        )));
    }
    Ok(())
}

/// The indices `n` in `window` at which the event holds for `quotients`
/// (`quotients[0] = a_1`).
pub fn detect_a_n(quotients: &[u64], family: &EventFamily, window: RangeInclusive<usize>) -> Result<Vec<usize>> {
    check_window(family.tag, &window, quotients.len())?;
    let thresholds: Vec<u128> = window.clone().map(|n| threshold(family.phi.eval(n as u64))).collect();
    Ok(scan(quotients, family.tag, *window.start(), &thresholds, false))
}

/// Hits among `n = start, start + 1, ...` with `thresholds[n - start]`.
/// With `first_only` the scan stops at the first hit.
fn scan(a: &[u64], tag: EventTag, start: usize, thresholds: &[u128], first_only: bool) -> Vec<usize> {
    let a_at = |n: usize| a[n - 1] as u128;
    let pair = |n: usize| a_at(n).saturating_mul(a_at(n + 1));
    let mut hits = Vec::new();
    // Running statistics over indices before `start`.
    let (mut top, mut second) = (0u128, 0u128);
    let mut best_pair = 0u128;
    for n in 1..start {
        let v = a_at(n);
        if v > top {
            second = top;
            top = v;
        } else if v > second {
            second = v;
        }
        best_pair = best_pair.max(pair(n));
    }
    for (i, &t) in thresholds.iter().enumerate() {
        let n = start + i;
        let hit = match tag {
            EventTag::E1 => a_at(n) >= t,
            EventTag::E2 => pair(n) >= t,
            EventTag::F1 => {
                let v = a_at(n);
                if v > top {
                    second = top;
                    top = v;
                } else if v > second {
                    second = v;
                }
                second >= t
            }
            EventTag::F2 => {
                let h = best_pair >= t && pair(n) >= t;
                best_pair = best_pair.max(pair(n));
                h
            }
        };
        if hit {
            hits.push(n);
            if first_only {
                break;
            }
        }
    }
    hits
}

/// A binomial proportion with its 95% Wilson interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Proportion {
    pub hits: u64,
    pub samples: u64,
    pub fraction: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl Proportion {
    pub fn new(hits: u64, samples: u64) -> Self {
        let (lo, hi) = wilson(hits, samples, Z95);
        Proportion {
            hits,
            samples,
            fraction: hits as f64 / samples as f64,
            ci_lo: lo,
            ci_hi: hi,
        }
    }
}

/// Wilson score interval for `hits` out of `n` trials.
pub fn wilson(hits: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * math::sqrt(p * (1.0 - p) / nf + z2 / (4.0 * nf * nf));
    let lo = if hits == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if hits == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Fraction of samples with at least one hit in `window`.
pub fn hit_fraction(family: &EventFamily, window: RangeInclusive<usize>, stream: &SampleStream) -> Result<Proportion> {
    hit_fraction_with(&Sequential, family, window, stream)
}

pub fn hit_fraction_with<E: Executor>(
    exec: &E,
    family: &EventFamily,
    window: RangeInclusive<usize>,
    stream: &SampleStream,
) -> Result<Proportion> {
    check_window(family.tag, &window, stream.usable)?;
    let thresholds: Vec<u128> = window.clone().map(|n| threshold(family.phi.eval(n as u64))).collect();
    let start = *window.start();
    let flags = exec.map(stream.count as usize, |i| {
        let a = stream.sample(i as u64);
        a.len() >= stream.usable && !scan(&a, family.tag, start, &thresholds, true).is_empty()
    });
    let hits = flags.iter().filter(|&&h| h).count() as u64;
    Ok(Proportion::new(hits, stream.count))
}

/// Hit fractions for several windows sharing a start, from one pass over
/// the samples. Windows are given by their ends.
pub fn hit_fraction_curve<E: Executor>(
    exec: &E,
    family: &EventFamily,
    start: usize,
    ends: &[usize],
    stream: &SampleStream,
) -> Result<Vec<Proportion>> {
    let Some(&last) = ends.iter().max() else {
        return Err(Error::InvalidParameter("no window ends given".into()));
    };
    check_window(family.tag, &(start..=last), stream.usable)?;
    let thresholds: Vec<u128> = (start..=last).map(|n| threshold(family.phi.eval(n as u64))).collect();
    let first = exec.map(stream.count as usize, |i| {
        let a = stream.sample(i as u64);
        scan(&a, family.tag, start, &thresholds, true).first().copied()
    });
    Ok(ends
        .iter()
        .map(|&end| {
            let hits = first.iter().filter(|h| h.is_some_and(|n| n <= end)).count() as u64;
            Proportion::new(hits, stream.count)
        })
        .collect())
}

/// Monte Carlo estimate of the measure of `A_n` (the `F2` event at `n`),
/// with the bound shape it is compared to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnEstimate {
    pub n: usize,
    pub phi_n: f64,
    pub estimate: Proportion,
    /// `n log^2 phi(n) / phi(n)^2 + 1/phi(n)`.
    pub bound: f64,
}

impl AnEstimate {
    pub fn ratio(&self) -> f64 {
        self.estimate.fraction / self.bound
    }
}

pub fn an_measure_estimate(n: usize, phi: &PhiFamily, stream: &SampleStream) -> Result<AnEstimate> {
    an_measure_estimate_with(&Sequential, n, phi, stream)
}

pub fn an_measure_estimate_with<E: Executor>(
    exec: &E,
    n: usize,
    phi: &PhiFamily,
    stream: &SampleStream,
) -> Result<AnEstimate> {
    let family = EventFamily::new(EventTag::F2, *phi)?;
    if n < 2 {
        return Err(Error::InvalidParameter("A_n needs n >= 2".into()));
    }
    check_window(EventTag::F2, &(n..=n), stream.usable)?;
    let phi_n = phi.eval(n as u64);
    let t = [threshold(phi_n)];
    let flags = exec.map(stream.count as usize, |i| {
        let a = stream.sample(i as u64);
        !scan(&a, family.tag, n, &t, true).is_empty()
    });
    let hits = flags.iter().filter(|&&h| h).count() as u64;
    Ok(AnEstimate {
        n,
        phi_n,
        estimate: Proportion::new(hits, stream.count),
        bound: an_bound(n as u64, phi_n)?,
    })
}

/// Observed and limiting frequency of one digit value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DigitFrequency {
    pub digit: u64,
    pub observed: f64,
    /// `log2((a+1)^2 / (a (a+2)))`.
    pub expected: f64,
    /// Binomial standard error at the number of quotients seen.
    pub sigma: f64,
}

impl DigitFrequency {
    pub fn z_score(&self) -> f64 {
        (self.observed - self.expected) / self.sigma
    }
}

/// `log2((a+1)^2 / (a (a+2)))`.
pub fn gauss_kuzmin(a: u64) -> f64 {
    let a = a as f64;
    -math::ln1p(-1.0 / ((a + 1.0) * (a + 1.0))) / math::LN_2
}

/// Frequencies of the digits `1..=max_digit` over all exposed quotients.
pub fn digit_frequencies<E: Executor>(exec: &E, stream: &SampleStream, max_digit: u64) -> Vec<DigitFrequency> {
    let counts = exec.map(stream.count as usize, |i| {
        let a = stream.sample(i as u64);
        let mut c = vec![0u64; max_digit as usize + 1];
        for &q in &a {
            if q <= max_digit {
                c[q as usize] += 1;
            }
        }
        c[0] = a.len() as u64;
        c
    });
    let mut total = vec![0u64; max_digit as usize + 1];
    for c in counts {
        for (t, v) in total.iter_mut().zip(c) {
            *t += v;
        }
    }
    let seen = total[0] as f64;
    (1..=max_digit)
        .map(|d| {
            let expected = gauss_kuzmin(d);
            DigitFrequency {
                digit: d,
                observed: total[d as usize] as f64 / seen,
                expected,
                sigma: math::sqrt(expected * (1.0 - expected) / seen),
            }
        })
        .collect()
}
