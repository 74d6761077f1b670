//! Lebesgue measures of sets defined by products of consecutive quotients.
//!
//! Sets whose constraints end at the last free position have exact rational
//! measures. Sets with fixed quotients after the constrained pair involve
//! infinite sums without closed form; those are returned as certified
//! brackets.
//!
//! # Normalisation
//!
//! Inside the cylinder of a prefix with continuants `q = q_n`, `q' = q_{n-1}`
//! the map `y -> x` from the tail point to `x` has derivative
//! `1/(q + y q')^2`. Measures are therefore computed as `q^{-2}` times a
//! normalised quantity depending only on `r = q'/q`. The basic normalised
//! block is
//!
//! ```text
//! T(rho, m, Z) = sum_{a >= m} |Z| / ((a + z0 + rho) (a + z1 + rho)),
//! ```
//!
//! the normalised measure of `{a_1 >= m, T y in Z}` for `Z = [z0, z1]`.
//! It is summed explicitly up to a cutoff and the rest is bracketed with an
//! Euler-Maclaurin expansion of `sum_{a >= K} (a + c)^{-2}` integrated in
//! closed form over `c`.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};

use crate::cf::{cylinder, last_continuants, tail_measure, Word};
use crate::enclosure::{BlockSum, Enclosure};
use crate::math::{self, CompensatedSum};
use crate::{Error, Result};

/// Default relative bracket width.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default number of explicit summands allowed per call.
pub const DEFAULT_TERM_BUDGET: u64 = 10_000_000;
/// Largest term count for which finite sums are done in exact arithmetic.
const EXACT_TERM_LIMIT: u64 = 2_000;
/// Largest `ceil(l)` for which a free-tail product measure is returned exactly.
const EXACT_THRESHOLD_LIMIT: u64 = 256;

/// A two-sided bracket of a measure with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedMeasure {
    pub lower: BigRational,
    pub upper: BigRational,
    pub exact: bool,
}

impl CertifiedMeasure {
    pub fn exact(value: BigRational) -> Self {
        CertifiedMeasure {
            lower: value.clone(),
            upper: value,
            exact: true,
        }
    }

    /// Bracket `[e.lo, e.hi] * scale`.
    fn from_enclosure(e: Enclosure, scale: &BigRational) -> Self {
        let lo = BigRational::from_f64(e.lo.max(0.0)).unwrap_or_else(BigRational::zero);
        let hi = BigRational::from_f64(e.hi).expect("finite enclosure");
        CertifiedMeasure {
            lower: lo * scale,
            upper: hi * scale,
            exact: false,
        }
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lower <= x && x <= &self.upper
    }

    pub fn overlaps(&self, other: &CertifiedMeasure) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }

    pub fn lower_f64(&self) -> f64 {
        crate::cf::rational_to_f64(&self.lower)
    }

    pub fn upper_f64(&self) -> f64 {
        crate::cf::rational_to_f64(&self.upper)
    }

    pub fn mid_f64(&self) -> f64 {
        0.5 * (self.lower_f64() + self.upper_f64())
    }

    /// `(upper - lower) / upper`, zero for exact or zero brackets.
    pub fn relative_width(&self) -> f64 {
        if self.exact || self.upper.is_zero() {
            return 0.0;
        }
        crate::cf::rational_to_f64(&((&self.upper - &self.lower) / &self.upper))
    }

    /// Interval sum of two brackets.
    pub fn add(&self, other: &CertifiedMeasure) -> CertifiedMeasure {
        CertifiedMeasure {
            lower: &self.lower + &other.lower,
            upper: &self.upper + &other.upper,
            exact: self.exact && other.exact,
        }
    }
}

/// `ceil(x)` of a positive rational as `u64`.
fn ceil_u64(x: &BigRational, what: &'static str) -> Result<u64> {
    let c = x.ceil().to_integer();
    c.to_u64().ok_or(Error::BudgetExceeded {
        what,
        needed: u128::MAX,
        limit: u64::MAX as u128,
    })
}

/// `ceil(l / a)`.
fn ceil_div(l: &BigRational, a: u64) -> u64 {
    let num = l.numer().magnitude();
    let den = l.denom().magnitude() * BigUint::from(a);
    let (q, r) = num.div_rem(&den);
    let q = if r.is_zero() { q } else { q + 1u8 };
    q.to_u64().expect("ceil(l/a) fits when ceil(l) does")
}

fn check_threshold(l: &BigRational) -> Result<()> {
    if *l < BigRational::one() {
        return Err(Error::InvalidParameter(alloc::format!("threshold l = {l} is below 1")));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter(alloc::format!("tolerance {tol} is not in (0,1)")));
    }
    Ok(())
}

/// Pairwise sum of exact rationals, which keeps intermediate denominators
/// balanced.
fn exact_sum(mut terms: Vec<BigRational>) -> BigRational {
    if terms.is_empty() {
        return BigRational::zero();
    }
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut it = terms.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a + b),
                None => next.push(a),
            }
        }
        terms = next;
    }
    terms.pop().unwrap()
}

/// Exact measure of `{x in I_n(w) : a_{n+1}(x) a_{n+2}(x) >= l}`.
pub fn product_tail_measure(w: &Word, l: &BigRational) -> Result<BigRational> {
    check_threshold(l)?;
    let top = ceil_u64(l, "product threshold")?;
    if top > DEFAULT_TERM_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "product tail terms",
            needed: top as u128,
            limit: DEFAULT_TERM_BUDGET as u128,
        });
    }
    let mut terms = Vec::with_capacity(top as usize);
    for a in 1..top {
        let m = BigUint::from(ceil_div(l, a));
        terms.push(tail_measure(&w.pushed(BigUint::from(a)), &m)?);
    }
    terms.push(tail_measure(w, &BigUint::from(top))?);
    Ok(exact_sum(terms))
}

/// A target set `Z` for the tail point, in normalised coordinates.
#[derive(Clone, Copy, Debug)]
struct Span {
    z0: Enclosure,
    delta: Enclosure,
    /// `Z = [0, 1]`, for which `T` telescopes to `1/(m + rho)`.
    full: bool,
}

impl Span {
    const FULL: Span = Span {
        z0: Enclosure::ZERO,
        delta: Enclosure { lo: 1.0, hi: 1.0 },
        full: true,
    };

    fn of_word(v: &Word) -> Span {
        if v.is_empty() {
            return Span::FULL;
        }
        let c = cylinder(v);
        Span {
            z0: Enclosure::from_rational(&c.left),
            delta: Enclosure::from_rational(&c.length()),
            full: false,
        }
    }

    /// The span of `b v` given the span of `v`: `t = 1/(b + s)`.
    fn prepend(&self, b: u64) -> Span {
        let bb = Enclosure::from_u64(b);
        let lo_end = bb + self.z0;
        let hi_end = lo_end + self.delta;
        Span {
            z0: hi_end.recip(),
            delta: self.delta / (lo_end * hi_end),
            full: false,
        }
    }
}

/// Summation cutoff so that the Euler-Maclaurin remainder is below `tol/8`.
fn cutoff(tol: f64) -> u64 {
    let k = math::powf(8.0 / (30.0 * tol), 0.25);
    (math::ceil(k) as u64).max(8)
}

/// Encloses `sum_{j >= 0} (w + j)^{-2}` from below and above.
fn em_lower(w: Enclosure) -> f64 {
    let w2 = w * w;
    let w3 = w2 * w;
    let v = w.recip() + (w2 * Enclosure::exact(2.0)).recip() + (w3 * Enclosure::exact(6.0)).recip()
        - (w3 * w2 * Enclosure::exact(30.0)).recip();
    v.lo
}

fn em_upper(w: Enclosure) -> f64 {
    let w2 = w * w;
    let w3 = w2 * w;
    let v = w.recip() + (w2 * Enclosure::exact(2.0)).recip() + (w3 * Enclosure::exact(6.0)).recip();
    v.hi
}

/// Encloses `sum_{j >= 0} (w + j)^{-p}` for `p` in `{2, 3}`: the first
/// `k` terms explicitly, the rest by Euler-Maclaurin.
fn power_sum(w: Enclosure, p: u32, k: u64, terms: &mut u64) -> Enclosure {
    let mut sum = BlockSum::new();
    for j in 0..k {
        let x = w + Enclosure::from_u64(j);
        let x2 = x * x;
        sum.add(if p == 2 { x2.recip() } else { (x2 * x).recip() });
    }
    *terms += k;
    let x = w + Enclosure::from_u64(k);
    let tail = if p == 2 {
        Enclosure::new(em_lower(x), em_upper(x))
    } else {
        let x2 = x * x;
        let x4 = x2 * x2;
        let two = Enclosure::exact(2.0);
        let hi = (x2 * two).recip() + (x2 * x * two).recip() + (x4 * Enclosure::exact(4.0)).recip();
        let lo = hi - (x4 * x2 * Enclosure::exact(12.0)).recip();
        Enclosure::new(lo.lo, hi.hi)
    };
    sum.value() + tail
}

/// Normalised measure of the points with `a_k >= A` (where `w = A + r`)
/// and `a_{k+1} >= bz`, followed by `Z`.
///
/// With `y = 1/(a_{k+1} + z)` the integrand is `G(y) = sum_a (a + r + y)^{-2}`,
/// and `G(0) - 2y H(0) <= G(y) <= G(0) - 2y H(1/bz)` with
/// `H(y) = sum_a (a + r + y)^{-3}`. The `y`-weighted mass of the set is
/// `V = int_Z sum_{b >= bz} (b + z)^{-3} dz`.
fn free_remainder(w: Enclosure, bz: u64, z: Span, kmin: u64, terms: &mut u64) -> Enclosure {
    let size = tail_block(Enclosure::ZERO, bz, z, kmin, terms);
    let g0 = power_sum(w, 2, kmin, terms);
    let h0 = power_sum(w, 3, kmin, terms);
    let h1 = power_sum(w + Enclosure::from_u64(bz).recip(), 3, kmin, terms);
    let b = Enclosure::from_u64(bz);
    let v_lo = z.delta.lo * power_sum(b + z.z0 + z.delta, 3, 0, terms).lo;
    let v_hi = z.delta.hi * power_sum(b + z.z0, 3, 0, terms).hi;
    let two = Enclosure::exact(2.0);
    let lo = g0 * size - h0 * two * Enclosure::exact(v_hi);
    let hi = g0 * size - h1 * two * Enclosure::exact(v_lo);
    Enclosure::new(lo.lo.max(0.0), hi.hi)
}

/// The normalised block `T(rho, m, Z)`.
fn tail_block(rho: Enclosure, m: u64, z: Span, kmin: u64, terms: &mut u64) -> Enclosure {
    if z.full {
        return (Enclosure::from_u64(m) + rho).recip();
    }
    if z.delta.hi == 0.0 {
        return Enclosure::ZERO;
    }
    let delta = z.delta;
    let c0 = z.z0 + rho;
    let c1 = c0 + delta;
    let k = m.max(kmin);
    let mut sum = BlockSum::new();
    for a in m..k {
        let af = Enclosure::from_u64(a);
        sum.add(delta / ((af + c0) * (af + c1)));
    }
    *terms += k - m;

    let kk = Enclosure::from_u64(k);
    let w0 = kk + c0;
    let w1 = kk + c1;
    let two = Enclosure::exact(2.0);
    let u = delta / (w0 * two + delta);
    let u2 = u * u;
    let u3 = u2 * u;
    let base = u + u3 / Enclosure::exact(3.0);
    let ln_lo = base * two;
    let ln_hi = (base + u3 * u2 / ((Enclosure::exact(1.0) - u2) * Enclosure::exact(5.0))) * two;
    let w01 = w0 * w1;
    let s01 = w0 + w1;
    let t2 = delta / (w01 * two);
    let t3 = delta * s01 / (w01 * w01 * Enclosure::exact(12.0));
    let t4 = delta * s01 * (w0 * w0 + w1 * w1) / (w01 * w01 * w01 * w01 * Enclosure::exact(120.0));
    let lower = ln_lo + t2 + t3 - t4;
    let upper = ln_hi + t2 + t3;
    sum.value() + Enclosure::new(lower.lo.max(0.0), upper.hi)
}

/// Shared context: normalised prefix ratio and scale `q^{-2}`.
struct Prefix {
    r: Enclosure,
    scale: BigRational,
}

impl Prefix {
    fn of(w: &Word) -> Prefix {
        let (_, _, q, q1) = last_continuants(w);
        let r = Enclosure::from_rational(&BigRational::new(
            BigInt::from(q1),
            BigInt::from(q.clone()),
        ));
        let q = BigInt::from(q);
        Prefix {
            r,
            scale: BigRational::new(BigInt::one(), &q * &q),
        }
    }
}

struct Budget {
    used: u64,
    limit: u64,
}

impl Budget {
    fn check(&self, what: &'static str) -> Result<()> {
        if self.used > self.limit {
            return Err(Error::BudgetExceeded {
                what,
                needed: self.used as u128,
                limit: self.limit as u128,
            });
        }
        Ok(())
    }
}

/// Bracket of the measure of
/// `J = {x : x starts with prefix, a_k a_{k+1} >= l, then suffix}`
/// where `k = |prefix| + 1`. The relative bracket width is at most `tol`.
pub fn jk_measure(prefix: &Word, suffix: &Word, l: &BigRational, tol: f64) -> Result<CertifiedMeasure> {
    jk_measure_with_budget(prefix, suffix, l, tol, DEFAULT_TERM_BUDGET)
}

/// [`jk_measure`] with an explicit cap on the number of summands.
pub fn jk_measure_with_budget(
    prefix: &Word,
    suffix: &Word,
    l: &BigRational,
    tol: f64,
    budget: u64,
) -> Result<CertifiedMeasure> {
    check_threshold(l)?;
    check_tol(tol)?;
    let top = ceil_u64(l, "product threshold")?;
    let mut budget = Budget { used: top, limit: budget };
    budget.check("jk_measure terms")?;

    if suffix.is_empty() && top <= EXACT_THRESHOLD_LIMIT {
        return Ok(CertifiedMeasure::exact(product_tail_measure(prefix, l)?));
    }

    let pre = Prefix::of(prefix);
    let z = Span::of_word(suffix);
    let kmin = cutoff(tol / 4.0);
    let one = Enclosure::exact(1.0);

    // a_k < ceil(l): the partner must satisfy a_{k+1} >= ceil(l / a_k).
    let mut low = BlockSum::new();
    for a in 1..top {
        let qa = Enclosure::from_u64(a) + pre.r;
        let rho = one / qa;
        let t = tail_block(rho, ceil_div(l, a), z, kmin, &mut budget.used);
        low.add(t / (qa * qa));
    }
    budget.check("jk_measure terms")?;
    let low = low.value();

    // a_k >= ceil(l): the partner is free.
    let top_e = Enclosure::from_u64(top);
    if z.full {
        let total = low + (top_e + pre.r).recip();
        return finish(total, &pre.scale, tol, "jk_measure bracket");
    }
    let mut by_b = BlockSum::new();
    let mut bz = 1u64;
    loop {
        let next = if bz == 1 { 16 } else { bz * 2 };
        for b in bz..next {
            by_b.add(tail_block(pre.r, top, z.prepend(b), kmin, &mut budget.used));
        }
        budget.used += next - bz;
        bz = next;
        budget.check("jk_measure terms")?;
        let rem = free_remainder(top_e + pre.r, bz, z, kmin, &mut budget.used);
        let total = low + by_b.value() + rem;
        if total.width() <= tol * total.hi {
            return finish(total, &pre.scale, tol, "jk_measure bracket");
        }
    }
}

fn finish(total: Enclosure, scale: &BigRational, tol: f64, what: &'static str) -> Result<CertifiedMeasure> {
    if total.width() > tol * total.hi {
        return Err(Error::NotConverged { what, iterations: 0 });
    }
    Ok(CertifiedMeasure::from_enclosure(total, scale))
}

/// Measure of the complementary set `a_k a_{k+1} < l` with the same prefix
/// and suffix. It is a finite sum; exact when it has few terms.
pub fn jk_tilde_measure(prefix: &Word, suffix: &Word, l: &BigRational) -> Result<CertifiedMeasure> {
    check_threshold(l)?;
    let top = ceil_u64(l, "product threshold")?;
    let mut count = 0u64;
    for a in 1..top {
        count += ceil_div(l, a) - 1;
        if count > DEFAULT_TERM_BUDGET {
            // `needed` is a lower bound; counting further would be as slow as summing.
            return Err(Error::BudgetExceeded {
                what: "jk_tilde terms",
                needed: count as u128,
                limit: DEFAULT_TERM_BUDGET as u128,
            });
        }
    }
    if count <= EXACT_TERM_LIMIT {
        let mut terms = Vec::with_capacity(count as usize);
        for a in 1..top {
            for b in 1..ceil_div(l, a) {
                let mut w = prefix.pushed(BigUint::from(a));
                w.push(BigUint::from(b));
                terms.push(crate::cf::cylinder_length(&w.concat(suffix)));
            }
        }
        return Ok(CertifiedMeasure::exact(exact_sum(terms)));
    }
    let pre = Prefix::of(prefix);
    let z = Span::of_word(suffix);
    let mut s = BlockSum::new();
    for a in 1..top {
        let qa = Enclosure::from_u64(a) + pre.r;
        for b in 1..ceil_div(l, a) {
            let zb = z.prepend(b);
            let c0 = qa + zb.z0;
            s.add(zb.delta / (c0 * (c0 + zb.delta)));
        }
    }
    Ok(CertifiedMeasure::from_enclosure(s.value(), &pre.scale))
}

/// Which of the two sets around position `n` to measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HVariant {
    /// `a_{n-1} a_n >= l` and `a_n a_{n+1} >= l`.
    H,
    /// `a_{n-1} a_n < l` and `a_n a_{n+1} >= l`.
    HTilde,
}

/// Bracket of the measure of the `H` or `H~` set following `prefix`
/// (of order `n - 2`), with all later quotients free.
pub fn hn_measures(prefix: &Word, l: &BigRational, tol: f64, variant: HVariant) -> Result<CertifiedMeasure> {
    hn_measures_with_budget(prefix, l, tol, variant, DEFAULT_TERM_BUDGET)
}

pub fn hn_measures_with_budget(
    prefix: &Word,
    l: &BigRational,
    tol: f64,
    variant: HVariant,
    budget: u64,
) -> Result<CertifiedMeasure> {
    check_threshold(l)?;
    check_tol(tol)?;
    let top = ceil_u64(l, "product threshold")?;
    let mut budget = Budget { used: top, limit: budget };
    budget.check("hn_measures terms")?;
    match variant {
        HVariant::H => h_measure(prefix, l, top, tol, &mut budget),
        HVariant::HTilde => h_tilde_measure(prefix, l, top, &mut budget),
    }
}

fn h_measure(prefix: &Word, l: &BigRational, top: u64, tol: f64, budget: &mut Budget) -> Result<CertifiedMeasure> {
    let pre = Prefix::of(prefix);
    let kmin = cutoff(tol / 4.0);
    let mut s = BlockSum::new();
    // For a_n = b < ceil(l) both neighbours need at least m_b = ceil(l/b):
    // the tail point after a_{n-1} lies in [m_b/(b m_b + 1), 1/b].
    for b in 1..top {
        let m = ceil_div(l, b);
        let z1 = Enclosure::from_u64(b).recip();
        let bm1 = Enclosure::from_u64(b) * Enclosure::from_u64(m) + Enclosure::exact(1.0);
        let delta = (Enclosure::from_u64(b) * bm1).recip();
        let z0 = Enclosure::from_u64(m) / bm1;
        let span = Span { z0: z0.hull(&(z1 - delta)), delta, full: false };
        s.add(tail_block(pre.r, m, span, kmin, &mut budget.used));
        if budget.used > budget.limit {
            budget.check("hn_measures terms")?;
        }
    }
    // a_n >= ceil(l): no further constraint, tail point in (0, 1/ceil(l)].
    let span = Span {
        z0: Enclosure::ZERO,
        delta: Enclosure::from_u64(top).recip(),
        full: false,
    };
    s.add(tail_block(pre.r, 1, span, kmin, &mut budget.used));
    budget.check("hn_measures terms")?;
    finish(s.value(), &pre.scale, tol, "hn_measures bracket")
}

fn h_tilde_measure(prefix: &Word, l: &BigRational, top: u64, budget: &mut Budget) -> Result<CertifiedMeasure> {
    // a_{n-1} = a < m_b and a_n = b < ceil(l), then a_{n+1} >= m_b.
    let count: u64 = (1..top).map(|b| ceil_div(l, b) - 1).sum();
    budget.used += count;
    budget.check("hn_measures terms")?;
    if count <= EXACT_TERM_LIMIT {
        let mut terms = Vec::with_capacity(count as usize);
        for b in 1..top {
            let m = BigUint::from(ceil_div(l, b));
            for a in 1..ceil_div(l, b) {
                let mut w = prefix.pushed(BigUint::from(a));
                w.push(BigUint::from(b));
                terms.push(tail_measure(&w, &m)?);
            }
        }
        return Ok(CertifiedMeasure::exact(exact_sum(terms)));
    }
    let pre = Prefix::of(prefix);
    let mut s = BlockSum::new();
    for b in 1..top {
        let m = ceil_div(l, b);
        let (be, me) = (Enclosure::from_u64(b), Enclosure::from_u64(m));
        for a in 1..m {
            let qa = Enclosure::from_u64(a) + pre.r;
            let qab = be * qa + Enclosure::exact(1.0);
            s.add((qab * (me * qab + qa)).recip());
        }
    }
    Ok(CertifiedMeasure::from_enclosure(s.value(), &pre.scale))
}

/// `n log^2(phi_n) / phi_n^2 + 1/phi_n`, the shape of the upper bound for
/// the measure of the `n`-th pair-product event.
pub fn an_bound(n: u64, phi_n: f64) -> Result<f64> {
    if !(phi_n > 1.0) || !phi_n.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("phi_n = {phi_n} must be a finite value above 1")));
    }
    let l = math::ln(phi_n);
    Ok(n as f64 * l * l / (phi_n * phi_n) + 1.0 / phi_n)
}

/// Partial sums of `sum_n (phi(n) + n log^2 phi(n)) / phi(n)^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesPartial {
    /// `S_N` for `N = 1..=len`.
    pub total: Vec<f64>,
    /// Partial sums of `1/phi(n)`.
    pub reciprocal: Vec<f64>,
    /// Partial sums of `n log^2 phi(n) / phi(n)^2`.
    pub log_part: Vec<f64>,
}

impl SeriesPartial {
    pub fn last(&self) -> f64 {
        self.total.last().copied().unwrap_or(0.0)
    }
}

/// Partial sums of the zero-one series for `phi = [phi(1), phi(2), ...]`.
pub fn series_partial(phi: &[f64]) -> Result<SeriesPartial> {
    let mut prev = 1.0;
    for (i, &p) in phi.iter().enumerate() {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(alloc::format!("phi({}) = {p} is below 1", i + 1)));
        }
        if p < prev {
            return Err(Error::NotMonotone {
                index: i + 1,
                detail: alloc::format!("phi({}) = {p} < phi({}) = {prev}", i + 1, i),
            });
        }
        prev = p;
    }
    let (mut rs, mut ls) = (CompensatedSum::new(), CompensatedSum::new());
    let mut out = SeriesPartial {
        total: Vec::with_capacity(phi.len()),
        reciprocal: Vec::with_capacity(phi.len()),
        log_part: Vec::with_capacity(phi.len()),
    };
    for (i, &p) in phi.iter().enumerate() {
        let n = (i + 1) as f64;
        let l = math::ln(p);
        rs.add(1.0 / p);
        ls.add(n * l * l / (p * p));
        out.reciprocal.push(rs.value());
        out.log_part.push(ls.value());
        out.total.push(rs.value() + ls.value());
    }
    Ok(out)
}
