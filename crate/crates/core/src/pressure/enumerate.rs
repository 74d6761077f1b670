//! Exhaustive enumeration of `f_n(s) = sum_{w in {1..M}^n} B^{-n g(s)} q_n(w)^{-2s}`.
//!
//! Continuants are exact (`u128`, or big integers for the single word of
//! the `M = 1` alphabet). Sums run in a shifted log domain: every term is
//! divided by the largest one, `q_n(1,...,1)^{-2s}`, so nothing underflows.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::One;

use super::{check_s, DimensionEstimate, Method, PotentialSpec, S_MAX};
use crate::math::{self, CompensatedSum};
use crate::root::bisect_decreasing;
use crate::{Error, Executor, Result, Sequential};

/// Default cap on the number of words enumerated per evaluation.
pub const DEFAULT_WORD_BUDGET: u128 = 100_000_000;
/// Default bracket width for enumeration roots.
pub const DEFAULT_ENUMERATION_TOL: f64 = 1e-12;

/// Word sets up to this size are cached between evaluations.
const CACHE_LIMIT: u128 = 1 << 22;
/// Entries per parallel chunk when summing a cached set.
const CHUNK: usize = 1 << 16;
/// Minimum number of jobs the word tree is split into.
const MIN_JOBS: u128 = 64;

fn word_count(n: usize, m: u64, budget: u128) -> Result<u128> {
    let mut count: u128 = 1;
    for _ in 0..n {
        count = count.saturating_mul(m as u128);
        if count > budget {
            return Err(Error::BudgetExceeded {
                what: "words to enumerate",
                needed: count,
                limit: budget,
            });
        }
    }
    Ok(count)
}

/// `ln q_n(1,...,1) = ln F_{n+1}`.
fn ln_fibonacci_continuant(n: usize) -> f64 {
    let (mut a, mut b) = (BigUint::one(), BigUint::one());
    for _ in 1..n {
        let c = &a + &b;
        a = core::mem::replace(&mut b, c);
    }
    math::ln_biguint(&b)
}

/// Splits the word tree into jobs by fixing a prefix of length `depth`.
#[derive(Clone, Copy, Debug)]
struct Partition {
    n: usize,
    m: u64,
    depth: usize,
    jobs: usize,
}

impl Partition {
    fn new(n: usize, m: u64) -> Self {
        let mut depth = 0;
        let mut jobs: u128 = 1;
        while depth < n && jobs < MIN_JOBS {
            jobs *= m as u128;
            depth += 1;
        }
        Partition { n, m, depth, jobs: jobs as usize }
    }

    /// Visits `q_n` of every word in job `job`, in lexicographic order.
    fn visit(&self, job: usize, f: &mut impl FnMut(u128)) {
        let mut digits = [0u64; 64];
        let mut rest = job as u64;
        for i in (0..self.depth).rev() {
            digits[i] = rest % self.m + 1;
            rest /= self.m;
        }
        let (mut q1, mut q) = (0u128, 1u128);
        for &a in &digits[..self.depth] {
            let next = a as u128 * q + q1;
            q1 = q;
            q = next;
        }
        dfs(self.n - self.depth, q, q1, self.m as u128, f);
    }
}

fn dfs(left: usize, q: u128, q1: u128, m: u128, f: &mut impl FnMut(u128)) {
    match left {
        0 => f(q),
        1 => {
            for a in 1..=m {
                f(a * q + q1);
            }
        }
        _ => {
            for a in 1..=m {
                dfs(left - 1, a * q + q1, q, m, f);
            }
        }
    }
}

/// `ln lambda_n(s)` with `lambda_n(s) = sum_{w in {1..M}^n} q_n(w)^{-2s}`.
pub fn ln_lambda(n: usize, m: u64, s: f64) -> Result<f64> {
    ln_lambda_with(&Sequential, n, m, s, DEFAULT_WORD_BUDGET)
}

pub fn ln_lambda_with<E: Executor>(exec: &E, n: usize, m: u64, s: f64, budget: u128) -> Result<f64> {
    check_s(s)?;
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("need n >= 1 and M >= 1".into()));
    }
    word_count(n, m, budget)?;
    if m == 1 {
        return Ok(-2.0 * s * ln_fibonacci_continuant(n));
    }
    let shift = ln_fibonacci_continuant(n);
    let part = Partition::new(n, m);
    let sums = exec.map(part.jobs, |job| {
        let mut acc = CompensatedSum::new();
        part.visit(job, &mut |q| acc.add(math::exp(-2.0 * s * (math::ln(q as f64) - shift))));
        acc
    });
    let mut total = CompensatedSum::new();
    for p in &sums {
        total.merge(p);
    }
    Ok(-2.0 * s * shift + math::ln(total.value()))
}

/// `ln f_n(s)`.
pub fn ln_f_n(n: usize, s: f64, spec: &PotentialSpec) -> Result<f64> {
    let ll = ln_lambda(n, spec.m, s)?;
    Ok(-(n as f64) * spec.g.eval(s) * math::ln(spec.b) + ll)
}

/// `f_n(s) = sum_{w in {1..M}^n} B^{-n g(s)} q_n(w)^{-2s}`.
pub fn f_n_eval(n: usize, s: f64, spec: &PotentialSpec) -> Result<f64> {
    f_n_eval_with(&Sequential, n, s, spec)
}

pub fn f_n_eval_with<E: Executor>(exec: &E, n: usize, s: f64, spec: &PotentialSpec) -> Result<f64> {
    let ll = ln_lambda_with(exec, n, spec.m, s, DEFAULT_WORD_BUDGET)?;
    Ok(math::exp(-(n as f64) * spec.g.eval(s) * math::ln(spec.b) + ll))
}

/// Cached shifted logarithms `ln q_n(w) - ln q_n(1..1)` of every word.
#[derive(Clone, Debug)]
pub struct LnContinuants {
    n: usize,
    shift: f64,
    offsets: Vec<f64>,
}

impl LnContinuants {
    pub fn new<E: Executor>(exec: &E, n: usize, m: u64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidParameter("need n >= 1 and M >= 1".into()));
        }
        word_count(n, m, CACHE_LIMIT)?;
        let shift = ln_fibonacci_continuant(n);
        if m == 1 {
            return Ok(LnContinuants { n, shift, offsets: alloc::vec![0.0] });
        }
        let part = Partition::new(n, m);
        let chunks = exec.map(part.jobs, |job| {
            let mut v = Vec::new();
            part.visit(job, &mut |q| v.push(math::ln(q as f64) - shift));
            v
        });
        Ok(LnContinuants { n, shift, offsets: chunks.concat() })
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn ln_lambda<E: Executor>(&self, exec: &E, s: f64) -> f64 {
        let chunks = self.offsets.len().div_ceil(CHUNK);
        let sums = exec.map(chunks, |c| {
            let mut acc = CompensatedSum::new();
            let end = ((c + 1) * CHUNK).min(self.offsets.len());
            for &o in &self.offsets[c * CHUNK..end] {
                acc.add(math::exp(-2.0 * s * o));
            }
            acc
        });
        let mut total = CompensatedSum::new();
        for p in &sums {
            total.merge(p);
        }
        -2.0 * s * self.shift + math::ln(total.value())
    }

    pub fn order(&self) -> usize {
        self.n
    }
}

/// The pre-dimensional number `inf { s >= 0 : f_n(s) <= 1 }` by bisection.
pub fn s_n_root(n: usize, spec: &PotentialSpec, tol: f64) -> Result<DimensionEstimate> {
    s_n_root_with(&Sequential, n, spec, tol)
}

pub fn s_n_root_with<E: Executor>(exec: &E, n: usize, spec: &PotentialSpec, tol: f64) -> Result<DimensionEstimate> {
    let ln_b = math::ln(spec.b);
    let g = spec.g;
    let nf = n as f64;
    let cached = word_count(n, spec.m, CACHE_LIMIT).ok().map(|_| LnContinuants::new(exec, n, spec.m));
    let root = match cached {
        Some(table) => {
            let table = table?;
            bisect_decreasing(|s| Ok(-nf * g.eval(s) * ln_b + table.ln_lambda(exec, s)), 0.0, S_MAX, tol)?
        }
        None => bisect_decreasing(
            |s| Ok(-nf * g.eval(s) * ln_b + ln_lambda_with(exec, n, spec.m, s, DEFAULT_WORD_BUDGET)?),
            0.0,
            S_MAX,
            tol,
        )?,
    };
    Ok(DimensionEstimate {
        value: root.value,
        lo: root.lo,
        hi: root.hi,
        method: Method::Enumeration,
        n_or_nodes: n,
        b: spec.b,
        g: spec.g,
        m: spec.m,
    })
}

#[cfg(test)]
mod tests {
    use super::super::Functional;
    use super::*;
    use crate::cf::{continuants, Word};
    use num_traits::ToPrimitive;

    fn brute_lambda(n: usize, m: u64, s: f64) -> f64 {
        let mut total = 0.0;
        let count = (m as usize).pow(n as u32);
        for idx in 0..count {
            let mut digits = Vec::new();
            let mut r = idx as u64;
            for _ in 0..n {
                digits.push(r % m + 1);
                r /= m;
            }
            let t = continuants(&Word::from_u64s(&digits).unwrap());
            let q = t.q(n as isize).to_f64().unwrap();
            total += q.powf(-2.0 * s);
        }
        total
    }

    #[test]
    fn matches_brute_force() {
        for (n, m, s) in [(1, 3, 0.7), (3, 4, 1.0), (5, 2, 0.55), (4, 5, 0.0)] {
            let got = math::exp(ln_lambda(n, m, s).unwrap());
            let want = brute_lambda(n, m, s);
            assert!((got - want).abs() < 1e-13 * want, "{n} {m} {s}: {got} {want}");
        }
    }

    #[test]
    fn closed_forms() {
        let s0 = (3.0 - 5f64.sqrt()) / 2.0;
        let spec = PotentialSpec::new(7.0, Functional::F2, 1).unwrap();
        assert!((f_n_eval(1, s0, &spec).unwrap() - 1.0).abs() < 1e-14);
        let spec = PotentialSpec::new(3.0, Functional::E1, 2).unwrap();
        let s = 0.8;
        let want = 3f64.powf(-s) * (1.0 + 2f64.powf(-2.0 * s));
        assert!((f_n_eval(1, s, &spec).unwrap() - want).abs() < 1e-15);
        let spec = PotentialSpec::new(2.0, Functional::F2, 1).unwrap();
        assert!((f_n_eval(2, 1.0, &spec).unwrap() - 1.0 / 16.0).abs() < 1e-16);
    }

    #[test]
    fn cached_and_streamed_agree() {
        let t = LnContinuants::new(&Sequential, 6, 3).unwrap();
        assert_eq!(t.len(), 729);
        for s in [0.0, 0.6, 1.2] {
            let a = t.ln_lambda(&Sequential, s);
            let b = ln_lambda(6, 3, s).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn long_single_letter_words() {
        // q_n(1..1) = F_{n+1} ~ phi^{n+1}/sqrt 5.
        let n = 5000;
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let want = -2.0 * ((n + 1) as f64 * golden.ln() - 0.5 * 5f64.ln());
        assert!((ln_lambda(n, 1, 1.0).unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn roots() {
        let s0 = (3.0 - 5f64.sqrt()) / 2.0;
        for b in [1.5, 2.0, 10.0] {
            let spec = PotentialSpec::new(b, Functional::F2, 1).unwrap();
            let r = s_n_root(1, &spec, 1e-13).unwrap();
            assert!((r.value - s0).abs() < 1e-12);
        }
        let spec = PotentialSpec::new(4.0, Functional::E1, 1).unwrap();
        assert_eq!(s_n_root(1, &spec, 1e-12).unwrap().value, 0.0);
        assert!(matches!(
            word_count(30, 10, DEFAULT_WORD_BUDGET),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
