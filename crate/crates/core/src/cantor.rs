//! A Cantor subset of the `F2(B)` limsup set built from blocks of bounded
//! quotients separated by peak triples, with its mass distribution.
//!
//! Positions are 1-based. Stage `k` spans `n_{k-1} + 2 ..= n_k + 1`: first
//! `m_k` blocks of `L` quotients from `{1..M}`, then a pre-peak quotient
//! near `alpha^{n_k}`, a peak near `B^{n_k} / alpha^{n_k}` and a post-peak
//! near `alpha^{n_k}`.
//!
//! Geometry (cylinders, fundamental intervals, gaps) is exact rational.
//! Masses and the length bounds are kept as natural logarithms, since
//! they involve powers such as `B^{n_k}`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::cf::{last_continuants, Word};
use crate::math::{self, CompensatedSum};
use crate::pressure::{s_n_root, Functional, PotentialSpec, DEFAULT_ENUMERATION_TOL};
use crate::{Error, Result};

/// Positions beyond this are never materialised.
pub const MATERIALIZE_LIMIT: u64 = 1_000_000;
/// Largest block alphabet `M^L` for which block masses are tabulated.
pub const BLOCK_TABLE_LIMIT: u64 = 1 << 22;
/// Slack allowed below `S - 4/L` in the Hölder audit under the full schedule.
pub const HOLDER_SLACK: f64 = 0.05;

/// How the block counts `m_k` are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleMode {
    /// The growth condition with equality, rounded up.
    Paper,
    /// `m_k = c k`. Fine for geometry, but the Hölder constant is void.
    Scaled(u64),
}

/// A stage whose `n_k` is too large to materialise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicStage {
    pub k: u64,
    pub m: BigUint,
    pub n: BigUint,
}

/// Kind of a position in an admissible word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PositionTag {
    Regular,
    PrePeak { k: u64 },
    Peak { k: u64 },
    PostPeak { k: u64 },
}

/// Inclusive integer range of admissible quotients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientRange {
    pub lo: BigUint,
    pub hi: BigUint,
}

impl QuotientRange {
    pub fn contains(&self, a: &BigUint) -> bool {
        &self.lo <= a && a <= &self.hi
    }

    pub fn count(&self) -> BigUint {
        &self.hi + 1u32 - &self.lo
    }

    fn ln_count(&self) -> f64 {
        math::ln_biguint(&self.count())
    }
}

/// Schedule, pre-dimensional number and block mass table.
#[derive(Clone, Debug)]
pub struct ConstructionParams {
    /// Block length `L`.
    pub l: usize,
    /// Alphabet bound `M`.
    pub m_bound: u64,
    pub b: f64,
    /// Root `S` of `sum_{{1..M}^L} B^{-(3S-1-S^2)L} q_L^{-2S} = 1`.
    pub s: f64,
    pub s_bracket: (f64, f64),
    /// `ln alpha = (1 - S) ln B`.
    pub ln_alpha: f64,
    /// `ln beta = (3S - 1 - S^2) ln B`.
    pub ln_beta: f64,
    pub mode: ScheduleMode,
    /// `m_1, m_2, ...` for the materialised stages.
    pub m_seq: Vec<u64>,
    /// `n_1, n_2, ...` for the materialised stages (`n_0 = -1`).
    pub n_seq: Vec<u64>,
    /// First stage with a pre-peak position past [`MATERIALIZE_LIMIT`].
    pub beyond: SymbolicStage,
    blocks: BlockTable,
}

/// Builds the construction for `(L, M, B)`.
pub fn schedule(l: usize, m_bound: u64, b: f64, mode: ScheduleMode) -> Result<ConstructionParams> {
    if l == 0 {
        return Err(Error::InvalidParameter("block length L must be at least 1".into()));
    }
    let spec = PotentialSpec::new(b, Functional::F2, m_bound)?;
    if let ScheduleMode::Scaled(0) = mode {
        return Err(Error::InvalidParameter("scaled schedule needs c >= 1".into()));
    }
    let root = s_n_root(l, &spec, DEFAULT_ENUMERATION_TOL)?;
    let s = root.value;
    let ln_b = math::ln(b);
    let ln_alpha = (1.0 - s) * ln_b;
    let ln_beta = Functional::F2.eval(s) * ln_b;
    if !(ln_alpha > 0.0 && ln_beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "S = {s} gives alpha = {}, beta = {}; both must exceed 1",
            math::exp(ln_alpha),
            math::exp(ln_beta)
        )));
    }
    let blocks = BlockTable::new(l, m_bound, s, ln_beta)?;

    let mut m_seq = Vec::new();
    let mut n_seq = Vec::new();
    let mut n_prev = BigInt::from(-1);
    let mut m_sum = 0.0f64;
    let mut k = 1u64;
    let beyond = loop {
        let m_k = match mode {
            ScheduleMode::Paper => {
                let kf = k as f64;
                let lf = l as f64;
                let v = 64.0 * b * lf * lf * kf * kf * kf * kf * m_sum / math::LN_2 + 8.0 * kf * lf * b * b;
                BigUint::from_f64(math::ceil(v))
                    .ok_or_else(|| Error::InvalidParameter(format!("m_{k} = {v} is not representable")))?
            }
            ScheduleMode::Scaled(c) => BigUint::from(c) * k,
        };
        let n_k: BigInt = &n_prev + BigInt::from(&m_k * BigUint::from(l)) + 3;
        let n_big = n_k.to_biguint().unwrap_or_default();
        match (m_k.to_u64(), n_big.to_u64()) {
            (Some(m), Some(n)) if n - 1 <= MATERIALIZE_LIMIT => {
                m_seq.push(m);
                n_seq.push(n);
                m_sum += m as f64;
            }
            _ => break SymbolicStage { k, m: m_k, n: n_big },
        }
        n_prev = n_k;
        k += 1;
    };
    Ok(ConstructionParams {
        l,
        m_bound,
        b,
        s,
        s_bracket: (root.lo, root.hi),
        ln_alpha,
        ln_beta,
        mode,
        m_seq,
        n_seq,
        beyond,
        blocks,
    })
}

impl ConstructionParams {
    /// `n_k` for a materialised stage, with `n_0 = -1`.
    pub fn n_k(&self, k: u64) -> Option<i64> {
        if k == 0 {
            Some(-1)
        } else {
            self.n_seq.get(k as usize - 1).map(|&n| n as i64)
        }
    }

    fn check_position(&self, p: u64) -> Result<()> {
        if p == 0 {
            return Err(Error::Domain("positions start at 1".into()));
        }
        if p > MATERIALIZE_LIMIT {
            return Err(Error::BudgetExceeded {
                what: "construction depth",
                needed: p as u128,
                limit: MATERIALIZE_LIMIT as u128,
            });
        }
        Ok(())
    }

    /// The role of position `p`.
    pub fn classify(&self, p: u64) -> Result<PositionTag> {
        self.check_position(p)?;
        // First stage whose post-peak position is at or after p.
        let idx = self.n_seq.partition_point(|&n| n + 1 < p);
        let Some(&n) = self.n_seq.get(idx) else {
            return Ok(PositionTag::Regular);
        };
        let k = idx as u64 + 1;
        Ok(match p as i64 - n as i64 {
            -1 => PositionTag::PrePeak { k },
            0 => PositionTag::Peak { k },
            1 => PositionTag::PostPeak { k },
            _ => PositionTag::Regular,
        })
    }

    /// Stage `k` and `n_k` (when materialised) with `n_{k-1} + 1 <= n <= n_k`.
    fn stage_of(&self, n: u64) -> (u64, Option<u64>) {
        let idx = self.n_seq.partition_point(|&nk| nk < n);
        (idx as u64 + 1, self.n_seq.get(idx).copied())
    }

    fn ln_alpha_pow(&self, k: u64) -> f64 {
        self.n_seq[k as usize - 1] as f64 * self.ln_alpha
    }

    /// Admissible quotients at position `p`.
    pub fn range_at(&self, p: u64) -> Result<QuotientRange> {
        Ok(match self.classify(p)? {
            PositionTag::Regular => QuotientRange {
                lo: BigUint::one(),
                hi: BigUint::from(self.m_bound),
            },
            PositionTag::PrePeak { k } | PositionTag::PostPeak { k } => scaled_range(self.ln_alpha_pow(k)),
            PositionTag::Peak { k } => {
                let nk = self.n_seq[k as usize - 1] as f64;
                scaled_range(nk * math::ln(self.b) - nk * self.ln_alpha)
            }
        })
    }

    /// Checks that `word` lies in `D_n`.
    pub fn admit(&self, word: &Word) -> Result<AdmissibleWord> {
        for (i, a) in word.quotients().iter().enumerate() {
            let p = i as u64 + 1;
            let range = self.range_at(p)?;
            if !range.contains(a) {
                return Err(Error::Domain(format!(
                    "quotient {a} at position {p} is outside [{}, {}]",
                    range.lo, range.hi
                )));
            }
        }
        Ok(AdmissibleWord { word: word.clone() })
    }

    /// The integer range of `a_{n+1}` for a word of depth `n`.
    pub fn admissible_children(&self, word: &AdmissibleWord) -> Result<QuotientRange> {
        self.range_at(word.depth() as u64 + 1)
    }

    /// Whether this schedule satisfies the growth condition.
    pub fn is_paper_mode(&self) -> bool {
        self.mode == ScheduleMode::Paper
    }

    /// `S - 4/L`, the exponent the mass distribution is shown to achieve.
    pub fn holder_target(&self) -> f64 {
        self.s - 4.0 / self.l as f64
    }
}

/// `[ceil(t), floor(2t)]` for `t = e^{ln_t} >= 1`.
///
/// Past `f64` range `t` is rebuilt from a 53-bit mantissa of `log2 t`, so
/// the low bits of huge endpoints are not meaningful.
fn scaled_range(ln_t: f64) -> QuotientRange {
    if ln_t < 700.0 {
        let t = math::exp(ln_t);
        let lo = BigUint::from_f64(math::ceil(t)).unwrap_or_else(BigUint::one).max(BigUint::one());
        let hi = BigUint::from_f64(math::floor(2.0 * t)).unwrap_or_default().max(lo.clone());
        return QuotientRange { lo, hi };
    }
    let x = ln_t / math::LN_2;
    let e = math::floor(x);
    let mant = math::floor(math::exp2(x - e) * 4_503_599_627_370_496.0) as u64;
    let lo = BigUint::from(mant) << (e as u64 - 52);
    let hi = &lo << 1u32;
    QuotientRange { lo, hi }
}

/// A word in `D_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleWord {
    word: Word,
}

impl AdmissibleWord {
    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn depth(&self) -> usize {
        self.word.order()
    }
}

/// `J_n`: the union of the admissible child cylinders of a word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalInterval {
    pub left: BigRational,
    pub right: BigRational,
    pub children: QuotientRange,
}

impl FundamentalInterval {
    pub fn length(&self) -> BigRational {
        &self.right - &self.left
    }

    pub fn encloses(&self, other: &FundamentalInterval) -> bool {
        self.left <= other.left && other.right <= self.right
    }

    fn distance(&self, other: &FundamentalInterval) -> BigRational {
        let d = if other.left >= self.right {
            &other.left - &self.right
        } else {
            &self.left - &other.right
        };
        d.max(BigRational::zero())
    }
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `J` from the last two continuant rows and the child range.
fn interval_from(p: &BigUint, p1: &BigUint, q: &BigUint, q1: &BigUint, children: QuotientRange) -> FundamentalInterval {
    let end = |t: &BigUint| ratio(t * p + p1, t * q + q1);
    let a = end(&children.lo);
    let b = end(&(&children.hi + 1u32));
    let (left, right) = if a <= b { (a, b) } else { (b, a) };
    FundamentalInterval { left, right, children }
}

/// Exact `J_n(word)`.
pub fn fundamental_interval(word: &AdmissibleWord, params: &ConstructionParams) -> Result<FundamentalInterval> {
    let (p, p1, q, q1) = last_continuants(&word.word);
    Ok(interval_from(&p, &p1, &q, &q1, params.admissible_children(word)?))
}

/// `ln |J_n|` without forming the rational.
fn ln_interval_length(q: &BigUint, q1: &BigUint, children: &QuotientRange) -> f64 {
    let a = &children.lo * q + q1;
    let b = (&children.hi + 1u32) * q + q1;
    children.ln_count() - math::ln_biguint(&a) - math::ln_biguint(&b)
}

/// Which length estimate applies at depth `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LengthCase {
    /// Regular children, `n_{k-1} + 1 <= n <= n_k - 3`.
    I,
    /// `n = n_k - 2`, pre-peak children.
    II,
    /// `n = n_k - 1`, peak children.
    III,
    /// `n = n_k`, post-peak children.
    IV,
}

/// Two-sided bounds for `|J_n|` as natural logarithms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LengthBounds {
    pub case: LengthCase,
    pub ln_lower: f64,
    pub ln_upper: f64,
    /// Sharper bounds through older continuants (first regular depth of
    /// a later stage, or the peak depth), when they apply.
    pub refined: Option<(f64, f64)>,
    pub ln_exact: f64,
}

impl LengthBounds {
    /// Whether the exact length lies inside every bracket, up to a relative
    /// log slack of `1e-12` for rounding.
    pub fn holds(&self) -> bool {
        let inside = |lo: f64, hi: f64| {
            let slack = 1e-12 * self.ln_exact.abs().max(1.0);
            lo <= self.ln_exact + slack && self.ln_exact <= hi + slack
        };
        inside(self.ln_lower, self.ln_upper) && self.refined.is_none_or(|(lo, hi)| inside(lo, hi))
    }
}

/// The case brackets for `|J_n|` together with the exact value.
pub fn fundamental_length_bounds(word: &AdmissibleWord, params: &ConstructionParams) -> Result<LengthBounds> {
    let n = word.depth() as u64;
    if n == 0 {
        return Err(Error::Domain("fundamental intervals start at depth 1".into()));
    }
    let children = params.admissible_children(word)?;
    let t = crate::cf::continuants(&word.word);
    let ln_q = |i: u64| math::ln_biguint(t.q(i as isize));
    let ln_exact = ln_interval_length(t.q(n as isize), t.q(n as isize - 1), &children);
    let ln2 = math::LN_2;
    let lq = ln_q(n);
    let ln_b = math::ln(params.b);
    let (k, n_k) = params.stage_of(n);
    let case = match n_k.map(|nk| nk as i64 - n as i64) {
        Some(2) => LengthCase::II,
        Some(1) => LengthCase::III,
        Some(0) => LengthCase::IV,
        _ => LengthCase::I,
    };
    let nf = n as f64;
    let (ln_lower, ln_upper, refined) = match case {
        LengthCase::I => {
            let refined = (k >= 2 && n_k_prev(params, k) + 1 == n as i64).then(|| {
                let base = 2.0 * (nf - 1.0) * (ln_b + params.ln_alpha) + 2.0 * ln_q(n - 3);
                (-15.0 * ln2 - base, 2.0 * ln2 - base)
            });
            (-3.0 * ln2 - 2.0 * lq, 2.0 * ln2 - 2.0 * lq, refined)
        }
        LengthCase::II => {
            let base = (nf + 2.0) * params.ln_alpha + 2.0 * lq;
            (-4.0 * ln2 - base, 2.0 * ln2 - base, None)
        }
        LengthCase::III => {
            let base = (nf + 1.0) * (ln_b - params.ln_alpha) + 2.0 * lq;
            (-4.0 * ln2 - base, 2.0 * ln2 - base, None)
        }
        LengthCase::IV => {
            let base = nf * params.ln_alpha + 2.0 * lq;
            let rbase = nf * params.ln_alpha + 2.0 * nf * ln_b + 2.0 * ln_q(n - 2);
            (-4.0 * ln2 - base, 2.0 * ln2 - base, Some((-12.0 * ln2 - rbase, 2.0 * ln2 - rbase)))
        }
    };
    Ok(LengthBounds { case, ln_lower, ln_upper, refined, ln_exact })
}

fn n_k_prev(params: &ConstructionParams, k: u64) -> i64 {
    params.n_k(k - 1).unwrap_or(i64::MAX)
}

/// Which gap estimate applies at depth `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapCase {
    /// Regular children: gap at least `|J_n| / (40 M)`.
    I,
    /// Special children (`n = n_k - 2, n_k - 1, n_k`): gap at least `|J_n| / 20`.
    Special,
}

/// Distances from `J_n` to the fundamental intervals of its neighbours
/// `a_n - 1` and `a_n + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapReport {
    pub case: GapCase,
    /// Distance to the interval of `a_n - 1`, if that word is admissible.
    pub lower_neighbor: Option<BigRational>,
    /// Distance to the interval of `a_n + 1`, if that word is admissible.
    pub upper_neighbor: Option<BigRational>,
    /// The smaller of the available distances.
    pub gap: BigRational,
    /// Set when only one neighbour exists.
    pub one_sided: bool,
    pub length: BigRational,
    /// `|J_n| / (40 M)` or `|J_n| / 20`.
    pub required: BigRational,
}

impl GapReport {
    pub fn holds(&self) -> bool {
        self.gap >= self.required
    }
}

/// Exact gap between `J_n(word)` and its same-order neighbours.
pub fn gap(word: &AdmissibleWord, params: &ConstructionParams) -> Result<GapReport> {
    let n = word.depth() as u64;
    let Some(a_n) = word.word.quotients().last() else {
        return Err(Error::Domain("the empty word has no neighbours".into()));
    };
    let own_range = params.range_at(n)?;
    let children = params.admissible_children(word)?;
    let (p, p1, q, q1) = last_continuants(&word.word);
    let own = interval_from(&p, &p1, &q, &q1, children.clone());

    let lower_neighbor = (a_n > &own_range.lo).then(|| {
        let j = interval_from(&(&p - &p1), &p1, &(&q - &q1), &q1, children.clone());
        own.distance(&j)
    });
    let upper_neighbor = (a_n < &own_range.hi).then(|| {
        let j = interval_from(&(&p + &p1), &p1, &(&q + &q1), &q1, children.clone());
        own.distance(&j)
    });
    let gap = match (&lower_neighbor, &upper_neighbor) {
        (Some(a), Some(b)) => a.clone().min(b.clone()),
        (Some(a), None) | (None, Some(a)) => a.clone(),
        (None, None) => {
            return Err(Error::Domain(format!(
                "position {n} admits the single quotient {a_n}; there is no neighbour"
            )))
        }
    };
    let (_, n_k) = params.stage_of(n);
    let case = match n_k.map(|nk| nk - n) {
        Some(0..=2) => GapCase::Special,
        _ => GapCase::I,
    };
    let length = own.length();
    let divisor = match case {
        GapCase::I => BigInt::from(40u64 * params.m_bound),
        GapCase::Special => BigInt::from(20),
    };
    let required = &length / BigRational::from_integer(divisor);
    Ok(GapReport {
        case,
        one_sided: lower_neighbor.is_none() || upper_neighbor.is_none(),
        lower_neighbor,
        upper_neighbor,
        gap,
        length,
        required,
    })
}

/// How special positions and blocks are weighted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MassMode {
    /// Block weights divided by their computed total, special positions
    /// split evenly between their children. Conserves mass exactly.
    Normalized,
    /// The displayed factors `1/alpha^{n_k}`, `alpha^{n_k}/B^{n_k}`,
    /// `1/alpha^{n_k}` and raw block weights `1/(beta^L q_L^{2S})`.
    Nominal,
}

/// Normalised block weights and their prefix sums.
#[derive(Clone, Debug)]
struct BlockTable {
    m: u64,
    /// `ln` of the raw total `sum_w 1/(beta^L q_L(w)^{2S})`.
    ln_total: f64,
    /// `levels[r][idx]`: normalised weight of all blocks starting with the
    /// `r` digits encoded by `idx` (base `M`, most significant first).
    levels: Vec<Vec<f64>>,
}

impl BlockTable {
    fn new(l: usize, m: u64, s: f64, ln_beta: f64) -> Result<Self> {
        let count = (m as u128).checked_pow(l as u32).unwrap_or(u128::MAX);
        if count > BLOCK_TABLE_LIMIT as u128 {
            return Err(Error::BudgetExceeded {
                what: "block mass table",
                needed: count,
                limit: BLOCK_TABLE_LIMIT as u128,
            });
        }
        let count = count as usize;
        let mut ln_w = Vec::with_capacity(count);
        for idx in 0..count {
            let (mut q1, mut q) = (0.0f64, 1.0f64);
            let mut rest = idx;
            let mut digits = vec![0u64; l];
            for d in digits.iter_mut().rev() {
                *d = (rest % m as usize) as u64 + 1;
                rest /= m as usize;
            }
            let mut ln_scale = 0.0;
            for &a in &digits {
                let next = a as f64 * q + q1;
                q1 = q;
                q = next;
                if q > 1e150 {
                    ln_scale += math::ln(q);
                    q1 /= q;
                    q = 1.0;
                }
            }
            ln_w.push(-(l as f64) * ln_beta - 2.0 * s * (ln_scale + math::ln(q)));
        }
        let shift = ln_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = CompensatedSum::new();
        for &v in &ln_w {
            total.add(math::exp(v - shift));
        }
        let ln_total = shift + math::ln(total.value());
        let mut levels = vec![Vec::new(); l + 1];
        levels[l] = ln_w.iter().map(|&v| math::exp(v - ln_total)).collect();
        for r in (0..l).rev() {
            let below = &levels[r + 1];
            levels[r] = below
                .chunks(m as usize)
                .map(|c| {
                    let mut s = CompensatedSum::new();
                    c.iter().for_each(|&v| s.add(v));
                    s.value()
                })
                .collect();
        }
        Ok(BlockTable { m, ln_total, levels })
    }
}

/// Incremental mass of a word as quotients are appended.
#[derive(Clone, Debug)]
struct MassWalker<'a> {
    params: &'a ConstructionParams,
    mode: MassMode,
    depth: u64,
    ln_done: f64,
    block_idx: usize,
    block_len: usize,
}

impl<'a> MassWalker<'a> {
    fn new(params: &'a ConstructionParams, mode: MassMode) -> Self {
        MassWalker { params, mode, depth: 0, ln_done: 0.0, block_idx: 0, block_len: 0 }
    }

    fn push(&mut self, a: &BigUint) -> Result<()> {
        let p = self.depth + 1;
        let params = self.params;
        let tag = params.classify(p)?;
        let range = params.range_at(p)?;
        if !range.contains(a) {
            return Err(Error::Domain(format!("quotient {a} at position {p} is not admissible")));
        }
        let table = &params.blocks;
        match tag {
            PositionTag::Regular => {
                let d = a.to_u64().unwrap_or(1) - 1;
                self.block_idx = self.block_idx * table.m as usize + d as usize;
                self.block_len += 1;
                if self.block_len == params.l {
                    self.ln_done += math::ln(table.levels[params.l][self.block_idx]);
                    if self.mode == MassMode::Nominal {
                        self.ln_done += table.ln_total;
                    }
                    self.block_idx = 0;
                    self.block_len = 0;
                }
            }
            _ if self.mode == MassMode::Normalized => self.ln_done -= range.ln_count(),
            PositionTag::PrePeak { k } | PositionTag::PostPeak { k } => self.ln_done -= params.ln_alpha_pow(k),
            PositionTag::Peak { k } => {
                let nk = params.n_seq[k as usize - 1] as f64;
                self.ln_done += params.ln_alpha_pow(k) - nk * math::ln(params.b);
            }
        }
        self.depth = p;
        Ok(())
    }

    /// `ln mu(J_depth)`; inside a block the mass is the sum over completions.
    fn ln_mass(&self) -> f64 {
        if self.block_len == 0 {
            return self.ln_done;
        }
        let table = &self.params.blocks;
        let mut v = self.ln_done + math::ln(table.levels[self.block_len][self.block_idx]);
        if self.mode == MassMode::Nominal {
            v += table.ln_total;
        }
        v
    }
}

/// A word with its mass.
#[derive(Clone, Debug, PartialEq)]
pub struct MassAssignment {
    pub word: AdmissibleWord,
    /// `ln mu(J_n(word))`.
    pub ln_mass: f64,
    pub mode: MassMode,
}

impl MassAssignment {
    pub fn mass(&self) -> f64 {
        math::exp(self.ln_mass)
    }
}

/// The mass of `J_n(word)`.
pub fn mu_assign(word: &AdmissibleWord, params: &ConstructionParams, mode: MassMode) -> Result<MassAssignment> {
    let mut walker = MassWalker::new(params, mode);
    for a in word.word.quotients() {
        walker.push(a)?;
    }
    Ok(MassAssignment { word: word.clone(), ln_mass: walker.ln_mass(), mode })
}

/// `sum_children mu(J_{n+1}) / mu(J_n)`. Children of a special position are
/// counted rather than enumerated.
pub fn children_mass_ratio(word: &AdmissibleWord, params: &ConstructionParams, mode: MassMode) -> Result<f64> {
    let mut walker = MassWalker::new(params, mode);
    for a in word.word.quotients() {
        walker.push(a)?;
    }
    let parent = walker.ln_mass();
    let p = word.depth() as u64 + 1;
    let range = params.range_at(p)?;
    if params.classify(p)? == PositionTag::Regular {
        let mut sum = CompensatedSum::new();
        for a in 1..=params.m_bound {
            let mut w = walker.clone();
            w.push(&BigUint::from(a))?;
            sum.add(math::exp(w.ln_mass() - parent));
        }
        Ok(sum.value())
    } else {
        let mut w = walker;
        w.push(&range.lo)?;
        Ok(math::exp(range.ln_count() + w.ln_mass() - parent))
    }
}

/// Every word of `D_depth`, in lexicographic order.
pub fn admissible_words(params: &ConstructionParams, depth: usize, limit: usize) -> Result<Vec<AdmissibleWord>> {
    let mut count: u128 = 1;
    let mut ranges = Vec::with_capacity(depth);
    for p in 1..=depth as u64 {
        let r = params.range_at(p)?;
        count = count.saturating_mul(r.count().to_u128().unwrap_or(u128::MAX));
        if count > limit as u128 {
            return Err(Error::BudgetExceeded {
                what: "admissible words",
                needed: count,
                limit: limit as u128,
            });
        }
        ranges.push(r);
    }
    let mut out = vec![Word::empty()];
    for r in &ranges {
        let mut next = Vec::with_capacity(out.len() * r.count().to_usize().unwrap_or(1));
        for w in &out {
            let mut a = r.lo.clone();
            while a <= r.hi {
                next.push(w.pushed(a.clone()));
                a += 1u32;
            }
        }
        out = next;
    }
    Ok(out.into_iter().map(|word| AdmissibleWord { word }).collect())
}

/// Total mass of the depth-`depth` layer by enumeration.
pub fn layer_mass(params: &ConstructionParams, depth: usize, mode: MassMode, limit: usize) -> Result<f64> {
    let mut sum = CompensatedSum::new();
    for w in admissible_words(params, depth, limit)? {
        sum.add(mu_assign(&w, params, mode)?.mass());
    }
    Ok(sum.value())
}

/// Uniform integer in `[0, n)`, by rejection.
pub(crate) fn uniform_below(rng: &mut impl RngCore, n: u64) -> u64 {
    debug_assert!(n > 0);
    let zone = u64::MAX - u64::MAX % n;
    loop {
        let v = rng.next_u64();
        if v < zone {
            return v % n;
        }
    }
}

/// Uniform big integer in `[0, n)`, by rejection on `bits(n)` random bits.
fn uniform_biguint(rng: &mut impl RngCore, n: &BigUint) -> BigUint {
    if let Some(small) = n.to_u64() {
        return BigUint::from(uniform_below(rng, small));
    }
    let bits = n.bits();
    let words = bits.div_ceil(32) as usize;
    let top_mask = if bits % 32 == 0 { u32::MAX } else { (1u32 << (bits % 32)) - 1 };
    loop {
        let mut digits: Vec<u32> = (0..words).map(|_| rng.next_u32()).collect();
        if let Some(last) = digits.last_mut() {
            *last &= top_mask;
        }
        let v = BigUint::new(digits);
        if &v < n {
            return v;
        }
    }
}

/// Random admissible word of the given depth; sample `index` of a seeded
/// family, independent of how samples are distributed over workers.
pub fn sample_word(params: &ConstructionParams, depth: usize, seed: u64, index: u64) -> Result<AdmissibleWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut word = Word::empty();
    for p in 1..=depth as u64 {
        let r = params.range_at(p)?;
        word.push(&r.lo + uniform_biguint(&mut rng, &r.count()));
    }
    Ok(AdmissibleWord { word })
}

/// Result of sampling branches and measuring `ln mu / ln |J_n|`.
#[derive(Clone, Debug, PartialEq)]
pub struct HolderReport {
    pub depth: usize,
    pub samples: usize,
    pub seed: u64,
    pub mode: MassMode,
    /// `S - 4/L`.
    pub target: f64,
    /// Exponent of each sampled word at the full depth.
    pub exponents: Vec<f64>,
    /// Smallest exponent over every prefix depth of every sample.
    pub min_over_depths: f64,
    pub min: f64,
    pub median: f64,
    /// `(lower edge, count)` for buckets of width [`Self::BUCKET`].
    pub histogram: Vec<(f64, usize)>,
    /// Largest relative deviation of children mass from parent mass seen
    /// along the sampled branches (only meaningful in normalised mode).
    pub max_conservation_error: f64,
    /// Full-schedule verdict for `min_over_depths >= S - 4/L - 0.05`;
    /// `None` under a scaled schedule, which carries no guarantee.
    pub meets_target: Option<bool>,
}

impl HolderReport {
    pub const BUCKET: f64 = 0.05;
}

/// Samples `samples` branches of depth `depth` and reports their Hölder
/// exponents `ln mu(J_n) / ln |J_n|` at every depth along the way.
pub fn holder_report(
    params: &ConstructionParams,
    depth: usize,
    samples: usize,
    seed: u64,
    mode: MassMode,
) -> Result<HolderReport> {
    holder_report_with(&crate::Sequential, params, depth, samples, seed, mode)
}

struct Branch {
    last: f64,
    min: f64,
    conservation: f64,
}

pub fn holder_report_with<E: crate::Executor>(
    exec: &E,
    params: &ConstructionParams,
    depth: usize,
    samples: usize,
    seed: u64,
    mode: MassMode,
) -> Result<HolderReport> {
    if depth == 0 || samples == 0 {
        return Err(Error::InvalidParameter("depth and samples must be positive".into()));
    }
    params.check_position(depth as u64 + 1)?;
    let branches = exec.map(samples, |i| audit_branch(params, depth, seed, i as u64, mode));
    let branches: Vec<Branch> = branches.into_iter().collect::<Result<_>>()?;

    let mut exponents: Vec<f64> = branches.iter().map(|b| b.last).collect();
    let min_over_depths = branches.iter().map(|b| b.min).fold(f64::INFINITY, f64::min);
    let max_conservation_error = branches.iter().map(|b| b.conservation).fold(0.0, f64::max);
    let mut sorted = exponents.clone();
    sorted.sort_by(f64::total_cmp);
    let min = sorted[0];
    let median = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    };
    let mut histogram: Vec<(f64, usize)> = Vec::new();
    for &e in &sorted {
        let edge = math::floor(e / HolderReport::BUCKET) * HolderReport::BUCKET;
        match histogram.last_mut() {
            Some((lo, c)) if (*lo - edge).abs() < 1e-12 => *c += 1,
            _ => histogram.push((edge, 1)),
        }
    }
    let target = params.holder_target();
    let meets_target = params.is_paper_mode().then(|| min_over_depths >= target - HOLDER_SLACK);
    exponents.shrink_to_fit();
    Ok(HolderReport {
        depth,
        samples,
        seed,
        mode,
        target,
        exponents,
        min_over_depths,
        min,
        median,
        histogram,
        max_conservation_error,
        meets_target,
    })
}

fn audit_branch(params: &ConstructionParams, depth: usize, seed: u64, index: u64, mode: MassMode) -> Result<Branch> {
    let word = sample_word(params, depth, seed, index)?;
    let mut walker = MassWalker::new(params, mode);
    let (mut q, mut q1) = (BigUint::one(), BigUint::zero());
    let mut min = f64::INFINITY;
    let mut last = f64::NAN;
    let mut conservation: f64 = 0.0;
    for (i, a) in word.word.quotients().iter().enumerate() {
        walker.push(a)?;
        let next = a * &q + &q1;
        q1 = core::mem::replace(&mut q, next);
        let n = i as u64 + 1;
        let children = params.range_at(n + 1)?;
        let ln_len = ln_interval_length(&q, &q1, &children);
        let e = walker.ln_mass() / ln_len;
        min = min.min(e);
        last = e;
        if mode == MassMode::Normalized && params.classify(n + 1)? != PositionTag::Regular {
            // Special children are split evenly; the check is the count.
            let mut child = walker.clone();
            child.push(&children.lo)?;
            let r = math::exp(children.ln_count() + child.ln_mass() - walker.ln_mass());
            conservation = conservation.max((r - 1.0).abs());
        }
    }
    Ok(Branch { last, min, conservation })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> ConstructionParams {
        schedule(2, 3, 2.0, ScheduleMode::Scaled(1)).unwrap()
    }

    #[test]
    fn scaled_schedule_unrolls() {
        let p = schedule(2, 2, 2.0, ScheduleMode::Scaled(2)).unwrap();
        assert_eq!(&p.m_seq[..3], &[2, 4, 6]);
        assert_eq!(&p.n_seq[..3], &[6, 17, 32]);
        assert!(p.n_seq.last().unwrap() - 1 <= MATERIALIZE_LIMIT);
        assert!(p.beyond.n > BigUint::from(MATERIALIZE_LIMIT + 1));
    }

    #[test]
    fn full_schedule_first_term() {
        let p = schedule(1, 2, 2.0, ScheduleMode::Paper).unwrap();
        assert_eq!(p.m_seq[0], 32);
        assert_eq!(p.n_seq[0], 34);
        // m_2 = ceil(64 * 2 * 16 * 32 / ln 2 + 16 * 4).
        let m2 = (65536.0 / core::f64::consts::LN_2 + 64.0f64).ceil() as u64;
        assert_eq!(p.m_seq[1], m2);
        assert_eq!(p.n_seq[1], 34 + m2 + 3);
        // The third stage is far past the materialisation limit.
        assert_eq!(p.n_seq.len(), 2);
        assert_eq!(p.beyond.k, 3);
    }

    #[test]
    fn positions_are_tagged() {
        let p = toy();
        // n_1 = -1 + 2 + 3 = 4: regular 1, 2 then 3, 4, 5 special.
        assert_eq!(p.n_seq[0], 4);
        assert_eq!(p.classify(2).unwrap(), PositionTag::Regular);
        assert_eq!(p.classify(3).unwrap(), PositionTag::PrePeak { k: 1 });
        assert_eq!(p.classify(4).unwrap(), PositionTag::Peak { k: 1 });
        assert_eq!(p.classify(5).unwrap(), PositionTag::PostPeak { k: 1 });
        assert_eq!(p.classify(6).unwrap(), PositionTag::Regular);
        assert!(p.classify(0).is_err());
        assert!(p.classify(MATERIALIZE_LIMIT + 1).is_err());
    }

    #[test]
    fn ranges_are_nonempty() {
        for ln_t in [0.0, 0.1, 0.7, 1.0, 10.0, 40.0, 800.0, 5000.0] {
            let r = scaled_range(ln_t);
            assert!(r.lo <= r.hi && r.lo >= BigUint::one(), "{ln_t}");
        }
        let r = scaled_range(2.0f64.ln() * 0.5);
        assert_eq!((r.lo, r.hi), (BigUint::from(2u32), BigUint::from(2u32)));
    }

    #[test]
    fn mass_is_conserved_on_toy_layers() {
        let p = toy();
        for depth in 1..=6 {
            let total = layer_mass(&p, depth, MassMode::Normalized, 1_000_000).unwrap();
            assert!((total - 1.0).abs() < 1e-12, "depth {depth}: {total}");
        }
    }

    #[test]
    fn first_block_mass_matches_definition() {
        let p = toy();
        let w = p.admit(&Word::from_u64s(&[1, 2]).unwrap()).unwrap();
        let m = mu_assign(&w, &p, MassMode::Nominal).unwrap();
        let want = -2.0 * p.ln_beta - 2.0 * p.s * 3f64.ln();
        assert!((m.ln_mass - want).abs() < 1e-12);
    }
}
