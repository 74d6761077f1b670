//! The transfer operator `(L_s f)(x) = sum_{a=1}^{M} (a+x)^{-2s} f(1/(a+x))`
//! discretised by barycentric interpolation at Chebyshev-Lobatto nodes.
//!
//! `L_s` maps the node values of `f` to the node values of `L_s f`, so it
//! is an `N x N` matrix. Its dominant eigenvalue, found by power
//! iteration, is `exp P_M(s)`.
//!
//! For large alphabets the branches `a > DIRECT` are not summed one by
//! one. The map `a -> (a+x)^{-2s} f(1/(a+x))` is smooth, so its sum is
//! replaced by the Euler-Maclaurin formula: an integral (done by
//! Gauss-Legendre in `log y` with `y = 1/(a+x)`), the endpoint average and
//! the first derivative correction.

use alloc::vec;
use alloc::vec::Vec;

use super::check_s;
use crate::math;
use crate::{Error, Executor, Result, Sequential};

/// Default number of collocation nodes.
pub const DEFAULT_NODES: usize = 64;
/// Default convergence threshold on successive log eigenvalue ratios.
pub const DEFAULT_PRESSURE_TOL: f64 = 1e-13;
/// Pressure shift below which node doubling stops.
const NODE_SHIFT_TOL: f64 = 1e-10;
const MAX_NODES: usize = 1024;
const MAX_ITERATIONS: usize = 10_000;
/// Branches summed one by one before switching to Euler-Maclaurin.
const DIRECT: u64 = 1024;
/// Gauss-Legendre order and panel width (in `log y`) for the tail integral.
const GL_ORDER: usize = 16;
const GL_PANEL: f64 = 0.5;

/// Chebyshev-Lobatto nodes on `[0, 1]` with barycentric weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Collocation {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Collocation {
    /// `x_j = sin^2(pi j / (2 (N-1)))`, which equals `(1 - cos(pi j/(N-1)))/2`
    /// and is exact at both ends.
    pub fn chebyshev(n: usize) -> Self {
        assert!(n >= 2, "need at least two nodes");
        let h = core::f64::consts::PI / (2.0 * (n - 1) as f64);
        let nodes = (0..n)
            .map(|j| {
                let v = libm::sin(h * j as f64);
                v * v
            })
            .collect();
        let weights = (0..n)
            .map(|j| {
                let w = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == n - 1 {
                    0.5 * w
                } else {
                    w
                }
            })
            .collect();
        Collocation { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Writes the Lagrange basis values `l_i(x)` into `out`.
    pub fn basis_at(&self, x: f64, out: &mut [f64]) {
        if let Some(k) = self.nodes.iter().position(|&t| t == x) {
            out.fill(0.0);
            out[k] = 1.0;
            return;
        }
        let mut total = 0.0;
        for (i, (&t, &w)) in self.nodes.iter().zip(&self.weights).enumerate() {
            let v = w / (x - t);
            out[i] = v;
            total += v;
        }
        for v in out.iter_mut() {
            *v /= total;
        }
    }

    /// Writes the derivatives `l_i'(x)` into `out`.
    pub fn basis_derivative_at(&self, x: f64, out: &mut [f64]) {
        let n = self.len();
        if let Some(k) = self.nodes.iter().position(|&t| t == x) {
            // Row k of the differentiation matrix.
            let mut diag = 0.0;
            for i in 0..n {
                if i != k {
                    let d = (self.weights[i] / self.weights[k]) / (x - self.nodes[i]);
                    out[i] = d;
                    diag -= d;
                }
            }
            out[k] = diag;
            return;
        }
        let (mut s0, mut s1) = (0.0, 0.0);
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            let d = x - t;
            s0 += w / d;
            s1 += w / (d * d);
        }
        for i in 0..n {
            let d = x - self.nodes[i];
            let l = (self.weights[i] / d) / s0;
            out[i] = l * (s1 / s0 - 1.0 / d);
        }
    }

    /// Barycentric interpolation of node values at `x`.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&t, &w), &f) in self.nodes.iter().zip(&self.weights).zip(values) {
            if t == x {
                return f;
            }
            let v = w / (x - t);
            num += v * f;
            den += v;
        }
        num / den
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n {
        let mut x = math::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if math::abs(dx) < 1e-16 {
                break;
            }
        }
        xs[i] = x;
        ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (xs, ws)
}

/// The discretised operator for fixed `(s, M)` as a dense matrix.
#[derive(Clone, Debug)]
pub struct TransferOperator {
    colloc: Collocation,
    s: f64,
    m: u64,
    /// Row-major, `matrix[j * N + i]` is the weight of node `i` in row `j`.
    matrix: Vec<f64>,
}

impl TransferOperator {
    pub fn new(colloc: &Collocation, s: f64, m: u64) -> Result<Self> {
        Self::new_with(&Sequential, colloc, s, m)
    }

    /// Builds the matrix, one row per job.
    pub fn new_with<E: Executor>(exec: &E, colloc: &Collocation, s: f64, m: u64) -> Result<Self> {
        check_s(s)?;
        if m == 0 {
            return Err(Error::InvalidParameter("alphabet bound M must be at least 1".into()));
        }
        let n = colloc.len();
        let gl = gauss_legendre(GL_ORDER);
        let rows = exec.map(n, |j| build_row(colloc, &gl, s, m, colloc.nodes[j]));
        Ok(TransferOperator {
            colloc: colloc.clone(),
            s,
            m,
            matrix: rows.concat(),
        })
    }

    pub fn nodes(&self) -> usize {
        self.colloc.len()
    }

    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        let n = self.nodes();
        (0..n)
            .map(|j| {
                let row = &self.matrix[j * n..(j + 1) * n];
                row.iter().zip(values).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// `ln` of the dominant eigenvalue by power iteration normalised at node 0.
    pub fn log_spectral_radius(&self, tol: f64) -> Result<(f64, usize)> {
        let mut v = vec![1.0; self.nodes()];
        let mut prev = f64::NAN;
        for it in 1..=MAX_ITERATIONS {
            let w = self.apply(&v);
            let ratio = w[0];
            if !(ratio > 0.0) || w.iter().any(|&x| !(x > 0.0)) {
                return Err(Error::Domain(alloc::format!(
                    "transfer iterate lost positivity at iteration {it} (s = {}, M = {})",
                    self.s,
                    self.m
                )));
            }
            let l = math::ln(ratio);
            v = w.iter().map(|x| x / ratio).collect();
            if math::abs(l - prev) < tol {
                return Ok((l, it));
            }
            prev = l;
        }
        Err(Error::NotConverged {
            what: "power iteration",
            iterations: MAX_ITERATIONS,
        })
    }
}

fn build_row(colloc: &Collocation, gl: &(Vec<f64>, Vec<f64>), s: f64, m: u64, x: f64) -> Vec<f64> {
    let n = colloc.len();
    let mut row = vec![0.0; n];
    let mut basis = vec![0.0; n];
    let add = |row: &mut [f64], basis: &[f64], c: f64| {
        for (r, b) in row.iter_mut().zip(basis) {
            *r += c * b;
        }
    };
    let direct_end = if m <= DIRECT + DIRECT / 16 { m } else { DIRECT };
    for a in (1..=direct_end).rev() {
        let t = a as f64 + x;
        colloc.basis_at(1.0 / t, &mut basis);
        add(&mut row, &basis, math::powf(t, -2.0 * s));
    }
    if direct_end == m {
        return row;
    }
    // sum_{a=A}^{M} h(a) with A = DIRECT + 1 and h(a) = t^{-2s} f(1/t), t = a + x.
    let ta = (DIRECT + 1) as f64 + x;
    let tm = m as f64 + x;
    // Integral in u = ln y: int e^{(2s-1)u} f(e^u) du over [ln 1/tm, ln 1/ta].
    let (u0, u1) = (-math::ln(tm), -math::ln(ta));
    let panels = math::ceil((u1 - u0) / GL_PANEL).max(1.0) as usize;
    let hw = (u1 - u0) / panels as f64;
    for p in 0..panels {
        let mid = u0 + (p as f64 + 0.5) * hw;
        for (&g, &w) in gl.0.iter().zip(&gl.1) {
            let u = mid + 0.5 * hw * g;
            let y = math::exp(u);
            colloc.basis_at(y, &mut basis);
            add(&mut row, &basis, 0.5 * hw * w * math::exp((2.0 * s - 1.0) * u));
        }
    }
    // Endpoint average and h'(M) - h'(A) correction, h'(a) = -2s t^{-2s-1} f(y) - t^{-2s-2} f'(y).
    let mut deriv = vec![0.0; n];
    for (t, sign) in [(ta, 1.0), (tm, 1.0)] {
        colloc.basis_at(1.0 / t, &mut basis);
        add(&mut row, &basis, 0.5 * sign * math::powf(t, -2.0 * s));
    }
    for (t, sign) in [(tm, 1.0), (ta, -1.0)] {
        let y = 1.0 / t;
        colloc.basis_at(y, &mut basis);
        colloc.basis_derivative_at(y, &mut deriv);
        let c0 = -2.0 * s * math::powf(t, -2.0 * s - 1.0) / 12.0 * sign;
        let c1 = -math::powf(t, -2.0 * s - 2.0) / 12.0 * sign;
        add(&mut row, &basis, c0);
        add(&mut row, &deriv, c1);
    }
    row
}

/// Node values of a function together with the operator parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorState {
    pub colloc: Collocation,
    pub values: Vec<f64>,
    pub s: f64,
    pub m: u64,
}

impl OperatorState {
    /// The constant function 1 on the default node set.
    pub fn constant(s: f64, m: u64, nodes: usize) -> Self {
        OperatorState {
            colloc: Collocation::chebyshev(nodes),
            values: vec![1.0; nodes],
            s,
            m,
        }
    }

    /// Value at `x = 0`, which is node 0.
    pub fn at_zero(&self) -> f64 {
        self.values[0]
    }
}

/// One application of `L_s` to the state's node values.
pub fn transfer_apply(state: &OperatorState) -> Result<OperatorState> {
    let op = TransferOperator::new(&state.colloc, state.s, state.m)?;
    let values = op.apply(&state.values);
    if values.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Domain("transfer operator produced a nonpositive value".into()));
    }
    Ok(OperatorState { values, ..state.clone() })
}

/// `P_M(s)` at a fixed node count; returns the pressure and the iteration count.
pub fn pressure_with_nodes<E: Executor>(exec: &E, s: f64, m: u64, nodes: usize, tol: f64) -> Result<(f64, usize)> {
    let colloc = Collocation::chebyshev(nodes);
    TransferOperator::new_with(exec, &colloc, s, m)?.log_spectral_radius(tol)
}

/// `P_M(s) = ln` of the spectral radius of `L_s`, doubling the node count
/// from [`DEFAULT_NODES`] until the value moves by less than `1e-10`.
/// Returns the pressure and the node count used.
pub fn pressure(s: f64, m: u64, tol: f64) -> Result<(f64, usize)> {
    pressure_doubling(&Sequential, s, m, tol, DEFAULT_NODES)
}

pub(crate) fn pressure_doubling<E: Executor>(exec: &E, s: f64, m: u64, tol: f64, start: usize) -> Result<(f64, usize)> {
    let mut nodes = start;
    let (mut p, _) = pressure_with_nodes(exec, s, m, nodes, tol)?;
    while nodes < MAX_NODES {
        let (q, _) = pressure_with_nodes(exec, s, m, 2 * nodes, tol)?;
        nodes *= 2;
        let shift = math::abs(q - p);
        p = q;
        if shift < NODE_SHIFT_TOL {
            return Ok((p, nodes));
        }
    }
    Err(Error::NotConverged {
        what: "collocation node doubling",
        iterations: MAX_NODES,
    })
}
