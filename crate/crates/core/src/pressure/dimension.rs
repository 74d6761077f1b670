//! Roots of `h(s) = -g(s) log B + P_M(s)` and the tables built on them.

use alloc::format;
use alloc::vec::Vec;

use super::operator::{pressure_doubling, pressure_with_nodes, DEFAULT_NODES};
use super::{DimensionEstimate, Functional, Method, PotentialSpec, S_MAX};
use crate::math;
use crate::root::bisect_decreasing;
use crate::{Error, Executor, Result, Sequential};

/// Default bracket width for operator roots.
pub const DEFAULT_OPERATOR_TOL: f64 = 1e-9;
/// Power-iteration tolerance used inside root solves.
const ITERATION_TOL: f64 = 1e-13;
/// Largest alphabet tried by [`dimension_extrapolate`].
const MAX_EXTRAPOLATION_M: u64 = 1 << 40;

/// Root of `-g(s) log B + P_M(s)` on `[0, 3/2]`.
pub fn dimension(spec: &PotentialSpec, tol: f64) -> Result<DimensionEstimate> {
    dimension_with(&Sequential, spec, tol)
}

/// [`dimension`] with an executor for building the operator matrices.
///
/// Bisection runs at a fixed node count. At the root the count is doubled
/// until the pressure moves by less than `1e-10`; if it had to grow, the
/// solve is repeated at the larger count.
pub fn dimension_with<E: Executor>(exec: &E, spec: &PotentialSpec, tol: f64) -> Result<DimensionEstimate> {
    let ln_b = math::ln(spec.b);
    let mut nodes = DEFAULT_NODES;
    loop {
        let root = bisect_decreasing(
            |s| Ok(-spec.g.eval(s) * ln_b + pressure_with_nodes(exec, s, spec.m, nodes, ITERATION_TOL)?.0),
            0.0,
            S_MAX,
            tol,
        )?;
        let (_, needed) = pressure_doubling(exec, root.value, spec.m, ITERATION_TOL, nodes)?;
        if needed <= 2 * nodes {
            return Ok(DimensionEstimate {
                value: root.value,
                lo: root.lo,
                hi: root.hi,
                method: Method::Operator,
                n_or_nodes: nodes,
                b: spec.b,
                g: spec.g,
                m: spec.m,
            });
        }
        nodes = needed / 2;
    }
}

/// Dimensions for `M = 2, 4, 8, ...` until successive values differ by
/// less than `tol_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Extrapolation {
    pub estimate: DimensionEstimate,
    pub trace: Vec<DimensionEstimate>,
}

pub fn dimension_extrapolate<E: Executor>(
    exec: &E,
    b: f64,
    g: Functional,
    tol_m: f64,
    tol: f64,
) -> Result<Extrapolation> {
    if !(tol_m > 0.0) {
        return Err(Error::InvalidParameter(format!("M tolerance {tol_m} must be positive")));
    }
    let mut trace: Vec<DimensionEstimate> = Vec::new();
    let mut m = 2u64;
    while m <= MAX_EXTRAPOLATION_M {
        let est = dimension_with(exec, &PotentialSpec::new(b, g, m)?, tol)?;
        if let Some(prev) = trace.last() {
            // Brackets of consecutive roots must not be ordered the wrong way.
            if est.hi < prev.lo {
                return Err(Error::NotMonotone {
                    index: trace.len(),
                    detail: format!(
                        "dimension fell from {} at M = {} to {} at M = {}",
                        prev.value, prev.m, est.value, m
                    ),
                });
            }
            let done = math::abs(est.value - prev.value) < tol_m;
            trace.push(est);
            if done {
                return Ok(Extrapolation { estimate: est, trace });
            }
        } else {
            trace.push(est);
        }
        m *= 2;
    }
    Err(Error::NotConverged {
        what: "alphabet extrapolation",
        iterations: trace.len(),
    })
}

/// Dimensions of the four functionals at one base.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileRow {
    pub b: f64,
    pub m: u64,
    pub f1: DimensionEstimate,
    pub e1: DimensionEstimate,
    pub f2: DimensionEstimate,
    pub e2: DimensionEstimate,
}

impl ProfileRow {
    /// Values in the order `F1, E1, F2, E2` expected to be nondecreasing.
    pub fn ordered(&self) -> [DimensionEstimate; 4] {
        [self.f1, self.e1, self.f2, self.e2]
    }
}

/// Computes a profile row per base without checking the ordering.
pub fn profile_table<E: Executor>(exec: &E, b_grid: &[f64], m: u64, tol: f64) -> Result<Vec<ProfileRow>> {
    if b_grid.is_empty() {
        return Err(Error::InvalidParameter("the B grid is empty".into()));
    }
    b_grid
        .iter()
        .map(|&b| {
            let d = |g| dimension_with(exec, &PotentialSpec::new(b, g, m)?, tol);
            Ok(ProfileRow {
                b,
                m,
                f1: d(Functional::F1)?,
                e1: d(Functional::E1)?,
                f2: d(Functional::F2)?,
                e2: d(Functional::E2)?,
            })
        })
        .collect()
}

/// Checks `s(F1) <= s(E1) <= s(F2) <= s(E2)` on every row, allowing for
/// the bisection brackets.
pub fn check_ordering(rows: &[ProfileRow]) -> Result<()> {
    for row in rows {
        let v = row.ordered();
        for k in 0..3 {
            if v[k].lo > v[k + 1].hi {
                return Err(Error::Ordering(format!(
                    "at B = {}: s({}) = {} exceeds s({}) = {}",
                    row.b, v[k].g, v[k].value, v[k + 1].g, v[k + 1].value
                )));
            }
        }
    }
    Ok(())
}

/// [`profile_table`] followed by [`check_ordering`].
pub fn ordering_profile<E: Executor>(exec: &E, b_grid: &[f64], m: u64, tol: f64) -> Result<Vec<ProfileRow>> {
    let rows = profile_table(exec, b_grid, m, tol)?;
    check_ordering(&rows)?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_letter_dimension_matches_closed_form() {
        // -(3s - 1 - s^2) ln B + 2 s ln gamma = 0.
        let gamma = (5f64.sqrt() - 1.0) / 2.0;
        for b in [2.0, 10.0] {
            let spec = PotentialSpec::new(b, Functional::F2, 1).unwrap();
            let d = dimension(&spec, 1e-11).unwrap();
            let (lb, lg) = (b.ln(), gamma.ln());
            // s^2 lb + s (2 lg - 3 lb) + lb = 0, smaller root.
            let (qa, qb, qc) = (lb, 2.0 * lg - 3.0 * lb, lb);
            let want = (-qb - (qb * qb - 4.0 * qa * qc).sqrt()) / (2.0 * qa);
            assert!((d.value - want).abs() < 1e-9, "{} vs {want}", d.value);
            assert!(d.lo <= want + 1e-12 && want <= d.hi + 1e-12);
        }
    }

    #[test]
    fn ordering_check_flags_violations() {
        let spec = PotentialSpec::new(2.0, Functional::F1, 8).unwrap();
        let est = |v: f64, g| DimensionEstimate { value: v, lo: v, hi: v, g, ..dimension(&spec, 1e-3).unwrap() };
        let row = ProfileRow {
            b: 2.0,
            m: 8,
            f1: est(0.6, Functional::F1),
            e1: est(0.5, Functional::E1),
            f2: est(0.7, Functional::F2),
            e2: est(0.8, Functional::E2),
        };
        assert!(matches!(check_ordering(&[row]), Err(Error::Ordering(_))));
        assert!(profile_table(&Sequential, &[], 8, 1e-6).is_err());
    }
}
