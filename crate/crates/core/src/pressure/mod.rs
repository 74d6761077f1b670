//! Pressure functions of finite-alphabet Gauss systems and the dimension
//! numbers defined by their zeros.
//!
//! Two independent methods are provided and checked against each other:
//! exhaustive enumeration of words ([`f_n_eval`], [`s_n_root`]) and power
//! iteration of a collocated transfer operator ([`pressure`],
//! [`dimension`]).

mod dimension;
mod enumerate;
mod operator;

use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

pub use dimension::{
    check_ordering, dimension, dimension_extrapolate, dimension_with, profile_table, ordering_profile,
    Extrapolation, ProfileRow, DEFAULT_OPERATOR_TOL,
};
pub use enumerate::{
    f_n_eval, f_n_eval_with, ln_f_n, ln_lambda, ln_lambda_with, s_n_root, s_n_root_with, LnContinuants,
    DEFAULT_ENUMERATION_TOL, DEFAULT_WORD_BUDGET,
};
pub use operator::{
    pressure, pressure_with_nodes, transfer_apply, Collocation, OperatorState, TransferOperator,
    DEFAULT_NODES, DEFAULT_PRESSURE_TOL,
};

/// Upper end of the `s` domain: `3s - 1 - s^2` increases only up to `3/2`.
pub const S_MAX: f64 = 1.5;

/// The exponent functional `g(s)` multiplying `log B` in the potential.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Functional {
    /// `s`
    E1,
    /// `3s - 1`
    F1,
    /// `s^2`
    E2,
    /// `3s - 1 - s^2`
    F2,
}

impl Functional {
    pub const ALL: [Functional; 4] = [Functional::F1, Functional::E1, Functional::F2, Functional::E2];

    pub fn eval(self, s: f64) -> f64 {
        match self {
            Functional::E1 => s,
            Functional::F1 => 3.0 * s - 1.0,
            Functional::E2 => s * s,
            Functional::F2 => 3.0 * s - 1.0 - s * s,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Functional::E1 => "E1",
            Functional::F1 => "F1",
            Functional::E2 => "E2",
            Functional::F2 => "F2",
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Functional {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "E1" => Ok(Functional::E1),
            "F1" => Ok(Functional::F1),
            "E2" => Ok(Functional::E2),
            "F2" => Ok(Functional::F2),
            _ => Err(Error::InvalidParameter(alloc::format!(
                "unknown functional {s:?}; expected E1, F1, E2 or F2"
            ))),
        }
    }
}

/// `(B, g, M)`: base, exponent functional and alphabet bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialSpec {
    pub b: f64,
    pub g: Functional,
    pub m: u64,
}

impl PotentialSpec {
    pub fn new(b: f64, g: Functional, m: u64) -> Result<Self> {
        if !(b > 1.0) || !b.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!("B = {b} must be a finite value above 1")));
        }
        if m == 0 {
            return Err(Error::InvalidParameter("alphabet bound M must be at least 1".into()));
        }
        Ok(PotentialSpec { b, g, m })
    }
}

pub(crate) fn check_s(s: f64) -> Result<()> {
    if !(0.0..=S_MAX).contains(&s) {
        return Err(Error::Domain(alloc::format!("s = {s} is outside [0, 3/2]")));
    }
    Ok(())
}

/// How a dimension value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Enumeration,
    Operator,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Enumeration => "enumeration",
            Method::Operator => "operator",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A root with its certified bisection bracket and provenance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DimensionEstimate {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub method: Method,
    /// Word length for enumeration, collocation node count for the operator.
    pub n_or_nodes: usize,
    pub b: f64,
    pub g: Functional,
    pub m: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn functional_values() {
        let at_half: [f64; 4] = Functional::ALL.map(|g| g.eval(0.5));
        assert_eq!(at_half, [0.5, 0.5, 0.25, 0.25]);
        let at_one: [f64; 4] = Functional::ALL.map(|g| g.eval(1.0));
        assert_eq!(at_one, [2.0, 1.0, 1.0, 1.0]);
        assert_eq!("f2".parse::<Functional>().unwrap(), Functional::F2);
        assert!("G".parse::<Functional>().is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(PotentialSpec::new(1.0, Functional::E1, 3).is_err());
        assert!(PotentialSpec::new(2.0, Functional::E1, 0).is_err());
        assert!(PotentialSpec::new(f64::INFINITY, Functional::E1, 3).is_err());
        assert!(PotentialSpec::new(2.0, Functional::E1, 3).is_ok());
    }
}
