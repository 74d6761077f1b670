//! Computational engine for the metric theory of continued fractions.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised bottom-up:
//!
//! * [`cf`] is the exact layer: expansions, continuants, cylinder intervals,
//!   the Gauss map and exact tail measures, all in arbitrary precision.
//! * [`measure`] computes exact and certified Lebesgue measures of sets cut
//!   out by products of consecutive partial quotients, plus the closed-form
//!   bound and series evaluators used by the zero-one law.
//! * [`pressure`] evaluates finite-alphabet pressure functions, both by
//!   exhaustive word enumeration and by iterating a discretised transfer
//!   operator, and solves the dimension equations built on them.
//! * [`cantor`] materialises the Cantor subset used for dimension lower
//!   bounds: its parameter schedule, admissible words, fundamental
//!   intervals, gaps and mass distribution.
//! * [`mc`] samples uniform reals, extracts partial quotients and detects
//!   the limsup events of the zero-one law.
//!
//! Work that can be split across threads goes through the [`Executor`]
//! trait. The [`Sequential`] executor is provided here; a thread-pool
//! backed one lives in the `cfmetric` companion crate. Every reduction is
//! performed in a fixed order, so results never depend on the executor.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cantor;
pub mod cf;
pub mod enclosure;
mod error;
mod exec;
pub mod math;
pub mod mc;
pub mod measure;
pub mod phi;
pub mod pressure;
pub mod root;

pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
