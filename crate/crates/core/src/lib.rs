//! Exact computation with probability mass functions on the non-negative
//! integers, for studying Poisson and binomial approximation of sums of
//! negatively dependent indicators.
//!
//! The crate is organised around [`Pmf`], a truncated pmf that records the
//! mass it has dropped. On top of it sit the distributional operators
//! ([`transforms`]), stochastic orderings ([`orderings`]), the `d_{n,p}`
//! family of metrics ([`metrics`]), computable approximation bounds
//! ([`bounds`]), entropy tools ([`entropy`]) and exactly solvable
//! combinatorial models ([`models`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod dist;
pub mod entropy;
pub mod error;
pub mod metrics;
pub mod models;
pub mod numeric;
pub mod orderings;
pub mod transforms;

pub use dist::{Family, MomentSummary, Parity, Pmf, UlcDegree, DEFAULT_TAIL_EPS};
pub use error::{Error, Result};
