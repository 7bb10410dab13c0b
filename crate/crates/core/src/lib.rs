//! Exact-arithmetic machinery for the degree-2 ("cycle") Poisson LDPC ensemble.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! * [`series`]: truncated formal power series over exact rationals,
//! * [`combinatorics`]: factorials, binomials, a Stirling-type approximation and
//!   a partition-count oracle,
//! * [`table`]: the stopping-set coefficient table `A(v,t,s)` with its
//!   recurrence, boundary layer and brute-force constellation oracle,
//! * [`poly`] and [`pde`]: exact multivariate polynomials, the second-order PDE
//!   attached to the table and its hyperbolic/parabolic/elliptic regions,
//! * [`errprob`]: block-error series, Hadamard products and root-test analysis,
//! * [`sim`]: a seeded peeling-decoder Monte Carlo and an exhaustive oracle.
//!
//! IO, file formats, parallel drivers and the command line live in the
//! companion `cpldpc` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod combinatorics;
pub mod errprob;
mod error;
pub mod pde;
pub mod poly;
pub mod rational;
pub mod series;
pub mod sim;
pub mod table;

pub use error::{Error, Result};
pub use rational::Rational;
pub use series::Series;
pub use table::{BaseConfig, CoeffTable, EnsembleParams};
