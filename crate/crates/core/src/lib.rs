//! Quasi-Monte Carlo integration in weighted subspaces of the Wiener algebra.
//!
//! The crate provides exact-rational Korobov p-sets and rank-1 lattices,
//! exponential sums with phases reduced in integer arithmetic, worst-case
//! errors over finite frequency sets, a randomized lattice rule, a
//! Hoeffding-style random point-set search, lower-bound certificates for
//! the unweighted and `r0` spaces, and point-count calculators.

pub mod bounds;
pub mod error;
pub mod fooling;
pub mod frequency;
pub mod hoeffding;
pub mod pointsets;
pub mod primes;
pub mod quadrature;
pub mod randomized;
pub mod rng;
pub mod testfn;
pub mod verify;

pub use num_complex::Complex64;
pub use error::{Error, Result};
pub use frequency::{FrequencyVector, WeightFunction};
pub use pointsets::{GeneratingVector, PointSet, RationalNode};
pub use quadrature::QuadratureRule;
pub use testfn::FourierPolynomial;
