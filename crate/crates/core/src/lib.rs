//! Unipotent orbit averages on the space of affine lattices.
//!
//! The space `X = Γ\G` with `G = SL(2,R) ⋉ R²` and `Γ = SL(2,Z) ⋉ Z²`
//! parametrizes translates of unimodular lattices in the plane. This crate
//! computes orbit averages of explicit test functions along the flow `U^t`,
//! the Diophantine majorants that control their rate of equidistribution,
//! the exponential sums that drive the estimates, and the approximation of
//! long horocycle pieces by closed ones.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`group`] | group law, flows, Iwasawa coordinates, canonical points |
//! | [`lattice`] | Gauss reduction, shortest vectors, heights, box enumeration |
//! | [`diophantine`] | continued fractions and majorant functions |
//! | [`arith`] | sieves, Kloosterman and Ramanujan sums, twisted sums |
//! | [`quadrature`] | Gauss–Legendre panels with error estimates |
//! | [`testfn`] | single-mode Poincaré series test functions |
//! | [`orbit`] | closed-lift, mollified and general orbit averages |
//! | [`closed_approx`] | closed-horocycle approximation and interval plans |

pub mod arith;
pub mod closed_approx;
pub mod diophantine;
pub mod error;
pub mod group;
pub mod lattice;
pub mod orbit;
pub mod quadrature;
pub mod testfn;

pub use error::{Error, Result};
