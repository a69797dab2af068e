//! Morse index and nullity of bipolar surfaces to Otsuki tori.
//!
//! The surfaces are built from closed geodesics of an auxiliary metric on
//! the sphere ([`geodesic`]). Their Jacobi operator separates into 2×2
//! periodic Sturm-Liouville systems ([`geometry`]), which are counted both by
//! direct discretization ([`spectral`]) and by a boundary-form argument over
//! roots of unity ([`edwards`]). [`pipeline`] assembles the counts and [`verify`] runs the invariant
//! suite for one family.

// `!(x > 0.0)` style tests are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod cli;
pub mod edwards;
pub mod error;
pub mod geodesic;
pub mod geometry;
pub(crate) mod json17;
pub mod ode;
pub mod quadrature;
pub mod roots;
pub mod pipeline;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
