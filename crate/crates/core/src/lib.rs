//! Spirality characters of the almost fiber part of an immersed surface in a
//! 3-manifold, computed from combinatorial JSJ data in exact arithmetic.
//!
//! The crate is organized bottom-up:
//!
//! - [`rational`]: exact rationals with the `p/q` text form.
//! - [`dilatation`]: partial dilatations of `Z` and their rates.
//! - [`lattice`]: slopes on JSJ tori, finite covers, frame changes and
//!   fractional Dehn twist coefficients.
//! - [`graph`]: the decorated dual graph, its spirality character and the
//!   aspirality verdict.
//! - [`flow`]: the flow-transverse product formula for pseudo graph
//!   manifolds and its bridge to [`graph`].
//! - [`generate`]: generators for the non-separable and matched-slope
//!   example families, plus seeded random instances.
//! - [`manifest`]: the JSON manifest schema.
//! - [`batch`]: data-parallel batch evaluation.

pub mod batch;
pub mod diagnostic;
pub mod dilatation;
pub mod error;
pub mod flow;
pub mod generate;
pub mod graph;
pub mod lattice;
pub mod manifest;
pub mod par;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;
