//! Harmonic analysis on two-step nilpotent Lie groups.
//!
//! The group law in exponential coordinates, almost-symplectic frames of the
//! skew forms `B_λ`, the Schrödinger-type representations `π_λ` on sampled
//! functions, left-invariant fields and the sublaplacian, scaled special
//! Hermite eigenfunctions and the chains built from them, and the embedding of
//! an arbitrary two-step algebra into one with square-integrable
//! representations.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod eigenchain;
pub mod error;
pub mod hermite;
pub mod invariant_ops;
pub mod mw_embedding;
pub mod nilgroup;
pub mod quadrature;
pub mod sampling;
pub mod schrodinger_rep;
pub mod symplectic;

pub use error::{NilError, Result};
pub use hermite::{DilationVector, MultiIndex};
pub use nilgroup::{GroupElement, TwoStepAlgebra};
pub use quadrature::{QuadratureSpec, Scheme};
pub use symplectic::{CentralFunctional, SymplecticFrame};
