//! dispshock: a numerical laboratory for traveling-wave profiles of
//! diffusive-dispersive approximations of elasticity, quantum hydrodynamics,
//! and the Peregrine-Boussinesq system.
//!
//! The traveling-wave ansatz reduces every model to the planar system
//!
//! ```text
//! u' = w,    w' = -phi(u) - gamma_f * c * w
//! ```
//!
//! a Hamiltonian flow with weak friction c. The crate builds that reduction
//! ([`models`]), integrates it with event detection ([`integrate`]), shoots
//! the heteroclinic orbit from the saddle to the spiral ([`heteroclinic`]),
//! quantifies the oscillation structure and its O(1/c) length ([`analysis`]),
//! and verifies strong convergence to the limiting shock in the moderate
//! dispersion regime delta = o(epsilon) ([`convergence`]). The [`cli`] module
//! drives it all from JSON configs with deterministic CSV outputs.

// Guards are written `!(x > 0.0)` on purpose: the negated form also rejects
// NaN, which `x <= 0.0` silently lets through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod convergence;
pub mod error;
pub mod heteroclinic;
pub mod integrate;
pub mod models;
pub mod numerics;

pub use error::{Error, Result};
