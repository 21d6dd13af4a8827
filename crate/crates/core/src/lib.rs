//! Numerical laboratory for self-expanders of mean curvature flow.
//!
//! The crate is organised by role: shared kernels in [`numerics`], radial
//! expander profiles in [`expander_ode`], two-dimensional Dirichlet problems
//! in [`graph_solver`], evolution problems in [`flow_sim`], the stability
//! functional in [`spectral`] and cone densities in [`density`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod error;
pub mod expander_ode;
pub mod export;
pub mod flow_sim;
pub mod graph_solver;
pub mod numerics;
pub mod par;
pub mod spectral;

pub use error::{Error, Result};
