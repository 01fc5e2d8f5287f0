//! Position-dependent noncommutative quantum mechanics in the plane.
//!
//! A prescribed noncommutativity density `d(x, y)` is realized by a first-order
//! Lagrangian whose symplectic potential is corrected by a vector field `B`.
//! The crate solves for `B` in two gauges, builds the resulting Dirac bracket
//! on the four-dimensional phase space, checks the Jacobi identity, evaluates
//! the order-`hbar^2` correction needed by the star product, and verifies the
//! decomposition of a second-order planar model.
//!
//! Derivatives are carried exactly by truncated Taylor jets ([`jet::Jet2`]).

#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod fields;
pub mod jacobi;
pub mod jet;
pub mod lsz;
pub mod poly;
pub mod quantum;
pub mod symplectic;

pub use error::{Error, Result};
pub use fields::{
    d_from_b, d_from_profile, solve_chi_gauge, solve_gauge, solve_phi_gauge, Gauge, GaugeField, NCProfile,
};
pub use jet::{Jet2, ScalarField};
pub use symplectic::{
    build_constraints, omega0_by_inversion, omega0_closed_form, omega0_example_forms, Bivector4, BivectorField,
};
