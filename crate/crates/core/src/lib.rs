//! Discrete engine for the Čech–de Rham double complex of abelian bundles,
//! gerbes and higher gerbes with connection.
//!
//! A triangulated manifold stands in for the smooth one, vertex sets stand in
//! for open sets, and simplicial cochains stand in for differential forms. On
//! top of that sit cocycle validation, curvature and integer charges, a gauge
//! equivalence solver, and builders for the monopole on S², the charge-one
//! gerbe on S³ and the winding function on S¹.

pub mod bicomplex;
pub mod builders;
pub mod cli;
pub mod cover;
pub mod deligne;
pub mod error;
pub mod io;
mod linalg;
pub mod rng;
pub mod selfcheck;
pub mod simplicial;

pub use error::{Error, Result};
