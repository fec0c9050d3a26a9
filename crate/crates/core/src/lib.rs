//! Sine-pseudospectral solvers for the spherically symmetric
//! Schrödinger–Poisson–Slater system.
//!
//! The radial problem is rewritten in `U = 2 sqrt(pi) r psi` and
//! `V = 4 pi r V_P`, which turns the radial Laplacian into a plain second
//! derivative with homogeneous Dirichlet data at `r = 0`. Ground states come
//! from a backward-Euler normalized gradient flow ([`ground_state`]); dynamics
//! from Strang splitting ([`dynamics`]). [`befd`] is an independent
//! finite-difference reference on the untransformed equations.

pub mod befd;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod ground_state;
pub mod model;
pub mod poisson;
pub mod study;

pub use error::{Result, SpsError};
pub use grid::{RadialField, RadialGrid, SineSpectrum};
pub use model::{ExternalPotential, ObservableSet, PhysicsParams};
