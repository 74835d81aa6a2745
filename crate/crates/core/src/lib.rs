//! Exact relaxation of boundary conditions for coercive, possibly
//! non-convex, Hamilton-Jacobi equations on the half-line `(0, +inf)`.
//!
//! Boundary functions are non-increasing piecewise-linear functions of the
//! gradient; the outward normal is `-1`, so semi-coercivity means blow-up
//! as `p -> -inf`. The relaxed boundary function is computed three ways
//! (sup/inf relaxation, limiter points, Godunov semi-fluxes) in exact
//! rational arithmetic, and [`solver`] runs a monotone finite-difference
//! scheme on top of the results.

pub mod cli;
pub mod error;
pub mod godunov;
pub mod guerand;
pub mod pl;
pub mod relaxation;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use pl::PLFunction;
pub use scalar::{ExtendedInterval, ExtendedRational, Rational};
