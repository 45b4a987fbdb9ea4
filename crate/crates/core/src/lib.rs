//! Optimal collision- and obstacle-avoiding trajectories for multiple
//! kinematic agents on SE(2).
//!
//! * [`algebra`]: SE(2) group law, adjoint and coadjoint actions.
//! * [`retraction`]: Cayley and exponential retractions with `dR^{-1}`.
//! * [`potentials`]: pair and obstacle potentials and their forces.
//! * [`continuous`]: reduced Euler-Poincare equations, RK4 integration.
//! * [`discrete`]: the Lie-Poisson variational integrator.
//! * [`solver`]: Newton shooting for the boundary value problem.
//! * [`scenario`]: scenario files, solution output, stored-solution checks.

pub mod algebra;
pub mod cli;
pub mod continuous;
pub mod discrete;
pub mod error;
pub mod potentials;
pub mod retraction;
pub mod scenario;
pub mod selftest;
pub mod solver;

pub use algebra::{AlgebraVec, CoAlgebraVec, Pose};
pub use error::{Error, Result};
pub use retraction::RetractionKind;
