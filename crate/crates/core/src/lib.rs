//! Numerical laboratory for the planar N-center problem.
//!
//! A test particle moves in the plane under N fixed attracting centers. The
//! crate finds T-periodic, collision-free minimizers of the Lagrangian
//! action within a prescribed free homotopy class of the punctured plane,
//! and ships the surrounding analytical toolkit as independently testable
//! operations: collision asymptotics, blow-up rescaling, Levi-Civita
//! regularization, and Maupertuis/obstacle Kepler problems.
//!
//! Modules:
//! - [`model`]: potential, Lagrangian, discrete action and gradient, energy
//!   and equation-of-motion residuals; core data types.
//! - [`topology`]: winding vectors, free-group words, self-intersections,
//!   innermost sub-loops, admissibility, taut reduction.
//! - [`minimize`]: direct-method action minimization in a fixed class with
//!   collision monitoring and terminal classification.
//! - [`kepler`]: the one-center problem — parabolic ejections, λ-rescaling,
//!   Maupertuis functional, obstacle minimization, angular sweeps, and the
//!   fixed-end comparison.
//! - [`regularize`]: Levi-Civita regularization, collision-reflection
//!   detection, and the collision-asymptotics verification suite.

pub mod geom;
pub mod kepler;
pub mod minimize;
pub mod model;
pub mod numeric;
pub mod ode;
pub mod regularize;
pub mod topology;
