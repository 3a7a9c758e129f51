//! Driver measures `A`, Stieltjes integration over `(s, t]`, and backward solvers for
//! measure differential equations `dg/dA = -F(t, g)`.

pub mod driver;
pub mod error;
pub mod linear;
pub mod mde;
pub mod ode;
pub mod quadrature;
pub mod trajectory;
pub mod vector;

pub use driver::{Atom, Density, DensityKind, DriverMeasure, Segment};
pub use error::{Error, Result};
pub use linear::{gronwall_bound, pseudo_exponential, solve_linear, solve_linear_scalar};
pub use mde::{solve_backward, BackwardProblem, BackwardSolution, JumpRecord, ScalarEquation};
pub use ode::OdeOptions;
pub use trajectory::{Node, StieltjesTrajectory};
pub use vector::VectorSpace;
