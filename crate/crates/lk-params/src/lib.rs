//! Affine parameter sets on `D = R_{>=0}^m × R^n`: Lévy–Khintchine functionals `F`, `R`,
//! jump transforms `γ` at atoms of the driver, and admissibility checks.

pub mod admissible;
pub mod jumps;
pub mod params;
pub mod shape;
pub mod timefn;

pub use params::{levy_khintchine_exponent, AffineParameterSet, AtomJump, EnhancedJump, GammaFn, GammaSpec, Outcome, TableJump};
pub use admissible::{check_admissible, growth_constant, AdmissibilityReport, Finding, Status};
pub use jumps::{JumpComponent, JumpMeasureSpec, NumericDensity};
pub use shape::StateSpaceShape;
pub use timefn::TimeFn;
