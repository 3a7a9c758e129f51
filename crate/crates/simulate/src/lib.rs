//! Monte Carlo paths for catalog models and empirical characteristic functions.

pub mod ensemble;
pub mod estimate;
pub mod euler;
pub mod exact;
mod linalg;

pub use ensemble::{path_rng, sample_path, simulate, time_grid, PathEnsemble, SimOptions};
pub use estimate::{
    compare_charfn, empirical_charfn, martingale_check, pairwise_sum, CharFnPoint, CompareReport, MartingalePoint,
    MIN_PATHS, Z_LIMIT,
};
