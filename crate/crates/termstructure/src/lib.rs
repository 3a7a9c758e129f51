//! Bond prices under a general driver `A`, the drift condition on the loading field, and a
//! Monte Carlo martingale check, for the state `X = (A_t, ∫_0^t r ds, r_t)`.

pub mod loadings;
pub mod martingale;
pub mod model;
pub mod pricing;

pub use loadings::{discontinuous_loadings, gaussian_loadings, vasicek_loadings, Field, Kernel, Loadings};
pub use martingale::{martingale_test, DiscountedPoint, MartingaleOptions, MartingaleReport, DRIFT_TOL};
pub use model::{
    consistent_forward_curve, drift_residual, gaussian_term_structure, vasicek_term_structure, ForwardCurve,
    TermStructureModel,
};
pub use pricing::{bond_price, forward_rate, numeraire, PathView};
