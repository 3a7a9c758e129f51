//! Generalized measure Riccati equations: backward solver, characteristic functions,
//! semi-flow and conservativeness diagnostics.

pub mod conservative;
pub mod output;
pub mod solve;

pub use conservative::{conservativeness_check, ConservativenessReport, Verdict};
pub use output::{csv_header, jump_log_json, write_csv, JsonComplex};
pub use solve::{
    char_fn, error_estimate, semiflow_check, solve_backward, solve_backward_with, JumpLogEntry, RiccatiOptions,
    RiccatiSolution, SemiflowResiduals,
};
