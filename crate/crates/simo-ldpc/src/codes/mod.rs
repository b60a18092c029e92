//! Protograph ensembles and code construction.
//!
//! A protograph is a small Tanner graph stored as an integer base matrix;
//! entry `b[i][j]` counts the edges between check node `i` and variable
//! node `j`, with parallel edges allowed. Lifting expands each entry into
//! distinct circulant permutations to produce the operational
//! parity-check matrix.

mod base;
mod encoder;
mod export;
mod lift;
mod peg;

pub use base::{ar3a_base, ar4ja_base, regular_base, BaseMatrix};
pub use encoder::{systematic_encoder, Encoder};
pub use export::{parity_check_from_json, parity_check_to_alist, parity_check_to_json};
pub use lift::{lift, ParityCheckMatrix};
pub use peg::{build_irregular, empirical_lambda, empirical_rho, DegreeDistribution};
