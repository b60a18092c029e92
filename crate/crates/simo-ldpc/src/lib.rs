//! Protograph LDPC codes over SIMO Rayleigh fading channels: code
//! construction, a fading-aware protograph EXIT threshold analysis,
//! belief-propagation decoding, and Monte Carlo BER/FER simulation.

pub mod channel;
pub mod codes;
pub mod decoder;
pub mod error;
pub mod jfunc;
pub mod pexit;
pub mod sim;

pub use error::{Error, Result};
