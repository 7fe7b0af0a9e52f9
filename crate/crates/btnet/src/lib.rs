//! Binary threshold networks.
//!
//! Exact evaluation of layered networks with binary weights, explicit
//! constructions that memorize arbitrary partial functions (parity and affine
//! layers, interval lookups, k-wise uniform generators over GF(2^n) and a
//! hitting-set seed search), a description-length codec, and a small lab for
//! measuring how interpolating learners overfit noisy labels.

pub mod affine;
pub mod bits;
pub mod btn_format;
pub mod circuit;
pub mod codec;
pub mod error;
pub mod exec;
pub mod field;
pub mod gadgets;
pub mod hsg;
pub mod learn;
pub mod network;
pub mod obtn;
pub mod rng;
pub mod verify;

pub use bits::Bits;
pub use error::{Error, Result};
pub use exec::Mode;
pub use network::{size_stats, Layer, Network, SizeStats};
