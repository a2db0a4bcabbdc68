//! Polar codes with shortcut successive-cancellation decoding, adaptive
//! fixed-point quantization, and an unrolled-hardware cost model.

pub mod channel;
pub mod codec;
pub mod construct;
mod error;
pub mod fixedpoint;
pub mod hw;

pub use error::{Error, Result};
