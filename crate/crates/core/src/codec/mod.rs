//! Polar transform, encoders, and the SC decoders.

mod encode;
mod leaves;
mod llr;
mod reference;
mod shortcut;
mod transform;

pub use encode::{encode, extract_payload, systematic_encode, Mode};
pub use leaves::{rep_decode, wagner_decode, wagner_decode_sc};
pub use llr::Llr;
pub use reference::sc_decode_reference;
pub use shortcut::{sc_decode_shortcut, ShortcutDecoder};
pub use transform::{polar_transform, transform_in_place};

use serde::{Deserialize, Serialize};

use crate::construct::PolarCode;

/// Leaf decoder activations per shortcut kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Activations {
    pub r0: usize,
    pub r1: usize,
    pub spc: usize,
    pub rep: usize,
}

impl Activations {
    pub fn total(&self) -> usize {
        self.r0 + self.r1 + self.spc + self.rep
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeResult {
    /// Estimated transform-domain bits.
    pub u_hat: Vec<u8>,
    /// Estimated codeword, `u_hat G`.
    pub x_hat: Vec<u8>,
    /// Estimated payload.
    pub d_hat: Vec<u8>,
    pub node_visits: usize,
    pub activations: Activations,
}

impl DecodeResult {
    pub(crate) fn from_codeword(
        x_hat: Vec<u8>,
        code: &PolarCode,
        mode: Mode,
        node_visits: usize,
        activations: Activations,
    ) -> Self {
        let mut u_hat = x_hat.clone();
        transform_in_place(&mut u_hat);
        let src = match mode {
            Mode::NonSystematic => &u_hat,
            Mode::Systematic => &x_hat,
        };
        let d_hat = code.info_positions().iter().map(|&i| src[i]).collect();
        Self {
            u_hat,
            x_hat,
            d_hat,
            node_visits,
            activations,
        }
    }
}
