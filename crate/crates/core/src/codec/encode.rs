use serde::{Deserialize, Serialize};

use super::transform::transform_in_place;
use crate::construct::PolarCode;
use crate::error::{check_len, Result};

/// How the payload is carried by the codeword.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Payload occupies the information positions of `u`.
    NonSystematic,
    /// Payload appears verbatim at the information positions of `x`.
    #[default]
    Systematic,
}

/// `x = u G` with `u_A = d` and frozen bits zero.
pub fn encode(d: &[u8], code: &PolarCode) -> Result<Vec<u8>> {
    check_len(code.payload_len(), d.len())?;
    let mut u = vec![0u8; code.block_len()];
    for (pos, &bit) in code.info_positions().iter().zip(d) {
        u[*pos] = bit & 1;
    }
    transform_in_place(&mut u);
    Ok(u)
}

/// Systematic encoding by the two-transform method: place `d` on `A`,
/// transform, clear the frozen positions, transform again.
///
/// The method requires the information set to be closed under binary
/// domination, which density-evolution constructions satisfy. For any other
/// set the encoder falls back to back-substitution on the triangular `G_AA`.
pub fn systematic_encode(d: &[u8], code: &PolarCode) -> Result<Vec<u8>> {
    check_len(code.payload_len(), d.len())?;
    let info = code.info_positions();
    let mut x = vec![0u8; code.block_len()];
    for (pos, &bit) in info.iter().zip(d) {
        x[*pos] = bit & 1;
    }
    transform_in_place(&mut x);
    for (i, b) in x.iter_mut().enumerate() {
        if code.is_frozen(i) {
            *b = 0;
        }
    }
    transform_in_place(&mut x);
    if info.iter().zip(d).all(|(&p, &b)| x[p] == b & 1) {
        return Ok(x);
    }
    Ok(systematic_by_substitution(d, code, &info))
}

/// Solves `(u_A G_AA) = d` from the highest index down. `G` is lower
/// triangular with `G[i][j] = 1` iff `j` is a bit-subset of `i`.
fn systematic_by_substitution(d: &[u8], code: &PolarCode, info: &[usize]) -> Vec<u8> {
    let mut u = vec![0u8; code.block_len()];
    for (idx, &j) in info.iter().enumerate().rev() {
        let mut acc = d[idx] & 1;
        for &i in &info[idx + 1..] {
            if j & !i == 0 {
                acc ^= u[i];
            }
        }
        u[j] = acc;
    }
    transform_in_place(&mut u);
    u
}

/// Recovers the payload from a decoded `u`.
pub fn extract_payload(u_hat: &[u8], code: &PolarCode, mode: Mode) -> Result<Vec<u8>> {
    check_len(code.block_len(), u_hat.len())?;
    let info = code.info_positions();
    Ok(match mode {
        Mode::NonSystematic => info.iter().map(|&i| u_hat[i]).collect(),
        Mode::Systematic => {
            let mut x = u_hat.to_vec();
            transform_in_place(&mut x);
            info.iter().map(|&i| x[i]).collect()
        }
    })
}
