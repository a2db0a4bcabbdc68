use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ga;
use crate::error::{param, Error, Result};

/// A polar code: block length `N = 2^n`, payload `K` and the frozen-indicator
/// vector (natural order, `true` = frozen).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarCode {
    n: u32,
    k: usize,
    frozen: Vec<bool>,
    design_snr_db: f64,
}

impl PolarCode {
    /// Wraps an explicit frozen vector. `design_snr_db` is carried as metadata.
    pub fn from_frozen(frozen: Vec<bool>, design_snr_db: f64) -> Result<Self> {
        let len = frozen.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(param(format!("block length {len} is not a power of two >= 2")));
        }
        let k = frozen.iter().filter(|&&f| !f).count();
        if k == 0 {
            return Err(param("code has no information positions"));
        }
        Ok(Self {
            n: len.trailing_zeros(),
            k,
            frozen,
            design_snr_db,
        })
    }

    /// Builds the code by Gaussian-approximation density evolution at the
    /// given Es/No, freezing the `N - K` least reliable synthetic channels.
    pub fn construct(n: u32, k: usize, design_snr_db: f64) -> Result<Self> {
        if n == 0 || n > 24 {
            return Err(param(format!("exponent n={n} out of range 1..=24")));
        }
        let len = 1usize << n;
        if k == 0 || k > len {
            return Err(param(format!("payload K={k} out of range 1..={len}")));
        }
        if !design_snr_db.is_finite() {
            return Err(param("design SNR must be finite"));
        }
        let order = ga::reliability_order(n, design_snr_db);
        let mut frozen = vec![false; len];
        for &i in &order[..len - k] {
            frozen[i] = true;
        }
        Ok(Self {
            n,
            k,
            frozen,
            design_snr_db,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn block_len(&self) -> usize {
        1 << self.n
    }

    pub fn payload_len(&self) -> usize {
        self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.block_len() as f64
    }

    pub fn design_snr_db(&self) -> f64 {
        self.design_snr_db
    }

    pub fn frozen(&self) -> &[bool] {
        &self.frozen
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    /// Information set `A`, ascending.
    pub fn info_positions(&self) -> Vec<usize> {
        (0..self.block_len()).filter(|&i| !self.frozen[i]).collect()
    }

    /// Serializes to the `.pc` text format: a `N K design_snr_db` header line
    /// followed by one line of `N` characters (`1` = frozen).
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.block_len() + 32);
        let _ = writeln!(s, "{} {} {}", self.block_len(), self.k, self.design_snr_db);
        s.extend(self.frozen.iter().map(|&f| if f { '1' } else { '0' }));
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let perr = |line: usize, msg: String| Error::Parse { line: line + 1, msg };
        if fields.len() != 3 {
            return Err(perr(hl, format!("expected `N K snr`, got {header:?}")));
        }
        let len: usize = fields[0].parse().map_err(|e| perr(hl, format!("N: {e}")))?;
        let k: usize = fields[1].parse().map_err(|e| perr(hl, format!("K: {e}")))?;
        let snr: f64 = fields[2].parse().map_err(|e| perr(hl, format!("snr: {e}")))?;
        let (bl, body) = lines.next().ok_or(Error::Parse {
            line: hl + 2,
            msg: "missing frozen vector".into(),
        })?;
        let body = body.trim();
        let frozen = body
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(perr(bl, format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        if frozen.len() != len {
            return Err(perr(bl, format!("expected {len} indicators, found {}", frozen.len())));
        }
        let code = Self::from_frozen(frozen, snr)?;
        if code.k != k {
            return Err(perr(hl, format!("header K={k} but vector has {} info bits", code.k)));
        }
        Ok(code)
    }
}
