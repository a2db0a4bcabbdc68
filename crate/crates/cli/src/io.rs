//! Text formats used on the command line.

use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};

/// Packs bits MSB-first into hex digits; the last digit is zero-padded.
pub fn bits_to_hex(bits: &[u8]) -> String {
    bits.chunks(4)
        .map(|c| {
            let v = c
                .iter()
                .enumerate()
                .fold(0u32, |a, (i, &b)| a | ((b as u32 & 1) << (3 - i)));
            char::from_digit(v, 16).expect("nibble")
        })
        .collect()
}

pub fn hex_to_bits(hex: &str, len: usize) -> Result<Vec<u8>> {
    let hex = hex.trim();
    ensure!(
        hex.len() == len.div_ceil(4),
        "expected {} hex digits for {len} bits, got {}",
        len.div_ceil(4),
        hex.len()
    );
    let mut bits = Vec::with_capacity(hex.len() * 4);
    for c in hex.chars() {
        let v = c.to_digit(16).with_context(|| format!("bad hex digit {c:?}"))?;
        bits.extend((0..4).rev().map(|i| (v >> i & 1) as u8));
    }
    ensure!(bits[len..].iter().all(|&b| b == 0), "padding bits must be zero");
    bits.truncate(len);
    Ok(bits)
}

/// One frame of channel LLRs: whitespace- or comma-separated floats.
pub fn parse_llrs(line: &str, len: usize) -> Result<Vec<f64>> {
    let v = line
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().with_context(|| format!("bad LLR {s:?}")))
        .collect::<Result<Vec<_>>>()?;
    ensure!(v.len() == len, "expected {len} LLRs, got {}", v.len());
    Ok(v)
}

/// `start:step:stop` (inclusive), a comma list, or a single value. `inf`
/// denotes a noiseless point.
pub fn parse_ebno(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| -> Result<f64> {
        match t.trim() {
            "inf" | "+inf" => Ok(f64::INFINITY),
            t => t.parse().with_context(|| format!("bad Eb/No value {t:?}")),
        }
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, step, b] => {
            let (a, step, b) = (num(a)?, num(step)?, num(b)?);
            ensure!(step > 0.0 && step.is_finite(), "sweep step must be positive");
            ensure!(
                a.is_finite() && b.is_finite() && b >= a,
                "sweep must satisfy start <= stop"
            );
            let n = ((b - a) / step + 1e-9).floor() as usize;
            // round to the step's decimal grid so 5:0.1:6 prints cleanly
            Ok((0..=n).map(|i| ((a + i as f64 * step) * 1e9).round() / 1e9).collect())
        }
        [_] => s.split(',').map(num).collect(),
        _ => bail!("expected start:step:stop or a comma list, got {s:?}"),
    }
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
