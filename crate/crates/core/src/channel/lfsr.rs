use crate::error::{param, Result};

/// Fibonacci LFSR over GF(2). For `x^L + x^k + ... + 1` pass `taps = [L, k, ...]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LfsrSource {
    state: u64,
    degree: u32,
    /// Feedback mask over state bits (bit `t - 1` for tap `t`).
    taps: u64,
}

impl LfsrSource {
    /// Degree-31 primitive trinomial `x^31 + x^28 + 1`.
    pub const DEFAULT_TAPS: [u32; 2] = [31, 28];

    pub fn new(seed: u64) -> Result<Self> {
        Self::with_taps(31, &Self::DEFAULT_TAPS, seed)
    }

    pub fn with_taps(degree: u32, taps: &[u32], seed: u64) -> Result<Self> {
        if !(2..=63).contains(&degree) {
            return Err(param(format!("LFSR degree {degree} outside 2..=63")));
        }
        if !taps.contains(&degree) || taps.iter().any(|&t| t == 0 || t > degree) {
            return Err(param("taps must include the degree and lie in 1..=degree"));
        }
        let mask = (1u64 << degree) - 1;
        let state = seed & mask;
        if state == 0 {
            return Err(param("LFSR state must be nonzero"));
        }
        Ok(Self {
            state,
            degree,
            taps: taps.iter().fold(0, |m, &t| m | 1 << (t - 1)),
        })
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    #[inline]
    pub fn next_bit(&mut self) -> u8 {
        let out = (self.state >> (self.degree - 1)) & 1;
        let fb = (self.state & self.taps).count_ones() as u64 & 1;
        self.state = ((self.state << 1) | fb) & ((1u64 << self.degree) - 1);
        out as u8
    }

    pub fn fill(&mut self, out: &mut [u8]) {
        for b in out {
            *b = self.next_bit();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn period(degree: u32, taps: &[u32]) -> u64 {
        let mut l = LfsrSource::with_taps(degree, taps, 1).unwrap();
        let start = l.state();
        let mut n = 0;
        loop {
            l.next_bit();
            n += 1;
            if l.state() == start {
                return n;
            }
        }
    }

    #[test]
    fn primitive_trinomials_have_full_period() {
        assert_eq!(period(5, &[5, 3]), 31);
        assert_eq!(period(7, &[7, 6]), 127);
        assert_eq!(period(15, &[15, 14]), (1 << 15) - 1);
    }

    #[test]
    fn rejects_zero_state_and_bad_taps() {
        assert!(LfsrSource::new(0).is_err());
        assert!(LfsrSource::new(1 << 31).is_err());
        assert!(LfsrSource::with_taps(5, &[3], 1).is_err());
    }

    #[test]
    fn default_source_is_balanced() {
        let mut l = LfsrSource::new(0x1234_5678).unwrap();
        let mut buf = vec![0u8; 100_000];
        l.fill(&mut buf);
        let ones: usize = buf.iter().map(|&b| b as usize).sum();
        assert!((ones as f64 / 1e5 - 0.5).abs() < 0.01);
    }
}
