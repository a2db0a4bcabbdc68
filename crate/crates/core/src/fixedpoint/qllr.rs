use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Bit-width of a sign-magnitude LLR, sign bit included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct QWidth(u8);

impl QWidth {
    pub const MAX_BITS: u8 = 8;

    pub fn new(bits: u8) -> Result<Self> {
        if (1..=Self::MAX_BITS).contains(&bits) {
            Ok(Self(bits))
        } else {
            Err(param(format!("width {bits} outside 1..={}", Self::MAX_BITS)))
        }
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    /// Largest representable magnitude, `2^(bits-1) - 1`.
    pub fn max_mag(self) -> u8 {
        ((1u16 << (self.0 - 1)) - 1) as u8
    }
}

impl TryFrom<u8> for QWidth {
    type Error = crate::Error;
    fn try_from(bits: u8) -> Result<Self> {
        Self::new(bits)
    }
}

impl From<QWidth> for u8 {
    fn from(w: QWidth) -> u8 {
        w.0
    }
}

impl fmt::Display for QWidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Sign-magnitude fixed-point LLR.
///
/// Zero keeps its sign bit: the sign is the hard decision, and the F
/// function propagates it as an XOR of sign bits. Values compare by
/// `sign * mag`, so `+0 == -0`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QLlr {
    neg: bool,
    mag: u8,
    width: QWidth,
}

impl QLlr {
    pub fn new(neg: bool, mag: u8, width: QWidth) -> Result<Self> {
        if mag > width.max_mag() {
            return Err(param(format!(
                "magnitude {mag} exceeds {} at width {width}",
                width.max_mag()
            )));
        }
        Ok(Self { neg, mag, width })
    }

    /// Builds from a signed integer value; `0` maps to `+0`.
    pub fn from_value(v: i32, width: QWidth) -> Result<Self> {
        let mag = u8::try_from(v.unsigned_abs()).map_err(|_| param(format!("value {v} too large")))?;
        Self::new(v < 0, mag, width)
    }

    #[inline]
    pub(crate) fn raw(neg: bool, mag: u8, width: QWidth) -> Self {
        debug_assert!(mag <= width.max_mag());
        Self { neg, mag, width }
    }

    #[inline]
    pub fn is_neg(self) -> bool {
        self.neg
    }

    #[inline]
    pub fn mag(self) -> u8 {
        self.mag
    }

    #[inline]
    pub fn width(self) -> QWidth {
        self.width
    }

    #[inline]
    pub fn value(self) -> i32 {
        if self.neg {
            -(self.mag as i32)
        } else {
            self.mag as i32
        }
    }

    /// Hard decision: the sign bit.
    #[inline]
    pub fn hard(self) -> u8 {
        self.neg as u8
    }
}

impl PartialEq for QLlr {
    fn eq(&self, other: &Self) -> bool {
        self.value() == other.value()
    }
}

impl PartialOrd for QLlr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.value().cmp(&other.value()))
    }
}

impl fmt::Display for QLlr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}@{}", if self.neg { '-' } else { '+' }, self.mag, self.width)
    }
}

/// Channel LLR of a BPSK symbol on AWGN: `2y / sigma^2`.
pub fn demap_llr(y: f64, sigma2: f64) -> Result<f64> {
    if sigma2 > 0.0 {
        Ok(2.0 * y / sigma2)
    } else {
        Err(param(format!("noise variance {sigma2} must be positive")))
    }
}

/// Uniform quantizer with rounding half away from zero and saturation.
/// Zero (and NaN) map to `+0`.
pub fn quantize(llr: f64, width: QWidth, step: f64) -> QLlr {
    debug_assert!(step > 0.0);
    let neg = llr < 0.0;
    let scaled = (llr.abs() / step).round();
    let max = width.max_mag();
    let mag = if scaled.is_nan() {
        0
    } else if scaled >= max as f64 {
        max
    } else {
        scaled as u8
    };
    QLlr::raw(neg, mag, width)
}

#[inline]
fn same_width(a: QLlr, b: QLlr) {
    assert!(
        a.width == b.width,
        "contract violation: width mismatch {} vs {}",
        a.width,
        b.width
    );
}

/// Min-sum check node: `sgn(a) sgn(b) min(|a|, |b|)`.
#[inline]
pub fn f2(a: QLlr, b: QLlr) -> QLlr {
    same_width(a, b);
    QLlr::raw(a.neg ^ b.neg, a.mag.min(b.mag), a.width)
}

/// Variable node with decision feedback: `(1 - 2z) a + b`, saturated to the
/// operand width. An exact-zero sum takes the sign of `b`.
#[inline]
pub fn g2(a: QLlr, b: QLlr, z: u8) -> QLlr {
    same_width(a, b);
    let an = a.neg ^ (z != 0);
    let max = a.width.max_mag();
    let (neg, mag) = if an == b.neg {
        (an, (a.mag as u16 + b.mag as u16).min(max as u16) as u8)
    } else {
        match a.mag.cmp(&b.mag) {
            Ordering::Greater => (an, a.mag - b.mag),
            Ordering::Less => (b.neg, b.mag - a.mag),
            Ordering::Equal => (b.neg, 0),
        }
    };
    QLlr::raw(neg, mag, a.width)
}

/// Drops `x.width - to` least significant magnitude bits.
#[inline]
pub fn requantize(x: QLlr, to: QWidth) -> QLlr {
    assert!(to <= x.width, "contract violation: cannot widen {} to {}", x.width, to);
    QLlr::raw(x.neg, x.mag >> (x.width.0 - to.0), to)
}
