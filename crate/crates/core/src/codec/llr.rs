use crate::fixedpoint::{f2, g2, requantize, QLlr, QWidth};

/// Arithmetic the SC decoders need from an LLR representation.
///
/// The hard decision is the sign bit, including on zero. `g` must give an
/// exact-zero result the sign of its second operand; with that convention the
/// closed-form leaf decoders agree bit-for-bit with plain SC.
pub trait Llr: Copy + Send + Sync + std::fmt::Debug + 'static {
    type Mag: PartialOrd + Copy;

    fn f(a: Self, b: Self) -> Self;
    fn g(a: Self, b: Self, z: u8) -> Self;
    fn hard(self) -> u8;
    fn magnitude(self) -> Self::Mag;

    /// Narrows to `width`; a no-op for unquantized values.
    fn narrow(self, _width: QWidth) -> Self {
        self
    }

    /// Width of the value, `None` for unquantized values.
    fn qwidth(self) -> Option<QWidth> {
        None
    }
}

impl Llr for f64 {
    type Mag = f64;

    #[inline]
    fn f(a: f64, b: f64) -> f64 {
        let m = a.abs().min(b.abs());
        if a.is_sign_negative() ^ b.is_sign_negative() {
            -m
        } else {
            m
        }
    }

    #[inline]
    fn g(a: f64, b: f64, z: u8) -> f64 {
        let s = if z != 0 { b - a } else { a + b };
        if s == 0.0 {
            0.0f64.copysign(b)
        } else {
            s
        }
    }

    #[inline]
    fn hard(self) -> u8 {
        self.is_sign_negative() as u8
    }

    #[inline]
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Llr for QLlr {
    type Mag = u8;

    #[inline]
    fn f(a: QLlr, b: QLlr) -> QLlr {
        f2(a, b)
    }

    #[inline]
    fn g(a: QLlr, b: QLlr, z: u8) -> QLlr {
        g2(a, b, z)
    }

    #[inline]
    fn hard(self) -> u8 {
        QLlr::hard(self)
    }

    #[inline]
    fn magnitude(self) -> u8 {
        self.mag()
    }

    #[inline]
    fn narrow(self, width: QWidth) -> QLlr {
        if width == self.width() {
            self
        } else {
            requantize(self, width)
        }
    }

    fn qwidth(self) -> Option<QWidth> {
        Some(self.width())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_f_and_g() {
        assert_eq!(f64::f(3.0, -5.0), -3.0);
        assert_eq!(f64::f(-2.0, -7.0), 2.0);
        assert_eq!(f64::g(3.0, 5.0, 0), 8.0);
        assert_eq!(f64::g(3.0, 5.0, 1), 2.0);
        assert_eq!(f64::g(3.0, -3.0, 0).hard(), 1);
        assert_eq!(f64::g(-3.0, 3.0, 0).hard(), 0);
        assert_eq!(f64::g(-0.0, -0.0, 0).hard(), 1);
        assert_eq!(f64::f(-0.0, 4.0).hard(), 1);
    }
}
