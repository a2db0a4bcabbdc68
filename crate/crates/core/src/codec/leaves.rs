//! Closed-form decoders for the shortcut leaves. Outputs are codeword-domain
//! bits of the constituent code.

use super::llr::Llr;

/// Threshold decisions; if the parity is odd, flips the least reliable bit.
/// Magnitude ties go to the lowest index.
pub fn wagner_decode<T: Llr>(llrs: &[T]) -> Vec<u8> {
    let mut out: Vec<u8> = llrs.iter().map(|l| l.hard()).collect();
    if parity(&out) == 1 {
        let i = argmin_by(llrs, |i| i);
        out[i] ^= 1;
    }
    out
}

/// Wagner decoding with ties broken by the lowest bit-reversed index, which
/// is the choice sequential min-sum SC makes on an SPC node.
pub fn wagner_decode_sc<T: Llr>(llrs: &[T], out: &mut [u8]) {
    for (o, l) in out.iter_mut().zip(llrs) {
        *o = l.hard();
    }
    if parity(out) == 1 {
        let bits = llrs.len().trailing_zeros();
        let i = argmin_by(llrs, |i| bit_reverse(i, bits));
        out[i] ^= 1;
    }
}

/// Repetition code: folds the halves pairwise with `g(., ., 0)` in the same
/// order SC does, then broadcasts the sign of the result.
pub fn rep_decode<T: Llr>(llrs: &[T], out: &mut [u8]) {
    let mut acc: Vec<T> = llrs.to_vec();
    let mut len = acc.len();
    while len > 1 {
        len /= 2;
        for i in 0..len {
            acc[i] = T::g(acc[i], acc[i + len], 0);
        }
    }
    out.fill(acc[0].hard());
}

pub fn r1_decode<T: Llr>(llrs: &[T], out: &mut [u8]) {
    for (o, l) in out.iter_mut().zip(llrs) {
        *o = l.hard();
    }
}

fn parity(bits: &[u8]) -> u8 {
    bits.iter().fold(0, |p, &b| p ^ b)
}

fn argmin_by<T: Llr>(llrs: &[T], rank: impl Fn(usize) -> usize) -> usize {
    let mut best = 0;
    for i in 1..llrs.len() {
        let (m, bm) = (llrs[i].magnitude(), llrs[best].magnitude());
        if m < bm || (m == bm && rank(i) < rank(best)) {
            best = i;
        }
    }
    best
}

fn bit_reverse(i: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS - bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixedpoint::{QLlr, QWidth};

    fn q(v: &[i32]) -> Vec<QLlr> {
        let w = QWidth::new(5).unwrap();
        v.iter().map(|&x| QLlr::from_value(x, w).unwrap()).collect()
    }

    #[test]
    fn wagner_examples() {
        assert_eq!(wagner_decode(&q(&[5, 5, 5, 5])), vec![0, 0, 0, 0]);
        assert_eq!(wagner_decode(&q(&[-1, 2, 2])), vec![0, 0, 0]);
        assert_eq!(wagner_decode(&q(&[1, 1, -1, -1])), vec![0, 0, 1, 1]);
        assert_eq!(wagner_decode(&q(&[1, 2, 3, -4])), vec![1, 0, 0, 1]);
        // tie: lowest index
        assert_eq!(wagner_decode(&q(&[3, 2, 2, -4])), vec![0, 1, 0, 1]);
    }

    #[test]
    fn wagner_sc_tie_uses_bit_reversed_order() {
        let mut out = [0u8; 4];
        // indices 1 and 2 tie; bit-reversed ranks are 2 and 1
        wagner_decode_sc(&q(&[3, 2, 2, -4]), &mut out);
        assert_eq!(out, [0, 0, 1, 1]);
    }

    #[test]
    fn wagner_output_has_even_parity() {
        for pat in 0..256u32 {
            let v: Vec<i32> = (0..4).map(|i| ((pat >> (2 * i)) & 3) as i32 - 2).collect();
            assert_eq!(parity(&wagner_decode(&q(&v))), 0);
        }
    }

    #[test]
    fn rep_example() {
        let mut out = [9u8; 4];
        rep_decode(&q(&[1, -2, 3, -4]), &mut out);
        assert_eq!(out, [1, 1, 1, 1]);
        rep_decode(&[0.5f64, 0.25], &mut out[..2]);
        assert_eq!(out[..2], [0, 0]);
    }
}
