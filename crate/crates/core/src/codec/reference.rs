use super::llr::Llr;
use super::{DecodeResult, Mode};
use crate::construct::PolarCode;
use crate::error::{check_len, Result};

/// Plain min-sum SC without shortcuts, recursing down to single bits.
///
/// Works in whatever arithmetic `T` provides, so the same routine serves as
/// the float reference and as the fixed-point oracle for the shortcut
/// decoder.
pub fn sc_decode_reference<T: Llr>(llrs: &[T], code: &PolarCode, mode: Mode) -> Result<DecodeResult> {
    check_len(code.block_len(), llrs.len())?;
    let mut visits = 0;
    let x_hat = descend(llrs, code.frozen(), &mut visits);
    Ok(DecodeResult::from_codeword(
        x_hat,
        code,
        mode,
        visits,
        Default::default(),
    ))
}

fn descend<T: Llr>(llrs: &[T], frozen: &[bool], visits: &mut usize) -> Vec<u8> {
    *visits += 1;
    if llrs.len() == 1 {
        return vec![if frozen[0] { 0 } else { llrs[0].hard() }];
    }
    let half = llrs.len() / 2;
    let (a, b) = llrs.split_at(half);
    let l_f: Vec<T> = a.iter().zip(b).map(|(&p, &q)| T::f(p, q)).collect();
    let z = descend(&l_f, &frozen[..half], visits);
    let l_g: Vec<T> = a.iter().zip(b).zip(&z).map(|((&p, &q), &zi)| T::g(p, q, zi)).collect();
    let x_g = descend(&l_g, &frozen[half..], visits);
    z.iter()
        .zip(&x_g)
        .map(|(&zi, &xi)| zi ^ xi)
        .chain(x_g.iter().copied())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n2_hand_example() {
        let code = PolarCode::from_frozen(vec![true, false], 0.0).unwrap();
        let r = sc_decode_reference(&[1.0, -3.0], &code, Mode::NonSystematic).unwrap();
        assert_eq!(r.u_hat, vec![0, 1]);
        assert_eq!(r.x_hat, vec![1, 1]);
        assert_eq!(r.d_hat, vec![1]);
    }

    #[test]
    fn noiseless_all_zero() {
        let code = PolarCode::construct(5, 20, 3.0).unwrap();
        let r = sc_decode_reference(&[10.0; 32], &code, Mode::Systematic).unwrap();
        assert!(r.u_hat.iter().all(|&b| b == 0));
        assert!(sc_decode_reference(&[1.0; 16], &code, Mode::Systematic).is_err());
    }
}
