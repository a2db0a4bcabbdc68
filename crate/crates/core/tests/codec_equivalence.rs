//! Shortcut decoding must agree bit-for-bit with plain SC in the same
//! arithmetic.

use polarsc::codec::{sc_decode_reference, sc_decode_shortcut, Llr, Mode};
use polarsc::construct::{PolarCode, ShortcutTree};
use polarsc::fixedpoint::{QLlr, QWidth};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn check<T: Llr>(code: &PolarCode, tree: &ShortcutTree, llrs: &[T]) {
    let a = sc_decode_shortcut(llrs, tree, None, code, Mode::NonSystematic).unwrap();
    let b = sc_decode_reference(llrs, code, Mode::NonSystematic).unwrap();
    assert_eq!(a.u_hat, b.u_hat, "v={:?} llrs={:?}", code.frozen(), llrs);
    assert!(code.frozen().iter().zip(&a.u_hat).all(|(&f, &u)| !f || u == 0));
}

fn exhaustive(n: u32, width: u8) {
    let big_n = 1usize << n;
    let w = QWidth::new(width).unwrap();
    let max = w.max_mag() as i32;
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64 * 100 + width as u64);
    for pat in 0..(1u32 << big_n) - 1 {
        let v: Vec<bool> = (0..big_n).map(|i| pat >> i & 1 == 1).collect();
        let code = PolarCode::from_frozen(v, 0.0).unwrap();
        let mut n_lim = 2;
        while n_lim <= big_n {
            let tree = ShortcutTree::build(&code, n_lim).unwrap();
            for _ in 0..200 {
                // Small ranges provoke magnitude ties, zeros and saturation.
                let span = rng.random_range(0..=max);
                let q: Vec<QLlr> = (0..big_n)
                    .map(|_| {
                        let neg = rng.random_bool(0.5);
                        QLlr::new(neg, rng.random_range(0..=span) as u8, w).unwrap()
                    })
                    .collect();
                check(&code, &tree, &q);
                let f: Vec<f64> = q
                    .iter()
                    .map(|x| if x.is_neg() { -(x.mag() as f64) } else { x.mag() as f64 })
                    .collect();
                check(&code, &tree, &f);
            }
            n_lim *= 2;
        }
    }
}

#[test]
fn exhaustive_n4() {
    for w in [1, 2, 3, 5] {
        exhaustive(2, w);
    }
}

#[test]
fn exhaustive_n8() {
    for w in [2, 5] {
        exhaustive(3, w);
    }
}

/// Per-bit SC written without the tree: each LLR is recomputed from the
/// channel, re-encoding the decided prefix where a G step needs it.
fn straight_line_sc(llr: &[f64], frozen: &[bool]) -> Vec<u8> {
    fn f(a: f64, b: f64) -> f64 {
        a.signum() * b.signum() * a.abs().min(b.abs())
    }
    fn kron(u: &[u8]) -> Vec<u8> {
        (0..u.len())
            .map(|j| (0..u.len()).filter(|&i| i & j == j).fold(0, |a, i| a ^ u[i]))
            .collect()
    }
    fn bit_llr(l: &[f64], i: usize, prefix: &[u8]) -> f64 {
        if l.len() == 1 {
            return l[0];
        }
        let h = l.len() / 2;
        if i < h {
            let lf: Vec<f64> = (0..h).map(|j| f(l[j], l[j + h])).collect();
            bit_llr(&lf, i, prefix)
        } else {
            let z = kron(&prefix[..h]);
            let lg: Vec<f64> = (0..h)
                .map(|j| if z[j] == 1 { l[j + h] - l[j] } else { l[j + h] + l[j] })
                .collect();
            bit_llr(&lg, i - h, &prefix[h..])
        }
    }
    let mut u = Vec::with_capacity(llr.len());
    for (i, &fz) in frozen.iter().enumerate() {
        let bit = if fz { 0 } else { (bit_llr(llr, i, &u) < 0.0) as u8 };
        u.push(bit);
    }
    u
}

fn gaussian_frame(rng: &mut ChaCha8Rng, n: usize, sigma: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let y: f64 = s + sigma * rng.sample::<f64, _>(rand_distr::StandardNormal);
            2.0 * y / (sigma * sigma)
        })
        .collect()
}

#[test]
fn reference_matches_straight_line_oracle_n8() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for pat in 0..255u32 {
        let v: Vec<bool> = (0..8).map(|i| pat >> i & 1 == 1).collect();
        let code = PolarCode::from_frozen(v.clone(), 0.0).unwrap();
        for _ in 0..40 {
            let l = gaussian_frame(&mut rng, 8, 1.0);
            let r = sc_decode_reference(&l, &code, Mode::NonSystematic).unwrap();
            assert_eq!(r.u_hat, straight_line_sc(&l, &v));
        }
    }
}

#[test]
fn randomized_equivalence_on_constructed_codes() {
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    let w = QWidth::new(5).unwrap();
    for (n, k, frames) in [(6, 32, 1000), (10, 854, 200)] {
        let code = PolarCode::construct(n, k, 3.0).unwrap();
        let tree = ShortcutTree::build(&code, 32).unwrap();
        for _ in 0..frames {
            let l = gaussian_frame(&mut rng, 1 << n, 0.8);
            check(&code, &tree, &l);
            let q: Vec<QLlr> = l.iter().map(|&x| polarsc::fixedpoint::quantize(x, w, 0.75)).collect();
            check(&code, &tree, &q);
        }
    }
}
