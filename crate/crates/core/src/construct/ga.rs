//! Gaussian-approximation density evolution.
//!
//! Each synthetic channel is summarized by the mean of its (consistent,
//! symmetric Gaussian) LLR. The check-node update goes through Chung's
//! `phi` function, evaluated in the log domain so that means in the
//! thousands do not underflow.

use std::cmp::Ordering;

/// Below this the fitted piece exceeds `phi = 1`; bridge linearly to the origin.
const SMALL_X: f64 = 0.05;

fn chung_low(x: f64) -> f64 {
    -0.4527 * x.powf(0.86) + 0.0218
}

/// `ln phi(x)` with Chung's two-piece approximation.
pub(crate) fn ln_phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < SMALL_X {
        chung_low(SMALL_X) * x / SMALL_X
    } else if x < 10.0 {
        chung_low(x)
    } else {
        0.5 * (std::f64::consts::PI / x).ln() - x / 4.0 + (1.0 - 10.0 / (7.0 * x)).ln()
    }
}

/// Mean of the check-node (F-side) output for two inputs of mean `m`.
pub(crate) fn check_mean(m: f64) -> f64 {
    if m <= 0.0 {
        return 0.0;
    }
    let lp = ln_phi(m);
    // 1 - (1 - phi)^2 = phi * (2 - phi)
    let target = lp + (2.0 - lp.exp().min(1.0)).ln();
    if target >= 0.0 {
        return 0.0;
    }
    // ln_phi is decreasing; the solution lies in (0, m].
    let (mut lo, mut hi) = (0.0, m);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ln_phi(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi.max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Mean LLR of each synthetic channel in natural index order, for a code of
/// length `2^n` over BPSK/AWGN at the given Es/No (dB).
pub fn channel_means(n: u32, es_no_db: f64) -> Vec<f64> {
    let es_no = 10f64.powf(es_no_db / 10.0);
    // LLR = 2y/sigma^2 with sigma^2 = 1/(2 Es/No): mean 4 Es/No.
    let m0 = 4.0 * es_no;
    let mut out = vec![0.0; 1 << n];
    fill(m0, &mut out);
    out
}

fn fill(m: f64, out: &mut [f64]) {
    if out.len() == 1 {
        out[0] = m;
        return;
    }
    let (first, second) = out.split_at_mut(out.len() / 2);
    fill(check_mean(m), first);
    fill(2.0 * m, second);
}

/// Indices sorted from least to most reliable; equal means order the lower
/// index first so it is frozen first.
pub fn reliability_order(n: u32, es_no_db: f64) -> Vec<usize> {
    let means = channel_means(n, es_no_db);
    let mut idx: Vec<usize> = (0..means.len()).collect();
    idx.sort_by(|&a, &b| {
        means[a]
            .partial_cmp(&means[b])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_mean_is_degrading() {
        for m in [0.01, 0.5, 1.0, 5.0, 9.9, 10.1, 50.0, 1e3, 1e4] {
            let c = check_mean(m);
            assert!(c > 0.0 && c < m, "m={m} c={c}");
        }
    }

    #[test]
    fn check_mean_large_argument_is_linear() {
        // For large means the check node loses roughly ln 4 * 4 of mean.
        let d = 1e4 - check_mean(1e4);
        assert!(d > 0.0 && d < 10.0, "d={d}");
    }

    #[test]
    fn ln_phi_decreasing_within_pieces() {
        let mut prev = ln_phi(1e-6);
        for i in 1..1000 {
            let x = i as f64 * 0.0099;
            let v = ln_phi(x);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn means_polarize() {
        let m = channel_means(3, 2.0);
        assert!(m[0] < m[7]);
        assert_eq!(m[7], 8.0 * m0(2.0));
        let order = reliability_order(3, 2.0);
        assert_eq!(order[0], 0);
        assert_eq!(order[7], 7);
    }

    fn m0(db: f64) -> f64 {
        4.0 * 10f64.powf(db / 10.0)
    }
}
