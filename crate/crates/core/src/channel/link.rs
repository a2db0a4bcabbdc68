use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{param, Result};

/// `0 -> +1`, `1 -> -1`.
#[inline]
pub fn bpsk_map(bit: u8) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Adds white Gaussian noise of variance `sigma2` in place.
pub fn awgn<R: Rng + ?Sized>(symbols: &mut [f64], sigma2: f64, rng: &mut R) {
    if sigma2 == 0.0 {
        return;
    }
    let sigma = sigma2.sqrt();
    for s in symbols {
        let n: f64 = rng.sample(StandardNormal);
        *s += sigma * n;
    }
}

/// Noise variance for unit-energy BPSK at the given Eb/No and code rate.
/// `+inf` dB gives a noiseless channel.
pub fn ebno_to_sigma2(ebno_db: f64, rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(param(format!("code rate {rate} outside (0, 1]")));
    }
    if ebno_db.is_nan() || ebno_db == f64::NEG_INFINITY {
        return Err(param(format!("Eb/No {ebno_db} dB is not usable")));
    }
    Ok(1.0 / (2.0 * rate * 10f64.powf(ebno_db / 10.0)))
}

/// Gaussian tail `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

/// Analytic bit error rate of uncoded BPSK on AWGN.
pub fn uncoded_ber(ebno_db: f64) -> f64 {
    q_function((2.0 * 10f64.powf(ebno_db / 10.0)).sqrt())
}
