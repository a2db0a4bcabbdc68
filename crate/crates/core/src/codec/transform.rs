use crate::error::{param, Result};

/// In-place `x = u G^{(x)n}` over GF(2) with `G = [[1,0],[1,1]]`.
pub fn transform_in_place(bits: &mut [u8]) {
    let n = bits.len();
    debug_assert!(n.is_power_of_two());
    let mut half = 1;
    while half < n {
        for block in bits.chunks_exact_mut(2 * half) {
            let (a, b) = block.split_at_mut(half);
            for (x, y) in a.iter_mut().zip(b.iter()) {
                *x ^= *y;
            }
        }
        half *= 2;
    }
}

/// Polar transform of a length-`2^n` bit vector (entries 0/1).
pub fn polar_transform(u: &[u8]) -> Result<Vec<u8>> {
    if u.is_empty() || !u.len().is_power_of_two() {
        return Err(param(format!("length {} is not a power of two", u.len())));
    }
    let mut x = u.to_vec();
    transform_in_place(&mut x);
    Ok(x)
}
