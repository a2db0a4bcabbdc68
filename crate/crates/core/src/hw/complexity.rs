/// Cycles of the fully parallel SC decoder without shortcuts: `2N - 2`.
pub fn time_complexity(n: usize) -> u64 {
    2 * n as u64 - 2
}

/// Memory bits of the unrolled, fully pipelined SC decoder at width `q`,
/// from the recursion `M_N = 2 M_{N/2} + (Q + 1/2)(N^2 - N) + NQ`,
/// `M_2 = 2Q + 1`.
pub fn memory_complexity(n: usize, q: u32) -> u64 {
    assert!(n >= 2 && n.is_power_of_two(), "N must be a power of two >= 2");
    let q = q as u64;
    if n == 2 {
        return 2 * q + 1;
    }
    let big = n as u64;
    // (Q + 1/2)(N^2 - N) is an integer since N^2 - N is even.
    2 * memory_complexity(n / 2, q as u32) + (2 * q + 1) * (big * big - big) / 2 + big * q
}

/// The commonly quoted closed form of the same recursion. It does not agree with
/// the recursion and its base case (21 instead of 11 at N = 2, Q = 5); kept
/// for reporting only.
pub fn memory_complexity_closed_form(n: usize, q: u32) -> f64 {
    let (nf, qf) = (n as f64, q as f64);
    let lg = nf.log2();
    (qf + 0.5) * ((2.0 - 2f64.powf(-lg)) * nf * nf - nf * lg - nf) + qf * nf * lg
}
