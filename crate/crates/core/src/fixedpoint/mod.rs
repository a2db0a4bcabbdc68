//! Sign-magnitude fixed-point LLRs, min-sum kernels and adaptive
//! quantization.

mod aq;
mod qllr;
mod stats;

pub use aq::{edge_at_path, entropy_loss, optimize_aq, AqProfile, REFERENCE_1024_WIDTHS};
pub use qllr::{demap_llr, f2, g2, quantize, requantize, QLlr, QWidth};
pub use stats::{EdgeKey, Histogram, LlrStats};

use crate::codec::ShortcutDecoder;

/// Default channel quantizer step at 5 bits, from a FER sweep on the
/// (1024, 854) code near FER 1e-2.
pub const DEFAULT_STEP: f64 = 0.75;

/// Runs the instrumented decoder over `frames` and gathers per-edge
/// magnitude histograms at the decoder's (uniform) input width.
pub fn collect_stats<'a>(
    decoder: &mut ShortcutDecoder<QLlr>,
    width: QWidth,
    frames: impl IntoIterator<Item = &'a [QLlr]>,
) -> crate::Result<LlrStats> {
    let mut stats = LlrStats::new(decoder.block_len(), width);
    for frame in frames {
        decoder.decode_instrumented(frame, &mut stats)?;
    }
    Ok(stats)
}
