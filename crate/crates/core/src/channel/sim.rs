//! Monte-Carlo link simulation: source, encoder, BPSK, AWGN, demapper,
//! quantizer, decoder, error counting.
//!
//! Every frame draws from its own ChaCha stream keyed by (seed, point,
//! frame), and frames are consumed in fixed-size batches, so results do not
//! depend on how many workers run them.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lfsr::LfsrSource;
use super::link::{awgn, bpsk_map, ebno_to_sigma2};
use crate::codec::{encode, systematic_encode, transform_in_place, Mode, ShortcutDecoder};
use crate::construct::{PolarCode, ShortcutTree};
use crate::error::{Error, Result};
use crate::fixedpoint::{quantize, AqProfile, LlrStats, QLlr, QWidth, DEFAULT_STEP};

/// LLR scale used for noiseless points, where `2y/sigma^2` is undefined.
const NOISELESS_LLR: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum QuantMode {
    Float,
    Uniform { width: QWidth, step: f64 },
    Aq { step: f64, profile: AqProfile },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub ebno_db: Vec<f64>,
    pub max_frames: u64,
    pub max_frame_errors: u64,
    pub seed: u64,
    pub quant: QuantMode,
    pub systematic: bool,
    /// Frames per scheduling unit; early stopping is checked between batches.
    pub batch: usize,
    pub workers: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            ebno_db: vec![],
            max_frames: 100_000,
            max_frame_errors: 100,
            seed: 1,
            quant: QuantMode::Uniform {
                width: QWidth::new(5).expect("5 is a valid width"),
                step: DEFAULT_STEP,
            },
            systematic: true,
            batch: 256,
            workers: 1,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.ebno_db.is_empty() {
            return bad("Eb/No sweep is empty");
        }
        if self.max_frames == 0 {
            return bad("max_frames must be at least 1");
        }
        if self.batch == 0 {
            return bad("batch must be at least 1");
        }
        match &self.quant {
            QuantMode::Uniform { step, .. } | QuantMode::Aq { step, .. } if step.is_nan() || *step <= 0.0 => {
                bad("quantizer step must be positive")
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointStats {
    pub ebno_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
}

/// Half-width of the normal-approximation 95% interval.
fn ci95(p: f64, n: f64) -> f64 {
    if n == 0.0 {
        0.0
    } else {
        1.96 * (p * (1.0 - p) / n).sqrt()
    }
}

impl PointStats {
    pub fn new(ebno_db: f64) -> Self {
        Self {
            ebno_db,
            frames: 0,
            bit_errors: 0,
            frame_errors: 0,
        }
    }

    pub fn ber(&self, k: usize) -> f64 {
        let n = self.frames as f64 * k as f64;
        if n == 0.0 {
            0.0
        } else {
            self.bit_errors as f64 / n
        }
    }

    pub fn fer(&self) -> f64 {
        if self.frames == 0 {
            0.0
        } else {
            self.frame_errors as f64 / self.frames as f64
        }
    }

    pub fn ber_ci(&self, k: usize) -> f64 {
        ci95(self.ber(k), self.frames as f64 * k as f64)
    }

    pub fn fer_ci(&self) -> f64 {
        ci95(self.fer(), self.frames as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    /// Bits compared per frame.
    pub payload_len: usize,
    pub points: Vec<PointStats>,
}

impl ErrorStats {
    pub const CSV_HEADER: &'static str = "ebno_db,frames,bit_errors,frame_errors,ber,fer,ber_ci,fer_ci";

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(Self::CSV_HEADER);
        s.push('\n');
        let k = self.payload_len;
        for p in &self.points {
            let _ = writeln!(
                s,
                "{},{},{},{},{:.6e},{:.6e},{:.3e},{:.3e}",
                p.ebno_db,
                p.frames,
                p.bit_errors,
                p.frame_errors,
                p.ber(k),
                p.fer(),
                p.ber_ci(k),
                p.fer_ci()
            );
        }
        s
    }
}

/// Seed of the stream for one frame. Each field gets its own slot of the
/// 256-bit ChaCha key, so distinct (seed, point, frame) never collide.
pub fn frame_rng(seed: u64, point: u64, frame: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&point.to_le_bytes());
    key[16..24].copy_from_slice(&frame.to_le_bytes());
    key[24..].copy_from_slice(b"polarsc\0");
    ChaCha8Rng::from_seed(key)
}

enum Engine {
    Float(ShortcutDecoder<f64>),
    Fixed(ShortcutDecoder<QLlr>, QWidth, f64),
}

impl Clone for Engine {
    fn clone(&self) -> Self {
        match self {
            Engine::Float(d) => Engine::Float(d.clone()),
            Engine::Fixed(d, w, s) => Engine::Fixed(d.clone(), *w, *s),
        }
    }
}

/// Per-worker state: decoder plus scratch buffers.
#[derive(Clone)]
struct Worker {
    engine: Engine,
    info: Vec<usize>,
    mode: Mode,
    d: Vec<u8>,
    y: Vec<f64>,
    q: Vec<QLlr>,
    u: Vec<u8>,
}

impl Worker {
    fn new(code: &PolarCode, tree: &ShortcutTree, cfg: &SimConfig) -> Result<Self> {
        let mode = if cfg.systematic {
            Mode::Systematic
        } else {
            Mode::NonSystematic
        };
        let engine = match &cfg.quant {
            QuantMode::Float => Engine::Float(ShortcutDecoder::new(code, tree, None, mode)?),
            QuantMode::Uniform { width, step } => {
                Engine::Fixed(ShortcutDecoder::new(code, tree, None, mode)?, *width, *step)
            }
            QuantMode::Aq { step, profile } => Engine::Fixed(
                ShortcutDecoder::new(code, tree, Some(profile), mode)
                    .map_err(|e| Error::Config(format!("AQ profile does not fit the code: {e}")))?,
                profile.root,
                *step,
            ),
        };
        Ok(Self {
            engine,
            info: code.info_positions(),
            mode,
            d: vec![0; code.payload_len()],
            y: vec![0.0; code.block_len()],
            q: Vec::with_capacity(code.block_len()),
            u: vec![0; code.block_len()],
        })
    }

    /// Runs one frame; returns the number of payload bit errors.
    fn frame(&mut self, code: &PolarCode, sigma2: f64, rng: &mut ChaCha8Rng) -> Result<u64> {
        let mut src = LfsrSource::new((rng.random::<u32>() as u64 & 0x7fff_ffff).max(1))?;
        src.fill(&mut self.d);
        let x = match self.mode {
            Mode::Systematic => systematic_encode(&self.d, code)?,
            Mode::NonSystematic => encode(&self.d, code)?,
        };
        for (y, &b) in self.y.iter_mut().zip(&x) {
            *y = bpsk_map(b);
        }
        awgn(&mut self.y, sigma2, rng);
        let scale = if sigma2 > 0.0 { 2.0 / sigma2 } else { NOISELESS_LLR };
        for y in &mut self.y {
            *y *= scale;
        }
        let x_hat = match &mut self.engine {
            Engine::Float(dec) => dec.decode_codeword(&self.y)?,
            Engine::Fixed(dec, w, step) => {
                self.q.clear();
                self.q.extend(self.y.iter().map(|&l| quantize(l, *w, *step)));
                dec.decode_codeword(&self.q)?
            }
        };
        self.u.copy_from_slice(x_hat);
        if self.mode == Mode::NonSystematic {
            transform_in_place(&mut self.u);
        }
        Ok(self.info.iter().zip(&self.d).filter(|(&i, &b)| self.u[i] != b).count() as u64)
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Runs the sweep. Each point stops after the first batch that brings the
/// frame errors to `max_frame_errors`, or at `max_frames`.
pub fn run_montecarlo(code: &PolarCode, tree: &ShortcutTree, cfg: &SimConfig) -> Result<ErrorStats> {
    run_montecarlo_with(code, tree, cfg, |_| {})
}

/// [`run_montecarlo`] with a callback after every finished point.
pub fn run_montecarlo_with(
    code: &PolarCode,
    tree: &ShortcutTree,
    cfg: &SimConfig,
    mut on_point: impl FnMut(&PointStats),
) -> Result<ErrorStats> {
    cfg.validate()?;
    let proto = Worker::new(code, tree, cfg)?;
    let pool = pool(cfg.workers)?;
    let mut out = ErrorStats {
        payload_len: code.payload_len(),
        points: Vec::with_capacity(cfg.ebno_db.len()),
    };
    for (pi, &eb) in cfg.ebno_db.iter().enumerate() {
        let sigma2 = ebno_to_sigma2(eb, code.rate())?;
        let mut st = PointStats::new(eb);
        while st.frames < cfg.max_frames && st.frame_errors < cfg.max_frame_errors.max(1) {
            let start = st.frames;
            let end = (start + cfg.batch as u64).min(cfg.max_frames);
            let errs: Vec<u64> = pool.install(|| {
                (start..end)
                    .into_par_iter()
                    .map_init(
                        || proto.clone(),
                        |w, f| w.frame(code, sigma2, &mut frame_rng(cfg.seed, pi as u64, f)),
                    )
                    .collect::<Result<Vec<u64>>>()
            })?;
            st.frames = end;
            st.bit_errors += errs.iter().sum::<u64>();
            st.frame_errors += errs.iter().filter(|&&e| e > 0).count() as u64;
        }
        on_point(&st);
        out.points.push(st);
    }
    Ok(out)
}

/// Uncoded BPSK over AWGN: `bits` hard decisions per point, drawn in frames of
/// `frame_len` from the same per-frame streams as the coded simulator.
pub fn simulate_uncoded(ebno_db: &[f64], bits: u64, frame_len: usize, seed: u64, workers: usize) -> Result<ErrorStats> {
    let pool = pool(workers)?;
    let frames = bits.div_ceil(frame_len as u64);
    let mut out = ErrorStats {
        payload_len: frame_len,
        points: Vec::new(),
    };
    for (pi, &eb) in ebno_db.iter().enumerate() {
        let sigma2 = ebno_to_sigma2(eb, 1.0)?;
        let errs: Vec<u64> = pool.install(|| {
            (0..frames)
                .into_par_iter()
                .map_init(
                    || vec![0.0f64; frame_len],
                    |y, f| {
                        let mut rng = frame_rng(seed, pi as u64, f);
                        let mut src =
                            LfsrSource::new((rng.random::<u32>() as u64 & 0x7fff_ffff).max(1)).expect("nonzero state");
                        let mut d = vec![0u8; frame_len];
                        src.fill(&mut d);
                        for (s, &b) in y.iter_mut().zip(&d) {
                            *s = bpsk_map(b);
                        }
                        awgn(y, sigma2, &mut rng);
                        y.iter().zip(&d).filter(|(&s, &b)| ((s < 0.0) as u8) != b).count() as u64
                    },
                )
                .collect()
        });
        out.points.push(PointStats {
            ebno_db: eb,
            frames,
            bit_errors: errs.iter().sum(),
            frame_errors: errs.iter().filter(|&&e| e > 0).count() as u64,
        });
    }
    Ok(out)
}

/// Gathers per-edge LLR statistics at a uniform `width` for the AQ optimizer.
#[allow(clippy::too_many_arguments)]
pub fn gather_llr_stats(
    code: &PolarCode,
    tree: &ShortcutTree,
    ebno_db: f64,
    width: QWidth,
    step: f64,
    frames: u64,
    seed: u64,
    workers: usize,
) -> Result<LlrStats> {
    let cfg = SimConfig {
        ebno_db: vec![ebno_db],
        quant: QuantMode::Uniform { width, step },
        ..SimConfig::default()
    };
    let proto = Worker::new(code, tree, &cfg)?;
    let sigma2 = ebno_to_sigma2(ebno_db, code.rate())?;
    let scale = if sigma2 > 0.0 { 2.0 / sigma2 } else { NOISELESS_LLR };
    let pool = pool(workers)?;
    let chunk = 256u64;
    let parts: Vec<LlrStats> = pool.install(|| {
        (0..frames.div_ceil(chunk))
            .into_par_iter()
            .map(|c| -> Result<LlrStats> {
                let mut w = proto.clone();
                let Engine::Fixed(dec, _, _) = &mut w.engine else {
                    unreachable!("uniform mode builds a fixed-point engine")
                };
                let mut st = LlrStats::new(code.block_len(), width);
                for f in c * chunk..((c + 1) * chunk).min(frames) {
                    let mut rng = frame_rng(seed, u64::MAX, f);
                    let mut src = LfsrSource::new((rng.random::<u32>() as u64 & 0x7fff_ffff).max(1))?;
                    src.fill(&mut w.d);
                    let x = systematic_encode(&w.d, code)?;
                    let mut y: Vec<f64> = x.iter().map(|&b| bpsk_map(b)).collect();
                    awgn(&mut y, sigma2, &mut rng);
                    let q: Vec<QLlr> = y.iter().map(|&v| quantize(v * scale, width, step)).collect();
                    dec.decode_instrumented(&q, &mut st)?;
                }
                Ok(st)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut total = LlrStats::new(code.block_len(), width);
    for p in &parts {
        total.merge(p)?;
    }
    Ok(total)
}

/// Eb/No at which statistics for [`reference_profile`] are gathered. Higher
/// points saturate most channel LLRs and mislead the entropy criterion.
pub const PROFILE_EBNO_DB: f64 = 5.5;
/// Loss budget used by [`reference_profile`].
pub const PROFILE_LOSS_BUDGET: f64 = 0.1;

/// AQ profile with the reference upper-level widths and optimizer-chosen
/// widths below them, from `frames` instrumented frames at 5 bits.
pub fn reference_profile(
    code: &PolarCode,
    tree: &ShortcutTree,
    frames: u64,
    seed: u64,
    workers: usize,
) -> Result<AqProfile> {
    let w = QWidth::new(5)?;
    let stats = gather_llr_stats(code, tree, PROFILE_EBNO_DB, w, DEFAULT_STEP, frames, seed, workers)?;
    let base = crate::fixedpoint::optimize_aq(&stats, tree, w, PROFILE_LOSS_BUDGET)?;
    AqProfile::with_reference_upper_levels(tree, &base)
}

/// One row of the channel-quantizer step sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPoint {
    pub step: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub fer: f64,
}

/// FER versus quantizer step at one operating point. All steps see the same
/// noise realizations (same seed), so differences are not sampling noise.
#[allow(clippy::too_many_arguments)]
pub fn sweep_step(
    code: &PolarCode,
    tree: &ShortcutTree,
    width: QWidth,
    steps: &[f64],
    ebno_db: f64,
    frames: u64,
    seed: u64,
    workers: usize,
) -> Result<Vec<StepPoint>> {
    steps
        .iter()
        .map(|&step| {
            let cfg = SimConfig {
                ebno_db: vec![ebno_db],
                max_frames: frames,
                max_frame_errors: u64::MAX,
                seed,
                quant: QuantMode::Uniform { width, step },
                workers,
                ..SimConfig::default()
            };
            let p = run_montecarlo(code, tree, &cfg)?.points[0];
            Ok(StepPoint {
                step,
                frames: p.frames,
                frame_errors: p.frame_errors,
                fer: p.fer(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> (PolarCode, ShortcutTree) {
        let code = PolarCode::construct(6, 40, 4.0).unwrap();
        let tree = ShortcutTree::build(&code, 32).unwrap();
        (code, tree)
    }

    #[test]
    fn noiseless_point_has_no_errors() {
        let (code, tree) = small();
        for quant in [
            QuantMode::Float,
            QuantMode::Uniform {
                width: QWidth::new(5).unwrap(),
                step: 0.5,
            },
        ] {
            for systematic in [true, false] {
                let cfg = SimConfig {
                    ebno_db: vec![f64::INFINITY],
                    max_frames: 300,
                    quant: quant.clone(),
                    systematic,
                    ..SimConfig::default()
                };
                let st = run_montecarlo(&code, &tree, &cfg).unwrap();
                assert_eq!(st.points[0].frames, 300);
                assert_eq!(st.points[0].bit_errors, 0);
            }
        }
    }

    #[test]
    fn early_stop_counts_whole_batches() {
        let (code, tree) = small();
        let cfg = SimConfig {
            ebno_db: vec![0.0],
            max_frames: 10_000,
            max_frame_errors: 5,
            batch: 64,
            ..SimConfig::default()
        };
        let p = run_montecarlo(&code, &tree, &cfg).unwrap().points[0];
        assert_eq!(p.frames % 64, 0);
        assert!(p.frame_errors >= 5 && p.frames < 10_000);
        assert!(p.fer() <= 1.0 && p.fer() >= p.ber(code.payload_len()));
    }

    #[test]
    fn config_validation() {
        let (code, tree) = small();
        assert!(run_montecarlo(&code, &tree, &SimConfig::default()).is_err());
        let cfg = SimConfig {
            ebno_db: vec![1.0],
            max_frames: 0,
            ..SimConfig::default()
        };
        assert!(matches!(run_montecarlo(&code, &tree, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = SimConfig {
            ebno_db: vec![5.0, 5.5],
            ..SimConfig::default()
        };
        let s = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<SimConfig>(&s).unwrap(), cfg);
        let partial: SimConfig = serde_json::from_str(r#"{"ebno_db":[3.0],"quant":{"kind":"float"}}"#).unwrap();
        assert_eq!(partial.quant, QuantMode::Float);
        assert_eq!(partial.max_frame_errors, 100);
    }

    #[test]
    fn stats_gathering_is_worker_independent() {
        let (code, tree) = small();
        let w = QWidth::new(5).unwrap();
        let a = gather_llr_stats(&code, &tree, 3.0, w, 0.5, 600, 7, 1).unwrap();
        let b = gather_llr_stats(&code, &tree, 3.0, w, 0.5, 600, 7, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.frames, 600);
        assert_eq!(a.root.total(), 600 * 64);
    }
}
