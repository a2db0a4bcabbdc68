mod io;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use polarsc::channel::{self, QuantMode, SimConfig};
use polarsc::codec::{self, Mode, ShortcutDecoder};
use polarsc::construct::{PolarCode, ResourceCensus, ShortcutTree, DEFAULT_N_LIM};
use polarsc::fixedpoint::{quantize, AqProfile, QLlr, QWidth, DEFAULT_STEP};
use polarsc::hw::{self, DelayModel};

/// Channel LLR magnitude used for `--input-format hex` (noiseless frames).
const HARD_LLR: f64 = 8.0;

#[derive(Parser, Debug)]
#[command(name = "polarsc", version, about = "Unrolled fast-SSC polar decoder toolkit")]
struct Cli {
    /// Suppress progress and tables on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    /// Machine-readable output on stdout where a command has a summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a frozen set by Gaussian-approximation density evolution.
    Construct(ConstructArgs),
    /// Encode hex payload lines into hex codeword lines.
    Encode(EncodeArgs),
    /// Decode LLR (or hard hex) lines into hex payload lines.
    Decode(DecodeArgs),
    /// Gather LLR statistics and derive an adaptive-quantization profile.
    ProfileAq(ProfileArgs),
    /// Monte-Carlo BER/FER sweep over AWGN.
    Simulate(SimulateArgs),
    /// Pipeline, buffer and cost report for the unrolled decoder.
    Hwreport(HwArgs),
    /// FER versus channel quantizer step at one Eb/No.
    SweepStep(SweepArgs),
}

#[derive(Args, Debug)]
struct CodeArgs {
    /// `.pc` frozen-set file.
    #[arg(long)]
    code: PathBuf,
    /// Largest shortcut-node length.
    #[arg(long, default_value_t = DEFAULT_N_LIM)]
    n_lim: usize,
}

impl CodeArgs {
    fn load(&self) -> Result<(PolarCode, ShortcutTree)> {
        let code =
            PolarCode::from_text(&io::read(&self.code)?).with_context(|| format!("parsing {}", self.code.display()))?;
        let tree = ShortcutTree::build(&code, self.n_lim.min(code.block_len()))?;
        Ok((code, tree))
    }
}

#[derive(Args, Debug)]
struct ConstructArgs {
    /// Block length (power of two).
    #[arg(short = 'N', long = "block-len")]
    n: usize,
    /// Payload bits.
    #[arg(short = 'K', long = "payload")]
    k: usize,
    /// Design Es/No in dB.
    #[arg(long)]
    snr: f64,
    #[arg(long, default_value_t = DEFAULT_N_LIM)]
    n_lim: usize,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct EncodeArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[arg(short, long)]
    input: PathBuf,
    /// Defaults to stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    non_systematic: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum QuantKind {
    Float,
    Uniform,
    Aq,
}

#[derive(Args, Debug)]
struct QuantArgs {
    /// Decoder arithmetic [default: uniform].
    #[arg(long, value_enum)]
    mode: Option<QuantKind>,
    /// Uniform quantizer width in bits.
    #[arg(long)]
    width: Option<u8>,
    /// Channel quantizer step (LLR units per LSB).
    #[arg(long)]
    step: Option<f64>,
    /// `.aq` profile, required for `--mode aq`.
    #[arg(long)]
    profile: Option<PathBuf>,
}

impl QuantArgs {
    fn given(&self) -> bool {
        self.mode.is_some() || self.width.is_some() || self.step.is_some() || self.profile.is_some()
    }

    fn resolve(&self, tree: &ShortcutTree) -> Result<QuantMode> {
        let step = self.step.unwrap_or(DEFAULT_STEP);
        ensure!(step > 0.0 && step.is_finite(), "--step must be positive");
        match self.mode.unwrap_or(QuantKind::Uniform) {
            QuantKind::Float => {
                ensure!(
                    self.width.is_none() && self.profile.is_none() && self.step.is_none(),
                    "--width/--step/--profile conflict with --mode float"
                );
                Ok(QuantMode::Float)
            }
            QuantKind::Uniform => {
                ensure!(self.profile.is_none(), "--profile conflicts with --mode uniform");
                Ok(QuantMode::Uniform {
                    width: QWidth::new(self.width.unwrap_or(5))?,
                    step,
                })
            }
            QuantKind::Aq => {
                ensure!(
                    self.width.is_none(),
                    "--width conflicts with --mode aq (the profile sets widths)"
                );
                let path = self.profile.as_ref().context("--mode aq requires --profile")?;
                let profile =
                    AqProfile::from_text(&io::read(path)?).with_context(|| format!("parsing {}", path.display()))?;
                profile.validate(tree)?;
                Ok(QuantMode::Aq { step, profile })
            }
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum InputFormat {
    Llr,
    Hex,
}

#[derive(Args, Debug)]
struct DecodeArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[command(flatten)]
    quant: QuantArgs,
    /// One frame per line.
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Llr)]
    input_format: InputFormat,
    /// Defaults to stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Per-frame decoder metadata (JSON).
    #[arg(long)]
    meta: Option<PathBuf>,
    #[arg(long)]
    non_systematic: bool,
}

#[derive(Args, Debug)]
struct ProfileArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long, default_value_t = channel::PROFILE_EBNO_DB)]
    ebno: f64,
    #[arg(long, default_value_t = 4000)]
    frames: u64,
    /// Largest relative entropy loss accepted per edge.
    #[arg(long, default_value_t = channel::PROFILE_LOSS_BUDGET)]
    budget: f64,
    #[arg(long, default_value_t = 5)]
    width: u8,
    #[arg(long, default_value_t = DEFAULT_STEP)]
    step: f64,
    /// Override the upper levels with the reference (1024, 854) widths.
    #[arg(long)]
    reference_upper_levels: bool,
    #[arg(long, env = "POLARSC_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// `.aq` output.
    #[arg(short, long)]
    output: PathBuf,
    /// Histogram CSV output.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[command(flatten)]
    quant: QuantArgs,
    /// `start:step:stop`, comma list or single value (dB); `inf` is noiseless.
    #[arg(long)]
    ebno: Option<String>,
    #[arg(long)]
    frames: Option<u64>,
    #[arg(long)]
    max_errors: Option<u64>,
    #[arg(long, env = "POLARSC_SEED")]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    non_systematic: bool,
    /// JSON `SimConfig`; command-line flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV output; defaults to stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(id = "clock", required = true, multiple = false, args = ["period", "period_from_depth"])]
struct HwArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Clock frequency in Hz.
    #[arg(long)]
    fclk: f64,
    /// R-RB period in delay-model units.
    #[arg(long)]
    period: Option<f64>,
    /// Fit the period so that R-RB reaches this depth.
    #[arg(long)]
    period_from_depth: Option<usize>,
    /// Measured power in W, for energy per bit.
    #[arg(long)]
    power: Option<f64>,
    #[arg(long, default_value_t = 5)]
    width: u8,
    /// AQ profile for buffer widths (default: uniform `--width`).
    #[arg(long)]
    profile: Option<PathBuf>,
    /// JSON output; defaults to stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Comma-separated steps.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.625, 0.75, 1.0])]
    steps: Vec<f64>,
    #[arg(long)]
    ebno: f64,
    #[arg(long, default_value_t = 5)]
    width: u8,
    #[arg(long, default_value_t = 20_000)]
    frames: u64,
    #[arg(long, env = "POLARSC_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

struct Ctx {
    quiet: bool,
    json: bool,
}

impl Ctx {
    fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => io::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn mode_of(non_systematic: bool) -> Mode {
    if non_systematic {
        Mode::NonSystematic
    } else {
        Mode::Systematic
    }
}

fn construct(ctx: &Ctx, a: &ConstructArgs) -> Result<()> {
    ensure!(a.n >= 2 && a.n.is_power_of_two(), "-N must be a power of two >= 2");
    let code = PolarCode::construct(a.n.trailing_zeros(), a.k, a.snr)?;
    io::write(&a.output, &code.to_text())?;
    let tree = ShortcutTree::build(&code, a.n_lim.min(a.n))?;
    let census = ResourceCensus::of(&tree);
    if ctx.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "block_len": a.n,
                "payload_len": a.k,
                "design_snr_db": a.snr,
                "tree_nodes": tree.nodes().len(),
                "census": census.total(),
            }))?
        );
    }
    ctx.note(format!(
        "({}, {}) code at {} dB -> {}",
        a.n,
        a.k,
        a.snr,
        a.output.display()
    ));
    ctx.note(census.table());
    Ok(())
}

fn encode(_ctx: &Ctx, a: &EncodeArgs) -> Result<()> {
    let (code, _) = a.code.load()?;
    let mode = mode_of(a.non_systematic);
    let mut out = String::new();
    for (ln, line) in io::read(&a.input)?.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let d = io::hex_to_bits(line, code.payload_len()).with_context(|| format!("input line {}", ln + 1))?;
        let x = match mode {
            Mode::Systematic => codec::systematic_encode(&d, &code)?,
            Mode::NonSystematic => codec::encode(&d, &code)?,
        };
        out.push_str(&io::bits_to_hex(&x));
        out.push('\n');
    }
    emit(a.output.as_deref(), &out)
}

#[derive(Serialize)]
struct FrameMeta {
    frame: usize,
    payload: String,
    node_visits: usize,
    activations: codec::Activations,
}

fn decode(ctx: &Ctx, a: &DecodeArgs) -> Result<()> {
    let (code, tree) = a.code.load()?;
    let mode = mode_of(a.non_systematic);
    let quant = a.quant.resolve(&tree)?;
    let n = code.block_len();
    let mut fdec = None;
    let mut qdec = None;
    let (width, step) = match &quant {
        QuantMode::Float => {
            fdec = Some(ShortcutDecoder::<f64>::new(&code, &tree, None, mode)?);
            (None, 0.0)
        }
        QuantMode::Uniform { width, step } => {
            qdec = Some(ShortcutDecoder::<QLlr>::new(
                &code,
                &tree,
                Some(&AqProfile::uniform(&tree, *width)),
                mode,
            )?);
            (Some(*width), *step)
        }
        QuantMode::Aq { step, profile } => {
            qdec = Some(ShortcutDecoder::<QLlr>::new(&code, &tree, Some(profile), mode)?);
            (Some(profile.root), *step)
        }
    };
    let mut out = String::new();
    let mut meta = Vec::new();
    for (ln, line) in io::read(&a.input)?.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let llrs = match a.input_format {
            InputFormat::Llr => io::parse_llrs(line, n),
            InputFormat::Hex => {
                io::hex_to_bits(line, n).map(|x| x.iter().map(|&b| if b == 0 { HARD_LLR } else { -HARD_LLR }).collect())
            }
        }
        .with_context(|| format!("input line {}", ln + 1))?;
        let r = match (&mut fdec, &mut qdec, width) {
            (Some(d), _, _) => d.decode(&llrs)?,
            (_, Some(d), Some(w)) => {
                let q: Vec<QLlr> = llrs.iter().map(|&v| quantize(v, w, step)).collect();
                d.decode(&q)?
            }
            _ => unreachable!("one decoder is built"),
        };
        let hex = io::bits_to_hex(&r.d_hat);
        out.push_str(&hex);
        out.push('\n');
        meta.push(FrameMeta {
            frame: meta.len(),
            payload: hex,
            node_visits: r.node_visits,
            activations: r.activations,
        });
    }
    emit(a.output.as_deref(), &out)?;
    if let Some(p) = &a.meta {
        io::write(p, &(serde_json::to_string_pretty(&meta)? + "\n"))?;
    }
    ctx.note(format!("decoded {} frames", meta.len()));
    Ok(())
}

fn profile_aq(ctx: &Ctx, a: &ProfileArgs) -> Result<()> {
    let (code, tree) = a.code.load()?;
    let w = QWidth::new(a.width)?;
    ensure!(a.budget >= 0.0, "--budget must be non-negative");
    let stats = channel::gather_llr_stats(&code, &tree, a.ebno, w, a.step, a.frames, a.seed, a.workers)?;
    let mut profile = polarsc::fixedpoint::optimize_aq(&stats, &tree, w, a.budget)?;
    if a.reference_upper_levels {
        ensure!(w.bits() == 5, "--reference-upper-levels needs --width 5");
        profile = AqProfile::with_reference_upper_levels(&tree, &profile)?;
    }
    io::write(&a.output, &profile.to_text())?;
    if let Some(p) = &a.stats {
        io::write(p, &stats.to_csv())?;
    }
    let avg = profile.average_width(&tree, 128.min(code.block_len()))?;
    if ctx.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "frames": stats.frames,
                "root_saturation": stats.root.saturation_rate(),
                "edges": profile.edges.len(),
                "average_width_upper": avg,
            }))?
        );
    }
    ctx.note(format!(
        "{} edges, root saturation {:.3}, mean width over M >= 128: {avg:.3}",
        profile.edges.len(),
        stats.root.saturation_rate()
    ));
    Ok(())
}

fn simulate(ctx: &Ctx, a: &SimulateArgs) -> Result<()> {
    let (code, tree) = a.code.load()?;
    let mut cfg: SimConfig = match &a.config {
        Some(p) => serde_json::from_str(&io::read(p)?).with_context(|| format!("parsing {}", p.display()))?,
        None => SimConfig::default(),
    };
    if let Some(s) = &a.ebno {
        cfg.ebno_db = io::parse_ebno(s)?;
    }
    if a.config.is_none() || a.quant.given() {
        cfg.quant = a.quant.resolve(&tree)?;
    }
    macro_rules! take {
        ($($f:ident => $g:ident),*) => { $(if let Some(v) = a.$f { cfg.$g = v; })* };
    }
    take!(frames => max_frames, max_errors => max_frame_errors, seed => seed, workers => workers, batch => batch);
    if a.non_systematic {
        cfg.systematic = false;
    }
    if cfg.ebno_db.is_empty() {
        bail!("no Eb/No points: pass --ebno or set ebno_db in --config");
    }
    let stats = channel::run_montecarlo_with(&code, &tree, &cfg, |p| {
        ctx.note(format!(
            "{:>6} dB  frames {:>8}  fe {:>6}  fer {:.3e}  ber {:.3e}",
            p.ebno_db,
            p.frames,
            p.frame_errors,
            p.fer(),
            p.ber(code.payload_len())
        ))
    })?;
    if ctx.json {
        let text = serde_json::to_string_pretty(&stats)? + "\n";
        return emit(a.output.as_deref(), &text);
    }
    emit(a.output.as_deref(), &stats.to_csv())
}

fn hwreport(ctx: &Ctx, a: &HwArgs) -> Result<()> {
    let (code, tree) = a.code.load()?;
    ensure!(a.fclk > 0.0, "--fclk must be positive");
    let q = QWidth::new(a.width)?;
    let profile = match &a.profile {
        Some(p) => Some(AqProfile::from_text(&io::read(p)?)?),
        None => None,
    };
    let delays = DelayModel::default();
    let period = match (a.period, a.period_from_depth) {
        (Some(p), None) => p,
        (None, Some(d)) => hw::calibrate_period_for_depth(&tree, &delays, d)?,
        _ => bail!("exactly one of --period and --period-from-depth is required"),
    };
    let unb = hw::unbalanced_schedule(&tree, profile.as_ref(), q)?;
    let rrb = hw::schedule_pipeline(&tree, profile.as_ref(), q, &delays, period)?;
    let census = ResourceCensus::of(&tree);
    let n = code.block_len();
    let report = hw::cost_report(&rrb, &census, n, a.fclk, a.power);
    let t = census.total();
    let sched = |s: &hw::PipelineSchedule| {
        json!({
            "depth": s.depth(),
            "llr_buffer_bits": s.llr_buffer_bits(),
            "psul_bits": s.psul_bits(),
            "register_bits": s.register_bits(),
        })
    };
    let doc = json!({
        "period": period,
        "delays": delays,
        "unbalanced": sched(&unb),
        "rrb": sched(&rrb),
        "llr_buffer_ratio": rrb.llr_buffer_bits() as f64 / unb.llr_buffer_bits().max(1) as f64,
        "census": {
            "f2": t.f2,
            "g2": t.g2,
            "f_plus_g": t.f2 + t.g2,
            "xor": t.xor,
            "r0": t.r0, "r1": t.r1, "spc": t.spc, "rep": t.rep, "branches": t.branches,
        },
        "complexity": {
            "time": hw::time_complexity(n),
            "memory": (n >= 2).then(|| hw::memory_complexity(n, a.width as u32)),
            "memory_closed_form": hw::memory_complexity_closed_form(n, a.width as u32),
        },
        "throughput_gbps": report.throughput_bps / 1e9,
        "latency_us": report.latency_s * 1e6,
        "energy_pj_per_bit": report.energy_per_bit_j.map(|e| e * 1e12),
        "report": report,
    });
    emit(a.output.as_deref(), &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    let mut s = String::new();
    let _ = writeln!(s, "period {period:.6}");
    s.push_str(&hw::buffer_table(&unb, &rrb));
    s.push_str(&census.table());
    ctx.note(s);
    Ok(())
}

fn sweep_step(ctx: &Ctx, a: &SweepArgs) -> Result<()> {
    let (code, tree) = a.code.load()?;
    let rows = channel::sweep_step(
        &code,
        &tree,
        QWidth::new(a.width)?,
        &a.steps,
        a.ebno,
        a.frames,
        a.seed,
        a.workers,
    )?;
    let text = if ctx.json {
        serde_json::to_string_pretty(&rows)? + "\n"
    } else {
        let mut s = String::from("step,frames,frame_errors,fer\n");
        for r in &rows {
            let _ = writeln!(s, "{},{},{},{:.6e}", r.step, r.frames, r.frame_errors, r.fer);
        }
        s
    };
    emit(a.output.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        quiet: cli.quiet,
        json: cli.json,
    };
    let res = match &cli.cmd {
        Command::Construct(a) => construct(&ctx, a),
        Command::Encode(a) => encode(&ctx, a),
        Command::Decode(a) => decode(&ctx, a),
        Command::ProfileAq(a) => profile_aq(&ctx, a),
        Command::Simulate(a) => simulate(&ctx, a),
        Command::Hwreport(a) => hwreport(&ctx, a),
        Command::SweepStep(a) => sweep_step(&ctx, a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
