use std::sync::Arc;

use super::leaves::{r1_decode, rep_decode, wagner_decode_sc};
use super::llr::Llr;
use super::{Activations, DecodeResult, Mode};
use crate::construct::{NodeKind, PolarCode, ShortcutTree, Side};
use crate::error::{check_len, Error, Result};
use crate::fixedpoint::{AqProfile, EdgeKey, LlrStats, QLlr, QWidth};

/// Immutable part of a decoder, shared between workers.
#[derive(Debug)]
struct Plan {
    tree: ShortcutTree,
    code: PolarCode,
    /// Input width per node id; `None` for uniform arithmetic.
    widths: Option<Vec<QWidth>>,
    mode: Mode,
}

/// SC decoder with R0/R1/SPC/REP shortcuts and optional per-edge
/// requantization. Cloning is cheap and gives an independent set of working
/// buffers over the same plan.
#[derive(Debug)]
pub struct ShortcutDecoder<T> {
    plan: Arc<Plan>,
    /// LLR scratch by tree depth; depth `d` holds `N >> d` values.
    bufs: Vec<Vec<T>>,
    x: Vec<u8>,
}

impl<T: Llr> Clone for ShortcutDecoder<T> {
    fn clone(&self) -> Self {
        Self::from_plan(self.plan.clone())
    }
}

type Hook<'a, T> = Option<&'a mut dyn FnMut(EdgeKey, &[T])>;

impl<T: Llr> ShortcutDecoder<T> {
    pub fn new(code: &PolarCode, tree: &ShortcutTree, profile: Option<&AqProfile>, mode: Mode) -> Result<Self> {
        if tree.block_len() != code.block_len() || tree.leaf_frozen_pattern() != code.frozen() {
            return Err(Error::Contract("shortcut tree does not match the code".into()));
        }
        let widths = profile.map(|p| p.node_widths(tree)).transpose()?;
        Ok(Self::from_plan(Arc::new(Plan {
            tree: tree.clone(),
            code: code.clone(),
            widths,
            mode,
        })))
    }

    fn from_plan(plan: Arc<Plan>) -> Self {
        let n = plan.tree.block_len();
        let bufs = (0..=plan.tree.max_depth())
            .map(|d| Vec::with_capacity(n >> d))
            .collect();
        Self {
            plan,
            bufs,
            x: vec![0; n],
        }
    }

    pub fn block_len(&self) -> usize {
        self.plan.tree.block_len()
    }

    pub fn code(&self) -> &PolarCode {
        &self.plan.code
    }

    pub fn tree(&self) -> &ShortcutTree {
        &self.plan.tree
    }

    pub fn mode(&self) -> Mode {
        self.plan.mode
    }

    /// Root input width the decoder expects, if it was built with a profile.
    pub fn input_width(&self) -> Option<QWidth> {
        self.plan.widths.as_ref().map(|w| w[0])
    }

    pub fn decode(&mut self, llrs: &[T]) -> Result<DecodeResult> {
        self.run(llrs, None)
    }

    /// Decodes into the internal buffer and returns the codeword estimate
    /// without building a full [`DecodeResult`].
    pub fn decode_codeword(&mut self, llrs: &[T]) -> Result<&[u8]> {
        self.run_raw(llrs, None)?;
        Ok(&self.x)
    }

    fn run(&mut self, llrs: &[T], hook: Hook<'_, T>) -> Result<DecodeResult> {
        let acts = self.run_raw(llrs, hook)?;
        let visits = acts.total() + self.plan.tree.branches().count();
        Ok(DecodeResult::from_codeword(
            self.x.clone(),
            &self.plan.code,
            self.plan.mode,
            visits,
            acts,
        ))
    }

    fn run_raw(&mut self, llrs: &[T], mut hook: Hook<'_, T>) -> Result<Activations> {
        check_len(self.block_len(), llrs.len())?;
        if let Some(w) = self.input_width() {
            if let Some(bad) = llrs.iter().find(|l| l.qwidth().is_some_and(|lw| lw != w)) {
                return Err(Error::Contract(format!(
                    "input width {} differs from profile root width {w}",
                    bad.qwidth().unwrap()
                )));
            }
        }
        let plan = &*self.plan;
        self.bufs[0].clear();
        self.bufs[0].extend_from_slice(llrs);
        let mut acts = Activations::default();
        visit(
            plan,
            plan.tree.root(),
            &mut self.bufs,
            &mut self.x,
            &mut hook,
            &mut acts,
        );
        Ok(acts)
    }
}

impl ShortcutDecoder<QLlr> {
    /// Decodes one frame and records the channel input and every post-F /
    /// post-G vector (before requantization) into `stats`.
    pub fn decode_instrumented(&mut self, llrs: &[QLlr], stats: &mut LlrStats) -> Result<DecodeResult> {
        check_len(stats.block_len, llrs.len())?;
        if let Some(bad) = llrs.iter().find(|l| l.width() != stats.width) {
            return Err(Error::Contract(format!(
                "input width {} differs from statistics width {}",
                bad.width(),
                stats.width
            )));
        }
        stats.record_root(llrs);
        stats.frames += 1;
        let mut rec = |e: EdgeKey, v: &[QLlr]| stats.record_edge(e, v);
        self.run(llrs, Some(&mut rec))
    }
}

fn visit<T: Llr>(
    plan: &Plan,
    id: usize,
    bufs: &mut [Vec<T>],
    x: &mut [u8],
    hook: &mut Hook<'_, T>,
    acts: &mut Activations,
) {
    let node = plan.tree.node(id);
    let (cur, rest) = bufs.split_first_mut().expect("depth buffers");
    let (off, m) = (node.offset, node.len);
    let out = &mut x[off..off + m];
    match node.kind {
        NodeKind::R0 => {
            acts.r0 += 1;
            out.fill(0);
        }
        NodeKind::R1 => {
            acts.r1 += 1;
            r1_decode(cur, out);
        }
        NodeKind::Spc => {
            acts.spc += 1;
            wagner_decode_sc(cur, out);
        }
        NodeKind::Rep => {
            acts.rep += 1;
            rep_decode(cur, out);
        }
        NodeKind::Branch => {
            let (f, g) = node.children.expect("branch");
            let half = m / 2;
            let (a, b) = cur.split_at(half);

            // An R0 child ignores its LLRs; only compute them when observed.
            if plan.tree.node(f).kind != NodeKind::R0 || hook.is_some() {
                let child = &mut rest[0];
                child.clear();
                child.extend(a.iter().zip(b).map(|(&p, &q)| T::f(p, q)));
                finish_edge(plan, EdgeKey::new(off, m, Side::F), f, child, hook);
            }
            visit(plan, f, rest, x, hook, acts);

            let child = &mut rest[0];
            child.clear();
            child.extend(
                a.iter()
                    .zip(b)
                    .zip(&x[off..off + half])
                    .map(|((&p, &q), &z)| T::g(p, q, z)),
            );
            finish_edge(plan, EdgeKey::new(off, m, Side::G), g, child, hook);
            visit(plan, g, rest, x, hook, acts);

            let (lo, hi) = x[off..off + m].split_at_mut(half);
            for (p, q) in lo.iter_mut().zip(hi.iter()) {
                *p ^= *q;
            }
        }
    }
}

fn finish_edge<T: Llr>(plan: &Plan, edge: EdgeKey, child: usize, v: &mut [T], hook: &mut Hook<'_, T>) {
    if let Some(h) = hook {
        h(edge, v);
    }
    if let Some(w) = &plan.widths {
        let w = w[child];
        for l in v.iter_mut() {
            *l = l.narrow(w);
        }
    }
}

/// One-shot form of [`ShortcutDecoder::decode`]. `profile = None` keeps the
/// input arithmetic throughout.
pub fn sc_decode_shortcut<T: Llr>(
    llrs: &[T],
    tree: &ShortcutTree,
    profile: Option<&AqProfile>,
    code: &PolarCode,
    mode: Mode,
) -> Result<DecodeResult> {
    ShortcutDecoder::new(code, tree, profile, mode)?.decode(llrs)
}
