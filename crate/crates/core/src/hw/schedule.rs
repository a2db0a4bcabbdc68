//! Unrolled dataflow of the shortcut decoder and its pipelining.
//!
//! In SC order every operation depends on the one before it, so the unrolled
//! decoder is a single chain: F(node), left subtree, G(node), right subtree,
//! PSUL XOR. A schedule cuts that chain into register stages.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::construct::{NodeKind, ShortcutTree};
use crate::error::{param, Error, Result};
use crate::fixedpoint::{AqProfile, QWidth};

/// Combinational delays in normalized time units.
///
/// The values are relative estimates (compare-select for F, sign/magnitude
/// conversion plus add for G, log-depth trees in the leaves); only their
/// ratios matter once the period is calibrated. They are deliberately not
/// commensurate: with round ratios many stage boundaries move at the same
/// period and the greedy depth skips values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayModel {
    pub f2: f64,
    pub g2: f64,
    /// One PSUL XOR level.
    pub xor: f64,
    pub r1: f64,
    /// SPC: `spc_base + spc_per_level * log2 M` (min search plus parity tree).
    pub spc_base: f64,
    pub spc_per_level: f64,
    /// REP: `rep_per_level * log2 M` (adder tree).
    pub rep_per_level: f64,
}

impl Default for DelayModel {
    fn default() -> Self {
        Self {
            f2: 1.0,
            g2: 1.47,
            xor: 0.237,
            r1: 0.071,
            spc_base: 0.583,
            spc_per_level: 0.449,
            rep_per_level: 1.171,
        }
    }
}

impl DelayModel {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.f2,
            self.g2,
            self.xor,
            self.r1,
            self.spc_base,
            self.spc_per_level,
            self.rep_per_level,
        ];
        if all.iter().all(|d| d.is_finite() && *d > 0.0) {
            Ok(())
        } else {
            Err(param("all primitive delays must be positive"))
        }
    }

    fn leaf(&self, kind: NodeKind, len: usize) -> f64 {
        let lg = (len as f64).log2();
        match kind {
            NodeKind::R0 => 0.0,
            NodeKind::R1 => self.r1,
            NodeKind::Spc => self.spc_base + self.spc_per_level * lg,
            NodeKind::Rep => self.rep_per_level * lg.max(1.0),
            NodeKind::Branch => unreachable!(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OpKind {
    F,
    G,
    Xor,
    Leaf(NodeKind),
}

impl OpKind {
    /// Whether the op gets its own register stage in the unbalanced baseline.
    /// Hard decisions of R1 and the PSUL XOR ride along with their neighbours.
    fn staged(self) -> bool {
        matches!(
            self,
            OpKind::F | OpKind::G | OpKind::Leaf(NodeKind::Spc) | OpKind::Leaf(NodeKind::Rep)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Op {
    pub node: usize,
    pub kind: OpKind,
    pub delay: f64,
    /// Bits the op produces.
    pub out_bits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub ops: Vec<usize>,
    pub delay: f64,
    /// Pipeline register at the stage output (the live datapath value).
    pub register_bits: usize,
}

/// Delay-line storage at one Branch node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeBuffer {
    pub node: usize,
    pub len: usize,
    /// Cycles the node's LLRs wait between F and G.
    pub llr_depth: usize,
    pub llr_bits: usize,
    /// Cycles the left-child decisions wait for the PSUL XOR.
    pub psul_depth: usize,
    pub psul_bits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSchedule {
    /// `None` for the unbalanced baseline.
    pub period: Option<f64>,
    pub ops: Vec<Op>,
    pub op_stage: Vec<usize>,
    pub stages: Vec<Stage>,
    pub buffers: Vec<NodeBuffer>,
}

/// Indices into the op chain for one Branch node.
#[derive(Debug, Clone, Copy)]
struct BranchOps {
    node: usize,
    f: Option<usize>,
    g: usize,
    xor: usize,
}

struct Dataflow {
    ops: Vec<Op>,
    branches: Vec<BranchOps>,
}

fn dataflow(tree: &ShortcutTree, widths: &[QWidth], delays: &DelayModel) -> Dataflow {
    fn walk(t: &ShortcutTree, w: &[QWidth], d: &DelayModel, id: usize, df: &mut Dataflow) {
        let node = t.node(id);
        let m = node.len;
        match node.children {
            None => {
                if node.kind != NodeKind::R0 {
                    df.ops.push(Op {
                        node: id,
                        kind: OpKind::Leaf(node.kind),
                        delay: d.leaf(node.kind, m),
                        out_bits: m,
                    });
                }
            }
            Some((f, g)) => {
                let f_op = (t.node(f).kind != NodeKind::R0).then(|| {
                    df.ops.push(Op {
                        node: id,
                        kind: OpKind::F,
                        delay: d.f2,
                        out_bits: m / 2 * w[f].bits() as usize,
                    });
                    df.ops.len() - 1
                });
                walk(t, w, d, f, df);
                df.ops.push(Op {
                    node: id,
                    kind: OpKind::G,
                    delay: d.g2,
                    out_bits: m / 2 * w[g].bits() as usize,
                });
                let g_op = df.ops.len() - 1;
                walk(t, w, d, g, df);
                df.ops.push(Op {
                    node: id,
                    kind: OpKind::Xor,
                    delay: d.xor,
                    out_bits: m,
                });
                df.branches.push(BranchOps {
                    node: id,
                    f: f_op,
                    g: g_op,
                    xor: df.ops.len() - 1,
                });
            }
        }
    }
    let mut df = Dataflow {
        ops: Vec::new(),
        branches: Vec::new(),
    };
    walk(tree, widths, delays, tree.root(), &mut df);
    df
}

fn node_widths(tree: &ShortcutTree, profile: Option<&AqProfile>, q: QWidth) -> Result<Vec<QWidth>> {
    match profile {
        Some(p) => p.node_widths(tree),
        None => Ok(vec![q; tree.nodes().len()]),
    }
}

fn assemble(
    tree: &ShortcutTree,
    widths: &[QWidth],
    df: Dataflow,
    op_stage: Vec<usize>,
    period: Option<f64>,
) -> PipelineSchedule {
    let depth = op_stage.iter().max().map_or(0, |&s| s + 1);
    let mut stages: Vec<Stage> = (0..depth)
        .map(|_| Stage {
            ops: Vec::new(),
            delay: 0.0,
            register_bits: 0,
        })
        .collect();
    for (i, &s) in op_stage.iter().enumerate() {
        let st = &mut stages[s];
        st.ops.push(i);
        st.delay += df.ops[i].delay;
        st.register_bits = df.ops[i].out_bits;
    }
    let mut buffers: Vec<NodeBuffer> = df
        .branches
        .iter()
        .map(|b| {
            let node = tree.node(b.node);
            let m = node.len;
            let llr_depth = b.f.map_or(0, |f| op_stage[b.g] - op_stage[f]);
            // The left child's decisions are ready after the op just before G;
            // an R0 left child feeds constant zeros and needs no storage.
            let psul_depth = if b.f.is_some() && b.g > 0 {
                op_stage[b.xor] - op_stage[b.g - 1]
            } else {
                0
            };
            NodeBuffer {
                node: b.node,
                len: m,
                llr_depth,
                llr_bits: llr_depth * m * widths[b.node].bits() as usize,
                psul_depth,
                psul_bits: psul_depth * m / 2,
            }
        })
        .collect();
    buffers.sort_by_key(|b| b.node);
    PipelineSchedule {
        period,
        ops: df.ops,
        op_stage,
        stages,
        buffers,
    }
}

/// Baseline: one register stage per F, G, SPC and REP operation.
pub fn unbalanced_schedule(tree: &ShortcutTree, profile: Option<&AqProfile>, q: QWidth) -> Result<PipelineSchedule> {
    let widths = node_widths(tree, profile, q)?;
    let df = dataflow(tree, &widths, &DelayModel::default());
    let mut next = 0usize;
    let op_stage = df
        .ops
        .iter()
        .map(|op| {
            if op.kind.staged() {
                next += 1;
                next - 1
            } else {
                next.saturating_sub(1)
            }
        })
        .collect();
    Ok(assemble(tree, &widths, df, op_stage, None))
}

/// Greedy forward packing of a delay chain: each op joins the current stage
/// while the stage delay stays within `period`. Returns the stage index of
/// every op.
pub fn pack_chain(delays: &[f64], period: f64) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(delays.len());
    let (mut stage, mut acc) = (0usize, 0.0f64);
    for (i, &d) in delays.iter().enumerate() {
        if d > period {
            return Err(Error::InfeasiblePeriod {
                period,
                delay: d,
                op: format!("op {i}"),
            });
        }
        if acc + d > period && acc > 0.0 {
            stage += 1;
            acc = 0.0;
        }
        acc += d;
        out.push(stage);
    }
    Ok(out)
}

/// Register reduction/balancing: merges consecutive primitives into stages
/// as long as the combinational delay fits in `period`.
pub fn schedule_pipeline(
    tree: &ShortcutTree,
    profile: Option<&AqProfile>,
    q: QWidth,
    delays: &DelayModel,
    period: f64,
) -> Result<PipelineSchedule> {
    delays.validate()?;
    let widths = node_widths(tree, profile, q)?;
    let df = dataflow(tree, &widths, delays);
    let d: Vec<f64> = df.ops.iter().map(|o| o.delay).collect();
    let op_stage = pack_chain(&d, period).map_err(|e| match e {
        Error::InfeasiblePeriod { period, delay, op } => {
            let i: usize = op.trim_start_matches("op ").parse().unwrap_or(0);
            let o = &df.ops[i];
            Error::InfeasiblePeriod {
                period,
                delay,
                op: format!("{:?} at node {} (len {})", o.kind, o.node, tree.node(o.node).len),
            }
        }
        e => e,
    })?;
    Ok(assemble(tree, &widths, df, op_stage, Some(period)))
}

/// Smallest period at which the R-RB schedule of `tree` is at most
/// `target_depth` stages deep. Fails if that depth is skipped over.
pub fn calibrate_period_for_depth(tree: &ShortcutTree, delays: &DelayModel, target_depth: usize) -> Result<f64> {
    delays.validate()?;
    let w = vec![QWidth::new(1)?; tree.nodes().len()];
    let d: Vec<f64> = dataflow(tree, &w, delays).ops.iter().map(|o| o.delay).collect();
    let depth = |p: f64| pack_chain(&d, p).map(|s| s.last().map_or(0, |&x| x + 1));
    let mut lo = d.iter().cloned().fold(0.0, f64::max);
    let mut hi: f64 = d.iter().sum::<f64>().max(lo);
    if depth(lo)? <= target_depth {
        return Ok(lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if depth(mid)? <= target_depth {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    let got = depth(hi)?;
    if got != target_depth {
        return Err(param(format!(
            "no clock period gives depth {target_depth} (nearest is {got})"
        )));
    }
    Ok(hi)
}

impl PipelineSchedule {
    pub fn depth(&self) -> usize {
        self.stages.len()
    }

    pub fn llr_buffer_bits(&self) -> usize {
        self.buffers.iter().map(|b| b.llr_bits).sum()
    }

    pub fn psul_bits(&self) -> usize {
        self.buffers.iter().map(|b| b.psul_bits).sum()
    }

    pub fn register_bits(&self) -> usize {
        self.stages.iter().map(|s| s.register_bits).sum()
    }

    pub fn max_stage_delay(&self) -> f64 {
        self.stages.iter().map(|s| s.delay).fold(0.0, f64::max)
    }

    /// Summed LLR and PSUL buffer depths per node length.
    pub fn depth_by_length(&self) -> BTreeMap<usize, (usize, usize)> {
        let mut m = BTreeMap::new();
        for b in &self.buffers {
            let e = m.entry(b.len).or_insert((0, 0));
            e.0 += b.llr_depth;
            e.1 += b.psul_depth;
        }
        m
    }
}

/// Per-node-length buffer depths without and with R-RB, plus totals in bits.
pub fn buffer_table(unbalanced: &PipelineSchedule, rrb: &PipelineSchedule) -> String {
    let (a, b) = (unbalanced.depth_by_length(), rrb.depth_by_length());
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>6} | {:>8} {:>8} | {:>8} {:>8}",
        "M", "LLR", "PSUL", "LLR", "PSUL"
    );
    let _ = writeln!(s, "{:>6} | {:>17} | {:>17}", "", "w/o R-RB", "with R-RB");
    let lens: std::collections::BTreeSet<usize> = a.keys().chain(b.keys()).copied().collect();
    let cell = |v: usize| if v == 0 { "-".to_string() } else { v.to_string() };
    for m in lens {
        let (x, y) = (
            a.get(&m).copied().unwrap_or_default(),
            b.get(&m).copied().unwrap_or_default(),
        );
        let _ = writeln!(
            s,
            "{:>6} | {:>8} {:>8} | {:>8} {:>8}",
            m,
            cell(x.0),
            cell(x.1),
            cell(y.0),
            cell(y.1)
        );
    }
    let _ = writeln!(
        s,
        "{:>6} | {:>8} {:>8} | {:>8} {:>8}",
        "bits",
        unbalanced.llr_buffer_bits(),
        unbalanced.psul_bits(),
        rrb.llr_buffer_bits(),
        rrb.psul_bits()
    );
    let _ = writeln!(s, "depth: {} -> {}", unbalanced.depth(), rrb.depth());
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q5() -> QWidth {
        QWidth::new(5).unwrap()
    }

    #[test]
    fn greedy_packing_examples() {
        assert_eq!(pack_chain(&[0.3, 0.4, 0.5], 1.0).unwrap(), vec![0, 0, 1]);
        assert_eq!(pack_chain(&[0.3, 0.4, 0.5], 0.5).unwrap(), vec![0, 1, 2]);
        assert!(matches!(
            pack_chain(&[0.3, 1.2], 1.0),
            Err(Error::InfeasiblePeriod { .. })
        ));
    }

    #[test]
    fn single_branch_unbalanced_depth() {
        // v = [0, 1] matches no leaf guard: Branch over R1(1), R0(1).
        let t = ShortcutTree::from_frozen(&[false, true], 2).unwrap();
        let s = unbalanced_schedule(&t, None, q5()).unwrap();
        assert_eq!(s.depth(), 2);
        let t = ShortcutTree::from_frozen(&[true; 4], 2).unwrap();
        assert_eq!(unbalanced_schedule(&t, None, q5()).unwrap().depth(), 0);
    }

    #[test]
    fn buffers_follow_left_subtree_latency() {
        // Branch(8) -> Branch(4) -> [SPC(2), R1(2)], R1(4)
        let mut v = vec![false; 8];
        v[0] = true;
        let t = ShortcutTree::from_frozen(&v, 2).unwrap();
        let s = unbalanced_schedule(&t, None, q5()).unwrap();
        // F8, F4, SPC, G4, R1, X4, G8, R1, X8
        assert_eq!(s.depth(), 5);
        let root = &s.buffers[0];
        assert_eq!((root.llr_depth, root.llr_bits), (4, 4 * 8 * 5));
        assert_eq!((root.psul_depth, root.psul_bits), (1, 4));
    }

    #[test]
    fn calibrated_period_hits_depth() {
        let code = crate::construct::PolarCode::construct(8, 200, 4.0).unwrap();
        let t = ShortcutTree::build(&code, 32).unwrap();
        let d = DelayModel::default();
        let base = unbalanced_schedule(&t, None, q5()).unwrap().depth();
        let target = base / 3;
        let p = calibrate_period_for_depth(&t, &d, target).unwrap();
        let s = schedule_pipeline(&t, None, q5(), &d, p).unwrap();
        assert_eq!(s.depth(), target);
        assert!(s.max_stage_delay() <= p);
        assert!(schedule_pipeline(&t, None, q5(), &d, p * 0.999).unwrap().depth() > target);
    }
}
