//! Adaptive quantization profiles: one bit-width per tree edge.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::qllr::QWidth;
use super::stats::{EdgeKey, LlrStats};
use crate::construct::{NodeKind, ShortcutTree, Side};
use crate::error::{param, Error, Result};

/// Bit-width assignment for the LLRs flowing along every tree edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AqProfile {
    pub root: QWidth,
    pub edges: BTreeMap<EdgeKey, QWidth>,
}

/// Reference widths for the upper levels of the (1024, 854) decoder, keyed by
/// the F/G path from the root.
pub const REFERENCE_1024_WIDTHS: [(&str, u8); 14] = [
    ("F", 5),
    ("G", 4),
    ("FF", 5),
    ("FG", 4),
    ("GF", 4),
    ("GG", 3),
    ("FFF", 5),
    ("FFG", 4),
    ("FGF", 4),
    ("FGG", 3),
    ("GFF", 4),
    ("GFG", 3),
    ("GGF", 3),
    ("GGG", 1),
];

impl AqProfile {
    /// Every edge at `width`.
    pub fn uniform(tree: &ShortcutTree, width: QWidth) -> Self {
        let edges = tree
            .branches()
            .flat_map(|(_, n)| [Side::F, Side::G].map(|s| (EdgeKey::new(n.offset, n.len, s), width)))
            .collect();
        Self { root: width, edges }
    }

    pub fn width(&self, edge: &EdgeKey) -> Option<QWidth> {
        self.edges.get(edge).copied()
    }

    /// Checks coverage and the non-increasing invariant against `tree`.
    pub fn validate(&self, tree: &ShortcutTree) -> Result<()> {
        self.node_widths(tree).map(|_| ())
    }

    /// Input width of every tree node, indexed by node id.
    pub fn node_widths(&self, tree: &ShortcutTree) -> Result<Vec<QWidth>> {
        let mut out = vec![self.root; tree.nodes().len()];
        // Pre-order: parents are visited before children.
        for (id, node) in tree.branches() {
            let (f, g) = node.children.expect("branch");
            for (side, child) in [(Side::F, f), (Side::G, g)] {
                let key = EdgeKey::new(node.offset, node.len, side);
                let w = self.width(&key).ok_or_else(|| {
                    param(format!(
                        "profile has no width for edge ({}, {}, {})",
                        key.offset,
                        key.len,
                        side.as_str()
                    ))
                })?;
                if w > out[id] {
                    return Err(param(format!(
                        "edge ({}, {}, {}) widens {} -> {}",
                        key.offset,
                        key.len,
                        side.as_str(),
                        out[id],
                        w
                    )));
                }
                out[child] = w;
            }
        }
        Ok(out)
    }

    /// Mean stored width over the LLR vectors entering nodes of length at
    /// least `min_len`, weighted by vector length (root input included).
    pub fn average_width(&self, tree: &ShortcutTree, min_len: usize) -> Result<f64> {
        let widths = self.node_widths(tree)?;
        let (mut bits, mut count) = (0.0, 0.0);
        for (id, node) in tree.nodes().iter().enumerate() {
            if node.len >= min_len {
                bits += (node.len as f64) * widths[id].bits() as f64;
                count += node.len as f64;
            }
        }
        Ok(if count == 0.0 { 0.0 } else { bits / count })
    }

    /// Applies the reference upper-level widths on top of `base` and clamps
    /// every edge below to its parent so the profile stays non-increasing.
    /// Paths that do not exist in `tree` are skipped.
    pub fn with_reference_upper_levels(tree: &ShortcutTree, base: &AqProfile) -> Result<Self> {
        let mut out = base.clone();
        out.root = QWidth::new(5)?;
        for (path, bits) in REFERENCE_1024_WIDTHS {
            if let Some(edge) = edge_at_path(tree, path) {
                out.edges.insert(edge, QWidth::new(bits)?);
            }
        }
        out.clamp_monotone(tree);
        Ok(out)
    }

    fn clamp_monotone(&mut self, tree: &ShortcutTree) {
        let mut node_w = vec![self.root; tree.nodes().len()];
        for (id, node) in tree.branches() {
            let (f, g) = node.children.expect("branch");
            for (side, child) in [(Side::F, f), (Side::G, g)] {
                let key = EdgeKey::new(node.offset, node.len, side);
                let w = self.edges.get(&key).copied().unwrap_or(node_w[id]).min(node_w[id]);
                self.edges.insert(key, w);
                node_w[child] = w;
            }
        }
    }

    /// `.aq` text format: `root <width>` then `offset len side width` lines.
    pub fn to_text(&self) -> String {
        let mut s = format!("root {}\n", self.root);
        for (k, w) in &self.edges {
            let _ = writeln!(s, "{} {} {} {}", k.offset, k.len, k.side.as_str(), w);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse { line: line + 1, msg };
        let mut root = None;
        let mut edges = BTreeMap::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let width = |s: &str| -> Result<QWidth> {
                let b: u8 = s.parse().map_err(|e| perr(ln, format!("width: {e}")))?;
                QWidth::new(b)
            };
            match f.as_slice() {
                ["root", w] => root = Some(width(w)?),
                [off, len, side, w] => {
                    let side = match *side {
                        "F" => Side::F,
                        "G" => Side::G,
                        s => return Err(perr(ln, format!("bad side {s:?}"))),
                    };
                    let off = off.parse().map_err(|e| perr(ln, format!("offset: {e}")))?;
                    let len = len.parse().map_err(|e| perr(ln, format!("len: {e}")))?;
                    edges.insert(EdgeKey::new(off, len, side), width(w)?);
                }
                _ => return Err(perr(ln, format!("unrecognized line {line:?}"))),
            }
        }
        let root = root.ok_or(perr(0, "missing `root <width>` header".into()))?;
        Ok(Self { root, edges })
    }
}

/// Edge reached by following `path` (a string of `F`/`G`) from the root.
pub fn edge_at_path(tree: &ShortcutTree, path: &str) -> Option<EdgeKey> {
    let mut id = tree.root();
    let sides: Vec<Side> = path.chars().map(|c| if c == 'F' { Side::F } else { Side::G }).collect();
    let (last, prefix) = sides.split_last()?;
    for &s in prefix {
        id = tree.child(id, s)?;
    }
    let n = tree.node(id);
    if n.kind != NodeKind::Branch {
        return None;
    }
    Some(EdgeKey::new(n.offset, n.len, *last))
}

/// Relative entropy loss of keeping `bits` of a `base`-bit histogram.
pub fn entropy_loss(hist: &super::stats::Histogram, base: QWidth, bits: QWidth) -> f64 {
    let full = hist.entropy(0);
    if full <= 0.0 {
        return 0.0;
    }
    let shift = (base.bits() - bits.bits()) as u32;
    (full - hist.entropy(shift)) / full
}

/// Greedy per-edge width reduction. Edges are visited top-down; each edge
/// starts at its parent's width and loses one bit at a time while the
/// relative entropy loss of its magnitude histogram stays strictly below
/// `loss_budget`.
pub fn optimize_aq(stats: &LlrStats, tree: &ShortcutTree, base: QWidth, loss_budget: f64) -> Result<AqProfile> {
    if stats.width != base {
        return Err(param(format!(
            "statistics gathered at width {} but base is {}",
            stats.width, base
        )));
    }
    let mut profile = AqProfile {
        root: base,
        edges: BTreeMap::new(),
    };
    let mut node_w = vec![base; tree.nodes().len()];
    for (id, node) in tree.branches() {
        let (f, g) = node.children.expect("branch");
        for (side, child) in [(Side::F, f), (Side::G, g)] {
            let key = EdgeKey::new(node.offset, node.len, side);
            let hist = stats.edges.get(&key).ok_or_else(|| {
                param(format!(
                    "no statistics for edge ({}, {}, {})",
                    key.offset,
                    key.len,
                    side.as_str()
                ))
            })?;
            let mut w = node_w[id];
            while w.bits() > 1 {
                let next = QWidth::new(w.bits() - 1)?;
                if entropy_loss(hist, base, next) < loss_budget {
                    w = next;
                } else {
                    break;
                }
            }
            profile.edges.insert(key, w);
            node_w[child] = w;
        }
    }
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixedpoint::stats::Histogram;

    fn w(b: u8) -> QWidth {
        QWidth::new(b).unwrap()
    }

    fn tree() -> ShortcutTree {
        // Branch(8) -> [Branch(4) -> SPC(2), R1(2)], R1(4)
        ShortcutTree::from_frozen(&[true, false, false, false, false, false, false, false], 2).unwrap()
    }

    fn stats_with(tree: &ShortcutTree, fill: impl Fn(&mut Histogram)) -> LlrStats {
        let mut st = LlrStats::new(tree.block_len(), w(5));
        for (_, n) in tree.branches() {
            for s in [Side::F, Side::G] {
                let mut h = Histogram::new(w(5));
                fill(&mut h);
                st.edges.insert(EdgeKey::new(n.offset, n.len, s), h);
            }
        }
        st
    }

    #[test]
    fn zero_budget_keeps_base() {
        let t = tree();
        let st = stats_with(&t, |h| h.counts.iter_mut().for_each(|c| *c = 3));
        let p = optimize_aq(&st, &t, w(5), 0.0).unwrap();
        assert_eq!(p, AqProfile::uniform(&t, w(5)));
    }

    #[test]
    fn saturated_edges_drop_to_one_bit() {
        let t = tree();
        let st = stats_with(&t, |h| h.counts[15] = 1000);
        let p = optimize_aq(&st, &t, w(5), 0.01).unwrap();
        assert!(p.edges.values().all(|&x| x == w(1)));
        p.validate(&t).unwrap();
    }

    #[test]
    fn missing_edge_is_an_error() {
        let t = tree();
        let mut st = stats_with(&t, |h| h.counts[3] = 1);
        st.edges.remove(&EdgeKey::new(0, 8, Side::G));
        assert!(optimize_aq(&st, &t, w(5), 0.1).is_err());
    }

    #[test]
    fn validate_rejects_widening_and_gaps() {
        let t = tree();
        let mut p = AqProfile::uniform(&t, w(5));
        p.edges.insert(EdgeKey::new(0, 8, Side::F), w(3));
        assert!(p.validate(&t).is_err());
        let mut p = AqProfile::uniform(&t, w(5));
        p.edges.remove(&EdgeKey::new(0, 4, Side::G));
        assert!(p.validate(&t).is_err());
    }

    #[test]
    fn text_round_trip() {
        let t = tree();
        let mut p = AqProfile::uniform(&t, w(5));
        p.edges.insert(EdgeKey::new(0, 8, Side::G), w(2));
        let back = AqProfile::from_text(&p.to_text()).unwrap();
        assert_eq!(back, p);
        assert!(AqProfile::from_text("0 8 F 5\n").is_err());
    }

    #[test]
    fn reference_paths_on_small_tree() {
        let t = tree();
        assert_eq!(edge_at_path(&t, "G"), Some(EdgeKey::new(0, 8, Side::G)));
        assert_eq!(edge_at_path(&t, "FG"), Some(EdgeKey::new(0, 4, Side::G)));
        assert_eq!(edge_at_path(&t, "GF"), None);
    }
}
