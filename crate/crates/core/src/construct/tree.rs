use serde::{Deserialize, Serialize};

use super::PolarCode;
use crate::error::{param, Result};

/// Default cap on SPC and REP node lengths.
pub const DEFAULT_N_LIM: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeKind {
    /// All positions frozen.
    R0,
    /// No position frozen.
    R1,
    /// Single parity check: only the first position frozen.
    Spc,
    /// Repetition: only the last position free.
    Rep,
    Branch,
}

impl NodeKind {
    pub const LEAVES: [NodeKind; 4] = [NodeKind::R0, NodeKind::R1, NodeKind::Spc, NodeKind::Rep];

    pub fn name(self) -> &'static str {
        match self {
            NodeKind::R0 => "R0",
            NodeKind::R1 => "R1",
            NodeKind::Spc => "SPC",
            NodeKind::Rep => "REP",
            NodeKind::Branch => "Branch",
        }
    }
}

/// Which child of a Branch node an edge leads to. The F side receives the
/// check-node LLRs and is decoded first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    F,
    G,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::F => "F",
            Side::G => "G",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    /// Offset of the segment within `u`.
    pub offset: usize,
    pub len: usize,
    pub kind: NodeKind,
    pub depth: u32,
    /// `(F child, G child)` for Branch nodes.
    pub children: Option<(usize, usize)>,
    /// Number of frozen positions in the segment.
    pub frozen: usize,
}

impl Node {
    pub fn payload(&self) -> usize {
        self.len - self.frozen
    }
}

/// Greedy top-down segmentation of a code into shortcut nodes. Nodes are
/// stored in pre-order; index 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShortcutTree {
    nodes: Vec<Node>,
    n_lim: usize,
    block_len: usize,
}

/// Leaf classification of a frozen-indicator segment, `None` for Branch.
pub fn classify(v: &[bool], n_lim: usize) -> Option<NodeKind> {
    let m = v.len();
    if v.iter().all(|&f| f) {
        Some(NodeKind::R0)
    } else if v.iter().all(|&f| !f) {
        Some(NodeKind::R1)
    } else if m <= n_lim && v[0] && v[1..].iter().all(|&f| !f) {
        Some(NodeKind::Spc)
    } else if m <= n_lim && v[..m - 1].iter().all(|&f| f) && !v[m - 1] {
        Some(NodeKind::Rep)
    } else {
        None
    }
}

impl ShortcutTree {
    pub fn build(code: &PolarCode, n_lim: usize) -> Result<Self> {
        Self::from_frozen(code.frozen(), n_lim)
    }

    pub fn from_frozen(v: &[bool], n_lim: usize) -> Result<Self> {
        let len = v.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(param(format!("segment length {len} is not a power of two")));
        }
        if !n_lim.is_power_of_two() || n_lim < 2 || (len >= 2 && n_lim > len) {
            return Err(param(format!("n_lim={n_lim} must be a power of two in 2..={len}")));
        }
        let mut tree = Self {
            nodes: Vec::with_capacity(2 * len),
            n_lim,
            block_len: len,
        };
        tree.grow(v, 0, 0);
        Ok(tree)
    }

    fn grow(&mut self, v: &[bool], offset: usize, depth: u32) -> usize {
        let id = self.nodes.len();
        let frozen = v.iter().filter(|&&f| f).count();
        let kind = classify(v, self.n_lim).unwrap_or(NodeKind::Branch);
        self.nodes.push(Node {
            offset,
            len: v.len(),
            kind,
            depth,
            children: None,
            frozen,
        });
        if kind == NodeKind::Branch {
            let half = v.len() / 2;
            let f = self.grow(&v[..half], offset, depth + 1);
            let g = self.grow(&v[half..], offset + half, depth + 1);
            self.nodes[id].children = Some((f, g));
        }
        id
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn n_lim(&self) -> usize {
        self.n_lim
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.kind != NodeKind::Branch)
    }

    pub fn branches(&self) -> impl Iterator<Item = (usize, &Node)> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.kind == NodeKind::Branch)
    }

    pub fn max_depth(&self) -> u32 {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Child reached through `side` of Branch node `id`.
    pub fn child(&self, id: usize, side: Side) -> Option<usize> {
        self.nodes[id].children.map(|(f, g)| match side {
            Side::F => f,
            Side::G => g,
        })
    }

    /// Looks up a node by its segment.
    pub fn find(&self, offset: usize, len: usize) -> Option<usize> {
        let mut id = 0;
        loop {
            let n = &self.nodes[id];
            if n.offset == offset && n.len == len {
                return Some(id);
            }
            let (f, g) = n.children?;
            if offset < n.offset || offset >= n.offset + n.len || len >= n.len {
                return None;
            }
            id = if offset < n.offset + n.len / 2 { f } else { g };
        }
    }

    /// Concatenation of the leaf segments' frozen indicators (the tiling).
    pub fn leaf_frozen_pattern(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.block_len);
        for leaf in self.leaves() {
            let bit = match leaf.kind {
                NodeKind::R0 => vec![true; leaf.len],
                NodeKind::R1 => vec![false; leaf.len],
                NodeKind::Spc => {
                    let mut v = vec![false; leaf.len];
                    v[0] = true;
                    v
                }
                NodeKind::Rep => {
                    let mut v = vec![true; leaf.len];
                    v[leaf.len - 1] = false;
                    v
                }
                NodeKind::Branch => unreachable!(),
            };
            out.extend(bit);
        }
        out
    }

    /// Ids of the subtree rooted at `id`, in pre-order.
    pub fn subtree(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(i) = stack.pop() {
            out.push(i);
            if let Some((f, g)) = self.nodes[i].children {
                stack.push(g);
                stack.push(f);
            }
        }
        out
    }
}
