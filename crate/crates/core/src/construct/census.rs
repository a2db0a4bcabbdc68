use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use super::tree::{NodeKind, ShortcutTree};

/// Resource counts for one node length.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthRow {
    pub r0: usize,
    pub r1: usize,
    pub spc: usize,
    pub rep: usize,
    /// Branch nodes of this length (each carries one G block).
    pub branches: usize,
    /// Branch nodes that need an F block (left child is not R0).
    pub f_blocks: usize,
    /// Size-2 F functions: `f_blocks * M/2`.
    pub f2: usize,
    /// Size-2 G functions: `branches * M/2`.
    pub g2: usize,
    /// PSUL XOR gates: `branches * M/2`.
    pub xor: usize,
}

impl LengthRow {
    pub fn leaves(&self) -> usize {
        self.r0 + self.r1 + self.spc + self.rep
    }

    pub fn shortcut(&self, kind: NodeKind) -> usize {
        match kind {
            NodeKind::R0 => self.r0,
            NodeKind::R1 => self.r1,
            NodeKind::Spc => self.spc,
            NodeKind::Rep => self.rep,
            NodeKind::Branch => self.branches,
        }
    }
}

impl AddAssign for LengthRow {
    fn add_assign(&mut self, o: Self) {
        self.r0 += o.r0;
        self.r1 += o.r1;
        self.spc += o.spc;
        self.rep += o.rep;
        self.branches += o.branches;
        self.f_blocks += o.f_blocks;
        self.f2 += o.f2;
        self.g2 += o.g2;
        self.xor += o.xor;
    }
}

/// Shortcut and F/G/XOR counts of a tree, keyed by node length.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceCensus {
    pub by_length: BTreeMap<usize, LengthRow>,
}

impl ResourceCensus {
    pub fn of(tree: &ShortcutTree) -> Self {
        Self::of_subtree(tree, tree.root())
    }

    pub fn of_subtree(tree: &ShortcutTree, id: usize) -> Self {
        let mut c = Self::default();
        for i in tree.subtree(id) {
            c.add_node(tree, i);
        }
        c
    }

    /// Contribution of a single node (not its descendants).
    pub fn of_node(tree: &ShortcutTree, id: usize) -> Self {
        let mut c = Self::default();
        c.add_node(tree, id);
        c
    }

    fn add_node(&mut self, tree: &ShortcutTree, id: usize) {
        let node = tree.node(id);
        let row = self.by_length.entry(node.len).or_default();
        match node.kind {
            NodeKind::R0 => row.r0 += 1,
            NodeKind::R1 => row.r1 += 1,
            NodeKind::Spc => row.spc += 1,
            NodeKind::Rep => row.rep += 1,
            NodeKind::Branch => {
                let half = node.len / 2;
                let (f, _) = node.children.expect("branch has children");
                row.branches += 1;
                row.g2 += half;
                row.xor += half;
                // An R0 F-child decodes to constant zeros; its F block is dropped
                // while the G block still runs with zero feedback.
                if tree.node(f).kind != NodeKind::R0 {
                    row.f_blocks += 1;
                    row.f2 += half;
                }
            }
        }
    }

    pub fn total(&self) -> LengthRow {
        let mut t = LengthRow::default();
        for r in self.by_length.values() {
            t += *r;
        }
        t
    }

    /// Bits of `u` covered by leaves of the given kind.
    pub fn bits_covered(&self, kind: NodeKind) -> usize {
        self.by_length.iter().map(|(&m, r)| m * r.shortcut(kind)).sum()
    }

    /// Text rendering with one row per node length: shortcut counts, then
    /// F/G block counts, total size-2 functions and XOR gates.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:>6} {:>4} {:>4} {:>4} {:>4} | {:>6} {:>6} {:>7} {:>6}",
            "M", "R0", "R1", "SPC", "REP", "F", "G", "F2+G2", "XOR"
        );
        for (m, r) in &self.by_length {
            let _ = writeln!(
                s,
                "{:>6} {:>4} {:>4} {:>4} {:>4} | {:>6} {:>6} {:>7} {:>6}",
                m,
                r.r0,
                r.r1,
                r.spc,
                r.rep,
                r.f_blocks,
                r.branches,
                r.f2 + r.g2,
                r.xor
            );
        }
        let t = self.total();
        let _ = writeln!(
            s,
            "{:>6} {:>4} {:>4} {:>4} {:>4} | {:>6} {:>6} {:>7} {:>6}",
            "bits",
            self.bits_covered(NodeKind::R0),
            self.bits_covered(NodeKind::R1),
            self.bits_covered(NodeKind::Spc),
            self.bits_covered(NodeKind::Rep),
            t.f2,
            t.g2,
            t.f2 + t.g2,
            t.xor
        );
        s
    }
}

impl AddAssign<&ResourceCensus> for ResourceCensus {
    fn add_assign(&mut self, o: &ResourceCensus) {
        for (&m, r) in &o.by_length {
            *self.by_length.entry(m).or_default() += *r;
        }
    }
}
