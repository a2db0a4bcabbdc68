//! Code construction, shortcut-tree classification and resource census.

mod census;
mod code;
pub mod ga;
mod tree;

pub use census::{LengthRow, ResourceCensus};
pub use code::PolarCode;
pub use tree::{classify, Node, NodeKind, ShortcutTree, Side, DEFAULT_N_LIM};

/// Builds a code by density evolution. Free-function form of
/// [`PolarCode::construct`].
pub fn construct_frozen_set(n: u32, k: usize, design_snr_db: f64) -> crate::Result<PolarCode> {
    PolarCode::construct(n, k, design_snr_db)
}

pub fn build_shortcut_tree(code: &PolarCode, n_lim: usize) -> crate::Result<ShortcutTree> {
    ShortcutTree::build(code, n_lim)
}

pub fn census(tree: &ShortcutTree) -> ResourceCensus {
    ResourceCensus::of(tree)
}
