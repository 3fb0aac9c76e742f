//! Reference implementations for checking `memotab`.
//!
//! Nothing here goes through the continuation engine or the memo tables when
//! computing expected answers: computations are evaluated with plain list
//! semantics, grammars with a naive bottom-up fixpoint, graphs with BFS.

pub mod comp_tree;
pub mod graph;
pub mod worklist;

pub use comp_tree::{arb_tree, Tree, Val};
pub use worklist::{random_rules, ChartOracle};

/// Sort a vector, for multiset comparison.
pub fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v
}
