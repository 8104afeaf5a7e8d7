//! Automorphisms of colored multi-hypergraphs whose color classes carry
//! explicitly listed groups, by dynamic programming over blocks of
//! hyperedges.

mod dp;
mod instance;

pub use dp::{build_blocks, compute_s_ell, hyp_aut, solve, stage0, Block, HypAutSolution, IsoTable};
pub use instance::{ColoredMultiHypergraph, HypError, Traces};

#[cfg(test)]
mod tests;
