//! Packing colorings of subcubic graphs.
//!
//! A packing `S`-coloring for a non-decreasing sequence `S = (s_1, ..., s_k)`
//! partitions the vertex set into classes `V_1, ..., V_k` so that any two
//! distinct vertices of `V_i` are at distance at least `s_i + 1`. This crate
//! provides:
//!
//! * [`graph`] — immutable subcubic graphs, truncated BFS distance queries,
//!   and the 1-subdivision transform,
//! * [`format`] — graph6 and edge-list text formats,
//! * [`generators`] — named graphs, random cubic instances, and the cubic
//!   completion embedding,
//! * [`packing`] — the coloring data model, a certifying verifier, and the
//!   lift of a coloring to the subdivision,
//! * [`exact`] — exhaustive backtracking search used as a ground-truth oracle,
//! * [`engine`] — the exchange-move engine maintaining two disjoint
//!   independent sets and a small leftover (red) set,
//! * [`pipeline`] — the quotient-graph coloring pipeline that assembles a
//!   verified packing (1,1,2,2,3)-coloring of any subcubic graph.

pub mod engine;
pub mod exact;
pub mod format;
pub mod generators;
pub mod graph;
pub mod packing;
pub mod pipeline;

#[cfg(test)]
pub(crate) mod test_support;
