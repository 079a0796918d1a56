//! Exact optimal zero-error index codes for unicast instances given as
//! side-information graphs.
//!
//! - [`graph`]: digraphs, structural queries, canonical forms and enumeration.
//! - [`bounds`]: maximum acyclic induced subgraph and GF(2) minrank.
//! - [`confusion`]: confusion graphs and exact chromatic numbers.
//! - [`codec`]: linear and general index codes with zero-error checking.
//! - [`verify`]: the exhaustive sweep over small graphs and its checks.
//! - [`cli`]: the `indexcode` command.

pub mod bounds;
pub mod cli;
pub mod codec;
pub mod confusion;
pub mod graph;
pub mod verify;

pub use bounds::{fits, gf2_rank, mais, minrank, Gf2Matrix};
pub use codec::{code_from_coloring, is_valid_code, linear_code_from_matrix, IndexCode};
pub use confusion::{
    build_confusion, chromatic_number, ell_star, is_k_colorable, Coloring, ConfusionGraph,
};
pub use graph::{enumerate_nonisomorphic, parse_digraph, CanonicalKey, Category, Digraph};
pub use verify::{analyze, sweep, verify_theorem, SweepOptions, SweepSummary, VerificationRecord};
