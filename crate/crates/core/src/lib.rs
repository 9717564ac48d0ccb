//! Best swap edges of a tree spanner.
//!
//! Given a 2-edge-connected weighted graph `G` and a spanning tree `T`, for
//! every tree edge `e` find the non-tree edge `f` whose swap tree
//! `T - e + f` has the smallest stretch factor in `G - e`. The engine runs in
//! `O(n² polylog n)` time using a centroid decomposition of `T`, per-edge
//! dictionaries of line envelopes merged bottom-up, and per-vertex dynamic
//! forests; [`oracle`] holds brute-force references.
//!
//! ```
//! use swapedge::{oracle::fixture_g2, solve, EngineOptions, Ratio};
//!
//! let inst = fixture_g2();
//! let sol = solve(&inst, &EngineOptions::default()).unwrap();
//! // tree edge (1,2) is best replaced by (1,4), worst ratio 2
//! assert_eq!(sol.get(1), Some((5, Ratio::from_integer(2))));
//! ```

pub mod centroid;
pub mod dict;
pub mod engine;
pub mod envelope;
pub mod forest;
pub mod gen;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod ratio;
pub mod reduce;

pub use centroid::CentroidTree;
pub use dict::{CounterReport, Stats, SwapDict};
pub use engine::{solve, solve_all, solve_all_with_hook, EngineOptions, EngineOutput, Solution};
pub use envelope::{Envelope, Line, Payload};
pub use forest::{reference_min_swap_to, ForestBackend, SwapForests};
pub use graph::{
    validate_instance, EdgeId, Instance, RootedTree, ValidatedInstance, ValidationError, VertexId, Weight,
    WeightedGraph,
};
pub use ratio::Ratio;
pub use reduce::{reduce_to_binary, ReductionMap};
