//! Max-k-cut on weighted graphs with a multiple-operator local search.
//!
//! The search keeps every single-transfer gain in per-subset bucket arrays
//! that are updated incrementally after each move, and combines five
//! operators: best single transfer, best double transfer over weighted
//! edges, tabu single transfer, double transfer into random subsets, and
//! random transfer. An exhaustive solver for tiny graphs serves as ground
//! truth.
//!
//! ```
//! use maxkcut::{parse_instance, run_moh, SearchParams};
//! use std::time::Duration;
//!
//! let g = parse_instance("3 3\n1 2 1\n1 3 2\n2 3 3").unwrap();
//! let params = SearchParams { k: 2, time_limit: Duration::from_millis(50), ..Default::default() };
//! assert_eq!(run_moh(&g, &params).unwrap().f_best, 5);
//! ```

pub mod buckets;
pub mod error;
pub mod graph;
pub mod moves;
pub mod oracle;
pub mod partition;
pub mod search;
pub mod solution;
pub mod state;
pub mod tabu;

pub use error::{Error, Result};
pub use graph::{parse_instance, Graph, GraphStats};
pub use moves::{combined_gain, psi, Move, Transfer};
pub use oracle::{exact_max_kcut, exact_max_kcut_guarded, ExactSolution};
pub use partition::{evaluate, random_initial, validate, Partition};
pub use search::{run_moh, DescentStrategy, EdgeSampling, Moh, SearchParams, SearchResult};
pub use solution::{check_solution, parse_solution, SolutionFile};
pub use state::SearchState;
pub use tabu::TabuList;
