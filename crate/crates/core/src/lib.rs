//! Expected hitting times of simple and frustrated random walks on weighted
//! hypergraphs, used as node-to-node distances.
//!
//! ```
//! use hyperwalk::{expected_hitting_times, Hypergraph, Scenario, SolveOptions, TransitionKernel};
//!
//! let h = Hypergraph::from_hyperedges(&[
//!     vec![(0, 1.0), (1, 1.0), (2, 1.0)],
//!     vec![(2, 1.0), (3, 1.0)],
//!     vec![(3, 1.0), (4, 1.0)],
//! ])?;
//! let kernel = TransitionKernel::new(&h, Scenario::Frustrated)?;
//! let result = expected_hitting_times(&kernel, 3, &SolveOptions::default())?;
//! assert!((result.times[0] - 35.0).abs() < 1e-8);
//! # Ok::<(), hyperwalk::Error>(())
//! ```

pub mod error;
pub mod fixtures;
pub mod generate;
pub mod hitting;
pub mod hypergraph;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod montecarlo;
pub mod oracle;
pub mod par;
pub mod ranking;

pub use error::{Error, Result};
pub use hitting::{
    expected_hitting_times, find_adherents, hitting_time_distribution, hitting_times_for_targets, HittingTimeDistribution,
    HittingTimeResult, TargetSystem,
};
pub use hypergraph::{Hypergraph, Incidence};
pub use kernel::{Affinities, Scenario, TransitionKernel};
pub use linalg::{CsrMatrix, Method, SolveOptions, SolveReport};
pub use montecarlo::{sample_paths, simulate_hitting_time, HittingEstimate, WalkConfig};
pub use oracle::{generating_function_oracle, GeneratingFunction};
pub use par::Execution;
pub use ranking::{rank_neighbors, spearman, RankedNeighbors};
