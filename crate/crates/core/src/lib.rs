//! Red/blue colorings of point pairs that keep the two induced networks
//! short, with exact brute-force oracles and instance generators.

pub mod cli;
pub mod error;
pub mod format;
pub mod generators;
pub mod graph;
pub mod instance;
pub mod oracle;
pub mod problem;
pub mod two_matching;
pub mod two_mst;
pub mod two_tsp;

pub use error::{Error, Result};
pub use instance::{Color, Coloring, DistanceMatrix, MetricKind, MetricSpace, PairInstance, PointId};
pub use problem::{solve, Objective, ProblemSpec, Solution, Structure};
