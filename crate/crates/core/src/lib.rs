//! Statistical significance scores for node groups in graphs.

pub mod baseline;
pub mod cli;
pub mod binomial;
pub mod detect;
pub mod eval;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod group_graph;
pub mod membership;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{Graph, GraphBuilder, Group, GroupStats, NodeId};
