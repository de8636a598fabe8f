//! Community extraction for undirected weighted networks.
//!
//! Instead of partitioning every node into a community, this crate pulls out
//! one tight community at a time: the extraction criteria reward many edges
//! inside the candidate set and few edges to the rest of the network, and
//! ignore edges among the remainder entirely. Whatever is left after the
//! stopping rule fires is classified as background.
//!
//! The toolkit also carries the partition baselines (two-way and sequential
//! K-way modularity, leading-eigenvector splits), a stochastic block-model
//! generator, evaluation metrics (confusion matrices, PPV/NPV), population
//! criterion verifiers for the consistency theory, and a simulation harness.
//!
//! The numeric core is generic over [`scalar::Real`] (`f32` or `f64`);
//! concrete aliases for the common `f64` case live at the crate root.

pub mod blockmodel;
pub mod criteria;
pub mod error;
pub mod evaluation;
pub mod graph;
pub mod harness;
pub mod partition;
pub mod pipeline;
pub mod scalar;
pub mod seed;
pub mod tabu;

pub use error::{Error, Result};
pub use scalar::Real;

/// Graph over `f64` weights, the default scalar.
pub type Graph64 = graph::Graph<f64>;
/// Graph over `f32` weights.
pub type Graph32 = graph::Graph<f32>;
/// Subset statistics over `f64`.
pub type SubsetStats64 = criteria::SubsetStats<f64>;
/// Search result over `f64`.
pub type SearchResult64 = tabu::SearchResult<f64>;
/// Extraction result over `f64`.
pub type ExtractionResult64 = pipeline::ExtractionResult<f64>;
/// Block-model parameters over `f64`.
pub type BlockModelParams64 = blockmodel::BlockModelParams<f64>;
