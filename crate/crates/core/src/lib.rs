//! Yearly directed trade networks, node influence indicators, and
//! robustness of those networks under targeted and random node removal.
//!
//! The pipeline runs in stages, each in its own module:
//!
//! * [`ingest`] parses delimiter-separated trade records and turns them into
//!   per-year sets of directed exporter → importer edges.
//! * [`graph`] holds the immutable [`TradeNetwork`] plus connectivity and
//!   shortest-path primitives.
//! * [`centrality`] and [`community`] compute the twelve influence
//!   indicators and deterministic rankings.
//! * [`attack`] removes nodes by ranking (or at random) and measures the
//!   giant component curve and its robustness summary.
//! * [`analysis`] correlates indicators and aggregates them over
//!   organisations and years.

pub mod analysis;
pub mod attack;
pub mod centrality;
pub mod community;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod synthetic;

pub use error::{Error, Result};
pub use graph::TradeNetwork;
