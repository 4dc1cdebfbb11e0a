//! Information dissemination in dynamic networks.
//!
//! A dynamic network is a sequence of directed communication graphs on `[n]`,
//! each carrying all self-loops. Relaying messages over consecutive rounds is
//! the graph product, and the dynamic radius is the first round after which
//! some node has reached everyone. This crate provides:
//!
//! - [`graph`]: communication graphs, products, nonsplit / rooted / broadcaster predicates
//! - [`pattern`]: communication patterns and deterministic generators
//! - [`covering`]: the covering relation with replayable certificates, and the
//!   constructive `O(log log n)` center pipeline for nonsplit patterns
//! - [`radius`]: broadcast times, dynamic radius, the consensus lower-bound witness
//!   and the rooted-product check
//! - [`experiment`] and [`cli`]: campaigns, CSV output and the command-line surface

pub mod cli;
pub mod covering;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod nodeset;
pub mod pattern;
pub mod radius;

pub use error::{Error, Result};
pub use graph::{CommunicationGraph, StaticRadius};
pub use nodeset::NodeSet;
pub use pattern::{AsyncAdversaryConfig, AsyncPolicy, CenterSchedule, CommunicationPattern, Horizon};

/// 1-based node id.
pub type NodeId = usize;
/// Round index or time; round `t` lies between time `t - 1` and time `t`.
pub type Round = usize;
