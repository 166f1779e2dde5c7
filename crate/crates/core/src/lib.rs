//! Experiment design for causal structure learning.
//!
//! Given an essential graph (the observational Markov-equivalence-class
//! representation of a causal DAG) and a budget of `k` single-variable
//! interventions, pick the targets that orient the most edges, either on
//! average over the class or in the worst case.

pub mod bench;
pub mod cli;
pub mod design;
pub mod error;
pub mod graph;
pub mod mec;
pub mod orient;
pub mod par;
pub mod tree;

pub use error::{Error, Result};
pub use graph::{chord4, Dag, Pdag, TargetSet, VertexSet};
