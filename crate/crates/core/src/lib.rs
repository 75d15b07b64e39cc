//! Statistical toolkit for studying shadow banning on interaction
//! ego-graphs: graph statistics, dataset I/O, the uniform-bug hypothesis,
//! the SI contamination hypothesis, Monte-Carlo likelihoods, snowball
//! sampling and profile-feature classification.

pub mod epidemic;
pub mod features;
pub mod graph;
pub mod h0;
pub mod ingest;
pub mod likelihood;
pub mod rng;
pub mod sampler;
pub mod synth;

pub use graph::{BanProfile, BanType, EgoGraph, Node, NodeId, PopulationDataset};
