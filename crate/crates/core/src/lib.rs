//! Misinformation detection on tweets: a bag-of-words / embedding text
//! track trained as a majority-class resampling ensemble with late fusion,
//! and a structure track that classifies propagation graphs with a
//! GIN-style message-passing network.

pub mod corpus;
pub mod ensemble;
pub mod error;
pub mod features;
pub mod gnn;
pub mod metrics;
pub mod nn;
pub mod persist;
pub mod predictions;
pub mod rng;
pub mod synth;
pub mod text_models;

pub use error::{Error, Result};
