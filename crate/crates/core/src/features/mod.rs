//! Bag-of-words features and precomputed embedding tables.

mod embeddings;
mod vocab;

pub use embeddings::EmbeddingTable;
pub use vocab::{vectorize, SparseVector, Vocabulary};
