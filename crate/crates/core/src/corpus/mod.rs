//! Tweet and propagation-graph datasets: loading, cleaning, splitting and
//! majority-class partitioning.

mod graph;
mod labels;
mod split;
mod text;
mod tweets;

pub use graph::{format_graphs, load_graphs, parse_graphs, save_graphs, PropagationGraph, MAX_NODES};
pub use labels::{BinaryLabel, Task, TernaryLabel};
pub use split::{partition_indices, partition_majority, split_dataset, SplitSpec};
pub use text::{clean_text, tokenize_all, StopWords, TokenDoc};
pub use tweets::{format_tweets, load_tweets, parse_tweets, save_tweets, LabeledTweet};
