//! Structure track: degree-featurized GIN-style graph classifier with
//! configurable neighbor pooling and graph readout.

mod batch;
mod config;
mod model;
mod train;

pub use batch::{degree_features, GraphBatch};
pub use config::{GnnConfig, Pool};
pub use model::{gnn_forward, ForwardCache, GnnModel, Mode, NUM_CLASSES};
pub use train::{
    expand_grid, gnn_train, grid_search, predict_proba, train_on_parts, EpochRecord, GnnFit, GnnRun, Grid, GridCell,
    GridOutcome,
};
