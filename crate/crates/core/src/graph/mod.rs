//! Graphs, 1-WL refinement, random message passing, and their comparison.

mod compare;
mod corpus;
mod model;
mod mpnn;
mod tudataset;
mod wl;

pub use compare::{compare_colorings, normalize_mean_norm, ColoringComparison, DEFAULT_THRESHOLD};
pub use corpus::{
    connected_graphs, corpus_csv, corpus_separation_experiment, wl_twin_pairs, CorpusExperiment, CorpusRow,
    CORPUS_CSV_HEADER,
};
pub use model::Graph;
pub use mpnn::{mpnn_forward, sample_mpnn, Affine, Aggregation, MPNNParams};
pub use tudataset::{parse_tudataset, parse_tudataset_text, tudataset_paths};
pub use wl::{wl_equivalent, wl_refine, WLColoring};
