//! Lexicostatistical distances, divergence dating, trees and embeddings for
//! comparative word lists.

pub mod chronology;
pub mod condensed;
pub mod distance;
pub mod edit_distance;
pub mod eigen;
pub mod error;
pub mod geometry;
pub mod lexicon;
pub mod phylogeny;
pub mod plot;

pub use chronology::{
    calibrate_tau, date_from_variance, random_ancestor, random_word_baseline, simulate_divergence,
    time_from_distance, distance_from_time, time_matrix, CalendarYear, ChronologyConfig,
    ChronologyModel, LogarithmicRule, TimeMatrix, TimeRule, WordGenerator,
};
pub use condensed::{pair_count, pair_index, Condensed};
pub use distance::{distance_matrix, language_distance, DistanceMatrix, DistanceOptions};
pub use edit_distance::{levenshtein, word_distance, WordDistance};
pub use error::{Error, Result};
pub use geometry::{
    embed, radial_variance, residual_ratio, spherical, ClassicalScaling, Embedding,
    EmbeddingMethod, SphericalPoint,
};
pub use lexicon::{
    normalize_word, parse_corpus, Corpus, Lexicon, MeaningId, NormalizationPolicy, Word,
};
pub use phylogeny::{group_assignments, partitions_at_depth, upgma, Phylogeny};
