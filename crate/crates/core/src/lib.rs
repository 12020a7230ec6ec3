//! Person mention time series and time-parameterized person similarity for
//! news corpora.
//!
//! The pipeline runs ingest ([`corpus`]) → mention extraction ([`ner`]) →
//! daily count series ([`timeseries`]) → windowed similarity
//! ([`similarity`]) → 2-D layout ([`projection`]).

pub mod corpus;
pub mod ner;
pub mod projection;
pub mod similarity;
pub mod store;
pub mod synth;
pub mod timeseries;

pub use corpus::{ArticleRecord, CleaningRules, CorpusStats, IngestReport};
pub use ner::{AliasTable, CountMode, Extractor, Gazetteer, MentionEvent, Stoplist};
pub use projection::{classical_mds, to_distance, DistanceMatrix, Embedding};
pub use similarity::{
    correlation_over_time, similarity_at, similarity_matrix, CorrelationSeries, Similarity, SimilarityMatrix,
};
pub use store::CorpusStore;
pub use timeseries::{DateRange, Method, PersonSeries, SeriesIndex, WindowSpec, DEFAULT_WINDOW};
