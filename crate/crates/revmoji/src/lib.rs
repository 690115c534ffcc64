//! Emoji-aware analysis of code review comments.
//!
//! The pipeline normalizes every emoji representation found in review
//! comments (glyphs, `:shortcodes:`, emoticons, codepoint notation),
//! scores verbal and non-verbal sentiment through five channels, extracts
//! hand-crafted features and pre-trained embeddings, and measures with a
//! Random Forest under stratified cross-validation whether emoji signals
//! improve usefulness prediction.
//!
//! Modules follow the pipeline order:
//!
//! * [`codec`] — emoji extraction and normalization
//! * [`sentiment`] — sentiment channels and correlation analysis
//! * [`embeddings`] — word/emoji vector tables and comment embeddings
//! * [`features`] — feature vectors and design matrices
//! * [`classifier`] — Random Forest, cross-validation, metrics, deltas
//! * [`augmentation`] — rule-driven emoji suggestion and agreement scoring
//! * [`corpus`] — dataset ingestion, subsets, persistence
//! * [`resources`] — loaded resource bundle shared by the pipeline
//! * [`runner`] — experiment drivers behind the command-line interface

pub mod augmentation;
pub mod classifier;
pub mod codec;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod features;
pub mod resources;
pub mod sentiment;
pub mod tokenize;

pub use classifier::{evaluate_cv, train_forest, EvalMetrics, ForestParams, RandomForestModel};
pub use codec::{normalize_comment, CodecTables, EmojiForm, EmojiToken, NormalizedComment};
pub use corpus::{load_dataset, write_dataset, CommentRecord, Dataset, DatasetFormat};
pub use error::{Error, Result};
pub use features::{build_design_matrix, DesignMatrix, FeatureVector, MatrixMode};
pub use resources::{ResourceBundle, ResourcePaths};
pub use sentiment::{compute_channels, pearson, SentimentChannels, SentimentResources};
