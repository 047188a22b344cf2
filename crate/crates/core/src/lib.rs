//! Corpus distillation for fuzzing seed corpora.
//!
//! The pipeline is: load a corpus manifest, extract per-seed feature vectors
//! (token TF-IDF, AST 3-grams, CFG 3-grams or ingested embeddings), order the
//! corpus with one of the selection strategies, then keep a budgeted prefix
//! of that order as the initial seed set. The [`analysis`] module covers the
//! post-campaign side: crash message deduplication, overlap reports and
//! repetition averaging.

pub mod analysis;
pub mod cli;
pub mod corpus;
pub mod coverage;
pub mod error;
pub mod features;
pub mod io;
pub mod registry;
pub mod rng;
pub mod selection;

pub use corpus::{budget_size, load_manifest, save_subset, Corpus, SeedProgram};
pub use error::{Error, Result};
pub use features::{FeatureKind, FeatureVector};
pub use registry::DimensionRegistry;
pub use rng::TieRng;
pub use selection::{Method, SelectionOrder};
