//! Topic modeling by clustering pre-trained word embeddings.
//!
//! The pieces compose in pipeline order:
//!
//! 1. [`corpus`] tokenizes documents and builds the train-split vocabulary.
//! 2. [`embeddings`] loads vectors for that vocabulary, optionally reduced by PCA.
//! 3. [`weighting`] scores types by corpus frequency (tf, tf-idf, tf-df).
//! 4. [`clustering`] fits weighted k-means, spherical k-means, k-medoids or a GMM.
//! 5. [`topics`] takes the top words per cluster and optionally reranks them.
//! 6. [`evaluation`] scores topics by NPMI on the test split.
//!
//! [`pipeline`] runs all of it from a [`pipeline::RunConfig`], and [`bench`]
//! measures how clustering time scales.

pub mod bench;
pub mod clustering;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod evaluation;
pub mod matrix;
pub mod pipeline;
pub mod topics;
pub mod weighting;

pub use clustering::{fit, ClusterKind, ClusterModel, FitParams};
pub use corpus::{build_vocabulary, Document, Split, Stopwords, Vocabulary};
pub use embeddings::{EmbeddingFormat, EmbeddingTable};
pub use error::{Error, Result};
pub use evaluation::{build_index, evaluate_run, npmi, NpmiReport, WindowMode};
pub use matrix::Matrix;
pub use pipeline::{run, RunConfig};
pub use topics::{extract_top_j, jaccard, rerank, RerankScheme, TopicSet};
pub use weighting::{compute_weights, WeightScheme, WeightVector};
