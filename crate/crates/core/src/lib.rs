//! Easy/hard splitting of reading comprehension datasets.
//!
//! Items are scored on full and truncated questions, profiled by lexical
//! overlap between question and context sentences, and partitioned into an
//! easy and a hard subset. Annotation sampling, label statistics and report
//! rendering sit on top.

pub mod annotate;
pub mod corpus;
pub mod error;
pub mod heuristics;
pub mod metrics;
pub mod partition;
pub mod predictions;
pub mod provenance;
pub mod report;
pub mod stats;
pub mod textproc;

pub use corpus::{CanonicalItem, Dataset, ItemFlag, QuestionStyle, Variant};
pub use error::{Error, Result};
pub use heuristics::{OverlapMode, SimilarityProfile, SpanLimit, SpanProjection, TruncationSpec};
pub use metrics::{ItemScore, Metric, Prediction, Score, DEFAULT_BETA};
pub use partition::{HardMetric, Partition, Subset, SubsetAssignment};
pub use predictions::{Aggregate, Evaluation, MissingPolicy, PredictionSet};
pub use provenance::Provenance;
pub use stats::Ratio;
