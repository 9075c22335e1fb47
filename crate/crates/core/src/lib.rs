//! Related-entity exploration over Wikipedia-style encyclopedias.
//!
//! A search term is resolved to an article, candidate entities are gathered
//! from its links and category hierarchy, each candidate is scored by a
//! normalized co-occurrence distance over full-text hit counts, and the
//! survivors are enriched with categories, thumbnails and snippets.

pub mod backend;
pub mod datasource;
pub mod enrich;
pub mod harvest;
pub mod model;
pub mod output;
pub mod pipeline;
pub mod relatedness;

pub use backend::{build_explorer, BackendError, BackendSpec};
pub use model::{
    CategoryCount, Concept, ExplorationResult, Field, FieldSet, HitCounts, LanguageCode,
    RelatedEntity, RelatednessScore, RelationOrigin, Snippet, SnippetTrack,
};
pub use output::Format;
pub use pipeline::{ExploreError, Explorer, PipelineConfig};
