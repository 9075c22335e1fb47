//! Uniform access to encyclopedia backends.
//!
//! Three implementations sit behind [`Provider`]: the MediaWiki API, a DBpedia
//! SPARQL endpoint (categories and hierarchy only) and an offline [`Corpus`]
//! that answers every method deterministically from a JSON Lines file.

mod corpus;
mod dbpedia;
mod gate;
pub mod http;
mod index;
mod offline;
pub mod phrase;
pub mod replay;
mod wikipedia;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use corpus::{ingest_corpus, Corpus, CorpusArticle, CorpusError, CorpusStats};
pub use dbpedia::DbpediaProvider;
pub use gate::GatedProvider;
pub use http::{LiveConfig, ReqwestTransport, RetryPolicy, Transport};
pub use index::PhraseIndex;
pub use offline::CorpusProvider;
pub use wikipedia::WikipediaProvider;

/// A text passage returned by an AND-search over two phrases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Passage {
    pub title: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ErrorKind {
    #[error("network error: {0}")]
    Network(String),
    #[error("request timed out")]
    Timeout,
    #[error("HTTP status {0}")]
    Status(u16),
    #[error("rate limited")]
    RateLimited,
    #[error("malformed response: missing or invalid `{field}`")]
    Malformed { field: String },
    #[error("API error {code}: {info}")]
    Api { code: String, info: String },
    #[error("no recorded response: {0}")]
    Unrecorded(String),
    #[error("operation not supported by this backend")]
    Unsupported,
}

/// A backend failure, tagged with the endpoint that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{endpoint}: {kind}")]
pub struct ProviderError {
    pub endpoint: String,
    pub kind: ErrorKind,
}

impl ProviderError {
    pub fn new(endpoint: impl Into<String>, kind: ErrorKind) -> Self {
        Self {
            endpoint: endpoint.into(),
            kind,
        }
    }

    pub fn unsupported(backend: &str, operation: &str) -> Self {
        Self::new(format!("{backend}:{operation}"), ErrorKind::Unsupported)
    }

    /// Transient failures worth retrying: network trouble, timeouts, rate
    /// limiting and 5xx responses.
    pub fn is_retriable(&self) -> bool {
        match self.kind {
            ErrorKind::Network(_) | ErrorKind::Timeout | ErrorKind::RateLimited => true,
            ErrorKind::Status(code) => code >= 500,
            _ => false,
        }
    }
}

/// Everything the pipeline asks of a backend.
///
/// Partial backends leave methods at their default, which reports
/// [`ErrorKind::Unsupported`]. Implementations must be callable from many
/// tasks at once.
#[async_trait]
pub trait Provider: Send + Sync {
    fn name(&self) -> &str;

    /// Ranked article titles for a free-text term.
    async fn search(&self, _term: &str, _limit: usize) -> Result<Vec<String>, ProviderError> {
        Err(ProviderError::unsupported(self.name(), "search"))
    }

    /// Number of articles whose full text contains the phrase.
    async fn hit_count(&self, _phrase: &str) -> Result<u64, ProviderError> {
        Err(ProviderError::unsupported(self.name(), "hit_count"))
    }

    /// Number of articles containing both phrases.
    async fn cooccurrence_count(&self, _a: &str, _b: &str) -> Result<u64, ProviderError> {
        Err(ProviderError::unsupported(self.name(), "cooccurrence_count"))
    }

    /// Total number of articles. Constant for the lifetime of the provider.
    async fn article_count(&self) -> Result<u64, ProviderError> {
        Err(ProviderError::unsupported(self.name(), "article_count"))
    }

    async fn full_text(&self, _title: &str) -> Result<String, ProviderError> {
        Err(ProviderError::unsupported(self.name(), "full_text"))
    }

    async fn out_links(&self, _title: &str) -> Result<Vec<String>, ProviderError> {
        Err(ProviderError::unsupported(self.name(), "out_links"))
    }

    async fn in_links(&self, _title: &str, _limit: usize) -> Result<Vec<String>, ProviderError> {
        Err(ProviderError::unsupported(self.name(), "in_links"))
    }

    async fn categories(&self, _title: &str) -> Result<Vec<String>, ProviderError> {
        Err(ProviderError::unsupported(self.name(), "categories"))
    }

    async fn broader(&self, _title: &str) -> Result<Vec<String>, ProviderError> {
        Err(ProviderError::unsupported(self.name(), "broader"))
    }

    async fn narrower(&self, _title: &str, _limit: usize) -> Result<Vec<String>, ProviderError> {
        Err(ProviderError::unsupported(self.name(), "narrower"))
    }

    async fn description(&self, _title: &str) -> Result<String, ProviderError> {
        Err(ProviderError::unsupported(self.name(), "description"))
    }

    async fn thumbnail(&self, _title: &str) -> Result<Option<String>, ProviderError> {
        Err(ProviderError::unsupported(self.name(), "thumbnail"))
    }

    /// Passages from articles matching `a AND b`.
    async fn search_snippets(
        &self,
        _a: &str,
        _b: &str,
        _limit: usize,
    ) -> Result<Vec<Passage>, ProviderError> {
        Err(ProviderError::unsupported(self.name(), "search_snippets"))
    }
}
