use std::sync::Arc;

use async_trait::async_trait;

use super::{Corpus, Passage, Provider, ProviderError};

/// Serves every provider method from an in-memory [`Corpus`].
///
/// Unknown titles yield empty answers rather than errors.
#[derive(Debug, Clone)]
pub struct CorpusProvider {
    corpus: Arc<Corpus>,
}

impl CorpusProvider {
    pub fn new(corpus: Arc<Corpus>) -> Self {
        Self { corpus }
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }
}

#[async_trait]
impl Provider for CorpusProvider {
    fn name(&self) -> &str {
        "corpus"
    }

    async fn search(&self, term: &str, limit: usize) -> Result<Vec<String>, ProviderError> {
        Ok(self.corpus.search(term, limit))
    }

    async fn hit_count(&self, phrase: &str) -> Result<u64, ProviderError> {
        Ok(self.corpus.hit_count(phrase))
    }

    async fn cooccurrence_count(&self, a: &str, b: &str) -> Result<u64, ProviderError> {
        Ok(self.corpus.cooccurrence(a, b))
    }

    async fn article_count(&self) -> Result<u64, ProviderError> {
        Ok(self.corpus.article_count() as u64)
    }

    async fn full_text(&self, title: &str) -> Result<String, ProviderError> {
        Ok(self
            .corpus
            .article(title)
            .map(|a| a.text.clone())
            .unwrap_or_default())
    }

    async fn out_links(&self, title: &str) -> Result<Vec<String>, ProviderError> {
        Ok(self
            .corpus
            .article(title)
            .map(|a| a.links.clone())
            .unwrap_or_default())
    }

    async fn in_links(&self, title: &str, limit: usize) -> Result<Vec<String>, ProviderError> {
        Ok(self
            .corpus
            .in_links(title)
            .iter()
            .take(limit)
            .cloned()
            .collect())
    }

    async fn categories(&self, title: &str) -> Result<Vec<String>, ProviderError> {
        Ok(self
            .corpus
            .article(title)
            .map(|a| a.categories.clone())
            .unwrap_or_default())
    }

    async fn broader(&self, title: &str) -> Result<Vec<String>, ProviderError> {
        Ok(self
            .corpus
            .article(title)
            .map(|a| a.broader.clone())
            .unwrap_or_default())
    }

    async fn narrower(&self, title: &str, limit: usize) -> Result<Vec<String>, ProviderError> {
        Ok(self
            .corpus
            .article(title)
            .map(|a| a.narrower.iter().take(limit).cloned().collect())
            .unwrap_or_default())
    }

    async fn description(&self, title: &str) -> Result<String, ProviderError> {
        Ok(self
            .corpus
            .article(title)
            .map(|a| a.description.clone())
            .unwrap_or_default())
    }

    async fn thumbnail(&self, title: &str) -> Result<Option<String>, ProviderError> {
        Ok(self.corpus.article(title).and_then(|a| a.thumbnail.clone()))
    }

    async fn search_snippets(
        &self,
        a: &str,
        b: &str,
        limit: usize,
    ) -> Result<Vec<Passage>, ProviderError> {
        Ok(self.corpus.search_snippets(a, b, limit))
    }
}
