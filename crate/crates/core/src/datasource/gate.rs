use std::sync::Arc;

use async_trait::async_trait;
use tokio::sync::Semaphore;

use super::{ErrorKind, Passage, Provider, ProviderError};

/// Wraps a provider so every call holds a permit from a shared semaphore.
///
/// All providers of one pipeline share the same semaphore, which bounds the
/// number of backend requests in flight across concurrent queries.
pub struct GatedProvider {
    inner: Arc<dyn Provider>,
    gate: Arc<Semaphore>,
}

impl GatedProvider {
    pub fn new(inner: Arc<dyn Provider>, gate: Arc<Semaphore>) -> Self {
        Self { inner, gate }
    }

    async fn permit(&self) -> Result<tokio::sync::SemaphorePermit<'_>, ProviderError> {
        self.gate.acquire().await.map_err(|_| {
            ProviderError::new(
                self.inner.name(),
                ErrorKind::Network("request gate closed".into()),
            )
        })
    }
}

macro_rules! gated_impl {
    ($($method:ident($($arg:ident: $ty:ty),*) -> $ret:ty;)*) => {
        #[async_trait]
        impl Provider for GatedProvider {
            fn name(&self) -> &str {
                self.inner.name()
            }

            $(
                async fn $method(&self, $($arg: $ty),*) -> Result<$ret, ProviderError> {
                    let _permit = self.permit().await?;
                    self.inner.$method($($arg),*).await
                }
            )*
        }
    };
}

gated_impl! {
    search(term: &str, limit: usize) -> Vec<String>;
    hit_count(phrase: &str) -> u64;
    cooccurrence_count(a: &str, b: &str) -> u64;
    article_count() -> u64;
    full_text(title: &str) -> String;
    out_links(title: &str) -> Vec<String>;
    in_links(title: &str, limit: usize) -> Vec<String>;
    categories(title: &str) -> Vec<String>;
    broader(title: &str) -> Vec<String>;
    narrower(title: &str, limit: usize) -> Vec<String>;
    description(title: &str) -> String;
    thumbnail(title: &str) -> Option<String>;
    search_snippets(a: &str, b: &str, limit: usize) -> Vec<Passage>;
}
