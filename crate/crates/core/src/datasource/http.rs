//! HTTP plumbing for the live backends.
//!
//! Requests go through the [`Transport`] trait so tests can substitute the
//! recorded responses of [`super::replay::ReplayTransport`] for the network.

use std::sync::Arc;
use std::time::Duration;

use async_trait::async_trait;
use serde_json::Value;
use thiserror::Error;

use super::{ErrorKind, ProviderError};
use crate::model::LanguageCode;

pub const DEFAULT_USER_AGENT: &str =
    concat!("sere/", env!("CARGO_PKG_VERSION"), " (semantic relatedness explorer)");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpReply {
    pub status: u16,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("connection failed: {0}")]
    Connect(String),
    #[error("request timed out")]
    Timeout,
    #[error("no recorded response for {0}")]
    Unrecorded(String),
}

/// Performs one HTTP GET with query parameters.
#[async_trait]
pub trait Transport: Send + Sync {
    async fn get(&self, url: &str, params: &[(String, String)]) -> Result<HttpReply, TransportError>;
}

/// The real network transport.
#[derive(Debug, Clone)]
pub struct ReqwestTransport {
    client: reqwest::Client,
}

impl ReqwestTransport {
    pub fn new(user_agent: &str, timeout: Duration) -> Result<Self, reqwest::Error> {
        let client = reqwest::Client::builder()
            .user_agent(user_agent)
            .timeout(timeout)
            .build()?;
        Ok(Self { client })
    }
}

#[async_trait]
impl Transport for ReqwestTransport {
    async fn get(&self, url: &str, params: &[(String, String)]) -> Result<HttpReply, TransportError> {
        let classify = |e: reqwest::Error| {
            if e.is_timeout() {
                TransportError::Timeout
            } else {
                TransportError::Connect(e.to_string())
            }
        };
        let response = self
            .client
            .get(url)
            .query(params)
            .send()
            .await
            .map_err(classify)?;
        let status = response.status().as_u16();
        let body = response.text().await.map_err(classify)?;
        Ok(HttpReply { status, body })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    /// Additional attempts after the first one.
    pub max_retries: u32,
    /// Delay before the first retry; doubles on each further retry.
    pub backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_retries: 2,
            backoff: Duration::from_millis(250),
        }
    }
}

impl RetryPolicy {
    pub fn none() -> Self {
        Self {
            max_retries: 0,
            backoff: Duration::ZERO,
        }
    }
}

/// Settings shared by the live Wikipedia and DBpedia clients.
#[derive(Debug, Clone)]
pub struct LiveConfig {
    pub user_agent: String,
    pub timeout: Duration,
    pub retry: RetryPolicy,
    /// Upper bound on backlinks fetched per concept.
    pub inlink_cap: usize,
    /// Overrides `https://<lang>.wikipedia.org/w/api.php`.
    pub wikipedia_api: Option<String>,
    /// Overrides the per-language DBpedia SPARQL endpoint.
    pub dbpedia_sparql: Option<String>,
}

impl Default for LiveConfig {
    fn default() -> Self {
        Self {
            user_agent: DEFAULT_USER_AGENT.to_string(),
            timeout: Duration::from_secs(10),
            retry: RetryPolicy::default(),
            inlink_cap: 500,
            wikipedia_api: None,
            dbpedia_sparql: None,
        }
    }
}

impl LiveConfig {
    /// Defaults overridden by `SERE_USER_AGENT`, `SERE_HTTP_TIMEOUT_SECS`,
    /// `SERE_WIKIPEDIA_API` and `SERE_DBPEDIA_SPARQL`.
    pub fn from_env() -> Self {
        let mut config = Self::default();
        if let Ok(agent) = std::env::var("SERE_USER_AGENT") {
            if !agent.trim().is_empty() {
                config.user_agent = agent;
            }
        }
        if let Some(secs) = std::env::var("SERE_HTTP_TIMEOUT_SECS")
            .ok()
            .and_then(|s| s.parse::<u64>().ok())
        {
            config.timeout = Duration::from_secs(secs.max(1));
        }
        config.wikipedia_api = std::env::var("SERE_WIKIPEDIA_API").ok();
        config.dbpedia_sparql = std::env::var("SERE_DBPEDIA_SPARQL").ok();
        config
    }

    pub fn wikipedia_endpoint(&self, lang: LanguageCode) -> String {
        self.wikipedia_api
            .clone()
            .unwrap_or_else(|| format!("https://{lang}.wikipedia.org/w/api.php"))
    }

    pub fn dbpedia_endpoint(&self, lang: LanguageCode) -> String {
        self.dbpedia_sparql.clone().unwrap_or_else(|| match lang {
            LanguageCode::EN => "https://dbpedia.org/sparql".to_string(),
            other => format!("https://{other}.dbpedia.org/sparql"),
        })
    }

    pub fn dbpedia_resource_base(lang: LanguageCode) -> String {
        match lang {
            LanguageCode::EN => "http://dbpedia.org/resource/".to_string(),
            other => format!("http://{other}.dbpedia.org/resource/"),
        }
    }
}

/// GETs JSON documents from one endpoint with retries.
#[derive(Clone)]
pub(crate) struct JsonClient {
    transport: Arc<dyn Transport>,
    url: String,
    retry: RetryPolicy,
}

impl JsonClient {
    pub(crate) fn new(transport: Arc<dyn Transport>, url: String, retry: RetryPolicy) -> Self {
        Self {
            transport,
            url,
            retry,
        }
    }

    pub(crate) fn url(&self) -> &str {
        &self.url
    }

    /// `operation` labels the endpoint in errors.
    pub(crate) async fn get(
        &self,
        operation: &str,
        params: &[(String, String)],
    ) -> Result<Value, ProviderError> {
        let endpoint = format!("{} [{operation}]", self.url);
        let mut attempt = 0;
        loop {
            match self.attempt(&endpoint, params).await {
                Ok(value) => return Ok(value),
                Err(err) if err.is_retriable() && attempt < self.retry.max_retries => {
                    let delay = self.retry.backoff * 2u32.saturating_pow(attempt);
                    log::debug!("retrying {endpoint} after {err} (attempt {})", attempt + 1);
                    attempt += 1;
                    if !delay.is_zero() {
                        tokio::time::sleep(delay).await;
                    }
                }
                Err(err) => return Err(err),
            }
        }
    }

    async fn attempt(
        &self,
        endpoint: &str,
        params: &[(String, String)],
    ) -> Result<Value, ProviderError> {
        let fail = |kind| ProviderError::new(endpoint, kind);
        let reply = self
            .transport
            .get(&self.url, params)
            .await
            .map_err(|e| {
                fail(match e {
                    TransportError::Connect(msg) => ErrorKind::Network(msg),
                    TransportError::Timeout => ErrorKind::Timeout,
                    TransportError::Unrecorded(msg) => ErrorKind::Unrecorded(msg),
                })
            })?;
        match reply.status {
            200..=299 => {}
            429 => return Err(fail(ErrorKind::RateLimited)),
            code => return Err(fail(ErrorKind::Status(code))),
        }
        serde_json::from_str(&reply.body).map_err(|_| {
            fail(ErrorKind::Malformed {
                field: "body".into(),
            })
        })
    }
}

pub(crate) fn params<const N: usize>(pairs: [(&str, &str); N]) -> Vec<(String, String)> {
    pairs
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}
