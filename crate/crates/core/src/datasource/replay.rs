//! Recorded-response transport for exercising the live clients offline.
//!
//! A fixture file holds one exchange object or an array of them:
//!
//! ```json
//! {
//!   "url": "https://en.wikipedia.org/w/api.php",
//!   "params": {"action": "query", "list": "search", "srsearch": "Angela Merkel"},
//!   "status": 200,
//!   "body": {"query": {"search": [{"title": "Angela Merkel"}]}}
//! }
//! ```
//!
//! `body` may be any JSON value (served re-serialized) or replaced by
//! `body_text` for raw text. An exchange with `"error": "connect"` or
//! `"error": "timeout"` fails at the transport level instead. A request
//! matches an exchange when the URL and the full parameter map are equal.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use async_trait::async_trait;
use serde::Deserialize;
use serde_json::Value;

use super::http::{HttpReply, Transport, TransportError};

#[derive(Debug, Clone, Deserialize)]
pub struct Exchange {
    pub url: String,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    #[serde(default = "ok_status")]
    pub status: u16,
    #[serde(default)]
    pub body: Option<Value>,
    #[serde(default)]
    pub body_text: Option<String>,
    #[serde(default)]
    pub error: Option<String>,
}

fn ok_status() -> u16 {
    200
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FixtureFile {
    Many(Vec<Exchange>),
    One(Exchange),
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid fixture {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
}

/// Serves recorded exchanges and counts how often each one was replayed.
#[derive(Debug, Default)]
pub struct ReplayTransport {
    exchanges: Vec<Exchange>,
    hits: Vec<AtomicUsize>,
    misses: AtomicUsize,
}

impl ReplayTransport {
    pub fn new(exchanges: Vec<Exchange>) -> Self {
        let hits = exchanges.iter().map(|_| AtomicUsize::new(0)).collect();
        Self {
            exchanges,
            hits,
            misses: AtomicUsize::new(0),
        }
    }

    /// Loads every `*.json` file in a directory, in file-name order.
    pub fn from_dir(dir: &Path) -> Result<Self, ReplayError> {
        let io = |source| ReplayError::Io {
            path: dir.display().to_string(),
            source,
        };
        let mut files: Vec<_> = std::fs::read_dir(dir)
            .map_err(io)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        files.sort();
        let mut exchanges = Vec::new();
        for path in files {
            exchanges.extend(Self::load_file(&path)?);
        }
        Ok(Self::new(exchanges))
    }

    pub fn load_file(path: &Path) -> Result<Vec<Exchange>, ReplayError> {
        let text = std::fs::read_to_string(path).map_err(|source| ReplayError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let parsed: FixtureFile = serde_json::from_str(&text).map_err(|source| ReplayError::Json {
            path: path.display().to_string(),
            source,
        })?;
        Ok(match parsed {
            FixtureFile::Many(list) => list,
            FixtureFile::One(one) => vec![one],
        })
    }

    /// Total replays across all exchanges.
    pub fn calls(&self) -> usize {
        self.hits.iter().map(|h| h.load(Ordering::SeqCst)).sum()
    }

    /// Requests that matched no exchange.
    pub fn misses(&self) -> usize {
        self.misses.load(Ordering::SeqCst)
    }
}

#[async_trait]
impl Transport for ReplayTransport {
    async fn get(&self, url: &str, params: &[(String, String)]) -> Result<HttpReply, TransportError> {
        let wanted: BTreeMap<&str, &str> = params
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect();
        let found = self.exchanges.iter().position(|ex| {
            ex.url == url
                && ex.params.len() == wanted.len()
                && ex
                    .params
                    .iter()
                    .all(|(k, v)| wanted.get(k.as_str()) == Some(&v.as_str()))
        });
        let Some(i) = found else {
            self.misses.fetch_add(1, Ordering::SeqCst);
            return Err(TransportError::Unrecorded(format!("GET {url} {wanted:?}")));
        };
        self.hits[i].fetch_add(1, Ordering::SeqCst);
        let ex = &self.exchanges[i];
        match ex.error.as_deref() {
            Some("timeout") => return Err(TransportError::Timeout),
            Some(other) => return Err(TransportError::Connect(other.to_string())),
            None => {}
        }
        let body = match (&ex.body_text, &ex.body) {
            (Some(text), _) => text.clone(),
            (None, Some(value)) => value.to_string(),
            (None, None) => String::new(),
        };
        Ok(HttpReply {
            status: ex.status,
            body,
        })
    }
}
