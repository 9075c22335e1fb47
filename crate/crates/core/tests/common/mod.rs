#![allow(dead_code)]

pub mod oracle;

use std::collections::HashSet;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use async_trait::async_trait;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sere_core::datasource::{
    ingest_corpus, Corpus, CorpusProvider, ErrorKind, Passage, Provider, ProviderError,
};
use sere_core::LanguageCode;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn demo_path() -> PathBuf {
    fixture("demo.jsonl")
}

pub fn demo_corpus() -> Arc<Corpus> {
    Arc::new(ingest_corpus(&demo_path(), LanguageCode::EN).unwrap())
}

pub fn demo_provider() -> Arc<CorpusProvider> {
    Arc::new(CorpusProvider::new(demo_corpus()))
}

const WORDS: &[&str] = &[
    "euro", "merkel", "kohl", "bank", "crisis", "union", "berlin", "party", "state", "debt",
    "europe", "chancellor", "german", "market", "city", "law", "eu", "ro", "an", "a",
];

/// A deterministic random corpus as JSON Lines. Texts mix words from a
/// small vocabulary with case changes, punctuation, glued tokens and odd
/// whitespace, so boundary handling gets exercised.
pub fn random_corpus(seed: u64, articles: usize) -> String {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = String::new();
    for i in 0..articles {
        let len = rng.gen_range(0..60);
        let mut text = String::new();
        for _ in 0..len {
            let mut word = WORDS[rng.gen_range(0..WORDS.len())].to_string();
            if rng.gen_bool(0.2) {
                word = word.to_uppercase();
            }
            if rng.gen_bool(0.1) {
                word.push_str(WORDS[rng.gen_range(0..WORDS.len())]);
            }
            text.push_str(&word);
            text.push_str(match rng.gen_range(0..8) {
                0 => ". ",
                1 => ", ",
                2 => "  ",
                3 => "\n",
                4 => "-",
                _ => " ",
            });
        }
        let links: Vec<String> = (0..rng.gen_range(0..5))
            .map(|_| format!("Article {}", rng.gen_range(0..articles)))
            .collect();
        let line = serde_json::json!({
            "title": format!("Article {i}"),
            "text": text,
            "links": links,
            "categories": [],
        });
        out.push_str(&line.to_string());
        out.push('\n');
    }
    out
}

/// A one- to three-word phrase over the same vocabulary.
pub fn random_phrase(rng: &mut StdRng) -> String {
    let n = rng.gen_range(1..=3);
    let words: Vec<String> = (0..n)
        .map(|_| {
            let w = WORDS[rng.gen_range(0..WORDS.len())];
            if rng.gen_bool(0.3) {
                w.to_uppercase()
            } else {
                w.to_string()
            }
        })
        .collect();
    words.join(if rng.gen_bool(0.2) { "  " } else { " " })
}

/// Wraps a provider, tracking how many calls are in flight at once and
/// optionally failing selected operations.
pub struct Instrumented {
    inner: Arc<dyn Provider>,
    delay: Duration,
    failing: Mutex<HashSet<&'static str>>,
    in_flight: AtomicUsize,
    peak: AtomicUsize,
    calls: AtomicUsize,
}

impl Instrumented {
    pub fn new(inner: Arc<dyn Provider>, delay: Duration) -> Self {
        Self {
            inner,
            delay,
            failing: Mutex::new(HashSet::new()),
            in_flight: AtomicUsize::new(0),
            peak: AtomicUsize::new(0),
            calls: AtomicUsize::new(0),
        }
    }

    pub fn fail(&self, operation: &'static str) {
        self.failing.lock().unwrap().insert(operation);
    }

    pub fn peak(&self) -> usize {
        self.peak.load(Ordering::SeqCst)
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    async fn enter(&self, operation: &'static str) -> Result<(), ProviderError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let now = self.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        self.peak.fetch_max(now, Ordering::SeqCst);
        if !self.delay.is_zero() {
            tokio::time::sleep(self.delay).await;
        } else {
            tokio::task::yield_now().await;
        }
        if self.failing.lock().unwrap().contains(operation) {
            self.in_flight.fetch_sub(1, Ordering::SeqCst);
            return Err(ProviderError::new(
                format!("instrumented:{operation}"),
                ErrorKind::Status(503),
            ));
        }
        Ok(())
    }

    fn leave(&self) {
        self.in_flight.fetch_sub(1, Ordering::SeqCst);
    }
}

macro_rules! instrumented_impl {
    ($($method:ident($($arg:ident: $ty:ty),*) -> $ret:ty;)*) => {
        #[async_trait]
        impl Provider for Instrumented {
            fn name(&self) -> &str {
                self.inner.name()
            }

            $(
                async fn $method(&self, $($arg: $ty),*) -> Result<$ret, ProviderError> {
                    self.enter(stringify!($method)).await?;
                    let out = self.inner.$method($($arg),*).await;
                    self.leave();
                    out
                }
            )*
        }
    };
}

instrumented_impl! {
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
