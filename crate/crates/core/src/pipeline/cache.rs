use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use lru::LruCache;

use crate::model::{ExplorationResult, FieldSet, LanguageCode};

/// Time source for cache expiry.
pub trait Clock: Send + Sync {
    fn now(&self) -> Instant;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> Instant {
        Instant::now()
    }
}

/// A clock that only moves when told to.
#[derive(Debug)]
pub struct ManualClock(Mutex<Instant>);

impl ManualClock {
    pub fn new() -> Self {
        Self(Mutex::new(Instant::now()))
    }

    pub fn advance(&self, by: Duration) {
        *self.0.lock().unwrap() += by;
    }
}

impl Default for ManualClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for ManualClock {
    fn now(&self) -> Instant {
        *self.0.lock().unwrap()
    }
}

/// Identifies a cached result: language, resolved title, selected fields.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub lang: LanguageCode,
    pub query: String,
    pub fields: FieldSet,
}

impl CacheKey {
    pub fn new(lang: LanguageCode, query: impl Into<String>, fields: FieldSet) -> Self {
        Self {
            lang,
            query: query.into(),
            fields,
        }
    }

    /// Injective text form: equal keys serialize to equal bytes and vice versa.
    pub fn serialize(&self) -> String {
        serde_json::json!([self.lang.as_str(), self.query, self.fields.to_csv()]).to_string()
    }
}

/// LRU cache of exploration results with a time-to-live.
pub struct ResultCache {
    entries: Mutex<LruCache<CacheKey, (Instant, Arc<ExplorationResult>)>>,
    ttl: Duration,
    clock: Arc<dyn Clock>,
}

impl ResultCache {
    pub fn new(capacity: NonZeroUsize, ttl: Duration, clock: Arc<dyn Clock>) -> Self {
        Self {
            entries: Mutex::new(LruCache::new(capacity)),
            ttl,
            clock,
        }
    }

    /// Returns the entry if it is younger than the TTL; expired entries are
    /// removed.
    pub fn get(&self, key: &CacheKey) -> Option<Arc<ExplorationResult>> {
        let now = self.clock.now();
        let mut entries = self.entries.lock().unwrap();
        let (stored_at, value) = entries.get(key)?;
        if now.saturating_duration_since(*stored_at) < self.ttl {
            Some(Arc::clone(value))
        } else {
            entries.pop(key);
            None
        }
    }

    pub fn put(&self, key: CacheKey, value: Arc<ExplorationResult>) {
        let now = self.clock.now();
        self.entries.lock().unwrap().put(key, (now, value));
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, key: &CacheKey) -> bool {
        self.entries.lock().unwrap().contains(key)
    }
}
