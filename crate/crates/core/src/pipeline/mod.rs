//! End-to-end orchestration: resolve, harvest, score, enrich, rank, cache.

mod cache;

use std::collections::BTreeMap;
use std::num::NonZeroUsize;
use std::sync::Arc;
use std::time::Duration;

use futures::stream::{self, StreamExt};
use thiserror::Error;
use tokio::sync::Semaphore;

use crate::datasource::{GatedProvider, Provider, ProviderError};
use crate::enrich::{enrich_entities, EnrichOptions};
use crate::harvest::{harvest_candidates, resolve_concept, Candidate, HarvestError, HarvestLimits};
use crate::model::{
    Concept, ExplorationResult, Field, FieldSet, HitCounts, LanguageCode, RelatedEntity,
};
use crate::relatedness;

pub use cache::{CacheKey, Clock, ManualClock, ResultCache, SystemClock};

pub const MAX_IN_FLIGHT_LIMIT: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    /// Backend requests in flight at once, across all concurrent queries.
    pub max_in_flight: usize,
    pub candidate_cap: usize,
    pub snippet_cap: usize,
    pub inlink_cap: usize,
    pub narrower_cap: usize,
    pub cache_ttl: Duration,
    pub cache_capacity: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            max_in_flight: 32,
            candidate_cap: 400,
            snippet_cap: 3,
            inlink_cap: 500,
            narrower_cap: 100,
            cache_ttl: Duration::from_secs(24 * 60 * 60),
            cache_capacity: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("max_in_flight {0} exceeds {MAX_IN_FLIGHT_LIMIT}")]
    TooManyInFlight(usize),
    #[error("invalid value {value:?} for {name}")]
    InvalidEnv { name: &'static str, value: String },
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, value) in [
            ("max_in_flight", self.max_in_flight),
            ("candidate_cap", self.candidate_cap),
            ("snippet_cap", self.snippet_cap),
            ("inlink_cap", self.inlink_cap),
            ("narrower_cap", self.narrower_cap),
            ("cache_capacity", self.cache_capacity),
        ] {
            if value == 0 {
                return Err(ConfigError::NotPositive(name));
            }
        }
        if self.cache_ttl.is_zero() {
            return Err(ConfigError::NotPositive("cache_ttl"));
        }
        if self.max_in_flight > MAX_IN_FLIGHT_LIMIT {
            return Err(ConfigError::TooManyInFlight(self.max_in_flight));
        }
        Ok(())
    }

    /// Applies `SERE_CACHE_TTL_SECS` and `SERE_MAX_IN_FLIGHT` on top of `self`.
    pub fn with_env(mut self) -> Result<Self, ConfigError> {
        fn read(name: &'static str) -> Result<Option<u64>, ConfigError> {
            match std::env::var(name) {
                Ok(value) => value
                    .trim()
                    .parse()
                    .map(Some)
                    .map_err(|_| ConfigError::InvalidEnv { name, value }),
                Err(_) => Ok(None),
            }
        }
        if let Some(secs) = read("SERE_CACHE_TTL_SECS")? {
            self.cache_ttl = Duration::from_secs(secs);
        }
        if let Some(n) = read("SERE_MAX_IN_FLIGHT")? {
            self.max_in_flight = n as usize;
        }
        self.validate()?;
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExploreError {
    #[error("query is empty")]
    EmptyQuery,
    #[error("language {0} is not served")]
    UnsupportedLanguage(LanguageCode),
    #[error("no article matches {0:?}")]
    NoMatch(String),
    #[error("every related-term source failed: {}", .0.join("; "))]
    AllSourcesFailed(Vec<String>),
    #[error(transparent)]
    Provider(#[from] ProviderError),
}

impl From<HarvestError> for ExploreError {
    fn from(e: HarvestError) -> Self {
        match e {
            HarvestError::EmptyTerm => ExploreError::EmptyQuery,
            HarvestError::NoMatch(t) => ExploreError::NoMatch(t),
            HarvestError::Provider(p) => ExploreError::Provider(p),
            HarvestError::AllSourcesFailed(f) => ExploreError::AllSourcesFailed(f),
        }
    }
}

/// Sorts by relatedness descending, then title bytes ascending. Stable.
pub fn rank(mut entities: Vec<RelatedEntity>) -> Vec<RelatedEntity> {
    entities.sort_by(|x, y| {
        y.score
            .relatedness
            .total_cmp(&x.score.relatedness)
            .then_with(|| x.concept.title.as_bytes().cmp(y.concept.title.as_bytes()))
    });
    entities
}

struct Backend {
    wiki: GatedProvider,
    semantic: GatedProvider,
}

/// Runs explorations against per-language backends with a shared cache and
/// a shared bound on in-flight backend requests.
pub struct Explorer {
    backends: BTreeMap<LanguageCode, Backend>,
    config: PipelineConfig,
    cache: ResultCache,
    gate: Arc<Semaphore>,
}

impl Explorer {
    pub fn new(config: PipelineConfig) -> Result<Self, ConfigError> {
        Self::with_clock(config, Arc::new(SystemClock))
    }

    pub fn with_clock(config: PipelineConfig, clock: Arc<dyn Clock>) -> Result<Self, ConfigError> {
        config.validate()?;
        let capacity = NonZeroUsize::new(config.cache_capacity)
            .ok_or(ConfigError::NotPositive("cache_capacity"))?;
        Ok(Self {
            backends: BTreeMap::new(),
            cache: ResultCache::new(capacity, config.cache_ttl, clock),
            gate: Arc::new(Semaphore::new(config.max_in_flight)),
            config,
        })
    }

    /// Serves `lang` from `wiki` (search, counts, links, text, thumbnails,
    /// snippets) and `semantic` (categories, broader, narrower).
    pub fn register(
        &mut self,
        lang: LanguageCode,
        wiki: Arc<dyn Provider>,
        semantic: Arc<dyn Provider>,
    ) {
        self.backends.insert(
            lang,
            Backend {
                wiki: GatedProvider::new(wiki, Arc::clone(&self.gate)),
                semantic: GatedProvider::new(semantic, Arc::clone(&self.gate)),
            },
        );
    }

    pub fn languages(&self) -> impl Iterator<Item = LanguageCode> + '_ {
        self.backends.keys().copied()
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn cache(&self) -> &ResultCache {
        &self.cache
    }

    fn backend(&self, lang: LanguageCode) -> Result<&Backend, ExploreError> {
        self.backends
            .get(&lang)
            .ok_or(ExploreError::UnsupportedLanguage(lang))
    }

    /// Ranked titles for autocompletion.
    pub async fn suggest(
        &self,
        lang: LanguageCode,
        prefix: &str,
        limit: usize,
    ) -> Result<Vec<String>, ExploreError> {
        let backend = self.backend(lang)?;
        let prefix = prefix.trim();
        if prefix.is_empty() {
            return Err(ExploreError::EmptyQuery);
        }
        Ok(backend.wiki.search(prefix, limit).await?)
    }

    /// Computes (or fetches from cache) the related entities of a term.
    ///
    /// The cache is keyed by the resolved title, so differently phrased
    /// queries for the same article share an entry. Only the selected
    /// `fields` are fetched; ranking is independent of the selection.
    pub async fn explore(
        &self,
        lang: LanguageCode,
        term: &str,
        fields: FieldSet,
    ) -> Result<ExplorationResult, ExploreError> {
        let backend = self.backend(lang)?;
        let query = term.trim();
        let concept = resolve_concept(&backend.wiki, lang, query).await?;

        let key = CacheKey::new(lang, concept.title.clone(), fields);
        if let Some(hit) = self.cache.get(&key) {
            let mut result = (*hit).clone();
            result.from_cache = true;
            result.query = query.to_string();
            return Ok(result);
        }

        let result = self.compute(backend, query, concept, fields).await?;
        self.cache.put(key, Arc::new(result.clone()));
        Ok(result)
    }

    async fn compute(
        &self,
        backend: &Backend,
        query: &str,
        concept: Concept,
        fields: FieldSet,
    ) -> Result<ExplorationResult, ExploreError> {
        let (wiki, semantic) = (&backend.wiki, &backend.semantic);
        let limits = HarvestLimits {
            inlink_cap: self.config.inlink_cap,
            narrower_cap: self.config.narrower_cap,
            candidate_cap: self.config.candidate_cap,
        };
        let harvest = harvest_candidates(wiki, semantic, &concept, limits).await?;
        let mut warnings = harvest.warnings;

        let concept_text = async {
            if fields.contains(Field::Snippets) {
                wiki.full_text(&concept.title).await.map(Some)
            } else {
                Ok(None)
            }
        };
        let (concept_hits, total, concept_text) = tokio::join!(
            wiki.hit_count(&concept.title),
            wiki.article_count(),
            concept_text
        );
        let (concept_hits, total) = (concept_hits?, total?);
        let concept_text = concept_text.unwrap_or_else(|e| {
            warnings.push(format!("article text of {:?} unavailable: {e}", concept.title));
            None
        });

        let scored: Vec<Result<(RelatedEntity, Option<String>), String>> = stream::iter(harvest.candidates)
            .map(|candidate| score_candidate(wiki, &concept, concept_hits, total, candidate))
            .buffered(self.config.max_in_flight)
            .collect()
            .await;
        let mut entities = Vec::with_capacity(scored.len());
        for outcome in scored {
            match outcome {
                Ok((entity, note)) => {
                    entities.push(entity);
                    warnings.extend(note);
                }
                Err(warning) => warnings.push(warning),
            }
        }

        let options = EnrichOptions {
            fields,
            snippet_cap: self.config.snippet_cap,
            concurrency: self.config.max_in_flight,
        };
        let enrichment = enrich_entities(
            wiki,
            semantic,
            &concept,
            concept_text.as_deref().unwrap_or(""),
            entities,
            &options,
        )
        .await;
        warnings.extend(enrichment.warnings);

        Ok(ExplorationResult {
            query: query.to_string(),
            concept,
            entities: rank(enrichment.entities),
            category_index: enrichment.category_index,
            generated_at: chrono::Utc::now(),
            from_cache: false,
            fields,
            warnings,
        })
    }
}

async fn score_candidate(
    wiki: &dyn Provider,
    concept: &Concept,
    concept_hits: u64,
    total: u64,
    candidate: Candidate,
) -> Result<(RelatedEntity, Option<String>), String> {
    let title = candidate.title;
    let fail = |what: String| format!("dropped {title:?}: {what}");
    let (hits, both) = tokio::join!(
        wiki.hit_count(&title),
        wiki.cooccurrence_count(&concept.title, &title)
    );
    let hits = hits.map_err(|e| fail(e.to_string()))?;
    let both = both.map_err(|e| fail(e.to_string()))?;
    let counts =
        HitCounts::new(concept_hits, hits, both, total).map_err(|e| fail(e.to_string()))?;
    let score = relatedness::score(&counts).map_err(|e| fail(e.to_string()))?;
    let note = counts.was_clamped().then(|| {
        format!("co-occurrence count for {title:?} exceeded a single-term count ({both}), clamped")
    });
    let entity_concept =
        Concept::new(concept.lang, &title).map_err(|e| fail(e.to_string()))?;
    let entity = RelatedEntity {
        concept: entity_concept,
        score,
        origins: candidate.origins,
        categories: Vec::new(),
        assigned_category: None,
        snippets: Vec::new(),
    };
    Ok((entity, note))
}
