//! Category assignment, thumbnails and explanatory snippets for scored
//! entities.
//!
//! Snippets follow two tracks. Track one takes sentences of the query
//! concept's own article that mention the related title. When none exist,
//! track two asks the backend for passages matching both titles.

mod categories;
mod sentences;

use std::collections::HashSet;

use futures::stream::{self, StreamExt};

use crate::datasource::{phrase, ErrorKind, Provider};
use crate::model::{CategoryCount, Concept, Field, FieldSet, RelatedEntity, Snippet, SnippetTrack};

pub use categories::assign_categories;
pub use sentences::{split_sentences, PROTECTED_ABBREVIATIONS};

/// Every sentence of `source_text` mentioning `related_title`, in document
/// order, at most `cap`.
pub fn article_sentence_snippets(
    source_text: &str,
    source_title: &str,
    related_title: &str,
    cap: usize,
) -> Vec<Snippet> {
    let needle = phrase::fold(related_title);
    if needle.is_empty() {
        return Vec::new();
    }
    let mut seen = HashSet::new();
    split_sentences(source_text)
        .into_iter()
        .filter(|s| phrase::contains_folded(&phrase::fold(s), &needle))
        .filter(|s| seen.insert(s.clone()))
        .take(cap)
        .map(|text| Snippet {
            text,
            track: SnippetTrack::ArticleSentence,
            source_title: source_title.to_string(),
        })
        .collect()
}

/// Passages from an AND-search over both titles. Backend failures produce
/// an empty list and a warning.
pub async fn fallback_search_snippets(
    provider: &dyn Provider,
    concept_title: &str,
    related_title: &str,
    cap: usize,
) -> (Vec<Snippet>, Option<String>) {
    match provider
        .search_snippets(concept_title, related_title, cap)
        .await
    {
        Ok(passages) => {
            let mut seen = HashSet::new();
            let snippets = passages
                .into_iter()
                .filter(|p| !p.text.trim().is_empty() && seen.insert(p.text.clone()))
                .take(cap)
                .map(|p| Snippet {
                    text: p.text,
                    track: SnippetTrack::SearchSnippet,
                    source_title: p.title,
                })
                .collect();
            (snippets, None)
        }
        Err(e) => (
            Vec::new(),
            Some(format!("snippets for {related_title:?} unavailable: {e}")),
        ),
    }
}

#[derive(Debug, Clone)]
pub struct EnrichOptions {
    pub fields: FieldSet,
    pub snippet_cap: usize,
    /// Entities enriched concurrently.
    pub concurrency: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Enrichment {
    pub entities: Vec<RelatedEntity>,
    pub category_index: Vec<CategoryCount>,
    pub warnings: Vec<String>,
}

/// Drops zero-relatedness entities and fills in categories, thumbnails and
/// snippets for the rest, as selected by `options.fields`.
///
/// `concept_text` is the full text of the query concept's article; it is
/// only consulted when snippets are selected.
pub async fn enrich_entities(
    wiki: &dyn Provider,
    semantic: &dyn Provider,
    concept: &Concept,
    concept_text: &str,
    scored: Vec<RelatedEntity>,
    options: &EnrichOptions,
) -> Enrichment {
    let survivors = scored.into_iter().filter(|e| e.score.relatedness > 0.0);
    let results: Vec<(RelatedEntity, Vec<String>)> = stream::iter(survivors)
        .map(|entity| enrich_one(wiki, semantic, concept, concept_text, entity, options))
        .buffered(options.concurrency.max(1))
        .collect()
        .await;

    let mut enrichment = Enrichment::default();
    for (entity, warnings) in results {
        enrichment.entities.push(entity);
        enrichment.warnings.extend(warnings);
    }
    if options.fields.contains(Field::Category) {
        enrichment.category_index = assign_categories(&mut enrichment.entities);
    }
    enrichment
}

async fn enrich_one(
    wiki: &dyn Provider,
    semantic: &dyn Provider,
    concept: &Concept,
    concept_text: &str,
    mut entity: RelatedEntity,
    options: &EnrichOptions,
) -> (RelatedEntity, Vec<String>) {
    let mut warnings = Vec::new();
    let title = entity.concept.title.clone();
    let fields = options.fields;

    let categories = async {
        if !fields.contains(Field::Category) {
            return Ok(Vec::new());
        }
        semantic.categories(&title).await
    };
    let thumbnail = async {
        if !fields.contains(Field::Thumbnail) {
            return (None, None);
        }
        thumbnail_for(wiki, semantic, &title).await
    };
    let snippets = async {
        if !fields.contains(Field::Snippets) {
            return (Vec::new(), None);
        }
        let own = article_sentence_snippets(concept_text, &concept.title, &title, options.snippet_cap);
        if !own.is_empty() {
            return (own, None);
        }
        fallback_search_snippets(wiki, &concept.title, &title, options.snippet_cap).await
    };
    let (categories, (thumb, thumb_warning), (snippets, snippet_warning)) =
        tokio::join!(categories, thumbnail, snippets);

    match categories {
        Ok(list) => entity.categories = list,
        Err(e) => warnings.push(format!("categories for {title:?} unavailable: {e}")),
    }
    entity.concept.thumbnail = thumb;
    entity.snippets = snippets;
    warnings.extend(thumb_warning);
    warnings.extend(snippet_warning);
    (entity, warnings)
}

/// Wikipedia first, then the semantic backend.
async fn thumbnail_for(
    wiki: &dyn Provider,
    semantic: &dyn Provider,
    title: &str,
) -> (Option<String>, Option<String>) {
    let mut warning = None;
    match wiki.thumbnail(title).await {
        Ok(Some(url)) => return (Some(url), None),
        Ok(None) => {}
        Err(e) if e.kind == ErrorKind::Unsupported => {}
        Err(e) => warning = Some(format!("thumbnail for {title:?} unavailable: {e}")),
    }
    match semantic.thumbnail(title).await {
        Ok(url) => (url, warning),
        Err(e) if e.kind == ErrorKind::Unsupported => (None, warning),
        Err(e) => (
            None,
            warning.or_else(|| Some(format!("thumbnail for {title:?} unavailable: {e}"))),
        ),
    }
}
