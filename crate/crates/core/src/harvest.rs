//! Query resolution and candidate collection.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::datasource::{Provider, ProviderError};
use crate::model::{canonical_title, Concept, LanguageCode, RelationOrigin};

/// Results requested from the search backend when resolving a term.
pub const RESOLVE_LIMIT: usize = 10;

/// Title prefixes that mark non-article pages (English and German).
const NAMESPACES: &[&str] = &[
    "category", "file", "image", "template", "wikipedia", "help", "portal", "talk", "user",
    "special", "mediawiki", "module", "draft", "kategorie", "datei", "bild", "vorlage", "hilfe",
    "benutzer", "benutzerin", "diskussion", "spezial",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarvestError {
    #[error("query is empty")]
    EmptyTerm,
    #[error("no article matches {0:?}")]
    NoMatch(String),
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error("every related-term source failed: {}", .0.join("; "))]
    AllSourcesFailed(Vec<String>),
}

/// Searches for the term and takes the first hit as the concept.
pub async fn resolve_concept(
    provider: &dyn Provider,
    lang: LanguageCode,
    term: &str,
) -> Result<Concept, HarvestError> {
    let term = term.trim();
    if term.is_empty() {
        return Err(HarvestError::EmptyTerm);
    }
    let titles = provider.search(term, RESOLVE_LIMIT).await?;
    let first = titles
        .iter()
        .find_map(|t| canonical_title(t).ok())
        .ok_or_else(|| HarvestError::NoMatch(term.to_string()))?;
    let mut concept =
        Concept::new(lang, &first).map_err(|_| HarvestError::NoMatch(term.to_string()))?;
    let (description, thumbnail) =
        tokio::join!(provider.description(&first), provider.thumbnail(&first));
    concept.description = description?;
    concept.thumbnail = thumbnail?;
    Ok(concept)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub title: String,
    pub origins: BTreeSet<RelationOrigin>,
}

#[derive(Debug, Clone, Copy)]
pub struct HarvestLimits {
    pub inlink_cap: usize,
    pub narrower_cap: usize,
    pub candidate_cap: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Harvest {
    /// Ordered by title.
    pub candidates: Vec<Candidate>,
    pub warnings: Vec<String>,
}

/// True for titles such as `Category:Foo` or `Datei:Bar.jpg`.
pub fn is_namespaced(title: &str) -> bool {
    let Some((prefix, _)) = title.split_once(':') else {
        return false;
    };
    let prefix = prefix.trim().to_lowercase();
    NAMESPACES.contains(&prefix.as_str())
        || prefix.ends_with(" talk")
        || prefix.ends_with(" diskussion")
}

/// Collects out-links, in-links, broader and narrower terms of the concept.
///
/// The four lookups run concurrently. A failing source becomes a warning
/// unless every source fails. Titles are canonicalized and merged, with
/// their origins unioned; the concept itself and namespaced pages are
/// dropped. Beyond `candidate_cap`, in-link-only candidates go first.
pub async fn harvest_candidates(
    wiki: &dyn Provider,
    semantic: &dyn Provider,
    concept: &Concept,
    limits: HarvestLimits,
) -> Result<Harvest, HarvestError> {
    let title = concept.title.as_str();
    let (out_links, in_links, broader, narrower) = tokio::join!(
        wiki.out_links(title),
        wiki.in_links(title, limits.inlink_cap),
        semantic.broader(title),
        semantic.narrower(title, limits.narrower_cap),
    );

    let mut harvest = Harvest::default();
    let mut failures = Vec::new();
    let mut merged: BTreeMap<String, BTreeSet<RelationOrigin>> = BTreeMap::new();
    let mut inlink_order = Vec::new();

    for (origin, result) in [
        (RelationOrigin::OutLink, out_links),
        (RelationOrigin::InLink, in_links),
        (RelationOrigin::Broader, broader),
        (RelationOrigin::Narrower, narrower),
    ] {
        match result {
            Ok(titles) => {
                for raw in titles {
                    let Ok(candidate) = canonical_title(&raw) else {
                        continue;
                    };
                    if candidate == concept.title || is_namespaced(&candidate) {
                        continue;
                    }
                    if origin == RelationOrigin::InLink {
                        inlink_order.push(candidate.clone());
                    }
                    merged.entry(candidate).or_default().insert(origin);
                }
            }
            Err(e) => failures.push(format!("{}: {e}", origin.as_str())),
        }
    }
    if failures.len() == 4 {
        return Err(HarvestError::AllSourcesFailed(failures));
    }
    harvest.warnings = failures
        .into_iter()
        .map(|f| format!("partial harvest, {f}"))
        .collect();

    if merged.len() > limits.candidate_cap {
        let before = merged.len();
        for title in inlink_order.iter().rev() {
            if merged.len() <= limits.candidate_cap {
                break;
            }
            if merged
                .get(title)
                .is_some_and(|o| o.len() == 1 && o.contains(&RelationOrigin::InLink))
            {
                merged.remove(title);
            }
        }
        while merged.len() > limits.candidate_cap {
            merged.pop_last();
        }
        harvest.warnings.push(format!(
            "candidate set truncated from {before} to {}",
            limits.candidate_cap
        ));
    }

    harvest.candidates = merged
        .into_iter()
        .map(|(title, origins)| Candidate { title, origins })
        .collect();
    Ok(harvest)
}
