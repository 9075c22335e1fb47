use std::collections::BTreeSet;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::model::{CategoryCount, ExplorationResult, Field, RelationOrigin, Snippet};

/// The JSON response: the result tree with unselected fields left out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonDocument {
    pub query: String,
    pub lang: String,
    pub from_cache: bool,
    pub generated_at: String,
    pub fields: Vec<String>,
    pub concept: JsonConcept,
    pub entities: Vec<JsonEntity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category_index: Option<Vec<CategoryCount>>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonConcept {
    pub title: String,
    pub url: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thumbnail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonEntity {
    pub title: String,
    pub url: String,
    pub origins: BTreeSet<RelationOrigin>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<JsonScore>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub categories: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assigned_category: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thumbnail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snippets: Option<Vec<Snippet>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonScore {
    pub relatedness: f64,
    /// `null` when the pair never co-occurs.
    pub distance: Option<f64>,
    pub cooccurring: bool,
}

impl JsonDocument {
    pub fn from_result(result: &ExplorationResult) -> Self {
        let fields = result.fields;
        let has = |f| fields.contains(f);
        JsonDocument {
            query: result.query.clone(),
            lang: result.concept.lang.to_string(),
            from_cache: result.from_cache,
            generated_at: timestamp(&result.generated_at),
            fields: fields.iter().map(|f| f.as_str().to_string()).collect(),
            concept: JsonConcept {
                title: result.concept.title.clone(),
                url: result.concept.url.clone(),
                description: has(Field::Description).then(|| result.concept.description.clone()),
                thumbnail: result.concept.thumbnail.clone().filter(|_| has(Field::Thumbnail)),
            },
            entities: result
                .entities
                .iter()
                .map(|e| JsonEntity {
                    title: e.concept.title.clone(),
                    url: e.concept.url.clone(),
                    origins: e.origins.clone(),
                    score: has(Field::Sr).then(|| JsonScore {
                        relatedness: e.score.relatedness,
                        distance: e.score.distance.is_finite().then_some(e.score.distance),
                        cooccurring: e.score.cooccurring,
                    }),
                    categories: has(Field::Category).then(|| e.categories.clone()),
                    assigned_category: e.assigned_category.clone().filter(|_| has(Field::Category)),
                    thumbnail: e.concept.thumbnail.clone().filter(|_| has(Field::Thumbnail)),
                    snippets: has(Field::Snippets).then(|| e.snippets.clone()),
                })
                .collect(),
            category_index: has(Field::Category).then(|| result.category_index.clone()),
            warnings: result.warnings.clone(),
        }
    }

    pub fn render(&self) -> String {
        serde_json::to_string(self).expect("document serializes")
    }

    pub fn parse(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }
}

fn timestamp(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Serializes a result's selected fields as compact JSON.
pub fn to_json(result: &ExplorationResult) -> String {
    JsonDocument::from_result(result).render()
}

/// `{"error":{"code":..,"message":..}}`
pub fn error_json(code: &str, message: &str) -> String {
    serde_json::json!({ "error": { "code": code, "message": message } }).to_string()
}
