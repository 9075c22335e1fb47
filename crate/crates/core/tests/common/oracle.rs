//! Brute-force reference implementations, written without the crate's
//! index, tokenizer or pipeline. Everything here scans plain text directly.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

#[derive(Debug, Clone)]
pub struct Article {
    pub title: String,
    pub text: String,
    pub links: Vec<String>,
    pub categories: Vec<String>,
    pub broader: Vec<String>,
    pub narrower: Vec<String>,
    pub description: String,
    pub thumbnail: Option<String>,
}

pub fn canon(raw: &str) -> String {
    let spaced = raw.replace('_', " ");
    let words: Vec<&str> = spaced.split_whitespace().collect();
    let joined = words.join(" ");
    let mut chars = joined.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

pub fn load(path: &Path) -> Vec<Article> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            let list = |key: &str| -> Vec<String> {
                v[key]
                    .as_array()
                    .map(|a| a.iter().map(|x| canon(x.as_str().unwrap())).collect())
                    .unwrap_or_default()
            };
            let body = v["text"].as_str().unwrap().to_string();
            let description = match v["description"].as_str() {
                Some(d) => d.to_string(),
                None => body
                    .split("\n\n")
                    .map(str::trim)
                    .find(|p| !p.is_empty())
                    .unwrap_or("")
                    .to_string(),
            };
            Article {
                title: canon(v["title"].as_str().unwrap()),
                links: list("links"),
                categories: list("categories"),
                broader: list("broader"),
                narrower: list("narrower"),
                description,
                thumbnail: v["thumbnail"].as_str().map(str::to_string),
                text: body,
            }
        })
        .collect()
}

fn folded(s: &str) -> Vec<char> {
    let lower: String = s.chars().flat_map(char::to_lowercase).collect();
    let words: Vec<&str> = lower.split_whitespace().collect();
    words.join(" ").chars().collect()
}

/// Occurrences of `phrase` in `text` that are not part of a longer
/// alphanumeric token, by trying every start position.
pub fn occurrences(text: &str, phrase: &str) -> usize {
    let (h, n) = (folded(text), folded(phrase));
    if n.is_empty() || n.len() > h.len() {
        return 0;
    }
    (0..=h.len() - n.len())
        .filter(|&i| {
            let end = i + n.len();
            h[i..end] == n[..]
                && !(n[0].is_alphanumeric() && i > 0 && h[i - 1].is_alphanumeric())
                && !(n[n.len() - 1].is_alphanumeric() && end < h.len() && h[end].is_alphanumeric())
        })
        .count()
}

pub fn hits(corpus: &[Article], phrase: &str) -> u64 {
    corpus.iter().filter(|a| occurrences(&a.text, phrase) > 0).count() as u64
}

pub fn both(corpus: &[Article], x: &str, y: &str) -> u64 {
    corpus
        .iter()
        .filter(|a| occurrences(&a.text, x) > 0 && occurrences(&a.text, y) > 0)
        .count() as u64
}

/// Exact folded title, then folded title prefix, then text frequency.
pub fn search(corpus: &[Article], term: &str, limit: usize) -> Vec<String> {
    let needle = folded(term);
    let mut rows: Vec<(u8, i64, Vec<u8>)> = Vec::new();
    for a in corpus {
        let title = folded(&a.title);
        if title == needle {
            rows.push((0, 0, a.title.as_bytes().to_vec()));
        } else if title.starts_with(&needle) {
            rows.push((1, 0, a.title.as_bytes().to_vec()));
        } else {
            let c = occurrences(&a.text, term);
            if c > 0 {
                rows.push((2, -(c as i64), a.title.as_bytes().to_vec()));
            }
        }
    }
    rows.sort();
    rows.into_iter()
        .take(limit)
        .map(|r| String::from_utf8(r.2).unwrap())
        .collect()
}

/// The distance formula, evaluated term by term.
pub fn distance(a: u64, b: u64, both: u64, w: u64) -> f64 {
    if both == 0 {
        return f64::INFINITY;
    }
    let (a, b, both, w) = (a as f64, b as f64, both as f64, w as f64);
    let numerator = a.max(b).log10() - both.log10();
    let denominator = w.log10() - a.min(b).log10();
    (numerator / denominator).max(0.0)
}

pub fn relatedness(d: f64) -> f64 {
    if d.is_infinite() {
        0.0
    } else {
        (1.0 - d).clamp(0.0, 1.0)
    }
}

const ABBREVIATIONS: [&str; 6] = ["e.g.", "i.e.", "z.B.", "Dr.", "St.", "Nr."];

pub fn sentences(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut start = 0;
    for i in 0..chars.len() {
        if !matches!(chars[i], '.' | '!' | '?') {
            continue;
        }
        let rest = &chars[i + 1..];
        if let Some(next) = rest.iter().position(|c| !c.is_whitespace()) {
            if next == 0 || !rest[next].is_uppercase() {
                continue;
            }
        }
        let segment: String = chars[start..=i].iter().collect();
        if chars[i] == '.'
            && ABBREVIATIONS.iter().any(|abbr| {
                segment.ends_with(abbr)
                    && segment[..segment.len() - abbr.len()]
                        .chars()
                        .last()
                        .is_none_or(|c| !c.is_alphanumeric())
            })
        {
            continue;
        }
        if !segment.trim().is_empty() {
            out.push(segment.trim().to_string());
        }
        start = i + 1;
    }
    let tail: String = chars[start..].iter().collect();
    if !tail.trim().is_empty() {
        out.push(tail.trim().to_string());
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entity {
    pub title: String,
    pub origins: BTreeSet<String>,
    pub relatedness: f64,
    pub distance: f64,
    pub categories: Vec<String>,
    pub category: Option<String>,
    pub thumbnail: Option<String>,
    /// (track, source, text)
    pub snippets: Vec<(String, String, String)>,
}

#[derive(Debug, Clone)]
pub struct Exploration {
    pub concept: String,
    pub candidates: BTreeMap<String, BTreeSet<String>>,
    pub unscorable: Vec<String>,
    pub entities: Vec<Entity>,
    pub index: Vec<(String, usize)>,
}

fn is_namespaced(title: &str) -> bool {
    let prefixes = ["Category:", "File:", "Template:", "Kategorie:", "Datei:", "Vorlage:"];
    prefixes.iter().any(|p| title.starts_with(p))
}

/// The full exploration of `term`, snippet cap 3, no candidate cap.
pub fn explore(corpus: &[Article], term: &str) -> Exploration {
    let concept_title = search(corpus, term, 10).into_iter().next().expect("term resolves");
    let concept = corpus.iter().find(|a| a.title == concept_title).unwrap();

    let mut candidates: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut add = |title: &str, origin: &str| {
        if title != concept.title && !is_namespaced(title) {
            candidates
                .entry(title.to_string())
                .or_default()
                .insert(origin.to_string());
        }
    };
    for t in &concept.links {
        add(t, "out_link");
    }
    for a in corpus {
        if a.links.contains(&concept.title) {
            add(&a.title, "in_link");
        }
    }
    for t in &concept.broader {
        add(t, "broader");
    }
    for t in &concept.narrower {
        add(t, "narrower");
    }

    let w = corpus.len() as u64;
    let a = hits(corpus, &concept.title);
    let mut unscorable = Vec::new();
    let mut entities = Vec::new();
    for (title, origins) in &candidates {
        let b = hits(corpus, title);
        if a == 0 || b == 0 {
            unscorable.push(title.clone());
            continue;
        }
        let ab = both(corpus, &concept.title, title).min(a).min(b);
        let d = distance(a, b, ab, w);
        let r = relatedness(d);
        if r <= 0.0 {
            continue;
        }
        let article = corpus.iter().find(|x| &x.title == title);
        let mut categories: Vec<String> = Vec::new();
        for c in article.map(|x| x.categories.clone()).unwrap_or_default() {
            if !categories.contains(&c) {
                categories.push(c);
            }
        }
        let mut own: Vec<String> = Vec::new();
        for s in sentences(&concept.text) {
            if occurrences(&s, title) > 0 && !own.contains(&s) && own.len() < 3 {
                own.push(s);
            }
        }
        let snippets = if !own.is_empty() {
            own.into_iter()
                .map(|s| ("article_sentence".into(), concept.title.clone(), s))
                .collect()
        } else {
            let mut sources: Vec<&Article> = corpus
                .iter()
                .filter(|x| occurrences(&x.text, &concept.title) > 0 && occurrences(&x.text, title) > 0)
                .collect();
            sources.sort_by(|x, y| x.title.as_bytes().cmp(y.title.as_bytes()));
            let mut found: Vec<(String, String, String)> = Vec::new();
            for source in sources {
                let ss = sentences(&source.text);
                let pick = ss
                    .iter()
                    .find(|s| occurrences(s, title) > 0)
                    .or_else(|| ss.iter().find(|s| occurrences(s, &concept.title) > 0));
                if let Some(s) = pick {
                    if found.iter().all(|f| &f.2 != s) && found.len() < 3 {
                        found.push(("search_snippet".into(), source.title.clone(), s.clone()));
                    }
                }
            }
            found
        };
        entities.push(Entity {
            title: title.clone(),
            origins: origins.clone(),
            relatedness: r,
            distance: d,
            categories,
            category: None,
            thumbnail: article.and_then(|x| x.thumbnail.clone()),
            snippets,
        });
    }

    let mut size: BTreeMap<String, usize> = BTreeMap::new();
    for e in &entities {
        for c in &e.categories {
            *size.entry(c.clone()).or_default() += 1;
        }
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for e in &mut entities {
        let mut best: Option<&String> = None;
        for c in &e.categories {
            best = match best {
                Some(b) if size[b] > size[c] || (size[b] == size[c] && b <= c) => Some(b),
                _ => Some(c),
            };
        }
        e.category = best.cloned();
        let key = e.category.clone().unwrap_or_else(|| "(uncategorized)".into());
        *counts.entry(key).or_default() += 1;
    }
    let mut index: Vec<(String, usize)> = counts.into_iter().collect();
    index.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));

    entities.sort_by(|x, y| {
        y.relatedness
            .partial_cmp(&x.relatedness)
            .unwrap()
            .then(x.title.as_bytes().cmp(y.title.as_bytes()))
    });

    Exploration {
        concept: concept.title.clone(),
        candidates,
        unscorable,
        entities,
        index,
    }
}
