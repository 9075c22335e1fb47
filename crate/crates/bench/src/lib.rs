//! Inputs shared by the benchmarks.

use std::path::PathBuf;
use std::sync::Arc;

use sere_core::datasource::{ingest_corpus, Corpus, CorpusProvider};
use sere_core::{Explorer, LanguageCode, PipelineConfig};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn demo_corpus() -> Arc<Corpus> {
    Arc::new(ingest_corpus(&fixture("demo.jsonl"), LanguageCode::EN).expect("demo corpus"))
}

pub fn demo_explorer(config: PipelineConfig) -> Explorer {
    let provider = Arc::new(CorpusProvider::new(demo_corpus()));
    let mut explorer = Explorer::new(config).expect("valid config");
    explorer.register(LanguageCode::EN, provider.clone(), provider);
    explorer
}

/// Articles containing `phrase`, found by lowercasing and scanning every
/// text. The baseline the phrase index is measured against.
pub fn scan_hit_count(corpus: &Corpus, phrase: &str) -> u64 {
    let needle = phrase.to_lowercase();
    corpus
        .articles()
        .iter()
        .filter(|a| {
            let hay = a.text.to_lowercase();
            hay.match_indices(&needle).any(|(i, m)| {
                let before = hay[..i].chars().next_back();
                let after = hay[i + m.len()..].chars().next();
                !before.is_some_and(char::is_alphanumeric) && !after.is_some_and(char::is_alphanumeric)
            })
        })
        .count() as u64
}

/// A synthetic corpus of `n` articles in JSON Lines form.
pub fn synthetic_corpus(n: usize) -> Corpus {
    const WORDS: [&str; 12] = [
        "euro", "bank", "crisis", "union", "berlin", "party", "state", "debt", "market", "city",
        "chancellor", "european",
    ];
    let mut jsonl = String::new();
    let mut state = 0x2545_f491_4f6c_dd1du64;
    for i in 0..n {
        let mut text = String::new();
        for _ in 0..200 {
            // xorshift keeps the corpus identical between runs.
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            text.push_str(WORDS[(state % WORDS.len() as u64) as usize]);
            text.push(if state.is_multiple_of(11) { '.' } else { ' ' });
        }
        jsonl.push_str(&format!(
            "{{\"title\":\"Article {i}\",\"text\":\"{}\",\"links\":[],\"categories\":[]}}\n",
            text.trim()
        ));
    }
    Corpus::from_reader(jsonl.as_bytes(), LanguageCode::EN).expect("synthetic corpus")
}
