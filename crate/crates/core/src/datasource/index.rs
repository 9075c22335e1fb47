use std::collections::HashMap;

use super::phrase;

#[derive(Debug, Clone)]
struct Posting {
    doc: u32,
    positions: Vec<u32>,
}

/// Positional inverted index over folded document text.
///
/// Phrase queries walk the postings of the phrase's tokens to find documents
/// where they occur consecutively, then confirm each candidate against the
/// exact match rule in [`phrase`]. The positional pass never rejects a true
/// match, so the result equals a full scan.
#[derive(Debug, Clone, Default)]
pub struct PhraseIndex {
    postings: HashMap<String, Vec<Posting>>,
    docs: Vec<String>,
    /// Byte offset of every token in the folded text, by token position.
    starts: Vec<Vec<u32>>,
}

impl PhraseIndex {
    /// Builds an index over the given (unfolded) documents.
    pub fn build<'a>(texts: impl IntoIterator<Item = &'a str>) -> Self {
        let mut index = PhraseIndex::default();
        for (doc, text) in texts.into_iter().enumerate() {
            let folded = phrase::fold(text);
            let mut local: HashMap<&str, Vec<u32>> = HashMap::new();
            let mut starts = Vec::new();
            for (pos, token) in phrase::tokens(&folded).enumerate() {
                local.entry(token).or_default().push(pos as u32);
                starts.push((token.as_ptr() as usize - folded.as_ptr() as usize) as u32);
            }
            for (token, positions) in local {
                index
                    .postings
                    .entry(token.to_string())
                    .or_default()
                    .push(Posting {
                        doc: doc as u32,
                        positions,
                    });
            }
            index.docs.push(folded);
            index.starts.push(starts);
        }
        index
    }

    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    pub fn distinct_tokens(&self) -> usize {
        self.postings.len()
    }

    pub fn posting_count(&self) -> usize {
        self.postings.values().map(Vec::len).sum()
    }

    pub fn folded_text(&self, doc: usize) -> &str {
        &self.docs[doc]
    }

    /// `(doc, occurrences)` for every document matching the phrase, ordered by
    /// document number.
    pub fn matches(&self, phrase_text: &str) -> Vec<(usize, usize)> {
        self.search(phrase_text, false)
    }

    /// Documents matching the phrase, ascending.
    pub fn docs(&self, phrase_text: &str) -> Vec<usize> {
        self.search(phrase_text, true)
            .into_iter()
            .map(|(doc, _)| doc)
            .collect()
    }

    pub fn count_docs(&self, phrase_text: &str) -> usize {
        self.search(phrase_text, true).len()
    }

    /// With `first_only`, counts stop at one occurrence per document.
    fn search(&self, phrase_text: &str, first_only: bool) -> Vec<(usize, usize)> {
        let needle = phrase::fold(phrase_text);
        let query: Vec<&str> = phrase::tokens(&needle).collect();
        if query.is_empty() {
            // Nothing to look up; only symbols, or nothing at all.
            if needle.is_empty() {
                return Vec::new();
            }
            return (0..self.docs.len())
                .filter_map(|doc| self.verify_whole(doc, &needle, first_only))
                .collect();
        }
        let mut lists = Vec::with_capacity(query.len());
        for token in &query {
            match self.postings.get(*token) {
                Some(list) => lists.push(list),
                None => return Vec::new(),
            }
        }
        // A phrase with alphanumeric ends can only match at a token start,
        // so checking the positional candidates in place is exact.
        let anchored = needle.starts_with(char::is_alphanumeric)
            && needle.ends_with(char::is_alphanumeric);

        let mut out = Vec::new();
        'docs: for head in lists[0] {
            let doc = head.doc as usize;
            let mut rest = Vec::with_capacity(lists.len() - 1);
            for list in &lists[1..] {
                match list.binary_search_by_key(&head.doc, |p| p.doc) {
                    Ok(i) => rest.push(&list[i].positions),
                    Err(_) => continue 'docs,
                }
            }
            let mut consecutive = head.positions.iter().copied().filter(|&start| {
                rest.iter()
                    .enumerate()
                    .all(|(k, positions)| positions.binary_search(&(start + k as u32 + 1)).is_ok())
            });
            if !anchored {
                if consecutive.next().is_some() {
                    out.extend(self.verify_whole(doc, &needle, first_only));
                }
                continue;
            }
            let text = &self.docs[doc];
            let mut count = 0;
            for start in consecutive {
                let at = self.starts[doc][start as usize] as usize;
                if phrase::matches_at(text, &needle, at) {
                    count += 1;
                    if first_only {
                        break;
                    }
                }
            }
            if count > 0 {
                out.push((doc, count));
            }
        }
        out
    }

    fn verify_whole(&self, doc: usize, needle: &str, first_only: bool) -> Option<(usize, usize)> {
        let text = &self.docs[doc];
        let n = if first_only {
            phrase::contains_folded(text, needle) as usize
        } else {
            phrase::count_folded(text, needle)
        };
        (n > 0).then_some((doc, n))
    }
}
