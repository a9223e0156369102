//! Tokenization, sentence segmentation, stemming, stopword filtering and
//! answer normalization. Everything here is pure and deterministic.

mod normalize;
pub mod porter;
mod segment;
mod stopwords;
mod tokenize;

use std::collections::BTreeMap;
use std::sync::LazyLock;

use regex::Regex;

pub use normalize::{normalize_answer, normalized_tokens};
pub use segment::{segment_sentences, split_tokens, SentenceSpan};
pub use stopwords::{Stopwords, DEFAULT_STOPWORDS};
pub use tokenize::{tokenize, Token};

static UNICODE_PUNCT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\p{P}$").unwrap());

/// ASCII punctuation (including ASCII symbols) or a Unicode `P*` character.
pub fn is_punct(c: char) -> bool {
    if c.is_ascii() {
        c.is_ascii_punctuation()
    } else {
        let mut buf = [0u8; 4];
        UNICODE_PUNCT.is_match(c.encode_utf8(&mut buf))
    }
}

/// Multiset of stemmed, lowercased, non-stopword terms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContentTermBag {
    counts: BTreeMap<String, usize>,
}

impl ContentTermBag {
    pub fn count(&self, term: &str) -> usize {
        self.counts.get(term).copied().unwrap_or(0)
    }

    /// Multiset cardinality.
    pub fn len(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Distinct terms with their multiplicities, in term order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.counts.iter().map(|(t, &n)| (t.as_str(), n))
    }

    pub fn insert(&mut self, term: String) {
        *self.counts.entry(term).or_insert(0) += 1;
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (t, n) in other.iter() {
            *out.counts.entry(t.to_string()).or_insert(0) += n;
        }
        out
    }

    pub fn is_submultiset_of(&self, other: &Self) -> bool {
        self.iter().all(|(t, n)| other.count(t) >= n)
    }
}

/// Lowercase, drop punctuation-only tokens and stopwords, Porter-stem the rest.
pub fn content_terms(tokens: &[Token], stopwords: &Stopwords) -> ContentTermBag {
    let mut bag = ContentTermBag::default();
    for t in tokens {
        if t.surface.chars().all(is_punct) {
            continue;
        }
        let lower = t.surface.to_lowercase();
        if stopwords.contains(&lower) {
            continue;
        }
        bag.insert(porter::stem(&lower));
    }
    bag
}

#[cfg(test)]
mod tests {
    use super::*;

    fn terms(text: &str) -> ContentTermBag {
        content_terms(&tokenize(text), &Stopwords::default())
    }

    #[test]
    fn stopwords_dropped_and_stemmed() {
        let bag = terms("the hackers");
        assert_eq!(bag.len(), 1);
        assert_eq!(bag.count("hacker"), 1);
    }

    #[test]
    fn all_stopwords_is_empty() {
        assert!(terms("when did the of").is_empty());
    }

    #[test]
    fn multiset_semantics() {
        let bag = terms("running runs");
        assert_eq!(bag.len(), 2);
        assert_eq!(bag.count("run"), 2);
    }

    #[test]
    fn punctuation_tokens_are_not_terms() {
        let bag = terms("Sony , Pictures ?");
        assert_eq!(bag.len(), 2);
        assert_eq!(bag.count("soni"), 1);
        assert_eq!(bag.count("pictur"), 1);
    }

    #[test]
    fn unicode_punctuation() {
        assert!(is_punct('«') && is_punct('—') && is_punct('$') && is_punct('_'));
        assert!(!is_punct('é') && !is_punct('€'));
    }
}
