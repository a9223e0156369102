use std::collections::HashSet;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Bundled list, version 1.
pub const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords.txt");

/// A stopword list together with the SHA-256 of the bytes it was read from.
#[derive(Debug, Clone)]
pub struct Stopwords {
    words: HashSet<String>,
    hash: String,
}

impl Stopwords {
    /// One lowercase word per line; `#` starts a comment.
    pub fn parse(source: &str) -> Self {
        let words = source
            .lines()
            .map(|line| line.split('#').next().unwrap_or("").trim())
            .filter(|w| !w.is_empty())
            .map(str::to_lowercase)
            .collect();
        let hash = hex::encode(Sha256::digest(source.as_bytes()));
        Self { words, hash }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let source = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&source))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Hex SHA-256 of the list's source bytes.
    pub fn hash(&self) -> &str {
        &self.hash
    }
}

impl Default for Stopwords {
    fn default() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_list_has_127_words() {
        let s = Stopwords::default();
        assert_eq!(s.len(), 127);
        assert!(s.contains("the") && s.contains("when") && s.contains("did"));
        assert!(!s.contains("sony"));
        assert_eq!(s.hash().len(), 64);
    }

    #[test]
    fn comments_and_blanks() {
        let s = Stopwords::parse("# header\nFoo  # trailing\n\nbar\n");
        assert_eq!(s.len(), 2);
        assert!(s.contains("foo") && s.contains("bar"));
    }
}
