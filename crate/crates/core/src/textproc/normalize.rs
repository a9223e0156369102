use std::sync::LazyLock;

use regex::Regex;

use super::is_punct;

static ARTICLES: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\b(a|an|the)\b").unwrap());

/// Answer normalization in the style of the SQuAD evaluation script:
/// lowercase, delete punctuation, blank out articles, collapse whitespace.
///
/// Punctuation is ASCII punctuation (all of it, symbols included) plus any
/// non-ASCII character in a Unicode `P*` category.
pub fn normalize_answer(text: &str) -> String {
    let lowered = text.to_lowercase();
    let no_punct: String = lowered.chars().filter(|&c| !is_punct(c)).collect();
    let no_articles = ARTICLES.replace_all(&no_punct, " ");
    no_articles.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Whitespace tokens of the normalized answer.
pub fn normalized_tokens(text: &str) -> Vec<String> {
    normalize_answer(text)
        .split(' ')
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}
