use serde::{Deserialize, Serialize};

use super::tokenize::{tokenize, Token};

/// A sentence as a contiguous run of context tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceSpan {
    pub index: usize,
    pub start: usize,
    pub end: usize,
    /// Index of the sentence's first token in the whole-text token list.
    pub first_token: usize,
    pub tokens: Vec<Token>,
}

impl SentenceSpan {
    /// Token index range `[first_token, first_token + len)`.
    pub fn token_range(&self) -> std::ops::Range<usize> {
        self.first_token..self.first_token + self.tokens.len()
    }

    pub fn text<'a>(&self, source: &'a str) -> &'a str {
        &source[self.start..self.end]
    }
}

// Compared against the lowercased token preceding a period, plus the period.
const ABBREVIATIONS: &[&str] = &[
    "mr.", "mrs.", "ms.", "dr.", "prof.", "sr.", "jr.", "st.", "mt.", "ft.", "gen.", "gov.",
    "sen.", "rep.", "rev.", "capt.", "col.", "lt.", "sgt.", "vs.", "etc.", "e.g.", "i.e.", "cf.",
    "al.", "approx.", "inc.", "ltd.", "co.", "corp.", "no.", "vol.", "fig.", "u.s.", "u.k.",
    "u.n.", "d.c.", "a.m.", "p.m.", "jan.", "feb.", "mar.", "apr.", "jun.", "jul.", "aug.", "sep.",
    "sept.", "oct.", "nov.", "dec.",
];

fn is_terminator(s: &str) -> bool {
    matches!(s, "." | "?" | "!")
}

fn is_closer(s: &str) -> bool {
    matches!(s, "\"" | "'" | ")" | "]" | "}" | "”" | "’" | "»")
}

fn opens_sentence(s: &str) -> bool {
    match s.chars().next() {
        Some(c) => c.is_uppercase() || matches!(c, '"' | '\'' | '“' | '‘' | '(' | '[' | '«'),
        None => false,
    }
}

fn is_abbreviation(tokens: &[Token], period: usize) -> bool {
    if period == 0 || tokens[period].surface != "." {
        return false;
    }
    let prev = &tokens[period - 1];
    if prev.end != tokens[period].start {
        return false;
    }
    let candidate = format!("{}.", prev.surface.to_lowercase());
    ABBREVIATIONS.contains(&candidate.as_str())
}

/// Rule-based sentence split at `.`, `?` or `!` followed by whitespace and an
/// uppercase letter or opening quote. Closing quotes and brackets glued to the
/// terminator stay with the ending sentence.
pub fn segment_sentences(text: &str) -> Vec<SentenceSpan> {
    split_tokens(tokenize(text))
}

/// Segment an already tokenized text.
pub fn split_tokens(tokens: Vec<Token>) -> Vec<SentenceSpan> {
    let mut bounds = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if is_terminator(&tokens[i].surface) && !is_abbreviation(&tokens, i) {
            let mut j = i;
            while j + 1 < tokens.len()
                && tokens[j + 1].start == tokens[j].end
                && (is_terminator(&tokens[j + 1].surface) || is_closer(&tokens[j + 1].surface))
            {
                j += 1;
            }
            if j + 1 < tokens.len()
                && tokens[j + 1].start > tokens[j].end
                && opens_sentence(&tokens[j + 1].surface)
            {
                bounds.push(j + 1);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    bounds.push(tokens.len());

    let mut sentences = Vec::with_capacity(bounds.len());
    let mut lo = 0;
    for hi in bounds {
        if hi > lo {
            let toks = tokens[lo..hi].to_vec();
            sentences.push(SentenceSpan {
                index: sentences.len(),
                start: toks[0].start,
                end: toks[toks.len() - 1].end,
                first_token: lo,
                tokens: toks,
            });
        }
        lo = hi;
    }
    sentences
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(text: &str) -> Vec<&str> {
        segment_sentences(text)
            .iter()
            .map(|s| s.text(text))
            .collect()
    }

    #[test]
    fn single_letters_are_not_abbreviations() {
        assert_eq!(texts("A. B? C!"), ["A.", "B?", "C!"]);
    }

    #[test]
    fn no_terminator_is_one_sentence() {
        assert_eq!(texts("no terminator here"), ["no terminator here"]);
        assert!(segment_sentences("").is_empty());
    }

    #[test]
    fn abbreviation_guard() {
        assert_eq!(
            texts("Mr. Smith went to the U.S. Army base. It was big."),
            ["Mr. Smith went to the U.S. Army base.", "It was big."]
        );
    }

    #[test]
    fn lowercase_continuation_does_not_split() {
        assert_eq!(
            texts("It cost 3.5 m. in total."),
            ["It cost 3.5 m. in total."]
        );
    }

    #[test]
    fn closing_quote_stays_with_sentence() {
        assert_eq!(
            texts("He said \"Go.\" Then he left."),
            ["He said \"Go.\"", "Then he left."]
        );
    }

    #[test]
    fn ellipsis_in_brackets() {
        assert_eq!(
            texts("They released memos regarding [...]. Included were several."),
            [
                "They released memos regarding [...].",
                "Included were several."
            ]
        );
    }

    #[test]
    fn spans_tile_tokens() {
        let text = "One. Two three? \"Four\" five! six";
        let all = tokenize(text);
        let sents = segment_sentences(text);
        let joined: Vec<Token> = sents.iter().flat_map(|s| s.tokens.clone()).collect();
        assert_eq!(joined, all);
        for (k, s) in sents.iter().enumerate() {
            assert_eq!(s.index, k);
            assert_eq!(all[s.token_range()], s.tokens[..]);
        }
    }
}
