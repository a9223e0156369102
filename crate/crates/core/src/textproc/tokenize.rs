use serde::{Deserialize, Serialize};

use super::is_punct;

/// A token with byte offsets into its source text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub start: usize,
    pub end: usize,
}

/// Split on whitespace, then peel leading and trailing punctuation characters
/// off each chunk as single-character tokens.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut chunk_start = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = chunk_start.take() {
                split_chunk(text, s, i, &mut tokens);
            }
        } else if chunk_start.is_none() {
            chunk_start = Some(i);
        }
    }
    if let Some(s) = chunk_start {
        split_chunk(text, s, text.len(), &mut tokens);
    }
    tokens
}

fn split_chunk(text: &str, start: usize, end: usize, out: &mut Vec<Token>) {
    let chunk = &text[start..end];
    let chars: Vec<(usize, char)> = chunk.char_indices().collect();
    let mut lo = 0;
    while lo < chars.len() && is_punct(chars[lo].1) {
        lo += 1;
    }
    let mut hi = chars.len();
    while hi > lo && is_punct(chars[hi - 1].1) {
        hi -= 1;
    }
    let offset = |k: usize| {
        if k < chars.len() {
            start + chars[k].0
        } else {
            end
        }
    };
    let mut push = |a: usize, b: usize| {
        out.push(Token {
            surface: text[a..b].to_string(),
            start: a,
            end: b,
        })
    };
    for k in 0..lo {
        push(offset(k), offset(k + 1));
    }
    if hi > lo {
        push(offset(lo), offset(hi));
    }
    for k in hi.max(lo)..chars.len() {
        push(offset(k), offset(k + 1));
    }
}
