//! The two answer-seeking heuristics: leading-token question truncation and
//! lexical-overlap sentence retrieval, plus gold-span projection for styles
//! whose answers are not context spans.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{
    CanonicalItem, ItemFlag, QuestionStyle, Variant, META_NOTE, META_PARENT_ID, META_VARIANT,
};
use crate::error::{Error, Result};
use crate::metrics::{check_beta, rouge_from_lcs, rouge_tokens};
use crate::textproc::{
    content_terms, normalized_tokens, segment_sentences, tokenize, SentenceSpan, Stopwords,
};

/// Number of leading question tokens kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationSpec {
    k: usize,
}

impl TruncationSpec {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        Ok(Self { k })
    }

    pub fn k(self) -> usize {
        self.k
    }
}

fn tag_variant(item: &mut CanonicalItem, variant: Variant) {
    let parent = item
        .source_meta
        .get(META_PARENT_ID)
        .cloned()
        .unwrap_or_else(|| item.item_id.clone());
    item.source_meta.insert(META_PARENT_ID.into(), parent);
    item.source_meta.insert(META_VARIANT.into(), variant.tag());
}

/// Keep the question's first `k` tokens by slicing the original bytes at the
/// end of token `k`.
pub fn truncate_question(item: &CanonicalItem, spec: TruncationSpec) -> Result<CanonicalItem> {
    let tokens = tokenize(&item.question_text);
    if tokens.is_empty() {
        return Err(Error::EmptyQuestion(item.item_id.clone()));
    }
    let mut out = item.clone();
    if tokens.len() > spec.k {
        out.question_text = item.question_text[..tokens[spec.k - 1].end].to_string();
    }
    tag_variant(&mut out, Variant::Truncated(spec.k));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OverlapMode {
    /// Every sentence occurrence of a question term counts.
    #[default]
    SentenceCount,
    /// Multiset intersection: occurrences capped at the question's own count.
    MinCount,
}

impl OverlapMode {
    pub fn as_str(self) -> &'static str {
        match self {
            OverlapMode::SentenceCount => "sentence-count",
            OverlapMode::MinCount => "min-count",
        }
    }
}

impl fmt::Display for OverlapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OverlapMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sentence-count" => Ok(OverlapMode::SentenceCount),
            "min-count" => Ok(OverlapMode::MinCount),
            other => Err(Error::InvalidArgument(format!(
                "unknown overlap mode {other:?}"
            ))),
        }
    }
}

/// Uni-gram overlap between the question's content terms and each sentence's.
pub fn sentence_overlaps(
    item: &CanonicalItem,
    sentences: &[SentenceSpan],
    stopwords: &Stopwords,
    mode: OverlapMode,
) -> Vec<usize> {
    let question = content_terms(&tokenize(&item.question_text), stopwords);
    sentences
        .iter()
        .map(|s| {
            let bag = content_terms(&s.tokens, stopwords);
            question
                .iter()
                .map(|(term, q)| {
                    let c = bag.count(term);
                    match mode {
                        OverlapMode::SentenceCount => c,
                        OverlapMode::MinCount => c.min(q),
                    }
                })
                .sum()
        })
        .collect()
}

/// Smallest index attaining the maximum, and whether every overlap is zero.
/// `None` for an empty list.
pub fn most_similar_index(overlaps: &[usize]) -> Option<(usize, bool)> {
    let max = *overlaps.iter().max()?;
    let idx = overlaps.iter().position(|&o| o == max)?;
    Some((idx, max == 0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityProfile {
    pub item_id: String,
    pub per_sentence_overlap: Vec<usize>,
    pub most_similar_index: usize,
    pub answer_in_most_similar: bool,
    /// Every sentence scored zero; index 0 was taken by default.
    pub zero_overlap: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanProjection {
    pub item_id: String,
    /// Context token indices, end exclusive.
    pub token_start: usize,
    pub token_end: usize,
    pub rouge_value: f64,
    /// No context token matches the target.
    #[serde(default)]
    pub no_lexical_anchor: bool,
}

impl SpanProjection {
    pub fn intersects(&self, range: std::ops::Range<usize>) -> bool {
        self.token_start < range.end && range.start < self.token_end
    }
}

/// Does the item's answer lie in `sentence`?
///
/// Extraction items test contiguous containment of a normalized gold token
/// sequence; other styles test whether the projected span overlaps the
/// sentence's token range.
pub fn answer_in_sentence(
    item: &CanonicalItem,
    sentence: &SentenceSpan,
    projection: Option<&SpanProjection>,
) -> Result<bool> {
    match item.style {
        QuestionStyle::Extraction => {
            let text: String = sentence
                .tokens
                .iter()
                .map(|t| t.surface.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            let hay = normalized_tokens(&text);
            Ok(item.gold_answers.iter().any(|g| {
                let needle = normalized_tokens(g);
                !needle.is_empty() && hay.windows(needle.len()).any(|w| w == needle.as_slice())
            }))
        }
        _ => {
            let p = projection.ok_or_else(|| Error::MissingProjection(item.item_id.clone()))?;
            Ok(p.intersects(sentence.token_range()))
        }
    }
}

/// Segment the context and build the item's similarity profile.
pub fn similarity_profile(
    item: &CanonicalItem,
    stopwords: &Stopwords,
    mode: OverlapMode,
    projection: Option<&SpanProjection>,
) -> Result<SimilarityProfile> {
    let sentences = segment_sentences(&item.context_text);
    profile_from_sentences(item, &sentences, stopwords, mode, projection)
}

pub fn profile_from_sentences(
    item: &CanonicalItem,
    sentences: &[SentenceSpan],
    stopwords: &Stopwords,
    mode: OverlapMode,
    projection: Option<&SpanProjection>,
) -> Result<SimilarityProfile> {
    let overlaps = sentence_overlaps(item, sentences, stopwords, mode);
    let (idx, zero) = most_similar_index(&overlaps).ok_or(Error::EmptyContext)?;
    let answer_in = answer_in_sentence(item, &sentences[idx], projection)?;
    Ok(SimilarityProfile {
        item_id: item.item_id.clone(),
        per_sentence_overlap: overlaps,
        most_similar_index: idx,
        answer_in_most_similar: answer_in,
        zero_overlap: zero,
    })
}

/// Span length bound for projection search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpanLimit {
    /// Target token length plus this many tokens.
    Slack(usize),
    Max(usize),
    Unbounded,
}

impl Default for SpanLimit {
    fn default() -> Self {
        SpanLimit::Slack(8)
    }
}

impl SpanLimit {
    fn resolve(self, target_len: usize, context_len: usize) -> Result<usize> {
        let n = match self {
            SpanLimit::Slack(s) => target_len + s,
            SpanLimit::Max(m) => m,
            SpanLimit::Unbounded => context_len,
        };
        if n == 0 {
            return Err(Error::InvalidArgument(
                "max span length must be at least 1".into(),
            ));
        }
        Ok(n.min(context_len))
    }
}

/// Token-level span search over lowercased tokens. Returns
/// `(start, end, value)`; ties go to the earliest start, then the shortest
/// span. With no match anywhere the span is `(0, max_len)` with value 0.
pub fn best_rouge_span<T: PartialEq>(
    context: &[T],
    target: &[T],
    beta: f64,
    max_len: usize,
) -> (usize, usize, f64) {
    let n = context.len();
    let m = target.len();
    let max_len = max_len.min(n);
    let mut best = (0, max_len, 0.0_f64);
    let mut prev = vec![0usize; m + 1];
    let mut cur = vec![0usize; m + 1];
    for start in 0..n {
        prev.iter_mut().for_each(|x| *x = 0);
        for len in 1..=max_len.min(n - start) {
            let x = &context[start + len - 1];
            cur[0] = 0;
            for j in 0..m {
                cur[j + 1] = if *x == target[j] {
                    prev[j] + 1
                } else {
                    cur[j].max(prev[j + 1])
                };
            }
            std::mem::swap(&mut prev, &mut cur);
            let value = rouge_from_lcs(prev[m], len, m, beta);
            if value > best.2 {
                best = (start, start + len, value);
            }
        }
    }
    best
}

/// Context span with the highest Rouge-L against `target`.
pub fn project_gold_span(
    item: &CanonicalItem,
    target: &str,
    beta: f64,
    limit: SpanLimit,
) -> Result<SpanProjection> {
    check_beta(beta)?;
    let target_tokens = rouge_tokens(target);
    if target_tokens.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let context_tokens = rouge_tokens(&item.context_text);
    if context_tokens.is_empty() {
        return Err(Error::EmptyContext);
    }
    let max_len = limit.resolve(target_tokens.len(), context_tokens.len())?;
    let (start, end, value) = best_rouge_span(&context_tokens, &target_tokens, beta, max_len);
    Ok(SpanProjection {
        item_id: item.item_id.clone(),
        token_start: start,
        token_end: end,
        rouge_value: value,
        no_lexical_anchor: value == 0.0,
    })
}

/// Projection of the item's own answer: the correct option for multiple
/// choice, otherwise the best span over all gold answers (earlier gold wins
/// ties).
pub fn project_item(item: &CanonicalItem, beta: f64, limit: SpanLimit) -> Result<SpanProjection> {
    let targets = item.answer_targets();
    let mut best: Option<SpanProjection> = None;
    for t in targets.iter().filter(|t| !rouge_tokens(t).is_empty()) {
        let p = project_gold_span(item, t, beta, limit)?;
        if best.as_ref().is_none_or(|b| p.rouge_value > b.rouge_value) {
            best = Some(p);
        }
    }
    best.ok_or(Error::EmptyTarget)
}

/// Replace the context with its most similar sentence. Answers missing from
/// the reduced context are flagged `gold_not_in_context`.
pub fn sim_only_context(
    item: &CanonicalItem,
    profile: &SimilarityProfile,
) -> Result<CanonicalItem> {
    if profile.item_id != item.item_id {
        return Err(Error::InvalidArgument(format!(
            "profile for {} applied to item {}",
            profile.item_id, item.item_id
        )));
    }
    let sentences = segment_sentences(&item.context_text);
    let sentence = sentences
        .get(profile.most_similar_index)
        .ok_or(Error::EmptyContext)?;
    let mut out = item.clone();
    tag_variant(&mut out, Variant::SimOnly);
    if sentences.len() == 1 {
        out.source_meta.insert(
            META_NOTE.into(),
            "single-sentence context kept whole".into(),
        );
        return Ok(out);
    }
    out.context_text = sentence.text(&item.context_text).to_string();
    let present = match item.style {
        QuestionStyle::Extraction => out.golds_in_context(),
        _ => profile.answer_in_most_similar,
    };
    if present {
        out.flags.remove(&ItemFlag::GoldNotInContext);
    } else {
        out.flags.insert(ItemFlag::GoldNotInContext);
    }
    Ok(out)
}
