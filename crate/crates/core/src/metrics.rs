//! Answer scoring: exact match, token F1, Rouge-L and multiple-choice accuracy.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{CanonicalItem, QuestionStyle};
use crate::error::{Error, Result};
use crate::textproc::{normalize_answer, normalized_tokens, tokenize};

/// F-measure weight used by the MS MARCO Rouge-L script.
pub const DEFAULT_BETA: f64 = 1.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Em,
    F1,
    RougeL,
    Accuracy,
}

impl Metric {
    pub fn label(self) -> &'static str {
        match self {
            Metric::Em => "EM",
            Metric::F1 => "F1",
            Metric::RougeL => "Rouge-L",
            Metric::Accuracy => "Accuracy",
        }
    }

    /// The metric a style is scored by.
    pub fn primary_for(style: QuestionStyle) -> Metric {
        match style {
            QuestionStyle::Extraction => Metric::F1,
            QuestionStyle::Description => Metric::RougeL,
            QuestionStyle::MultipleChoice => Metric::Accuracy,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub metric: Metric,
    pub value: f64,
}

impl Score {
    pub fn new(metric: Metric, value: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&value), "{metric} value {value}");
        Self { metric, value }
    }
}

pub fn exact_match(pred: &str, golds: &[impl AsRef<str>]) -> Result<Score> {
    if golds.is_empty() {
        return Err(Error::EmptyGolds);
    }
    let p = normalize_answer(pred);
    let hit = golds.iter().any(|g| normalize_answer(g.as_ref()) == p);
    Ok(Score::new(Metric::Em, if hit { 1.0 } else { 0.0 }))
}

/// Bag-of-normalized-tokens F1 against one gold answer.
pub fn f1_single(pred: &str, gold: &str) -> f64 {
    let p = normalized_tokens(pred);
    let g = normalized_tokens(gold);
    if p.is_empty() || g.is_empty() {
        return if p.is_empty() && g.is_empty() {
            1.0
        } else {
            0.0
        };
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in &g {
        *counts.entry(t.as_str()).or_insert(0) += 1;
    }
    let mut same = 0usize;
    for t in &p {
        if let Some(c) = counts.get_mut(t.as_str()) {
            if *c > 0 {
                *c -= 1;
                same += 1;
            }
        }
    }
    if same == 0 {
        return 0.0;
    }
    let precision = same as f64 / p.len() as f64;
    let recall = same as f64 / g.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

/// Max token F1 over the gold answers.
pub fn token_f1(pred: &str, golds: &[impl AsRef<str>]) -> Result<Score> {
    if golds.is_empty() {
        return Err(Error::EmptyGolds);
    }
    let best = golds
        .iter()
        .map(|g| f1_single(pred, g.as_ref()))
        .fold(0.0, f64::max);
    Ok(Score::new(Metric::F1, best))
}

/// Length of the longest common subsequence, two-row dynamic program.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut prev = vec![0usize; short.len() + 1];
    let mut cur = vec![0usize; short.len() + 1];
    for x in long {
        for (j, y) in short.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[short.len()]
}

/// Rouge-L F-measure from an LCS length and the two sequence lengths.
pub fn rouge_from_lcs(lcs: usize, pred_len: usize, gold_len: usize, beta: f64) -> f64 {
    if pred_len == 0 && gold_len == 0 {
        return 1.0;
    }
    if lcs == 0 {
        return 0.0;
    }
    let precision = lcs as f64 / pred_len as f64;
    let recall = lcs as f64 / gold_len as f64;
    let b2 = beta * beta;
    (1.0 + b2) * precision * recall / (recall + b2 * precision)
}

pub fn rouge_l_tokens<T: PartialEq>(pred: &[T], gold: &[T], beta: f64) -> f64 {
    rouge_from_lcs(lcs_len(pred, gold), pred.len(), gold.len(), beta)
}

/// Tokenizer output, lowercased. No answer normalization is applied.
pub fn rouge_tokens(text: &str) -> Vec<String> {
    tokenize(text)
        .into_iter()
        .map(|t| t.surface.to_lowercase())
        .collect()
}

pub fn rouge_l(pred: &str, gold: &str, beta: f64) -> Result<Score> {
    check_beta(beta)?;
    let value = rouge_l_tokens(&rouge_tokens(pred), &rouge_tokens(gold), beta);
    Ok(Score::new(Metric::RougeL, value))
}

/// Max Rouge-L over the gold answers.
pub fn rouge_l_max(pred: &str, golds: &[impl AsRef<str>], beta: f64) -> Result<Score> {
    check_beta(beta)?;
    if golds.is_empty() {
        return Err(Error::EmptyGolds);
    }
    let p = rouge_tokens(pred);
    let best = golds
        .iter()
        .map(|g| rouge_l_tokens(&p, &rouge_tokens(g.as_ref()), beta))
        .fold(0.0, f64::max);
    Ok(Score::new(Metric::RougeL, best))
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "beta must be positive, got {beta}"
        )))
    }
}

pub fn accuracy(predicted_index: i64, item: &CanonicalItem) -> Result<Score> {
    if item.style != QuestionStyle::MultipleChoice {
        return Err(Error::WrongStyle {
            expected: QuestionStyle::MultipleChoice.to_string(),
            found: item.style.to_string(),
        });
    }
    if predicted_index < 0 || predicted_index as usize >= item.options.len() {
        return Err(Error::IndexOutOfRange {
            index: predicted_index,
            len: item.options.len(),
        });
    }
    let hit = item.correct_index == Some(predicted_index as usize);
    Ok(Score::new(Metric::Accuracy, if hit { 1.0 } else { 0.0 }))
}

/// A model answer: free text, or an option index for multiple choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Prediction {
    Index(i64),
    Text(String),
}

/// Style-primary score plus exact match where it applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ItemScore {
    pub primary: Score,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub em: Option<Score>,
}

impl ItemScore {
    /// Score of an item with no prediction.
    pub fn zero(style: QuestionStyle) -> Self {
        Self {
            primary: Score::new(Metric::primary_for(style), 0.0),
            em: (style == QuestionStyle::Extraction).then(|| Score::new(Metric::Em, 0.0)),
        }
    }

    pub fn value(&self, metric: Metric) -> Option<f64> {
        if self.primary.metric == metric {
            Some(self.primary.value)
        } else {
            self.em.filter(|s| s.metric == metric).map(|s| s.value)
        }
    }
}

pub fn score_item(item: &CanonicalItem, prediction: &Prediction, beta: f64) -> Result<ItemScore> {
    let mismatch = |expected: &str| Error::KindMismatch {
        item_id: item.item_id.clone(),
        expected: expected.into(),
    };
    match (item.style, prediction) {
        (QuestionStyle::Extraction, Prediction::Text(p)) => Ok(ItemScore {
            primary: token_f1(p, &item.gold_answers)?,
            em: Some(exact_match(p, &item.gold_answers)?),
        }),
        (QuestionStyle::Description, Prediction::Text(p)) => Ok(ItemScore {
            primary: rouge_l_max(p, &item.gold_answers, beta)?,
            em: None,
        }),
        (QuestionStyle::MultipleChoice, Prediction::Index(i)) => Ok(ItemScore {
            primary: accuracy(*i, item)?,
            em: None,
        }),
        (QuestionStyle::MultipleChoice, Prediction::Text(_)) => Err(mismatch("option index")),
        (_, Prediction::Index(_)) => Err(mismatch("answer string")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_match_examples() {
        assert_eq!(
            exact_match("November 2014", &["November 2014"])
                .unwrap()
                .value,
            1.0
        );
        assert_eq!(
            exact_match("The November 2014", &["november 2014"])
                .unwrap()
                .value,
            1.0
        );
        assert_eq!(
            exact_match("December 2014", &["November 2014"])
                .unwrap()
                .value,
            0.0
        );
        assert!(matches!(
            exact_match("x", &[] as &[&str]),
            Err(Error::EmptyGolds)
        ));
    }

    #[test]
    fn token_f1_examples() {
        assert_eq!(
            token_f1("November 2014", &["November 2014"]).unwrap().value,
            1.0
        );
        let v = token_f1("late November 2014", &["November 2014"])
            .unwrap()
            .value;
        assert!((v - 0.8).abs() < 1e-12, "{v}");
        assert_eq!(token_f1("", &["x"]).unwrap().value, 0.0);
        assert_eq!(token_f1("the", &["a"]).unwrap().value, 1.0);
        assert_eq!(token_f1("cat", &["dog", "the cat"]).unwrap().value, 1.0);
    }

    #[test]
    fn rouge_examples() {
        assert_eq!(
            rouge_l("a b c d e", "a b c d e", DEFAULT_BETA)
                .unwrap()
                .value,
            1.0
        );
        let v = rouge_l_tokens(&["a", "b", "c"], &["a", "c"], 1.2);
        // (1 + 1.44) * (2/3) / (1 + 1.44 * 2/3)
        assert!((v - 0.829_931_972_789_115_6).abs() < 1e-12, "{v}");
        assert_eq!(rouge_l("x y", "z w", DEFAULT_BETA).unwrap().value, 0.0);
        assert_eq!(rouge_l("", "", DEFAULT_BETA).unwrap().value, 1.0);
        assert_eq!(rouge_l("", "a", DEFAULT_BETA).unwrap().value, 0.0);
        assert!(rouge_l("a", "a", 0.0).is_err());
    }

    #[test]
    fn rouge_is_case_insensitive_but_not_normalized() {
        assert_eq!(rouge_l("The Cat", "the cat", 1.2).unwrap().value, 1.0);
        assert!(rouge_l("cat", "the cat", 1.2).unwrap().value < 1.0);
    }

    #[test]
    fn accuracy_errors() {
        let item = CanonicalItem {
            item_id: "m".into(),
            style: QuestionStyle::MultipleChoice,
            options: vec!["a".into(), "b".into(), "c".into(), "d".into()],
            correct_index: Some(2),
            ..Default::default()
        };
        assert_eq!(accuracy(2, &item).unwrap().value, 1.0);
        assert_eq!(accuracy(1, &item).unwrap().value, 0.0);
        assert!(matches!(
            accuracy(5, &item),
            Err(Error::IndexOutOfRange { .. })
        ));
        let ext = CanonicalItem::default();
        assert!(matches!(accuracy(0, &ext), Err(Error::WrongStyle { .. })));
    }

    #[test]
    fn score_item_dispatch() {
        let ext = CanonicalItem {
            item_id: "e".into(),
            gold_answers: vec!["November 2014".into()],
            ..Default::default()
        };
        let s = score_item(
            &ext,
            &Prediction::Text("November 2014".into()),
            DEFAULT_BETA,
        )
        .unwrap();
        assert_eq!(
            s.primary,
            Score {
                metric: Metric::F1,
                value: 1.0
            }
        );
        assert_eq!(s.em.unwrap().value, 1.0);
        assert!(matches!(
            score_item(&ext, &Prediction::Index(0), DEFAULT_BETA),
            Err(Error::KindMismatch { .. })
        ));

        let desc = CanonicalItem {
            style: QuestionStyle::Description,
            gold_answers: vec!["a free-form answer, with commas".into()],
            ..ext.clone()
        };
        let s = score_item(
            &desc,
            &Prediction::Text(desc.gold_answers[0].clone()),
            DEFAULT_BETA,
        )
        .unwrap();
        assert_eq!(s.primary.metric, Metric::RougeL);
        assert_eq!(s.primary.value, 1.0);
    }

    #[test]
    fn prediction_json_shapes() {
        let p: Prediction = serde_json::from_str("3").unwrap();
        assert_eq!(p, Prediction::Index(3));
        let p: Prediction = serde_json::from_str("\"3\"").unwrap();
        assert_eq!(p, Prediction::Text("3".into()));
    }
}
