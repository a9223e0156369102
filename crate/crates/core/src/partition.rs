//! Easy/hard assignment and per-subset aggregation.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, QuestionStyle, Variant};
use crate::error::{Error, Result};
use crate::heuristics::SimilarityProfile;
use crate::metrics::Metric;
use crate::predictions::{Aggregate, Evaluation};
use crate::provenance::{read_record_lines, Provenance};
use crate::stats::Ratio;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subset {
    Easy,
    Hard,
}

impl Subset {
    pub const ALL: [Subset; 2] = [Subset::Easy, Subset::Hard];

    pub fn as_str(self) -> &'static str {
        match self {
            Subset::Easy => "easy",
            Subset::Hard => "hard",
        }
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which k=2 score decides the "solved" half of the hard test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HardMetric {
    /// The style's primary metric (F1 for extraction).
    #[default]
    Primary,
    Em,
}

impl FromStr for HardMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "primary" | "f1" | "rouge-l" | "accuracy" => Ok(HardMetric::Primary),
            "em" => Ok(HardMetric::Em),
            _ => Err(Error::InvalidArgument(format!("unknown hard metric `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub k2_score: f64,
    pub answer_in_most_similar: bool,
    pub zero_overlap: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetAssignment {
    #[serde(rename = "id")]
    pub item_id: String,
    pub subset: Subset,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub assignments: Vec<SubsetAssignment>,
}

fn require(style_variant: Variant, ev: &Evaluation) -> Result<()> {
    ev.require_variant(style_variant)
}

fn score_of(ev: &crate::predictions::ItemEvaluation, metric: HardMetric) -> f64 {
    match metric {
        HardMetric::Primary => ev.score.primary.value,
        HardMetric::Em => ev.score.em.map_or(ev.score.primary.value, |s| s.value),
    }
}

/// Hard iff the k=2 score is not positive and the answer is outside the most
/// similar sentence; easy otherwise.
pub fn partition(
    dataset: &Dataset,
    k2: &Evaluation,
    profiles: &[SimilarityProfile],
    metric: HardMetric,
) -> Result<Partition> {
    require(Variant::Truncated(2), k2)?;
    if metric == HardMetric::Em && dataset.style != QuestionStyle::Extraction {
        return Err(Error::InvalidArgument(
            "EM is only defined for extraction datasets".into(),
        ));
    }
    let scores = k2.by_id();
    let profiles: HashMap<&str, &SimilarityProfile> =
        profiles.iter().map(|p| (p.item_id.as_str(), p)).collect();
    let gap = |what: &str, f: &dyn Fn(&str) -> bool| -> Result<()> {
        let ids: Vec<String> = dataset
            .items
            .iter()
            .filter(|i| !f(&i.item_id))
            .map(|i| i.item_id.clone())
            .collect();
        if ids.is_empty() {
            Ok(())
        } else {
            Err(Error::CoverageGap {
                what: what.into(),
                ids,
            })
        }
    };
    gap("k=2 score", &|id| scores.contains_key(id))?;
    gap("similarity profile", &|id| profiles.contains_key(id))?;
    let assignments = dataset
        .items
        .iter()
        .map(|item| {
            let id = item.item_id.as_str();
            let k2_score = score_of(scores[id], metric);
            let p = profiles[id];
            let hard = k2_score <= 0.0 && !p.answer_in_most_similar;
            SubsetAssignment {
                item_id: item.item_id.clone(),
                subset: if hard { Subset::Hard } else { Subset::Easy },
                evidence: Evidence {
                    k2_score,
                    answer_in_most_similar: p.answer_in_most_similar,
                    zero_overlap: p.zero_overlap,
                },
            }
        })
        .collect();
    Ok(Partition { assignments })
}

impl Partition {
    pub fn ids(&self, subset: Subset) -> HashSet<&str> {
        self.assignments
            .iter()
            .filter(|a| a.subset == subset)
            .map(|a| a.item_id.as_str())
            .collect()
    }

    pub fn count(&self, subset: Subset) -> usize {
        self.assignments
            .iter()
            .filter(|a| a.subset == subset)
            .count()
    }

    pub fn hard_fraction(&self) -> Ratio {
        Ratio::new(
            self.count(Subset::Hard) as u64,
            self.assignments.len() as u64,
        )
    }

    pub fn subset_of(&self) -> HashMap<&str, Subset> {
        self.assignments
            .iter()
            .map(|a| (a.item_id.as_str(), a.subset))
            .collect()
    }

    pub fn write<W: Write>(&self, w: &mut W, header: &Provenance) -> Result<()> {
        let io = |e| Error::io("<output>", e);
        header.write_header(w).map_err(io)?;
        for a in &self.assignments {
            writeln!(
                w,
                "{}",
                serde_json::to_string(a).expect("assignment serializes")
            )
            .map_err(io)?;
        }
        Ok(())
    }

    pub fn read(path: &Path) -> Result<(Self, Option<Provenance>)> {
        let records = read_record_lines(path)?;
        let assignments = records
            .lines
            .iter()
            .map(|(n, l)| {
                serde_json::from_str(l).map_err(|e| Error::malformed(path, *n, e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((Partition { assignments }, records.provenance))
    }
}

/// Share of questions whose k=2 primary score reaches 0.5.
pub fn solved_ratio_k2(dataset: &Dataset, k2: &Evaluation) -> Result<Ratio> {
    if dataset.style == QuestionStyle::MultipleChoice {
        return Err(Error::WrongStyle {
            expected: "extraction or description".into(),
            found: dataset.style.to_string(),
        });
    }
    require(Variant::Truncated(2), k2)?;
    Ok(k2.count_at_least(0.5))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetAggregates {
    pub metric: Metric,
    pub easy_n: usize,
    pub hard_n: usize,
    /// `None` when the subset is empty.
    pub easy: Option<Aggregate>,
    pub hard: Option<Aggregate>,
}

/// Aggregate full-question scores separately over the easy and hard subsets.
pub fn subset_evaluate(partition: &Partition, full: &Evaluation) -> Result<SubsetAggregates> {
    require(Variant::Full, full)?;
    let scored = full.by_id();
    let missing: Vec<String> = partition
        .assignments
        .iter()
        .filter(|a| !scored.contains_key(a.item_id.as_str()))
        .map(|a| a.item_id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::CoverageGap {
            what: "full-question score".into(),
            ids: missing,
        });
    }
    let easy = partition.ids(Subset::Easy);
    let hard = partition.ids(Subset::Hard);
    Ok(SubsetAggregates {
        metric: full.primary_metric(),
        easy_n: easy.len(),
        hard_n: hard.len(),
        easy: full.aggregate_over(&easy),
        hard: full.aggregate_over(&hard),
    })
}
