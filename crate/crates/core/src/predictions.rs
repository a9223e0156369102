//! External model predictions: loading, alignment with a dataset, scoring.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, QuestionStyle, Variant};
use crate::error::{Error, Result};
use crate::metrics::{score_item, ItemScore, Metric, Prediction};
use crate::provenance::{read_record_lines, Provenance};
use crate::stats::Ratio;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionHeader {
    pub dataset_id: String,
    pub variant: Variant,
    pub system: String,
}

/// On-disk prediction file: a header plus a flat id → answer map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionFile {
    pub header: PredictionHeader,
    pub predictions: BTreeMap<String, Prediction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    /// Absent items are listed and scored 0.
    #[default]
    ScoreZero,
    Strict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    pub dataset_id: String,
    pub variant: Variant,
    pub system_name: String,
    pub answers: HashMap<String, Prediction>,
    /// Dataset items without a prediction, in dataset order.
    pub missing: Vec<String>,
}

impl PredictionFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::malformed(path, e.line(), e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("prediction file serializes");
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

/// Load a prediction file and align it with `dataset`.
pub fn load_predictions(
    path: &Path,
    dataset: &Dataset,
    variant: Variant,
    policy: MissingPolicy,
) -> Result<PredictionSet> {
    align_predictions(PredictionFile::read(path)?, dataset, variant, policy)
}

pub fn align_predictions(
    file: PredictionFile,
    dataset: &Dataset,
    variant: Variant,
    policy: MissingPolicy,
) -> Result<PredictionSet> {
    if file.header.variant != variant {
        return Err(Error::VariantMismatch {
            expected: variant.tag(),
            found: file.header.variant.tag(),
        });
    }
    let index = dataset.index();
    let unknown: Vec<String> = file
        .predictions
        .keys()
        .filter(|k| !index.contains_key(k.as_str()))
        .cloned()
        .collect();
    if !unknown.is_empty() {
        return Err(Error::UnknownItemIds(unknown));
    }
    for (id, p) in &file.predictions {
        let ok = matches!(
            (dataset.style, p),
            (QuestionStyle::MultipleChoice, Prediction::Index(_))
                | (
                    QuestionStyle::Extraction | QuestionStyle::Description,
                    Prediction::Text(_)
                )
        );
        if !ok {
            return Err(Error::KindMismatch {
                item_id: id.clone(),
                expected: if dataset.style == QuestionStyle::MultipleChoice {
                    "option index".into()
                } else {
                    "answer string".into()
                },
            });
        }
    }
    let missing: Vec<String> = dataset
        .items
        .iter()
        .filter(|i| !file.predictions.contains_key(&i.item_id))
        .map(|i| i.item_id.clone())
        .collect();
    if policy == MissingPolicy::Strict && !missing.is_empty() {
        return Err(Error::MissingPredictions(missing));
    }
    Ok(PredictionSet {
        dataset_id: file.header.dataset_id,
        variant: file.header.variant,
        system_name: file.header.system,
        answers: file.predictions.into_iter().collect(),
        missing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemEvaluation {
    #[serde(rename = "id")]
    pub item_id: String,
    #[serde(flatten)]
    pub score: ItemScore,
    #[serde(default)]
    pub missing: bool,
}

/// Per-item scores of one system on one dataset variant.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub dataset_id: String,
    pub style: QuestionStyle,
    pub variant: Variant,
    pub system: String,
    pub items: Vec<ItemEvaluation>,
}

/// Mean scores over a set of items, as percentages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub n: usize,
    pub metric: Metric,
    pub mean: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub em_mean: Option<f64>,
}

pub fn evaluate(dataset: &Dataset, preds: &PredictionSet, beta: f64) -> Result<Evaluation> {
    let items = dataset
        .items
        .iter()
        .map(|item| match preds.answers.get(&item.item_id) {
            Some(p) => Ok(ItemEvaluation {
                item_id: item.item_id.clone(),
                score: score_item(item, p, beta)?,
                missing: false,
            }),
            None => Ok(ItemEvaluation {
                item_id: item.item_id.clone(),
                score: ItemScore::zero(dataset.style),
                missing: true,
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Evaluation {
        dataset_id: dataset.dataset_id.clone(),
        style: dataset.style,
        variant: preds.variant,
        system: preds.system_name.clone(),
        items,
    })
}

impl Evaluation {
    pub fn primary_metric(&self) -> Metric {
        Metric::primary_for(self.style)
    }

    pub fn by_id(&self) -> HashMap<&str, &ItemEvaluation> {
        self.items.iter().map(|e| (e.item_id.as_str(), e)).collect()
    }

    /// Aggregate over every item.
    pub fn aggregate(&self) -> Option<Aggregate> {
        aggregate_of(self.primary_metric(), self.items.iter())
    }

    /// Aggregate over the items whose id is in `ids`; `None` when empty.
    pub fn aggregate_over(&self, ids: &HashSet<&str>) -> Option<Aggregate> {
        aggregate_of(
            self.primary_metric(),
            self.items
                .iter()
                .filter(|e| ids.contains(e.item_id.as_str())),
        )
    }

    /// Items whose primary score reaches `threshold` (inclusive).
    pub fn count_at_least(&self, threshold: f64) -> Ratio {
        let hits = self
            .items
            .iter()
            .filter(|e| e.score.primary.value >= threshold)
            .count();
        Ratio::new(hits as u64, self.items.len() as u64)
    }

    pub fn missing(&self) -> Vec<&str> {
        self.items
            .iter()
            .filter(|e| e.missing)
            .map(|e| e.item_id.as_str())
            .collect()
    }

    pub fn require_variant(&self, variant: Variant) -> Result<()> {
        if self.variant == variant {
            Ok(())
        } else {
            Err(Error::VariantMismatch {
                expected: variant.tag(),
                found: self.variant.tag(),
            })
        }
    }

    pub fn provenance_fields(&self, p: Provenance) -> Provenance {
        p.with("dataset_id", self.dataset_id.clone())
            .with("style", self.style.as_str())
            .with("variant", self.variant.tag())
            .with("system", self.system.clone())
    }

    pub fn write<W: Write>(&self, w: &mut W, header: &Provenance) -> Result<()> {
        let io = |e| Error::io("<output>", e);
        self.provenance_fields(header.clone())
            .write_header(w)
            .map_err(io)?;
        for e in &self.items {
            writeln!(w, "{}", serde_json::to_string(e).expect("score serializes")).map_err(io)?;
        }
        Ok(())
    }

    pub fn read(path: &Path) -> Result<(Self, Provenance)> {
        let records = read_record_lines(path)?;
        let header = records
            .provenance
            .ok_or_else(|| Error::malformed(path, 1, "score file lacks a provenance header"))?;
        let field = |k: &str| {
            header
                .get_str(k)
                .map(str::to_string)
                .ok_or_else(|| Error::malformed(path, 1, format!("header lacks `{k}`")))
        };
        let style: QuestionStyle = field("style")?.parse()?;
        let variant: Variant = field("variant")?.parse()?;
        let mut items = Vec::with_capacity(records.lines.len());
        for (n, line) in &records.lines {
            let e: ItemEvaluation = serde_json::from_str(line)
                .map_err(|e| Error::malformed(path, *n, e.to_string()))?;
            items.push(e);
        }
        Ok((
            Evaluation {
                dataset_id: field("dataset_id")?,
                style,
                variant,
                system: field("system")?,
                items,
            },
            header,
        ))
    }
}

fn aggregate_of<'a>(
    metric: Metric,
    items: impl Iterator<Item = &'a ItemEvaluation>,
) -> Option<Aggregate> {
    let mut n = 0usize;
    let mut sum = 0.0;
    let mut em_sum = 0.0;
    let mut has_em = true;
    for e in items {
        n += 1;
        sum += e.score.primary.value;
        match e.score.em {
            Some(s) => em_sum += s.value,
            None => has_em = false,
        }
    }
    (n > 0).then(|| Aggregate {
        n,
        metric,
        mean: 100.0 * sum / n as f64,
        em_mean: has_em.then(|| 100.0 * em_sum / n as f64),
    })
}
