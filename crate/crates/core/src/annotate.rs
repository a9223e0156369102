//! Blinded annotation: task sampling, the label schema, label distributions
//! and label-score correlation.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::Write;
use std::path::Path;

use rand::seq::{index, SliceRandom};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, QuestionStyle};
use crate::error::{Error, Result};
use crate::partition::{Partition, Subset};
use crate::predictions::Evaluation;
use crate::provenance::{read_record_lines, Provenance};
use crate::stats::{pearson_r, permutation_p, Correlation, Ratio};

/// What an annotator sees. Carries no subset label and no scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskPayload {
    pub task_id: String,
    pub style: QuestionStyle,
    pub context: String,
    pub question: String,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub answers: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub options: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub correct: Option<usize>,
}

/// The unblinding key for one task, kept apart from the payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenTaskInfo {
    pub task_id: String,
    pub item_id: String,
    pub subset: Subset,
    #[serde(default)]
    pub baseline_scores: BTreeMap<String, f64>,
}

/// A sampled task. Serializes to its payload only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnotationTask {
    #[serde(flatten)]
    pub payload: TaskPayload,
    #[serde(skip)]
    pub hidden: HiddenTaskInfo,
}

impl AnnotationTask {
    pub fn task_id(&self) -> &str {
        &self.payload.task_id
    }
}

/// Sample `n_per_subset` items uniformly without replacement from each subset
/// and shuffle the combined list. `baselines` attach full-question scores to
/// the hidden side.
pub fn sample_for_annotation(
    partition: &Partition,
    dataset: &Dataset,
    n_per_subset: usize,
    seed: u64,
    baselines: &[&Evaluation],
) -> Result<Vec<AnnotationTask>> {
    let index = dataset.index();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<(Subset, &str)> = Vec::with_capacity(2 * n_per_subset);
    for subset in Subset::ALL {
        let pool: Vec<&str> = partition
            .assignments
            .iter()
            .filter(|a| a.subset == subset)
            .map(|a| a.item_id.as_str())
            .collect();
        if pool.len() < n_per_subset {
            return Err(Error::SubsetTooSmall {
                subset: subset.to_string(),
                available: pool.len(),
                requested: n_per_subset,
            });
        }
        let mut chosen = index::sample(&mut rng, pool.len(), n_per_subset).into_vec();
        chosen.sort_unstable();
        picked.extend(chosen.into_iter().map(|i| (subset, pool[i])));
    }
    picked.shuffle(&mut rng);

    let scores: Vec<HashMap<&str, f64>> = baselines
        .iter()
        .map(|e| {
            e.items
                .iter()
                .map(|i| (i.item_id.as_str(), i.score.primary.value))
                .collect()
        })
        .collect();
    let mut seen = HashSet::new();
    let mut tasks = Vec::with_capacity(picked.len());
    for (subset, item_id) in picked {
        let item = index
            .get(item_id)
            .map(|&i| &dataset.items[i])
            .ok_or_else(|| Error::CoverageGap {
                what: "dataset item".into(),
                ids: vec![item_id.to_string()],
            })?;
        let task_id = loop {
            let id = format!("{:016x}", rng.next_u64());
            if seen.insert(id.clone()) {
                break id;
            }
        };
        let mut baseline_scores = BTreeMap::new();
        for (ev, s) in baselines.iter().zip(&scores) {
            if let Some(v) = s.get(item_id) {
                baseline_scores.insert(ev.system.clone(), *v);
            }
        }
        let mc = item.style == QuestionStyle::MultipleChoice;
        tasks.push(AnnotationTask {
            payload: TaskPayload {
                task_id: task_id.clone(),
                style: item.style,
                context: item.context_text.clone(),
                question: item.question_text.clone(),
                answers: if mc {
                    Vec::new()
                } else {
                    item.gold_answers.clone()
                },
                options: item.options.clone(),
                correct: if mc { item.correct_index } else { None },
            },
            hidden: HiddenTaskInfo {
                task_id,
                item_id: item_id.to_string(),
                subset,
                baseline_scores,
            },
        });
    }
    Ok(tasks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Validity {
    Unsolvable,
    SingleCandidate,
    Ambiguous,
    Valid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Skill {
    WordMatching,
    Paraphrasing,
    Knowledge,
    MetaWhole,
    MathLogic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Coreference,
    Causal,
    SpatialTemporal,
    None,
}

impl Validity {
    pub const ALL: [Validity; 4] = [
        Validity::Unsolvable,
        Validity::SingleCandidate,
        Validity::Ambiguous,
        Validity::Valid,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Validity::Unsolvable => "Unsolvable",
            Validity::SingleCandidate => "Single cand.",
            Validity::Ambiguous => "Ambiguous",
            Validity::Valid => "Valid",
        }
    }
}

impl Skill {
    pub const ALL: [Skill; 5] = [
        Skill::WordMatching,
        Skill::Paraphrasing,
        Skill::Knowledge,
        Skill::MetaWhole,
        Skill::MathLogic,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Skill::WordMatching => "Word match",
            Skill::Paraphrasing => "Paraphrasing",
            Skill::Knowledge => "Knowledge",
            Skill::MetaWhole => "Meta/Whole",
            Skill::MathLogic => "Math/Logic",
        }
    }
}

impl Relation {
    pub const ALL: [Relation; 4] = [
        Relation::Coreference,
        Relation::Causal,
        Relation::SpatialTemporal,
        Relation::None,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Relation::Coreference => "Coreference",
            Relation::Causal => "Causal",
            Relation::SpatialTemporal => "Space/Temp.",
            Relation::None => "None",
        }
    }
}

/// One annotator's judgment of one task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationRecord {
    pub task_id: String,
    pub validity: Validity,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub skill: Option<Skill>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub multi_sentence: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub relation: Option<Relation>,
    pub annotator_id: String,
    #[serde(default)]
    pub timestamp: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

fn violation(field: &str, message: &str) -> Violation {
    Violation {
        field: field.into(),
        message: message.into(),
    }
}

/// Schema check; empty when the record is acceptable.
pub fn validate_record(r: &AnnotationRecord) -> Vec<Violation> {
    let mut out = Vec::new();
    if r.task_id.trim().is_empty() {
        out.push(violation("task_id", "must not be empty"));
    }
    if r.annotator_id.trim().is_empty() {
        out.push(violation("annotator_id", "must not be empty"));
    }
    let valid = r.validity == Validity::Valid;
    match (valid, r.skill.is_some()) {
        (true, false) => out.push(violation("skill", "required when validity is valid")),
        (false, true) => out.push(violation("skill", "only allowed when validity is valid")),
        _ => {}
    }
    match (valid, r.multi_sentence.is_some()) {
        (true, false) => out.push(violation(
            "multi_sentence",
            "required when validity is valid",
        )),
        (false, true) => out.push(violation(
            "multi_sentence",
            "only allowed when validity is valid",
        )),
        _ => {}
    }
    match (r.multi_sentence == Some(true), r.relation.is_some()) {
        (true, false) => out.push(violation(
            "relation",
            "required when multi_sentence is true",
        )),
        (false, true) => out.push(violation(
            "relation",
            "only allowed when multi_sentence is true",
        )),
        _ => {}
    }
    out
}

/// Drop records for tasks already seen, keeping the first.
pub fn first_per_task(records: &[AnnotationRecord]) -> Vec<&AnnotationRecord> {
    let mut seen = HashSet::new();
    records
        .iter()
        .filter(|r| seen.insert(r.task_id.as_str()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    Validity,
    Skill,
    Relation,
    /// Relation types over multi-sentence items instead of valid items.
    RelationOfMulti,
}

impl Block {
    pub fn as_str(self) -> &'static str {
        match self {
            Block::Validity => "validity",
            Block::Skill => "skill",
            Block::Relation => "relation",
            Block::RelationOfMulti => "relation_of_multi",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub block: Block,
    pub label: String,
    pub easy: Ratio,
    pub hard: Ratio,
}

impl DistributionRow {
    pub fn get(&self, subset: Subset) -> Ratio {
        match subset {
            Subset::Easy => self.easy,
            Subset::Hard => self.hard,
        }
    }
}

/// Per-subset label percentages in table row order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelDistribution {
    pub rows: Vec<DistributionRow>,
}

impl LabelDistribution {
    pub fn row(&self, block: Block, label: &str) -> Option<&DistributionRow> {
        self.rows
            .iter()
            .find(|r| r.block == block && r.label == label)
    }
}

/// Validity over all annotated items, skill, multi-sentence and relation over
/// valid items, plus relation over multi-sentence items.
pub fn label_distribution(
    records: &[AnnotationRecord],
    key: &[HiddenTaskInfo],
) -> Result<LabelDistribution> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let subset_of: HashMap<&str, Subset> =
        key.iter().map(|h| (h.task_id.as_str(), h.subset)).collect();
    let mut by_subset: HashMap<Subset, Vec<&AnnotationRecord>> = HashMap::new();
    for r in first_per_task(records) {
        let s = *subset_of
            .get(r.task_id.as_str())
            .ok_or_else(|| Error::UnknownTaskId(r.task_id.clone()))?;
        by_subset.entry(s).or_default().push(r);
    }
    let get = |s: Subset| by_subset.get(&s).map(Vec::as_slice).unwrap_or(&[]);
    let ratio = |s: Subset,
                 within: &dyn Fn(&AnnotationRecord) -> bool,
                 hit: &dyn Fn(&AnnotationRecord) -> bool| {
        let pool: Vec<&&AnnotationRecord> = get(s).iter().filter(|r| within(r)).collect();
        Ratio::new(
            pool.iter().filter(|r| hit(r)).count() as u64,
            pool.len() as u64,
        )
    };
    let row = |block: Block,
               label: &str,
               within: &dyn Fn(&AnnotationRecord) -> bool,
               hit: &dyn Fn(&AnnotationRecord) -> bool| {
        DistributionRow {
            block,
            label: label.into(),
            easy: ratio(Subset::Easy, within, hit),
            hard: ratio(Subset::Hard, within, hit),
        }
    };
    let all = |_: &AnnotationRecord| true;
    let valid = |r: &AnnotationRecord| r.validity == Validity::Valid;
    let multi =
        |r: &AnnotationRecord| r.validity == Validity::Valid && r.multi_sentence == Some(true);

    let mut rows = Vec::new();
    for v in Validity::ALL {
        rows.push(row(Block::Validity, v.label(), &all, &|r| r.validity == v));
    }
    for s in Skill::ALL {
        rows.push(row(Block::Skill, s.label(), &valid, &|r| {
            r.skill == Some(s)
        }));
    }
    rows.push(row(Block::Relation, "Multi sent.", &valid, &|r| {
        r.multi_sentence == Some(true)
    }));
    for rel in &Relation::ALL[..3] {
        rows.push(row(Block::Relation, rel.label(), &valid, &|r| {
            r.relation == Some(*rel)
        }));
    }
    for rel in Relation::ALL {
        rows.push(row(Block::RelationOfMulti, rel.label(), &multi, &|r| {
            r.relation == Some(rel)
        }));
    }
    Ok(LabelDistribution { rows })
}

/// A binary label indicator, used as one side of a correlation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelIndicator {
    Validity(Validity),
    Skill(Skill),
    MultiSentence,
}

impl LabelIndicator {
    pub fn all() -> Vec<LabelIndicator> {
        let mut v: Vec<LabelIndicator> = Validity::ALL[..3]
            .iter()
            .map(|&x| LabelIndicator::Validity(x))
            .collect();
        v.extend(Skill::ALL.iter().map(|&s| LabelIndicator::Skill(s)));
        v.push(LabelIndicator::MultiSentence);
        v
    }

    pub fn label(self) -> &'static str {
        match self {
            LabelIndicator::Validity(v) => v.label(),
            LabelIndicator::Skill(s) => s.label(),
            LabelIndicator::MultiSentence => "Multi sent.",
        }
    }

    /// Validity indicators range over every annotated item; the rest over
    /// valid items only.
    fn applies(self, r: &AnnotationRecord) -> bool {
        matches!(self, LabelIndicator::Validity(_)) || r.validity == Validity::Valid
    }

    fn hit(self, r: &AnnotationRecord) -> bool {
        match self {
            LabelIndicator::Validity(v) => r.validity == v,
            LabelIndicator::Skill(s) => r.skill == Some(s),
            LabelIndicator::MultiSentence => r.multi_sentence == Some(true),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub label: String,
    pub system: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub result: Option<Correlation>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub permutation_p: Option<f64>,
    /// Why `result` is absent.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

/// Correlate each label indicator with each system's full-question score.
/// `permutations` > 0 adds a seeded permutation p.
pub fn correlate(
    records: &[AnnotationRecord],
    key: &[HiddenTaskInfo],
    evaluations: &[Evaluation],
    permutations: usize,
    seed: u64,
) -> Result<Vec<CorrelationRow>> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let item_of: HashMap<&str, &str> = key
        .iter()
        .map(|h| (h.task_id.as_str(), h.item_id.as_str()))
        .collect();
    let records = first_per_task(records);
    for r in &records {
        if !item_of.contains_key(r.task_id.as_str()) {
            return Err(Error::UnknownTaskId(r.task_id.clone()));
        }
    }
    let mut rows = Vec::new();
    for ev in evaluations {
        let scores = ev.by_id();
        let gap: Vec<String> = records
            .iter()
            .map(|r| item_of[r.task_id.as_str()])
            .filter(|id| !scores.contains_key(id))
            .map(str::to_string)
            .collect();
        if !gap.is_empty() {
            return Err(Error::CoverageGap {
                what: format!("{} score", ev.system),
                ids: gap,
            });
        }
        for ind in LabelIndicator::all() {
            let (x, y): (Vec<f64>, Vec<f64>) = records
                .iter()
                .filter(|r| ind.applies(r))
                .map(|r| {
                    let s = scores[item_of[r.task_id.as_str()]].score.primary.value;
                    (if ind.hit(r) { 1.0 } else { 0.0 }, s)
                })
                .unzip();
            let mut row = CorrelationRow {
                label: ind.label().into(),
                system: ev.system.clone(),
                n: x.len(),
                result: None,
                permutation_p: None,
                note: None,
            };
            match pearson_r(&x, &y) {
                Ok(c) => {
                    row.result = Some(c);
                    if permutations > 0 {
                        row.permutation_p = Some(permutation_p(&x, &y, permutations, seed)?);
                    }
                }
                Err(e @ (Error::DegenerateVector | Error::TooFewPoints(_))) => {
                    row.note = Some(e.to_string())
                }
                Err(e) => return Err(e),
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

impl fmt::Display for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn read_lines<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let records = read_record_lines(path)?;
    records
        .lines
        .iter()
        .map(|(n, l)| {
            serde_json::from_str(l).map_err(|e| Error::malformed(path, *n, e.to_string()))
        })
        .collect()
}

fn write_lines<W: Write, T: Serialize>(
    w: &mut W,
    header: Option<&Provenance>,
    rows: &[T],
) -> Result<()> {
    let io = |e| Error::io("<output>", e);
    if let Some(h) = header {
        h.write_header(w).map_err(io)?;
    }
    for r in rows {
        writeln!(
            w,
            "{}",
            serde_json::to_string(r).expect("record serializes")
        )
        .map_err(io)?;
    }
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<AnnotationRecord>> {
    read_lines(path)
}

pub fn read_payloads(path: &Path) -> Result<Vec<TaskPayload>> {
    read_lines(path)
}

pub fn read_key(path: &Path) -> Result<Vec<HiddenTaskInfo>> {
    read_lines(path)
}

/// Write the blinded task file and the separate unblinding key.
pub fn write_tasks<W: Write, K: Write>(
    tasks: &[AnnotationTask],
    header: &Provenance,
    tasks_out: &mut W,
    key_out: &mut K,
) -> Result<()> {
    let payloads: Vec<&TaskPayload> = tasks.iter().map(|t| &t.payload).collect();
    let key: Vec<&HiddenTaskInfo> = tasks.iter().map(|t| &t.hidden).collect();
    write_lines(tasks_out, Some(header), &payloads)?;
    write_lines(key_out, Some(header), &key)
}

pub fn write_records<W: Write, T: Serialize>(
    w: &mut W,
    header: Option<&Provenance>,
    rows: &[T],
) -> Result<()> {
    write_lines(w, header, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CanonicalItem, DatasetProvenance};
    use crate::partition::{Evidence, SubsetAssignment};

    fn setup(n_easy: usize, n_hard: usize) -> (Dataset, Partition) {
        let n = n_easy + n_hard;
        let items = (0..n)
            .map(|i| CanonicalItem {
                item_id: format!("q{i}"),
                context_text: format!("Context number {i}."),
                question_text: "What?".into(),
                gold_answers: vec![format!("{i}")],
                ..Default::default()
            })
            .collect();
        let prov = DatasetProvenance {
            source: "mem".into(),
            adapter: "test".into(),
            ingested_unix: 0,
        };
        let ds = Dataset::new("d", items, prov).unwrap();
        let assignments = (0..n)
            .map(|i| SubsetAssignment {
                item_id: format!("q{i}"),
                subset: if i < n_easy {
                    Subset::Easy
                } else {
                    Subset::Hard
                },
                evidence: Evidence {
                    k2_score: 0.0,
                    answer_in_most_similar: false,
                    zero_overlap: false,
                },
            })
            .collect();
        (ds, Partition { assignments })
    }

    fn record(
        task: &str,
        validity: Validity,
        skill: Option<Skill>,
        multi: Option<bool>,
        rel: Option<Relation>,
    ) -> AnnotationRecord {
        AnnotationRecord {
            task_id: task.into(),
            validity,
            skill,
            multi_sentence: multi,
            relation: rel,
            annotator_id: "a1".into(),
            timestamp: "0".into(),
            note: None,
        }
    }

    #[test]
    fn sampling_counts_and_determinism() {
        let (ds, p) = setup(50, 40);
        let a = sample_for_annotation(&p, &ds, 30, 11, &[]).unwrap();
        assert_eq!(a.len(), 60);
        assert_eq!(
            a.iter().filter(|t| t.hidden.subset == Subset::Hard).count(),
            30
        );
        let b = sample_for_annotation(&p, &ds, 30, 11, &[]).unwrap();
        assert_eq!(a, b);
        let c = sample_for_annotation(&p, &ds, 30, 12, &[]).unwrap();
        assert_ne!(a, c);
        let ids: HashSet<&str> = a.iter().map(|t| t.hidden.item_id.as_str()).collect();
        assert_eq!(ids.len(), 60);
    }

    #[test]
    fn too_small_subset_is_named() {
        let (ds, p) = setup(50, 10);
        match sample_for_annotation(&p, &ds, 30, 1, &[]) {
            Err(Error::SubsetTooSmall {
                subset, available, ..
            }) => {
                assert_eq!(subset, "hard");
                assert_eq!(available, 10);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn serialized_task_is_blind() {
        let (ds, p) = setup(5, 5);
        let tasks = sample_for_annotation(&p, &ds, 5, 3, &[]).unwrap();
        for t in &tasks {
            let s = serde_json::to_string(t).unwrap();
            for banned in ["easy", "hard", "subset", "score", "item_id", "baseline"] {
                assert!(!s.contains(banned), "{banned} in {s}");
            }
        }
    }

    #[test]
    fn schema_rules() {
        let amb = record("t", Validity::Ambiguous, Some(Skill::Knowledge), None, None);
        assert_eq!(validate_record(&amb).len(), 1);
        let ok = record(
            "t",
            Validity::Valid,
            Some(Skill::WordMatching),
            Some(false),
            None,
        );
        assert!(validate_record(&ok).is_empty());
        let no_rel = record(
            "t",
            Validity::Valid,
            Some(Skill::WordMatching),
            Some(true),
            None,
        );
        assert_eq!(validate_record(&no_rel)[0].field, "relation");
        let none_rel = record(
            "t",
            Validity::Valid,
            Some(Skill::Knowledge),
            Some(true),
            Some(Relation::None),
        );
        assert!(validate_record(&none_rel).is_empty());
    }

    fn key(n: usize, subset: Subset) -> Vec<HiddenTaskInfo> {
        (0..n)
            .map(|i| HiddenTaskInfo {
                task_id: format!("t{i}"),
                item_id: format!("q{i}"),
                subset,
                baseline_scores: BTreeMap::new(),
            })
            .collect()
    }

    #[test]
    fn skill_denominator_is_valid_count() {
        let mut recs = Vec::new();
        for i in 0..10 {
            let skill = if i < 4 {
                Skill::WordMatching
            } else {
                Skill::Knowledge
            };
            recs.push(record(
                &format!("t{i}"),
                Validity::Valid,
                Some(skill),
                Some(false),
                None,
            ));
        }
        for i in 10..15 {
            recs.push(record(
                &format!("t{i}"),
                Validity::Ambiguous,
                None,
                None,
                None,
            ));
        }
        let d = label_distribution(&recs, &key(15, Subset::Easy)).unwrap();
        assert_eq!(
            d.row(Block::Skill, "Word match").unwrap().easy.percent(),
            Some(40.0)
        );
        let valid = d.row(Block::Validity, "Valid").unwrap().easy;
        assert_eq!(valid, Ratio::new(10, 15));
        assert_eq!(
            d.row(Block::Skill, "Word match").unwrap().hard.percent(),
            None
        );
    }

    #[test]
    fn distribution_errors() {
        assert!(matches!(
            label_distribution(&[], &[]),
            Err(Error::EmptyRecords)
        ));
        let r = record("zz", Validity::Unsolvable, None, None, None);
        assert!(matches!(
            label_distribution(&[r], &key(1, Subset::Easy)),
            Err(Error::UnknownTaskId(_))
        ));
    }
}
