//! Canonical dataset records and the ingest adapters that produce them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::provenance::{read_record_lines, Provenance};
use crate::textproc::normalize_answer;

#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum QuestionStyle {
    #[default]
    Extraction,
    Description,
    MultipleChoice,
}

impl QuestionStyle {
    pub fn as_str(self) -> &'static str {
        match self {
            QuestionStyle::Extraction => "extraction",
            QuestionStyle::Description => "description",
            QuestionStyle::MultipleChoice => "multiple_choice",
        }
    }
}

impl fmt::Display for QuestionStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QuestionStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "extraction" => Ok(QuestionStyle::Extraction),
            "description" => Ok(QuestionStyle::Description),
            "multiple_choice" => Ok(QuestionStyle::MultipleChoice),
            other => Err(Error::InvalidArgument(format!("unknown style {other:?}"))),
        }
    }
}

/// Which question variant a dataset (or prediction file) represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Full,
    /// Question cut to its first `k` tokens.
    Truncated(usize),
    SimOnly,
}

impl Variant {
    pub fn tag(self) -> String {
        match self {
            Variant::Full => "full".to_string(),
            Variant::Truncated(k) => format!("k{k}"),
            Variant::SimOnly => "sim_only".to_string(),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Variant::Full),
            "sim_only" => Ok(Variant::SimOnly),
            _ => s
                .strip_prefix('k')
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| k >= 1)
                .map(Variant::Truncated)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown variant {s:?}"))),
        }
    }
}

impl Serialize for Variant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.tag())
    }
}

impl<'de> Deserialize<'de> for Variant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemFlag {
    /// A gold answer (or the projected answer span) is not inside the context.
    GoldNotInContext,
}

impl ItemFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            ItemFlag::GoldNotInContext => "gold_not_in_context",
        }
    }
}

impl FromStr for ItemFlag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gold_not_in_context" => Ok(ItemFlag::GoldNotInContext),
            other => Err(Error::InvalidArgument(format!(
                "unknown item flag {other:?}"
            ))),
        }
    }
}

/// Meta keys with a defined meaning.
pub const META_VARIANT: &str = "variant";
pub const META_PARENT_ID: &str = "parent_id";
pub const META_FLAGS: &str = "flags";
pub const META_NOTE: &str = "note";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CanonicalItem {
    pub item_id: String,
    pub style: QuestionStyle,
    pub context_text: String,
    pub question_text: String,
    /// Extraction and description only.
    pub gold_answers: Vec<String>,
    /// Multiple choice only.
    pub options: Vec<String>,
    pub correct_index: Option<usize>,
    pub source_meta: BTreeMap<String, String>,
    pub flags: BTreeSet<ItemFlag>,
    /// Unrecognized record fields, kept so export reproduces them.
    pub extra: Map<String, Value>,
}

impl CanonicalItem {
    pub fn correct_option(&self) -> Option<&str> {
        self.correct_index
            .and_then(|i| self.options.get(i))
            .map(String::as_str)
    }

    /// The strings an answer is checked against: gold answers, or the correct
    /// option for multiple choice.
    pub fn answer_targets(&self) -> Vec<&str> {
        match self.style {
            QuestionStyle::MultipleChoice => self.correct_option().into_iter().collect(),
            _ => self.gold_answers.iter().map(String::as_str).collect(),
        }
    }

    /// Extraction invariant: every gold answer is a case-sensitive substring
    /// of the context.
    pub fn golds_in_context(&self) -> bool {
        self.gold_answers
            .iter()
            .all(|g| self.context_text.contains(g.as_str()))
    }

    pub fn variant(&self) -> Result<Variant> {
        match self.source_meta.get(META_VARIANT) {
            Some(v) => v.parse(),
            None => Ok(Variant::Full),
        }
    }

    fn to_record(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("id".into(), Value::from(self.item_id.clone()));
        obj.insert("style".into(), Value::from(self.style.as_str()));
        obj.insert("context".into(), Value::from(self.context_text.clone()));
        obj.insert("question".into(), Value::from(self.question_text.clone()));
        match self.style {
            QuestionStyle::MultipleChoice => {
                obj.insert("options".into(), Value::from(self.options.clone()));
                obj.insert(
                    "correct".into(),
                    self.correct_index.map(Value::from).unwrap_or(Value::Null),
                );
            }
            _ => {
                obj.insert("answers".into(), Value::from(self.gold_answers.clone()));
            }
        }
        let mut meta = self.source_meta.clone();
        if !self.flags.is_empty() {
            let flags: Vec<&str> = self.flags.iter().map(|f| f.as_str()).collect();
            meta.insert(META_FLAGS.into(), flags.join(","));
        }
        if !meta.is_empty() {
            let m: Map<String, Value> =
                meta.into_iter().map(|(k, v)| (k, Value::from(v))).collect();
            obj.insert("meta".into(), Value::Object(m));
        }
        for (k, v) in &self.extra {
            obj.insert(k.clone(), v.clone());
        }
        Value::Object(obj)
    }

    /// One canonical record line (no trailing newline).
    pub fn to_record_line(&self) -> String {
        serde_json::to_string(&self.to_record()).expect("record serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetProvenance {
    pub source: String,
    pub adapter: String,
    pub ingested_unix: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub dataset_id: String,
    pub style: QuestionStyle,
    pub items: Vec<CanonicalItem>,
    pub provenance: DatasetProvenance,
    /// Header found on the source file, if any.
    pub header: Option<Provenance>,
}

impl Dataset {
    /// Checks non-emptiness and that every item carries the dataset's style.
    pub fn new(
        dataset_id: impl Into<String>,
        items: Vec<CanonicalItem>,
        provenance: DatasetProvenance,
    ) -> Result<Self> {
        let style = items.first().ok_or(Error::EmptyDataset)?.style;
        if let Some(bad) = items.iter().find(|i| i.style != style) {
            return Err(Error::WrongStyle {
                expected: style.to_string(),
                found: format!("{} (item {})", bad.style, bad.item_id),
            });
        }
        Ok(Self {
            dataset_id: dataset_id.into(),
            style,
            items,
            provenance,
            header: None,
        })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Item position by id (first occurrence).
    pub fn index(&self) -> HashMap<&str, usize> {
        let mut map = HashMap::with_capacity(self.items.len());
        for (i, item) in self.items.iter().enumerate() {
            map.entry(item.item_id.as_str()).or_insert(i);
        }
        map
    }

    pub fn get(&self, item_id: &str) -> Option<&CanonicalItem> {
        self.items.iter().find(|i| i.item_id == item_id)
    }

    /// Variant shared by every item; `Full` when untagged.
    pub fn variant(&self) -> Result<Variant> {
        let first = self.items.first().ok_or(Error::EmptyDataset)?.variant()?;
        for item in &self.items {
            let v = item.variant()?;
            if v != first {
                return Err(Error::VariantMismatch {
                    expected: first.tag(),
                    found: format!("{} (item {})", v.tag(), item.item_id),
                });
            }
        }
        Ok(first)
    }

    /// Write the canonical line-record form, optionally preceded by a header.
    pub fn write_canonical<W: Write>(&self, w: &mut W, header: Option<&Provenance>) -> Result<()> {
        let io = |e| Error::io("<output>", e);
        if let Some(h) = header {
            h.write_header(w).map_err(io)?;
        }
        for item in &self.items {
            writeln!(w, "{}", item.to_record_line()).map_err(io)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    SquadJson,
    JsonlCanonical,
}

impl InputFormat {
    pub fn name(self) -> &'static str {
        match self {
            InputFormat::SquadJson => "squad_json",
            InputFormat::JsonlCanonical => "jsonl_canonical",
        }
    }
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "squad_json" => Ok(InputFormat::SquadJson),
            "jsonl_canonical" => Ok(InputFormat::JsonlCanonical),
            other => Err(Error::InvalidArgument(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    /// Reject unknown record fields instead of preserving them.
    pub strict: bool,
    /// Skip extraction/description items without a non-blank gold answer.
    pub drop_empty_answers: bool,
    /// Style assigned to SQuAD-format items (extraction when unset).
    pub squad_style: Option<QuestionStyle>,
    /// Defaults to the input file stem.
    pub dataset_id: Option<String>,
    pub ingested_unix: u64,
}

/// Ingest an extraction- or description-style dataset.
pub fn ingest_extraction(
    path: &Path,
    format: InputFormat,
    opts: &IngestOptions,
) -> Result<Dataset> {
    let ds = ingest(path, format, opts)?;
    if ds.style == QuestionStyle::MultipleChoice {
        return Err(Error::WrongStyle {
            expected: "extraction or description".into(),
            found: ds.style.to_string(),
        });
    }
    Ok(ds)
}

pub fn ingest_multiple_choice(path: &Path, opts: &IngestOptions) -> Result<Dataset> {
    let ds = ingest(path, InputFormat::JsonlCanonical, opts)?;
    if ds.style != QuestionStyle::MultipleChoice {
        return Err(Error::WrongStyle {
            expected: QuestionStyle::MultipleChoice.to_string(),
            found: ds.style.to_string(),
        });
    }
    Ok(ds)
}

/// Ingest any style; the style comes from the records themselves.
pub fn ingest(path: &Path, format: InputFormat, opts: &IngestOptions) -> Result<Dataset> {
    let (items, header) = match format {
        InputFormat::SquadJson => (read_squad(path, opts)?, None),
        InputFormat::JsonlCanonical => read_canonical(path, opts)?,
    };
    let dataset_id = opts.dataset_id.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into())
    });
    let provenance = DatasetProvenance {
        source: path.display().to_string(),
        adapter: format.name().to_string(),
        ingested_unix: opts.ingested_unix,
    };
    let mut ds = Dataset::new(dataset_id, items, provenance)?;
    ds.header = header;
    Ok(ds)
}

const KNOWN_FIELDS: &[&str] = &[
    "id", "style", "context", "question", "answers", "options", "correct", "meta",
];

fn read_canonical(
    path: &Path,
    opts: &IngestOptions,
) -> Result<(Vec<CanonicalItem>, Option<Provenance>)> {
    let records = read_record_lines(path)?;
    let mut items: Vec<CanonicalItem> = Vec::with_capacity(records.lines.len());
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut style: Option<QuestionStyle> = None;
    for (line_no, line) in &records.lines {
        let value: Value = serde_json::from_str(line)
            .map_err(|e| Error::malformed(path, *line_no, e.to_string()))?;
        let Value::Object(obj) = value else {
            return Err(Error::malformed(path, *line_no, "record is not an object"));
        };
        let Some(item) = parse_record(path, *line_no, obj, opts)? else {
            continue;
        };
        match style {
            None => style = Some(item.style),
            Some(s) if s != item.style => {
                return Err(Error::schema(
                    path,
                    *line_no,
                    &item.item_id,
                    format!("style {} differs from dataset style {s}", item.style),
                ))
            }
            _ => {}
        }
        if let Some(first) = seen.get(&item.item_id) {
            return Err(Error::schema(
                path,
                *line_no,
                &item.item_id,
                format!("duplicate id (first seen on line {first})"),
            ));
        }
        seen.insert(item.item_id.clone(), *line_no);
        items.push(item);
    }
    if items.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok((items, records.provenance))
}

fn string_field(
    obj: &Map<String, Value>,
    key: &str,
    path: &Path,
    line: usize,
    record: &str,
) -> Result<String> {
    match obj.get(key) {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(Error::schema(
            path,
            line,
            record,
            format!("`{key}` must be a string"),
        )),
        None => Err(Error::schema(
            path,
            line,
            record,
            format!("missing `{key}`"),
        )),
    }
}

fn string_list(
    v: &Value,
    key: &str,
    path: &Path,
    line: usize,
    record: &str,
) -> Result<Vec<String>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::schema(path, line, record, format!("`{key}` must be an array")))?;
    arr.iter()
        .map(|x| {
            x.as_str().map(str::to_string).ok_or_else(|| {
                Error::schema(
                    path,
                    line,
                    record,
                    format!("`{key}` entries must be strings"),
                )
            })
        })
        .collect()
}

fn parse_record(
    path: &Path,
    line: usize,
    mut obj: Map<String, Value>,
    opts: &IngestOptions,
) -> Result<Option<CanonicalItem>> {
    let id = match obj.get("id") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => {
            return Err(Error::schema(
                path,
                line,
                "<record>",
                "`id` must be a string",
            ))
        }
        None => return Err(Error::schema(path, line, "<record>", "missing `id`")),
    };
    let style: QuestionStyle = string_field(&obj, "style", path, line, &id)?
        .parse()
        .map_err(|e: Error| Error::schema(path, line, &id, e.to_string()))?;
    let context = string_field(&obj, "context", path, line, &id)?;
    let question = string_field(&obj, "question", path, line, &id)?;

    let mut meta = BTreeMap::new();
    if let Some(m) = obj.get("meta") {
        let m = m
            .as_object()
            .ok_or_else(|| Error::schema(path, line, &id, "`meta` must be an object"))?;
        for (k, v) in m {
            let v = v.as_str().ok_or_else(|| {
                Error::schema(path, line, &id, format!("meta `{k}` must be a string"))
            })?;
            meta.insert(k.clone(), v.to_string());
        }
    }
    let mut flags = BTreeSet::new();
    if let Some(f) = meta.remove(META_FLAGS) {
        for name in f.split(',').filter(|s| !s.is_empty()) {
            let flag = name
                .parse()
                .map_err(|e: Error| Error::schema(path, line, &id, e.to_string()))?;
            flags.insert(flag);
        }
    }

    let mut item = CanonicalItem {
        item_id: id.clone(),
        style,
        context_text: context,
        question_text: question,
        source_meta: meta,
        flags,
        ..Default::default()
    };

    match style {
        QuestionStyle::MultipleChoice => {
            if obj.contains_key("answers") {
                return Err(Error::schema(
                    path,
                    line,
                    &id,
                    "`answers` not allowed for multiple_choice",
                ));
            }
            let options = obj
                .get("options")
                .ok_or_else(|| Error::schema(path, line, &id, "missing `options`"))
                .and_then(|v| string_list(v, "options", path, line, &id))?;
            let correct = obj.get("correct").and_then(Value::as_i64).ok_or_else(|| {
                Error::schema(path, line, &id, "missing or non-integer `correct`")
            })?;
            check_options(&options, correct).map_err(|m| Error::schema(path, line, &id, m))?;
            item.options = options;
            item.correct_index = Some(correct as usize);
        }
        _ => {
            if obj.contains_key("options") || obj.contains_key("correct") {
                return Err(Error::schema(
                    path,
                    line,
                    &id,
                    "`options`/`correct` only allowed for multiple_choice",
                ));
            }
            let answers = obj
                .get("answers")
                .ok_or_else(|| Error::schema(path, line, &id, "missing `answers`"))
                .and_then(|v| string_list(v, "answers", path, line, &id))?;
            if answers.iter().all(|a| a.trim().is_empty()) {
                if opts.drop_empty_answers {
                    return Ok(None);
                }
                return Err(Error::schema(path, line, &id, "no non-empty gold answer"));
            }
            item.gold_answers = answers;
            if style == QuestionStyle::Extraction && !item.golds_in_context() {
                item.flags.insert(ItemFlag::GoldNotInContext);
            }
        }
    }

    for key in KNOWN_FIELDS {
        obj.remove(*key);
    }
    if !obj.is_empty() {
        if opts.strict {
            let names: Vec<&str> = obj.keys().map(String::as_str).collect();
            return Err(Error::schema(
                path,
                line,
                &id,
                format!("unknown field(s): {}", names.join(", ")),
            ));
        }
        item.extra = obj;
    }
    Ok(Some(item))
}

/// Multiple-choice constraints on options and the correct index.
fn check_options(options: &[String], correct: i64) -> std::result::Result<(), String> {
    if options.len() < 2 {
        return Err(format!("need at least 2 options, got {}", options.len()));
    }
    if correct < 0 || correct as usize >= options.len() {
        return Err(format!(
            "correct index {correct} out of range for {} options",
            options.len()
        ));
    }
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (i, o) in options.iter().enumerate() {
        if let Some(j) = seen.insert(normalize_answer(o), i) {
            return Err(format!(
                "options {j} and {i} are duplicates after normalization"
            ));
        }
    }
    Ok(())
}

fn read_squad(path: &Path, opts: &IngestOptions) -> Result<Vec<CanonicalItem>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let root: Value =
        serde_json::from_str(&text).map_err(|e| Error::malformed(path, e.line(), e.to_string()))?;
    let style = opts.squad_style.unwrap_or(QuestionStyle::Extraction);
    if style == QuestionStyle::MultipleChoice {
        return Err(Error::InvalidArgument(
            "SQuAD-format files cannot carry multiple-choice items".into(),
        ));
    }
    let schema = |at: String, msg: &str| Error::schema(path, 0, at, msg.to_string());
    let data = root
        .get("data")
        .and_then(Value::as_array)
        .ok_or_else(|| schema("data".into(), "missing `data` array"))?;

    let mut items = Vec::new();
    let mut seen = HashMap::new();
    for (ai, article) in data.iter().enumerate() {
        let title = article.get("title").and_then(Value::as_str);
        let paragraphs = article
            .get("paragraphs")
            .and_then(Value::as_array)
            .ok_or_else(|| schema(format!("data[{ai}]"), "missing `paragraphs` array"))?;
        for (pi, para) in paragraphs.iter().enumerate() {
            let at_p = format!("data[{ai}].paragraphs[{pi}]");
            let context = para
                .get("context")
                .and_then(Value::as_str)
                .ok_or_else(|| schema(at_p.clone(), "missing `context` string"))?;
            let qas = para
                .get("qas")
                .and_then(Value::as_array)
                .ok_or_else(|| schema(at_p.clone(), "missing `qas` array"))?;
            for (qi, qa) in qas.iter().enumerate() {
                let at = format!("{at_p}.qas[{qi}]");
                let id = qa
                    .get("id")
                    .and_then(Value::as_str)
                    .ok_or_else(|| schema(at.clone(), "missing `id` string"))?;
                let question = qa
                    .get("question")
                    .and_then(Value::as_str)
                    .ok_or_else(|| schema(at.clone(), "missing `question` string"))?;
                let answers = qa
                    .get("answers")
                    .and_then(Value::as_array)
                    .ok_or_else(|| schema(at.clone(), "missing `answers` array"))?;
                let mut golds = Vec::with_capacity(answers.len());
                for (ki, a) in answers.iter().enumerate() {
                    let t = a.get("text").and_then(Value::as_str).ok_or_else(|| {
                        schema(format!("{at}.answers[{ki}]"), "missing `text` string")
                    })?;
                    golds.push(t.to_string());
                }
                if golds.iter().all(|g| g.trim().is_empty()) {
                    if opts.drop_empty_answers {
                        continue;
                    }
                    return Err(schema(at, "no non-empty gold answer"));
                }
                if let Some(prev) = seen.insert(id.to_string(), at.clone()) {
                    return Err(schema(at, &format!("duplicate id {id} (first at {prev})")));
                }
                let mut item = CanonicalItem {
                    item_id: id.to_string(),
                    style,
                    context_text: context.to_string(),
                    question_text: question.to_string(),
                    gold_answers: golds,
                    ..Default::default()
                };
                if let Some(t) = title {
                    item.source_meta.insert("title".into(), t.to_string());
                }
                if style == QuestionStyle::Extraction && !item.golds_in_context() {
                    item.flags.insert(ItemFlag::GoldNotInContext);
                }
                items.push(item);
            }
        }
    }
    if items.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(items)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationEntry {
    pub severity: Severity,
    pub code: String,
    pub item_ids: Vec<String>,
    /// 0-based item positions.
    pub positions: Vec<usize>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub entries: Vec<ValidationEntry>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.entries.iter().any(|e| e.severity == Severity::Error)
    }

    fn push(&mut self, severity: Severity, code: &str, items: &[(usize, &str)], message: String) {
        self.entries.push(ValidationEntry {
            severity,
            code: code.into(),
            item_ids: items.iter().map(|(_, id)| id.to_string()).collect(),
            positions: items.iter().map(|(p, _)| *p).collect(),
            message,
        });
    }
}

/// Check every dataset and item invariant; never modifies the dataset.
pub fn validate(dataset: &Dataset) -> ValidationReport {
    let mut report = ValidationReport::default();
    if dataset.items.is_empty() {
        report.push(
            Severity::Error,
            "empty_dataset",
            &[],
            "dataset has no items".into(),
        );
        return report;
    }
    let mut first_pos: HashMap<&str, usize> = HashMap::new();
    for (pos, item) in dataset.items.iter().enumerate() {
        let here = [(pos, item.item_id.as_str())];
        if let Some(&prev) = first_pos.get(item.item_id.as_str()) {
            report.push(
                Severity::Error,
                "duplicate_id",
                &[(prev, item.item_id.as_str()), (pos, item.item_id.as_str())],
                format!(
                    "id {:?} appears at positions {prev} and {pos}",
                    item.item_id
                ),
            );
        } else {
            first_pos.insert(&item.item_id, pos);
        }
        if item.style != dataset.style {
            report.push(
                Severity::Error,
                "style_mismatch",
                &here,
                format!(
                    "item style {} differs from dataset style {}",
                    item.style, dataset.style
                ),
            );
        }
        match item.style {
            QuestionStyle::MultipleChoice => {
                let correct = item.correct_index.map(|c| c as i64).unwrap_or(-1);
                if let Err(m) = check_options(&item.options, correct) {
                    report.push(Severity::Error, "bad_options", &here, m);
                }
            }
            _ => {
                if item.gold_answers.iter().all(|g| g.trim().is_empty()) {
                    report.push(
                        Severity::Error,
                        "no_gold_answer",
                        &here,
                        "no non-empty gold answer".into(),
                    );
                }
            }
        }
        let absent = item.style == QuestionStyle::Extraction && !item.golds_in_context();
        if absent || item.flags.contains(&ItemFlag::GoldNotInContext) {
            report.push(
                Severity::Warning,
                ItemFlag::GoldNotInContext.as_str(),
                &here,
                "gold answer not found verbatim in context".into(),
            );
        }
    }
    report
}
