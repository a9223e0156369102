//! Dataset statistics and the rendered analysis report.
//!
//! A report is a flat list of rows, one number per row. The text, CSV and
//! JSONL renderings carry the same rounded values.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::annotate::{Block, CorrelationRow, LabelDistribution};
use crate::corpus::{Dataset, QuestionStyle, Variant};
use crate::error::{Error, Result};
use crate::heuristics::SimilarityProfile;
use crate::metrics::Metric;
use crate::partition::{Partition, Subset};
use crate::predictions::{Aggregate, Evaluation};
use crate::provenance::Provenance;
use crate::stats::{round_half_even, Ratio};
use crate::textproc::{segment_sentences, tokenize};

pub const DECIMALS: u32 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub n_questions: u64,
    /// Totals over items; divide by `n_questions` for averages.
    pub context_tokens: Ratio,
    pub question_tokens: Ratio,
    pub context_sentences: Ratio,
    pub ans_in_sim: Ratio,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub solved_k2: Option<Ratio>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hard: Option<Ratio>,
}

impl DatasetStats {
    pub fn avg_context_tokens(&self) -> f64 {
        self.context_tokens.value().unwrap_or(0.0)
    }

    pub fn avg_question_tokens(&self) -> f64 {
        self.question_tokens.value().unwrap_or(0.0)
    }

    pub fn avg_context_sentences(&self) -> f64 {
        self.context_sentences.value().unwrap_or(0.0)
    }

    pub fn pct_ans_in_sim(&self) -> f64 {
        self.ans_in_sim.percent().unwrap_or(0.0)
    }
}

pub fn dataset_stats(
    dataset: &Dataset,
    profiles: &[SimilarityProfile],
    solved_k2: Option<Ratio>,
    partition: Option<&Partition>,
) -> Result<DatasetStats> {
    let in_sim: std::collections::HashMap<&str, bool> = profiles
        .iter()
        .map(|p| (p.item_id.as_str(), p.answer_in_most_similar))
        .collect();
    let gap: Vec<String> = dataset
        .items
        .iter()
        .filter(|i| !in_sim.contains_key(i.item_id.as_str()))
        .map(|i| i.item_id.clone())
        .collect();
    if !gap.is_empty() {
        return Err(Error::CoverageGap {
            what: "similarity profile".into(),
            ids: gap,
        });
    }
    let n = dataset.len() as u64;
    let (mut ctx, mut q, mut sents, mut hits) = (0u64, 0u64, 0u64, 0u64);
    for item in &dataset.items {
        let s = segment_sentences(&item.context_text);
        sents += s.len() as u64;
        ctx += s.iter().map(|x| x.tokens.len() as u64).sum::<u64>();
        q += tokenize(&item.question_text).len() as u64;
        hits += in_sim[item.item_id.as_str()] as u64;
    }
    Ok(DatasetStats {
        n_questions: n,
        context_tokens: Ratio::new(ctx, n),
        question_tokens: Ratio::new(q, n),
        context_sentences: Ratio::new(sents, n),
        ans_in_sim: Ratio::new(hits, n),
        solved_k2,
        hard: partition.map(Partition::hard_fraction),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub section: String,
    pub row: String,
    pub column: String,
    pub metric: String,
    /// Rounded to two decimals; `None` renders as n/a.
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, Default)]
pub struct ReportInputs<'a> {
    pub stats: Option<&'a DatasetStats>,
    pub style: Option<QuestionStyle>,
    pub evaluations: Vec<&'a Evaluation>,
    pub profiles: Option<&'a [SimilarityProfile]>,
    pub partition: Option<&'a Partition>,
    pub distribution: Option<&'a LabelDistribution>,
    pub correlations: &'a [CorrelationRow],
}

struct Builder {
    rows: Vec<ReportRow>,
    section: &'static str,
}

impl Builder {
    fn push(
        &mut self,
        row: &str,
        column: &str,
        metric: &str,
        value: Option<f64>,
        n: Option<u64>,
        note: Option<String>,
    ) {
        self.rows.push(ReportRow {
            section: self.section.into(),
            row: row.into(),
            column: column.into(),
            metric: metric.into(),
            value,
            n,
            note,
        });
    }

    fn ratio_pct(&mut self, row: &str, column: &str, r: Option<Ratio>, missing: &str) {
        match r {
            Some(r) if r.den > 0 => self.push(
                row,
                column,
                "pct",
                r.percent_rounded(DECIMALS),
                Some(r.den),
                None,
            ),
            Some(r) => self.push(
                row,
                column,
                "pct",
                None,
                Some(r.den),
                Some("0 items".into()),
            ),
            None => self.push(row, column, "pct", None, None, Some(missing.into())),
        }
    }

    fn aggregate(
        &mut self,
        row: &str,
        column: &str,
        style: QuestionStyle,
        agg: Option<Aggregate>,
        missing: &str,
    ) {
        let metric = Metric::primary_for(style);
        let mut cells: Vec<(&str, Option<f64>)> = Vec::new();
        if style == QuestionStyle::Extraction {
            cells.push((Metric::Em.label(), agg.and_then(|a| a.em_mean)));
        }
        cells.push((metric.label(), agg.map(|a| a.mean)));
        for (m, v) in cells {
            match agg {
                Some(a) => self.push(
                    row,
                    column,
                    m,
                    v.map(|v| round_half_even(v, DECIMALS as i32)),
                    Some(a.n as u64),
                    None,
                ),
                None => self.push(row, column, m, None, None, Some(missing.into())),
            }
        }
    }
}

fn ids_where(profiles: &[SimilarityProfile], in_sim: bool) -> HashSet<&str> {
    profiles
        .iter()
        .filter(|p| p.answer_in_most_similar == in_sim)
        .map(|p| p.item_id.as_str())
        .collect()
}

/// Assemble report rows in table order. Missing inputs yield n/a rows.
pub fn build_report(inputs: &ReportInputs) -> Result<Report> {
    let mut b = Builder {
        rows: Vec::new(),
        section: "Statistics",
    };
    let stats = inputs.stats;
    let count = |f: fn(&DatasetStats) -> Ratio| stats.map(f);
    match stats {
        Some(s) => b.push(
            "# questions",
            "all",
            "count",
            Some(s.n_questions as f64),
            Some(s.n_questions),
            None,
        ),
        None => b.push(
            "# questions",
            "all",
            "count",
            None,
            None,
            Some("no statistics".into()),
        ),
    }
    for (label, f) in [
        (
            "Avg. # context tokens",
            (|s: &DatasetStats| s.context_tokens) as fn(&DatasetStats) -> Ratio,
        ),
        ("Avg. # question tokens", |s| s.question_tokens),
        ("Avg. # sents in context", |s| s.context_sentences),
    ] {
        let r = count(f);
        b.push(
            label,
            "all",
            "avg",
            r.and_then(|r| r.rounded(DECIMALS)),
            r.map(|r| r.den),
            None,
        );
    }

    let evals = &inputs.evaluations;
    let style = inputs
        .style
        .or_else(|| evals.first().map(|e| e.style))
        .unwrap_or_default();
    for pair in evals.windows(2) {
        if pair[0].style != pair[1].style {
            return Err(Error::WrongStyle {
                expected: pair[0].style.to_string(),
                found: pair[1].style.to_string(),
            });
        }
    }
    let find = |v: Variant| evals.iter().copied().find(|e| e.variant == v);
    let full = find(Variant::Full);
    let sim_only = find(Variant::SimOnly);

    b.section = "Baseline performance";
    b.aggregate(
        "Full question",
        "all",
        style,
        full.and_then(Evaluation::aggregate),
        "no full-question scores",
    );
    let mut ks: Vec<usize> = vec![4, 2, 1];
    for e in evals {
        if let Variant::Truncated(k) = e.variant {
            if !ks.contains(&k) {
                ks.push(k);
            }
        }
    }
    ks[3..].sort_unstable_by(|a, b| b.cmp(a));
    for k in ks {
        let agg = find(Variant::Truncated(k)).and_then(Evaluation::aggregate);
        b.aggregate(
            &format!("Q first tokens (k={k})"),
            "all",
            style,
            agg,
            "no scores for this variant",
        );
    }
    if style == QuestionStyle::MultipleChoice {
        b.push(
            "% of # Q (>=0.5 for k=2)",
            "all",
            "pct",
            None,
            None,
            Some("not defined for multiple choice".into()),
        );
    } else {
        let solved = stats
            .and_then(|s| s.solved_k2)
            .or_else(|| find(Variant::Truncated(2)).map(|e| e.count_at_least(0.5)));
        b.ratio_pct("% of # Q (>=0.5 for k=2)", "all", solved, "no k=2 scores");
    }

    let profiles = inputs.profiles;
    let over = |e: Option<&Evaluation>, in_sim: bool| -> Option<Aggregate> {
        let ids = ids_where(profiles?, in_sim);
        e?.aggregate_over(&ids)
    };
    let why = |e: Option<&Evaluation>| {
        if profiles.is_none() {
            "no similarity profiles"
        } else if e.is_none() {
            "no scores for this variant"
        } else {
            "0 items"
        }
    };
    b.aggregate("Ans in sim sent", "all", style, over(full, true), why(full));
    b.aggregate(
        "only with sim sent",
        "all",
        style,
        over(sim_only, true),
        why(sim_only),
    );
    b.aggregate(
        "Ans not in sim sent",
        "all",
        style,
        over(full, false),
        why(full),
    );
    let in_sim = stats
        .map(|s| s.ans_in_sim)
        .or_else(|| profiles.map(|p| Ratio::new(ids_where(p, true).len() as u64, p.len() as u64)));
    b.ratio_pct(
        "% of # Q (ans in sim)",
        "all",
        in_sim,
        "no similarity profiles",
    );

    let partition = inputs.partition;
    for subset in Subset::ALL {
        let label = match subset {
            Subset::Easy => "Easy subset",
            Subset::Hard => "Hard subset",
        };
        let agg = partition
            .zip(full)
            .and_then(|(p, e)| e.aggregate_over(&p.ids(subset)));
        let missing = if partition.is_none() {
            "no partition"
        } else if full.is_none() {
            "no full-question scores"
        } else {
            "0 items"
        };
        b.aggregate(label, subset.as_str(), style, agg, missing);
    }
    let hard = stats
        .and_then(|s| s.hard)
        .or_else(|| partition.map(Partition::hard_fraction));
    b.ratio_pct("% of hard", "all", hard, "no partition");

    if let Some(d) = inputs.distribution {
        b.section = "Annotation";
        for r in &d.rows {
            let label = match r.block {
                Block::RelationOfMulti => format!("{} (of multi sent.)", r.label),
                _ => r.label.clone(),
            };
            for subset in Subset::ALL {
                b.ratio_pct(&label, subset.as_str(), Some(r.get(subset)), "");
            }
        }
    }
    if !inputs.correlations.is_empty() {
        b.section = "Correlation";
        for c in inputs.correlations {
            let label = format!("{} ~ {}", c.label, c.system);
            let n = Some(c.n as u64);
            let r = c.result.map(|x| round_half_even(x.r, DECIMALS as i32));
            let p = c.result.map(|x| round_half_even(x.p, DECIMALS as i32));
            b.push(&label, "all", "r", r, n, c.note.clone());
            b.push(&label, "all", "p", p, n, c.note.clone());
            if let Some(pp) = c.permutation_p {
                b.push(
                    &label,
                    "all",
                    "p_perm",
                    Some(round_half_even(pp, DECIMALS as i32)),
                    n,
                    None,
                );
            }
        }
    }
    Ok(Report { rows: b.rows })
}

fn fmt_value(r: &ReportRow) -> String {
    match r.value {
        Some(v) if r.metric == "count" => format!("{v}"),
        Some(v) => format!("{v:.2}"),
        None => String::new(),
    }
}

struct TextLine<'a> {
    section: &'a str,
    row: &'a str,
    column: &'a str,
    metrics: Vec<&'a str>,
    cells: Vec<String>,
}

impl Report {
    pub fn render_text(&self, header: &Provenance) -> String {
        let mut out = String::new();
        writeln!(out, "# {}", header.header_line()).unwrap();
        // One line per (section, row, column); metrics joined with '/'.
        let mut lines: Vec<TextLine> = Vec::new();
        for r in &self.rows {
            let cell = match (r.value, &r.note) {
                (Some(_), _) => fmt_value(r),
                (None, Some(n)) if !n.is_empty() => format!("n/a ({n})"),
                (None, _) => "n/a".to_string(),
            };
            match lines.last_mut() {
                Some(l) if l.section == r.section && l.row == r.row && l.column == r.column => {
                    l.metrics.push(&r.metric);
                    l.cells.push(cell);
                }
                _ => lines.push(TextLine {
                    section: &r.section,
                    row: &r.row,
                    column: &r.column,
                    metrics: vec![&r.metric],
                    cells: vec![cell],
                }),
            }
        }
        let lines: Vec<(&str, &str, &str, String, String)> = lines
            .into_iter()
            .map(|mut l| {
                let cells = &mut l.cells;
                if cells.len() > 1
                    && cells[0].starts_with("n/a")
                    && cells.iter().all(|c| *c == cells[0])
                {
                    cells.truncate(1);
                }
                (
                    l.section,
                    l.row,
                    l.column,
                    l.metrics.join("/"),
                    l.cells.join("/"),
                )
            })
            .collect();
        let w_row = lines.iter().map(|l| l.1.chars().count()).max().unwrap_or(0);
        let w_col = lines.iter().map(|l| l.2.len()).max().unwrap_or(0).max(6);
        let w_metric = lines.iter().map(|l| l.3.len()).max().unwrap_or(0).max(6);
        let mut section = "";
        for (s, row, col, metric, cell) in &lines {
            if *s != section {
                writeln!(out, "\n[{s}]").unwrap();
                section = s;
            }
            let pad = w_row - row.chars().count();
            writeln!(
                out,
                "  {row}{:pad$}  {col:<w_col$}  {metric:<w_metric$}  {cell}",
                ""
            )
            .unwrap();
        }
        out
    }

    pub fn render_csv(&self, header: &Provenance) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["section", "row", "column", "metric", "value", "n", "note"])
            .unwrap();
        for r in &self.rows {
            w.write_record([
                r.section.as_str(),
                &r.row,
                &r.column,
                &r.metric,
                &fmt_value(r),
                &r.n.map(|n| n.to_string()).unwrap_or_default(),
                r.note.as_deref().unwrap_or(""),
            ])
            .unwrap();
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8");
        format!("# {}\n{body}", header.header_line())
    }

    pub fn render_jsonl(&self, header: &Provenance) -> String {
        let mut out = header.header_line();
        out.push('\n');
        for r in &self.rows {
            out.push_str(&serde_json::to_string(r).expect("row serializes"));
            out.push('\n');
        }
        out
    }

    /// Parse the CSV rendering back into rows.
    pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>> {
        let bad = |e: csv::Error| Error::InvalidArgument(format!("report csv: {e}"));
        let mut r = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(bad)?;
            let num = |s: &str| -> Result<Option<f64>> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse().map(Some).map_err(|_| {
                        Error::InvalidArgument(format!("report csv: bad number `{s}`"))
                    })
                }
            };
            rows.push(ReportRow {
                section: rec[0].to_string(),
                row: rec[1].to_string(),
                column: rec[2].to_string(),
                metric: rec[3].to_string(),
                value: num(&rec[4])?,
                n: num(&rec[5])?.map(|n| n as u64),
                note: (!rec[6].is_empty()).then(|| rec[6].to_string()),
            });
        }
        Ok(rows)
    }

    pub fn parse_jsonl(text: &str) -> Result<Vec<ReportRow>> {
        text.lines()
            .filter(|l| !l.trim().is_empty() && Provenance::parse_header(l).is_none())
            .map(|l| {
                serde_json::from_str(l)
                    .map_err(|e| Error::InvalidArgument(format!("report jsonl: {e}")))
            })
            .collect()
    }
}
