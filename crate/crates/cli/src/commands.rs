use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use rcsplit_core::annotate::{self, AnnotationRecord, HiddenTaskInfo};
use rcsplit_core::corpus::{self, IngestOptions};
use rcsplit_core::heuristics::{self, OverlapMode, SpanLimit};
use rcsplit_core::partition::{self, HardMetric, Partition};
use rcsplit_core::predictions::{self, Evaluation, MissingPolicy};
use rcsplit_core::report::{self, ReportInputs};
use rcsplit_core::textproc::Stopwords;
use rcsplit_core::{
    CanonicalItem, Dataset, Error, Provenance, Result, SimilarityProfile, SpanProjection,
    TruncationSpec, Variant,
};

use crate::args::{Command, Global, SpanArgs};
use crate::io::{file_label, finish, read_dataset, read_jsonl, sink, write_jsonl, write_text};
use crate::server;

/// Shared run settings.
pub struct Ctx {
    pub stopwords: Stopwords,
    pub overlap: OverlapMode,
    pub beta: f64,
    pub created_unix: u64,
    pool: rayon::ThreadPool,
}

impl Ctx {
    pub fn new(g: &Global) -> Result<Self> {
        let stopwords = match &g.stopwords {
            Some(p) => Stopwords::from_file(p)?,
            None => Stopwords::default(),
        };
        let created_unix = g.epoch.unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(g.jobs.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        Ok(Self {
            stopwords,
            overlap: g.overlap_mode.into(),
            beta: g.beta,
            created_unix,
            pool,
        })
    }

    pub fn header(&self, command: &str, extra: &[(&str, Value)]) -> Provenance {
        let mut p = Provenance::new(command, self.created_unix)
            .with("stopword_hash", self.stopwords.hash())
            .with("overlap_mode", self.overlap.as_str())
            .with("beta", self.beta);
        for (k, v) in extra {
            p = p.with(k, v.clone());
        }
        p
    }

    fn par_map<T: Sync, U: Send>(
        &self,
        items: &[T],
        f: impl Fn(&T) -> Result<U> + Sync + Send,
    ) -> Result<Vec<U>> {
        self.pool.install(|| items.par_iter().map(f).collect())
    }

    pub fn projections(&self, ds: &Dataset, limit: SpanLimit) -> Result<Vec<SpanProjection>> {
        self.par_map(&ds.items, |item| {
            heuristics::project_item(item, self.beta, limit)
        })
    }

    /// Profiles for every item; projections are computed when the style needs
    /// them and none are given.
    pub fn profiles(
        &self,
        ds: &Dataset,
        projections: Option<Vec<SpanProjection>>,
        limit: SpanLimit,
    ) -> Result<Vec<SimilarityProfile>> {
        let needs = ds.style != rcsplit_core::QuestionStyle::Extraction;
        let projections = match projections {
            Some(p) => Some(p),
            None if needs => Some(self.projections(ds, limit)?),
            None => None,
        };
        let by_id: HashMap<&str, &SpanProjection> = projections
            .iter()
            .flatten()
            .map(|p| (p.item_id.as_str(), p))
            .collect();
        if needs {
            let gap: Vec<String> = ds
                .items
                .iter()
                .filter(|i| !by_id.contains_key(i.item_id.as_str()))
                .map(|i| i.item_id.clone())
                .collect();
            if !gap.is_empty() {
                return Err(Error::CoverageGap {
                    what: "span projection".into(),
                    ids: gap,
                });
            }
        }
        self.par_map(&ds.items, |item| {
            heuristics::similarity_profile(
                item,
                &self.stopwords,
                self.overlap,
                by_id.get(item.item_id.as_str()).copied(),
            )
        })
    }
}

fn label(p: &Path) -> Value {
    Value::from(file_label(p))
}

fn labels(ps: &[PathBuf]) -> Value {
    Value::from(ps.iter().map(|p| file_label(p)).collect::<Vec<_>>())
}

fn print_json<T: Serialize>(header: &Provenance, value: &T) -> Result<()> {
    write_jsonl(None, header, std::slice::from_ref(value))
}

fn load_profiles(
    ctx: &Ctx,
    ds: &Dataset,
    path: Option<&Path>,
    span: &SpanArgs,
) -> Result<(Vec<SimilarityProfile>, Option<Provenance>)> {
    match path {
        Some(p) => read_jsonl(p),
        None => Ok((ctx.profiles(ds, None, span.limit())?, None)),
    }
}

/// Refuse to combine artifacts built under different overlap settings.
fn check_headers<'a>(headers: impl IntoIterator<Item = Option<&'a Provenance>>) -> Result<()> {
    let present: Vec<&Provenance> = headers.into_iter().flatten().collect();
    for (i, a) in present.iter().enumerate() {
        for b in &present[i + 1..] {
            a.check_compatible(b)?;
        }
    }
    Ok(())
}

pub fn run(command: Command, ctx: &Ctx) -> Result<Outcome> {
    match command {
        Command::Ingest {
            input,
            format,
            squad_style,
            strict,
            drop_empty_answers,
            dataset_id,
            out,
        } => {
            let opts = IngestOptions {
                strict,
                drop_empty_answers,
                squad_style: Some(squad_style.into()),
                dataset_id,
                ingested_unix: ctx.created_unix,
            };
            let ds = corpus::ingest(&input, format.into(), &opts)?;
            let header = ctx.header(
                "ingest",
                &[
                    ("input", label(&input)),
                    (
                        "format",
                        Value::from(rcsplit_core::corpus::InputFormat::from(format).name()),
                    ),
                    ("dataset_id", Value::from(ds.dataset_id.clone())),
                    ("strict", Value::from(strict)),
                ],
            );
            let mut w = sink(out.as_deref())?;
            ds.write_canonical(&mut w, Some(&header))?;
            finish(w, out.as_deref())?;
        }
        Command::Validate { dataset } => {
            let ds = read_dataset(&dataset)?;
            let report = corpus::validate(&ds);
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            if report.has_errors() {
                return Ok(Outcome::Invalid);
            }
        }
        Command::Stats {
            dataset,
            profiles,
            k2_scores,
            assignments,
            span,
            out,
        } => {
            let ds = read_dataset(&dataset)?;
            let (profiles, ph) = load_profiles(ctx, &ds, profiles.as_deref(), &span)?;
            let k2 = k2_scores.as_deref().map(Evaluation::read).transpose()?;
            let solved = match &k2 {
                Some((e, _)) if ds.style != rcsplit_core::QuestionStyle::MultipleChoice => {
                    Some(partition::solved_ratio_k2(&ds, e)?)
                }
                _ => None,
            };
            let parts = assignments.as_deref().map(Partition::read).transpose()?;
            check_headers([
                ph.as_ref(),
                k2.as_ref().map(|k| &k.1),
                parts.as_ref().and_then(|p| p.1.as_ref()),
            ])?;
            let stats =
                report::dataset_stats(&ds, &profiles, solved, parts.as_ref().map(|p| &p.0))?;
            let header = ctx.header("stats", &[("dataset", label(&dataset))]);
            write_jsonl(out.as_deref(), &header, &[stats])?;
        }
        Command::Truncate { dataset, k, out } => {
            let ds = read_dataset(&dataset)?;
            let spec = TruncationSpec::new(k)?;
            let items = ctx.par_map(&ds.items, |i| heuristics::truncate_question(i, spec))?;
            let truncated = Dataset::new(ds.dataset_id.clone(), items, ds.provenance.clone())?;
            let header = ctx.header(
                "truncate",
                &[
                    ("dataset", label(&dataset)),
                    ("variant", Value::from(Variant::Truncated(k).tag())),
                ],
            );
            let mut w = sink(out.as_deref())?;
            truncated.write_canonical(&mut w, Some(&header))?;
            finish(w, out.as_deref())?;
        }
        Command::Project { dataset, span, out } => {
            let ds = read_dataset(&dataset)?;
            let projections = ctx.projections(&ds, span.limit())?;
            let header = ctx.header(
                "project",
                &[
                    ("dataset", label(&dataset)),
                    ("span_limit", Value::from(span.describe())),
                ],
            );
            write_jsonl(out.as_deref(), &header, &projections)?;
        }
        Command::Similar {
            dataset,
            projections,
            span,
            out,
        } => {
            let ds = read_dataset(&dataset)?;
            let given = projections
                .as_deref()
                .map(read_jsonl::<SpanProjection>)
                .transpose()?;
            let mut extra = vec![("dataset", label(&dataset))];
            if let Some(p) = &projections {
                extra.push(("projections", label(p)));
            }
            let profiles = ctx.profiles(&ds, given.map(|g| g.0), span.limit())?;
            write_jsonl(out.as_deref(), &ctx.header("similar", &extra), &profiles)?;
        }
        Command::SimOnly {
            dataset,
            profiles,
            out,
        } => {
            let ds = read_dataset(&dataset)?;
            let (profiles, _) = read_jsonl::<SimilarityProfile>(&profiles)?;
            let by_id: HashMap<&str, &SimilarityProfile> =
                profiles.iter().map(|p| (p.item_id.as_str(), p)).collect();
            let items: Vec<CanonicalItem> = ctx.par_map(&ds.items, |item| {
                let p = by_id
                    .get(item.item_id.as_str())
                    .ok_or_else(|| Error::CoverageGap {
                        what: "similarity profile".into(),
                        ids: vec![item.item_id.clone()],
                    })?;
                heuristics::sim_only_context(item, p)
            })?;
            let reduced = Dataset::new(ds.dataset_id.clone(), items, ds.provenance.clone())?;
            let header = ctx.header(
                "sim-only",
                &[
                    ("dataset", label(&dataset)),
                    ("variant", Value::from(Variant::SimOnly.tag())),
                ],
            );
            let mut w = sink(out.as_deref())?;
            reduced.write_canonical(&mut w, Some(&header))?;
            finish(w, out.as_deref())?;
        }
        Command::Evaluate {
            dataset,
            predictions: preds,
            variant,
            strict,
            out,
        } => {
            let ds = read_dataset(&dataset)?;
            let variant = match variant {
                Some(v) => v,
                None => ds.variant()?,
            };
            let policy = if strict {
                MissingPolicy::Strict
            } else {
                MissingPolicy::ScoreZero
            };
            let set = predictions::load_predictions(&preds, &ds, variant, policy)?;
            let ev = predictions::evaluate(&ds, &set, ctx.beta)?;
            let missing = ev.missing();
            if !missing.is_empty() {
                eprintln!(
                    "{}",
                    json!({"warning": "missing_predictions", "count": missing.len(), "ids": missing})
                );
            }
            let header = ctx.header("evaluate", &[("predictions", label(&preds))]);
            let mut w = sink(out.as_deref())?;
            ev.write(&mut w, &header)?;
            finish(w, out.as_deref())?;
        }
        Command::SolvedRatio { dataset, k2_scores } => {
            let ds = read_dataset(&dataset)?;
            let (k2, _) = Evaluation::read(&k2_scores)?;
            let r = partition::solved_ratio_k2(&ds, &k2)?;
            let header = ctx.header("solved-ratio", &[("k2_scores", label(&k2_scores))]);
            print_json(
                &header,
                &json!({"solved": r.num, "total": r.den, "percent": r.percent()}),
            )?;
        }
        Command::Partition {
            dataset,
            k2_predictions,
            profiles,
            hard_metric,
            span,
            out,
        } => {
            let ds = read_dataset(&dataset)?;
            let set = predictions::load_predictions(
                &k2_predictions,
                &ds,
                Variant::Truncated(2),
                MissingPolicy::ScoreZero,
            )?;
            let k2 = predictions::evaluate(&ds, &set, ctx.beta)?;
            let (profiles, _) = load_profiles(ctx, &ds, profiles.as_deref(), &span)?;
            let metric: HardMetric = hard_metric.into();
            let parts = partition::partition(&ds, &k2, &profiles, metric)?;
            let header = ctx.header(
                "partition",
                &[
                    ("dataset", label(&dataset)),
                    ("k2_predictions", label(&k2_predictions)),
                    (
                        "hard_metric",
                        Value::from(format!("{hard_metric:?}").to_lowercase()),
                    ),
                ],
            );
            let mut w = sink(out.as_deref())?;
            parts.write(&mut w, &header)?;
            finish(w, out.as_deref())?;
        }
        Command::SubsetEval {
            assignments,
            scores,
        } => {
            let (parts, ph) = Partition::read(&assignments)?;
            let (full, sh) = Evaluation::read(&scores)?;
            check_headers([ph.as_ref(), Some(&sh)])?;
            let agg = partition::subset_evaluate(&parts, &full)?;
            let header = ctx.header(
                "subset-eval",
                &[
                    ("assignments", label(&assignments)),
                    ("scores", label(&scores)),
                ],
            );
            print_json(&header, &agg)?;
        }
        Command::Sample {
            dataset,
            assignments,
            n,
            seed,
            scores,
            tasks_out,
            key_out,
        } => {
            let ds = read_dataset(&dataset)?;
            let (parts, _) = Partition::read(&assignments)?;
            let evals = scores
                .iter()
                .map(|p| Evaluation::read(p).map(|e| e.0))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<&Evaluation> = evals.iter().collect();
            let tasks = annotate::sample_for_annotation(&parts, &ds, n, seed, &refs)?;
            let header = ctx.header(
                "sample",
                &[
                    ("n_per_subset", Value::from(n)),
                    ("seed", Value::from(seed)),
                    ("scores", labels(&scores)),
                ],
            );
            let mut tw = sink(Some(&tasks_out))?;
            let mut kw = sink(Some(&key_out))?;
            annotate::write_tasks(&tasks, &header, &mut tw, &mut kw)?;
            finish(tw, Some(&tasks_out))?;
            finish(kw, Some(&key_out))?;
        }
        Command::Serve {
            tasks,
            store,
            bind,
            allow_export,
            lease_minutes,
        } => {
            let payloads = annotate::read_payloads(&tasks)?;
            let config = server::ServerConfig {
                store,
                allow_export,
                lease: std::time::Duration::from_secs(60 * lease_minutes),
            };
            let state = server::AppState::open(payloads, config)?;
            let rt = tokio::runtime::Runtime::new().map_err(|e| Error::io("<runtime>", e))?;
            rt.block_on(server::serve(state, bind))?;
        }
        Command::Correlate {
            records,
            key,
            scores,
            permutations,
            seed,
            out,
        } => {
            let recs = annotate::read_records(&records)?;
            let key_rows = annotate::read_key(&key)?;
            let evals = scores
                .iter()
                .map(|p| Evaluation::read(p).map(|e| e.0))
                .collect::<Result<Vec<_>>>()?;
            let rows = annotate::correlate(&recs, &key_rows, &evals, permutations, seed)?;
            let header = ctx.header(
                "correlate",
                &[
                    ("records", label(&records)),
                    ("scores", labels(&scores)),
                    ("permutations", Value::from(permutations)),
                    ("seed", Value::from(seed)),
                ],
            );
            write_jsonl(out.as_deref(), &header, &rows)?;
        }
        Command::Report {
            dataset,
            profiles,
            scores,
            assignments,
            records,
            key,
            correlations,
            span,
            out_dir,
        } => {
            let ds = read_dataset(&dataset)?;
            let (profiles_v, ph) = load_profiles(ctx, &ds, profiles.as_deref(), &span)?;
            let run_header = ctx.header("report", &[]);
            let evals = scores
                .iter()
                .map(|p| Evaluation::read(p))
                .collect::<Result<Vec<_>>>()?;
            let parts = assignments.as_deref().map(Partition::read).transpose()?;
            let corr = correlations
                .as_deref()
                .map(read_jsonl::<annotate::CorrelationRow>)
                .transpose()?;
            let mut headers: Vec<Option<&Provenance>> = vec![ds.header.as_ref(), ph.as_ref()];
            if profiles.is_none() {
                headers.push(Some(&run_header));
            }
            headers.extend(evals.iter().map(|e| Some(&e.1)));
            headers.push(parts.as_ref().and_then(|p| p.1.as_ref()));
            headers.push(corr.as_ref().and_then(|c| c.1.as_ref()));
            check_headers(headers)?;

            let distribution = match (&records, &key) {
                (Some(r), Some(k)) => {
                    let recs: Vec<AnnotationRecord> = annotate::read_records(r)?;
                    let key_rows: Vec<HiddenTaskInfo> = annotate::read_key(k)?;
                    Some(annotate::label_distribution(&recs, &key_rows)?)
                }
                _ => None,
            };
            let k2 = evals
                .iter()
                .map(|e| &e.0)
                .find(|e| e.variant == Variant::Truncated(2));
            let solved = match k2 {
                Some(e) if ds.style != rcsplit_core::QuestionStyle::MultipleChoice => {
                    Some(partition::solved_ratio_k2(&ds, e)?)
                }
                _ => None,
            };
            let stats =
                report::dataset_stats(&ds, &profiles_v, solved, parts.as_ref().map(|p| &p.0))?;
            let empty = Vec::new();
            let inputs = ReportInputs {
                stats: Some(&stats),
                style: Some(ds.style),
                evaluations: evals.iter().map(|e| &e.0).collect(),
                profiles: Some(&profiles_v),
                partition: parts.as_ref().map(|p| &p.0),
                distribution: distribution.as_ref(),
                correlations: corr.as_ref().map(|c| &c.0).unwrap_or(&empty),
            };
            let rep = report::build_report(&inputs)?;
            let mut extra = vec![("dataset", label(&dataset)), ("scores", labels(&scores))];
            if let Some(a) = &assignments {
                extra.push(("assignments", label(a)));
            }
            if let Some(p) = &profiles {
                extra.push(("profiles", label(p)));
            }
            let header = ctx.header("report", &extra);
            std::fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
            write_text(&out_dir.join("report.txt"), &rep.render_text(&header))?;
            write_text(&out_dir.join("report.csv"), &rep.render_csv(&header))?;
            write_text(&out_dir.join("report.jsonl"), &rep.render_jsonl(&header))?;
        }
        Command::Unblind { records, key, out } => {
            let recs = annotate::read_records(&records)?;
            let key_rows = annotate::read_key(&key)?;
            let by_task: HashMap<&str, &HiddenTaskInfo> =
                key_rows.iter().map(|h| (h.task_id.as_str(), h)).collect();
            let joined = recs
                .iter()
                .map(|r| {
                    let h = by_task
                        .get(r.task_id.as_str())
                        .ok_or_else(|| Error::UnknownTaskId(r.task_id.clone()))?;
                    let mut v = serde_json::to_value(r).expect("record serializes");
                    let obj = v.as_object_mut().expect("record is an object");
                    obj.insert("item_id".into(), Value::from(h.item_id.clone()));
                    obj.insert("subset".into(), Value::from(h.subset.as_str()));
                    Ok(v)
                })
                .collect::<Result<Vec<_>>>()?;
            let header = ctx.header(
                "unblind",
                &[("records", label(&records)), ("key", label(&key))],
            );
            write_jsonl(out.as_deref(), &header, &joined)?;
        }
    }
    Ok(Outcome::Ok)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// Ran to completion but found validation errors.
    Invalid,
}
