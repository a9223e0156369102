use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rcsplit_core::corpus::InputFormat;
use rcsplit_core::heuristics::{OverlapMode, SpanLimit};
use rcsplit_core::partition::HardMetric;
use rcsplit_core::{QuestionStyle, Variant};

const FORMATS: &str = "\
File formats (all line-record files start with a {\"provenance\": ...} header line):
  dataset      one canonical item per line: id, style, context, question,
               answers | options + correct, meta
  predictions  JSON object {\"header\": {dataset_id, variant, system},
               \"predictions\": {id: answer string | option index}}
  scores       one {id, primary, em?, missing} per line
  profiles     one {item_id, per_sentence_overlap, most_similar_index,
               answer_in_most_similar, zero_overlap} per line
  projections  one {item_id, token_start, token_end, rouge_value,
               no_lexical_anchor} per line
  assignments  one {id, subset, evidence} per line
  tasks / key  blinded task payloads / task_id -> item_id, subset, scores
  records      one annotation record per line
  report       report.txt, report.csv, report.jsonl";

#[derive(Debug, Parser)]
#[command(name = "rcsplit", version, about = "Easy/hard analysis of reading comprehension datasets", after_help = FORMATS)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Freeze the provenance timestamp (seconds since the Unix epoch).
    #[arg(long, global = true)]
    pub epoch: Option<u64>,
    /// Worker threads for per-item stages.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Stopword list, one word per line; the bundled list when omitted.
    #[arg(long, global = true)]
    pub stopwords: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OverlapArg::SentenceCount)]
    pub overlap_mode: OverlapArg,
    /// Rouge-L recall weight.
    #[arg(long, global = true, default_value_t = rcsplit_core::DEFAULT_BETA)]
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OverlapArg {
    SentenceCount,
    MinCount,
}

impl From<OverlapArg> for OverlapMode {
    fn from(a: OverlapArg) -> Self {
        match a {
            OverlapArg::SentenceCount => OverlapMode::SentenceCount,
            OverlapArg::MinCount => OverlapMode::MinCount,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    SquadJson,
    JsonlCanonical,
}

impl From<FormatArg> for InputFormat {
    fn from(a: FormatArg) -> Self {
        match a {
            FormatArg::SquadJson => InputFormat::SquadJson,
            FormatArg::JsonlCanonical => InputFormat::JsonlCanonical,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StyleArg {
    Extraction,
    Description,
}

impl From<StyleArg> for QuestionStyle {
    fn from(a: StyleArg) -> Self {
        match a {
            StyleArg::Extraction => QuestionStyle::Extraction,
            StyleArg::Description => QuestionStyle::Description,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum HardMetricArg {
    F1,
    Em,
}

impl From<HardMetricArg> for HardMetric {
    fn from(a: HardMetricArg) -> Self {
        match a {
            HardMetricArg::F1 => HardMetric::Primary,
            HardMetricArg::Em => HardMetric::Em,
        }
    }
}

pub fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: rcsplit_core::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct SpanArgs {
    /// Longest span searched: target length plus this many tokens.
    #[arg(long, default_value_t = 8, conflicts_with_all = ["max_span", "unbounded_span"])]
    pub span_slack: usize,
    /// Fixed longest span in tokens.
    #[arg(long)]
    pub max_span: Option<usize>,
    /// Search spans of every length.
    #[arg(long)]
    pub unbounded_span: bool,
}

impl SpanArgs {
    pub fn limit(&self) -> SpanLimit {
        if self.unbounded_span {
            SpanLimit::Unbounded
        } else if let Some(m) = self.max_span {
            SpanLimit::Max(m)
        } else {
            SpanLimit::Slack(self.span_slack)
        }
    }

    pub fn describe(&self) -> String {
        match self.limit() {
            SpanLimit::Slack(s) => format!("slack:{s}"),
            SpanLimit::Max(m) => format!("max:{m}"),
            SpanLimit::Unbounded => "unbounded".into(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a source dataset to canonical records.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::JsonlCanonical)]
        format: FormatArg,
        /// Style of SQuAD-format items.
        #[arg(long, value_enum, default_value_t = StyleArg::Extraction)]
        squad_style: StyleArg,
        /// Reject unknown record fields.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        drop_empty_answers: bool,
        #[arg(long)]
        dataset_id: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check dataset invariants; exit 1 on errors.
    Validate {
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Dataset statistics.
    Stats {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        profiles: Option<PathBuf>,
        #[arg(long)]
        k2_scores: Option<PathBuf>,
        #[arg(long)]
        assignments: Option<PathBuf>,
        #[command(flatten)]
        span: SpanArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Keep the first k question tokens.
    Truncate {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-sentence overlap profiles.
    Similar {
        #[arg(long)]
        dataset: PathBuf,
        /// Span projections; computed when omitted and needed.
        #[arg(long)]
        projections: Option<PathBuf>,
        #[command(flatten)]
        span: SpanArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Project each item's answer onto its best context span.
    Project {
        #[arg(long)]
        dataset: PathBuf,
        #[command(flatten)]
        span: SpanArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replace each context with its most similar sentence.
    SimOnly {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        profiles: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a prediction file.
    Evaluate {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        predictions: PathBuf,
        /// full, kN or sim_only; the dataset's own variant when omitted.
        #[arg(long, value_parser = parse_variant)]
        variant: Option<Variant>,
        /// Fail when an item has no prediction.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Share of questions with k=2 score >= 0.5.
    SolvedRatio {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        k2_scores: PathBuf,
    },
    /// Assign items to the easy or hard subset.
    Partition {
        #[arg(long)]
        dataset: PathBuf,
        /// Predictions on the k=2 variant.
        #[arg(long, required = true)]
        k2_predictions: PathBuf,
        #[arg(long)]
        profiles: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = HardMetricArg::F1)]
        hard_metric: HardMetricArg,
        #[command(flatten)]
        span: SpanArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full-question scores aggregated per subset.
    SubsetEval {
        #[arg(long)]
        assignments: PathBuf,
        #[arg(long)]
        scores: PathBuf,
    },
    /// Draw blinded annotation tasks.
    Sample {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        assignments: PathBuf,
        #[arg(long, default_value_t = 30)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Full-question score files kept in the unblinding key.
        #[arg(long)]
        scores: Vec<PathBuf>,
        #[arg(long)]
        tasks_out: PathBuf,
        #[arg(long)]
        key_out: PathBuf,
    },
    /// Serve annotation tasks over HTTP.
    Serve {
        #[arg(long)]
        tasks: PathBuf,
        /// Append-only record log.
        #[arg(long)]
        store: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        #[arg(long)]
        allow_export: bool,
        #[arg(long, default_value_t = 30)]
        lease_minutes: u64,
    },
    /// Correlate annotation labels with full-question scores.
    Correlate {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long, required = true)]
        scores: Vec<PathBuf>,
        /// Permutation cross-check; 0 disables it.
        #[arg(long, default_value_t = rcsplit_core::stats::DEFAULT_PERMUTATIONS)]
        permutations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render report.txt, report.csv and report.jsonl.
    Report {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        profiles: Option<PathBuf>,
        #[arg(long)]
        scores: Vec<PathBuf>,
        #[arg(long)]
        assignments: Option<PathBuf>,
        #[arg(long, requires = "key")]
        records: Option<PathBuf>,
        #[arg(long, requires = "records")]
        key: Option<PathBuf>,
        #[arg(long)]
        correlations: Option<PathBuf>,
        #[command(flatten)]
        span: SpanArgs,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Join records with item ids and subsets once collection is closed.
    Unblind {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}
