//! The `semrel` command line.
//!
//! Exit codes: 0 success, 2 parse or input errors, 3 vocabulary miss in a
//! single-pair query, 4 missing resource, 5 degenerate training data.

use std::fmt;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::contextcomp::{self, ContextPipeline, Stopwords};
use crate::distsim::{self, CollocationCounts, DEFAULT_TOP_K, DEFAULT_WINDOW};
use crate::error::Error;
use crate::netstore::{CategoryWeights, RelationTable, SemanticNetwork};
use crate::pathrel::{self, RelatednessParams};
use crate::report::LoadReport;
use crate::ruleset::{self, FeatureTable, FeatureVector, LabeledDataset, Metrics, RuleSet};

#[derive(Debug, Parser)]
#[command(name = "semrel", version, about = "Word-phrase semantic relatedness")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct GlobalOpts {
    /// TOML file with max_path_cost, min_path_cost, window, topk.
    #[arg(long, global = true)]
    pub params: Option<PathBuf>,
    /// Category weight overrides, `Category<TAB>weight` per line.
    #[arg(long, global = true)]
    pub weights: Option<PathBuf>,
    /// Extra relation names, `relation<TAB>Category` per line.
    #[arg(long, global = true)]
    pub relations: Option<PathBuf>,
    /// Collocation window on each side of a word.
    #[arg(long, global = true)]
    pub window: Option<usize>,
    /// Number of most frequent collocates kept per word or phrase.
    #[arg(long, global = true)]
    pub topk: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Tsv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Run1,
    Run2,
    Run3,
    Learned,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate an edge file and write it back in canonical form.
    BuildNet { edges: PathBuf, out: PathBuf },
    /// Relatedness of a word to a phrase over the network.
    Relate {
        #[arg(long)]
        net: PathBuf,
        word: String,
        #[arg(required = true, num_args = 1..)]
        phrase: Vec<String>,
        /// Print the path to each phrase word.
        #[arg(long)]
        explain: bool,
    },
    /// Count collocations in a corpus and write a count file.
    DistBuild { corpus: PathBuf, out: PathBuf },
    /// Distributional similarity of a word to a phrase.
    DistSim {
        #[command(flatten)]
        source: CountSource,
        word: String,
        #[arg(required = true, num_args = 1..)]
        phrase: Vec<String>,
        /// Also print the word and composed phrase vectors.
        #[arg(long)]
        dump_vectors: bool,
    },
    /// Classify word-phrase pairs.
    Classify {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long)]
        net: Option<PathBuf>,
        #[command(flatten)]
        source: CountSource,
        /// Write `word, phrase, sn, ds, label` rows with gold labels for `train`.
        #[arg(long)]
        features_out: Option<PathBuf>,
    },
    /// Learn threshold rules from a feature table.
    Train {
        #[arg(long)]
        features: PathBuf,
        #[arg(long, default_value_t = 10)]
        max_rules: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Literal or figurative use of phrases in context.
    Context {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        net: Option<PathBuf>,
        #[arg(long, conflicts_with = "collocations")]
        corpus: Option<PathBuf>,
        #[arg(long)]
        collocations: Option<PathBuf>,
        #[arg(long)]
        stopwords: Option<PathBuf>,
        #[arg(long)]
        save_collocations: Option<PathBuf>,
    },
    /// Score a rule set against a feature table.
    Eval {
        #[arg(long)]
        features: PathBuf,
        #[arg(long, value_enum, conflicts_with = "rules")]
        mode: Option<Mode>,
        #[arg(long)]
        rules: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Clone, Default)]
pub struct CountSource {
    /// Pair-count TSV from `dist-build`.
    #[arg(long, conflicts_with = "corpus")]
    pub counts: Option<PathBuf>,
    /// Raw tokenized corpus, counted on the fly.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub const PARSE: u8 = 2;
    pub const VOCABULARY: u8 = 3;
    pub const MISSING_RESOURCE: u8 = 4;
    pub const DEGENERATE: u8 = 5;

    fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    fn missing(what: impl fmt::Display) -> Self {
        Self::new(Self::MISSING_RESOURCE, format!("missing resource: {what}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e.root() {
            Error::WordNotInNetwork(_) => CliError::VOCABULARY,
            Error::DegenerateTraining => CliError::DEGENERATE,
            _ => CliError::PARSE,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::new(1, e.to_string())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    max_path_cost: Option<u32>,
    min_path_cost: Option<u32>,
    window: Option<usize>,
    topk: Option<usize>,
}

/// Resolved settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub relations: RelationTable,
    pub weights: CategoryWeights,
    pub params: RelatednessParams,
    pub window: usize,
    pub topk: usize,
    pub format: Format,
}

impl RunConfig {
    pub fn from_opts(opts: &GlobalOpts) -> CliResult<Self> {
        let mut relations = RelationTable::builtin();
        if let Some(path) = &opts.relations {
            relations.extend_from_file(path)?;
        }
        let weights = match &opts.weights {
            Some(path) => CategoryWeights::from_file(path)?,
            None => CategoryWeights::default(),
        };
        let file: ParamsFile = match &opts.params {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                toml::from_str(&text).map_err(|e| {
                    CliError::new(CliError::PARSE, format!("{}: {e}", path.display()))
                })?
            }
            None => ParamsFile::default(),
        };
        let mut params = RelatednessParams::from_weights(&weights);
        if let Some(m) = file.max_path_cost {
            params.max_path_cost = m;
        }
        if let Some(m) = file.min_path_cost {
            params.min_path_cost = m;
        }
        params.validate()?;
        let window = opts.window.or(file.window).unwrap_or(DEFAULT_WINDOW);
        let topk = opts.topk.or(file.topk).unwrap_or(DEFAULT_TOP_K);
        if window == 0 || topk == 0 {
            return Err(Error::InvalidParams("window and topk must be at least 1".into()).into());
        }
        Ok(RunConfig {
            relations,
            weights,
            params,
            window,
            topk,
            format: opts.format,
        })
    }

    fn load_net(&self, path: &Path) -> CliResult<(SemanticNetwork, LoadReport)> {
        Ok(SemanticNetwork::load_with(
            path,
            self.relations.clone(),
            self.weights,
        )?)
    }

    /// Loads a network that a command cannot run without.
    fn require_net(&self, path: Option<&Path>, why: &str) -> CliResult<SemanticNetwork> {
        let path = path.ok_or_else(|| CliError::missing(format!("--net is required {why}")))?;
        if !path.exists() {
            return Err(CliError::missing(format!(
                "network {} not found",
                path.display()
            )));
        }
        Ok(self.load_net(path)?.0)
    }

    fn load_counts(&self, source: &CountSource) -> CliResult<Option<CollocationCounts>> {
        let (path, raw) = match (&source.counts, &source.corpus) {
            (Some(p), _) => (p, false),
            (None, Some(p)) => (p, true),
            (None, None) => return Ok(None),
        };
        if !path.exists() {
            return Err(CliError::missing(format!("{} not found", path.display())));
        }
        let counts = if raw {
            CollocationCounts::from_corpus_file(path, self.window)?
        } else {
            CollocationCounts::read_tsv_file(path)?
        };
        Ok(Some(counts))
    }

    fn require_counts(&self, source: &CountSource, why: &str) -> CliResult<CollocationCounts> {
        self.load_counts(source)?
            .ok_or_else(|| CliError::missing(format!("--counts or --corpus is required {why}")))
    }
}

/// Four decimals, ties rounded to even.
pub fn fmt4(x: f64) -> String {
    format!("{:.4}", round4(x))
}

fn round4(x: f64) -> f64 {
    (x * 10_000.0).round_ties_even() / 10_000.0
}

fn opt4(x: Option<f64>) -> String {
    x.map(fmt4).unwrap_or_default()
}

fn json4(x: Option<f64>) -> serde_json::Value {
    x.map_or(serde_json::Value::Null, |v| json!(round4(v)))
}

fn metrics_json(m: &Metrics) -> serde_json::Value {
    json!({
        "precision": round4(m.precision),
        "recall": round4(m.recall),
        "f_measure": round4(m.f_measure),
        "accuracy": round4(m.accuracy()),
        "confusion": m.confusion,
    })
}

fn write_metrics_tsv(out: &mut dyn Write, m: &Metrics) -> io::Result<()> {
    let c = m.confusion;
    writeln!(out, "# precision\t{}", fmt4(m.precision))?;
    writeln!(out, "# recall\t{}", fmt4(m.recall))?;
    writeln!(out, "# f_measure\t{}", fmt4(m.f_measure))?;
    writeln!(out, "# accuracy\t{}", fmt4(m.accuracy()))?;
    writeln!(
        out,
        "# confusion\ttp={} fp={} tn={} fn={}",
        c.tp, c.fp, c.tn, c.fn_
    )
}

fn write_json(out: &mut dyn Write, value: &impl Serialize) -> CliResult {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| CliError::new(1, e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn create(path: &Path) -> CliResult<File> {
    File::create(path).map_err(|e| Error::io(path, e).into())
}

fn phrase_tokens(args: &[String]) -> Vec<String> {
    args.iter()
        .flat_map(|a| a.split_whitespace())
        .map(str::to_lowercase)
        .collect()
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let cfg = RunConfig::from_opts(&cli.global)?;
    match &cli.command {
        Command::BuildNet { edges, out: dest } => cmd_build_net(&cfg, edges, dest, out, err),
        Command::Relate {
            net,
            word,
            phrase,
            explain,
        } => cmd_relate(&cfg, net, word, &phrase_tokens(phrase), *explain, out),
        Command::DistBuild { corpus, out: dest } => cmd_dist_build(&cfg, corpus, dest, out),
        Command::DistSim {
            source,
            word,
            phrase,
            dump_vectors,
        } => cmd_dist_sim(
            &cfg,
            source,
            word,
            &phrase_tokens(phrase),
            *dump_vectors,
            out,
        ),
        Command::Classify {
            dataset,
            mode,
            rules,
            net,
            source,
            features_out,
        } => cmd_classify(
            &cfg,
            dataset,
            *mode,
            rules.as_deref(),
            net.as_deref(),
            source,
            features_out.as_deref(),
            out,
        ),
        Command::Train {
            features,
            max_rules,
            out: dest,
        } => cmd_train(&cfg, features, *max_rules, dest, out),
        Command::Context {
            dataset,
            net,
            corpus,
            collocations,
            stopwords,
            save_collocations,
        } => cmd_context(
            &cfg,
            dataset,
            net.as_deref(),
            corpus.as_deref(),
            collocations.as_deref(),
            stopwords.as_deref(),
            save_collocations.as_deref(),
            out,
        ),
        Command::Eval {
            features,
            mode,
            rules,
        } => cmd_eval(&cfg, features, *mode, rules.as_deref(), out),
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    match run(&cli, &mut out, &mut err) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            let _ = writeln!(err, "error: {e}");
            ExitCode::from(e.code)
        }
    }
}

fn write_report(
    cfg: &RunConfig,
    report: &LoadReport,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult {
    for w in &report.warnings {
        writeln!(err, "warning: {w}")?;
    }
    match cfg.format {
        Format::Json => write_json(out, report),
        Format::Tsv => {
            writeln!(out, "node_count\t{}", report.node_count)?;
            writeln!(out, "edge_count\t{}", report.edge_count)?;
            writeln!(out, "token_count\t{}", report.token_count)?;
            Ok(())
        }
    }
}

pub fn cmd_build_net(
    cfg: &RunConfig,
    edges: &Path,
    dest: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult {
    let (net, report) = cfg.load_net(edges)?;
    net.save(dest)?;
    write_report(cfg, &report, out, err)
}

pub fn cmd_relate(
    cfg: &RunConfig,
    net_path: &Path,
    word: &str,
    phrase: &[String],
    explain: bool,
    out: &mut dyn Write,
) -> CliResult {
    let net = cfg.require_net(Some(net_path), "for relate")?;
    let score = pathrel::word_phrase_relatedness(&net, word, phrase, &cfg.params)?;
    let mut paths = Vec::new();
    if explain {
        for target in phrase {
            let p = pathrel::shortest_path_cost(&net, word, target, &cfg.params)?;
            paths.push((target, p));
        }
    }
    match cfg.format {
        Format::Json => {
            let explained: Vec<_> = paths
                .iter()
                .map(|(t, p)| {
                    json!({
                        "target": t,
                        "cost": p.cost,
                        "capped": p.capped,
                        "hops": p.explain(&net),
                    })
                })
                .collect();
            let mut v = json!({
                "word": word.to_lowercase(),
                "phrase": phrase.join(" "),
                "value": round4(score.value),
                "per_word_costs": score.per_word_costs,
            });
            if explain {
                v["paths"] = json!(explained);
            }
            write_json(out, &v)
        }
        Format::Tsv => {
            writeln!(out, "{}", fmt4(score.value))?;
            for (target, p) in &paths {
                let note = if p.capped { " (capped)" } else { "" };
                writeln!(
                    out,
                    "# {} -> {}: cost {}{}",
                    word.to_lowercase(),
                    target,
                    p.cost,
                    note
                )?;
                for line in p.explain(&net) {
                    writeln!(out, "{line}")?;
                }
            }
            Ok(())
        }
    }
}

pub fn cmd_dist_build(
    cfg: &RunConfig,
    corpus: &Path,
    dest: &Path,
    out: &mut dyn Write,
) -> CliResult {
    let sentences = distsim::read_sentences_file(corpus)?;
    let counts = CollocationCounts::from_sentences_parallel(&sentences, cfg.window, 4096);
    counts.save_tsv(dest)?;
    let mut report = LoadReport {
        token_count: counts.token_count() as usize,
        ..LoadReport::default()
    };
    if counts.grand_total() == 0 {
        report.warnings.push("no collocations counted".to_string());
    }
    match cfg.format {
        Format::Json => write_json(
            out,
            &json!({
                "token_count": report.token_count,
                "pair_types": counts.sorted_pairs().len(),
                "grand_total": counts.grand_total(),
                "warnings": report.warnings,
            }),
        ),
        Format::Tsv => {
            writeln!(out, "token_count\t{}", report.token_count)?;
            writeln!(out, "pair_types\t{}", counts.sorted_pairs().len())?;
            writeln!(out, "grand_total\t{}", counts.grand_total())?;
            for w in &report.warnings {
                writeln!(out, "# warning\t{w}")?;
            }
            Ok(())
        }
    }
}

pub fn cmd_dist_sim(
    cfg: &RunConfig,
    source: &CountSource,
    word: &str,
    phrase: &[String],
    dump_vectors: bool,
    out: &mut dyn Write,
) -> CliResult {
    let counts = cfg.require_counts(source, "for dist-sim")?;
    let sim = distsim::word_phrase_similarity(&counts, word, phrase, cfg.topk)?;
    let word_vec = distsim::pmi_vector(&counts, word, cfg.topk);
    let parts: Vec<_> = phrase
        .iter()
        .map(|w| distsim::pmi_vector(&counts, w, cfg.topk))
        .collect();
    let phrase_vec = distsim::compose(&parts)?;
    match cfg.format {
        Format::Json => {
            let mut v = json!({
                "word": word.to_lowercase(),
                "phrase": phrase.join(" "),
                "value": round4(sim),
            });
            if dump_vectors {
                v["vectors"] = json!({
                    word_vec.owner.clone(): word_vec.entries,
                    phrase_vec.owner.clone(): phrase_vec.entries,
                });
            }
            write_json(out, &v)
        }
        Format::Tsv => {
            writeln!(out, "{}", fmt4(sim))?;
            if dump_vectors {
                word_vec.write_dump(&mut *out)?;
                phrase_vec.write_dump(&mut *out)?;
            }
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_classify(
    cfg: &RunConfig,
    dataset: &Path,
    mode: Mode,
    rules_path: Option<&Path>,
    net_path: Option<&Path>,
    source: &CountSource,
    features_out: Option<&Path>,
    out: &mut dyn Write,
) -> CliResult {
    let data = LabeledDataset::read_file(dataset)?;
    let rules = match mode {
        Mode::Run1 => ruleset::run1_rules(),
        Mode::Run2 => ruleset::run2_rules(),
        Mode::Run3 => ruleset::run3_rules(),
        Mode::Learned => {
            let path = rules_path
                .ok_or_else(|| CliError::missing("--rules is required for mode learned"))?;
            if !path.exists() {
                return Err(CliError::missing(format!(
                    "rules {} not found",
                    path.display()
                )));
            }
            let rs = RuleSet::read_file(path)?;
            rs.validate(&FeatureVector::NAMES)
                .map_err(|e| e.in_file(path))?;
            rs
        }
    };
    let (net, counts) = match mode {
        Mode::Run1 => (
            Some(cfg.require_net(net_path, "for mode run1")?),
            cfg.load_counts(source)?,
        ),
        Mode::Run2 | Mode::Run3 => (
            Some(cfg.require_net(net_path, "for modes run2 and run3")?),
            Some(cfg.require_counts(source, "for modes run2 and run3")?),
        ),
        Mode::Learned => {
            let uses = |f: &str| {
                rules
                    .rules
                    .iter()
                    .flat_map(|r| &r.conditions)
                    .any(|c| c.feature == f)
            };
            let net = match net_path {
                Some(p) => Some(cfg.require_net(Some(p), "")?),
                None if uses("sn") => {
                    return Err(CliError::missing("--net is required by these rules"))
                }
                None => None,
            };
            let counts = cfg.load_counts(source)?;
            if counts.is_none() && uses("ds") {
                return Err(CliError::missing(
                    "--counts or --corpus is required by these rules",
                ));
            }
            (net, counts)
        }
    };

    let features: Vec<FeatureVector> = data
        .instances
        .par_iter()
        .map(|inst| {
            ruleset::assemble_features(
                net.as_ref(),
                counts.as_ref(),
                &inst.word,
                &inst.phrase,
                &cfg.params,
                cfg.topk,
            )
        })
        .collect::<Result<_, Error>>()?;
    let labels: Vec<&str> = features.iter().map(|f| rules.apply(f)).collect();

    let metrics = data.is_fully_labeled().then(|| {
        let gold: Vec<_> = features
            .iter()
            .zip(&data.instances)
            .map(|(f, i)| (*f, i.label.expect("fully labeled")))
            .collect();
        ruleset::evaluate(&rules, &gold)
    });

    if let Some(path) = features_out {
        let mut w = io::BufWriter::new(create(path)?);
        writeln!(w, "word\tphrase\tsn\tds\tlabel")?;
        for (inst, f) in data.instances.iter().zip(&features) {
            let gold = inst.label.map(|l| l.as_str()).unwrap_or_default();
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}",
                inst.word,
                inst.phrase.join(" "),
                opt4(f.sn),
                opt4(f.ds),
                gold
            )?;
        }
        w.flush()?;
    }

    match cfg.format {
        Format::Json => {
            let rows: Vec<_> = data
                .instances
                .iter()
                .zip(&features)
                .zip(&labels)
                .map(|((inst, f), label)| {
                    json!({
                        "word": inst.word,
                        "phrase": inst.phrase.join(" "),
                        "sn": json4(f.sn),
                        "ds": json4(f.ds),
                        "label": label,
                    })
                })
                .collect();
            write_json(
                out,
                &json!({
                    "instances": rows,
                    "metrics": metrics.as_ref().map(metrics_json),
                }),
            )
        }
        Format::Tsv => {
            writeln!(out, "word\tphrase\tsn\tds\tlabel")?;
            for ((inst, f), label) in data.instances.iter().zip(&features).zip(&labels) {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}",
                    inst.word,
                    inst.phrase.join(" "),
                    opt4(f.sn),
                    opt4(f.ds),
                    label
                )?;
            }
            if let Some(m) = &metrics {
                write_metrics_tsv(out, m)?;
            }
            Ok(())
        }
    }
}

pub fn cmd_train(
    cfg: &RunConfig,
    features: &Path,
    max_rules: usize,
    dest: &Path,
    out: &mut dyn Write,
) -> CliResult {
    let table = FeatureTable::read_file(features)?;
    let names = table.names();
    let rules = ruleset::learn_threshold_rules(&table.rows, &names, max_rules)?;
    let metrics = ruleset::evaluate(&rules, &table.rows);
    let mut w = create(dest)?;
    write!(w, "{rules}")?;
    match cfg.format {
        Format::Json => write_json(
            out,
            &json!({
                "rules": rules.to_string().lines().collect::<Vec<_>>(),
                "training_accuracy": round4(metrics.accuracy()),
                "metrics": metrics_json(&metrics),
            }),
        ),
        Format::Tsv => {
            write!(out, "{rules}")?;
            writeln!(out, "# training_accuracy\t{}", fmt4(metrics.accuracy()))?;
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_context(
    cfg: &RunConfig,
    dataset: &Path,
    net_path: Option<&Path>,
    corpus: Option<&Path>,
    collocations: Option<&Path>,
    stopwords: Option<&Path>,
    save_collocations: Option<&Path>,
    out: &mut dyn Write,
) -> CliResult {
    let instances = contextcomp::read_context_dataset_file(dataset)?;
    if instances.is_empty() {
        return Err(Error::EmptyDataset.in_file(dataset).into());
    }
    let net = cfg.require_net(net_path, "for context")?;
    let mut pipeline = ContextPipeline::new(&net, cfg.params);
    if let Some(path) = stopwords {
        pipeline.stopwords = Stopwords::from_file(path)?;
    }
    match (corpus, collocations) {
        (Some(path), _) => {
            if !path.exists() {
                return Err(CliError::missing(format!(
                    "corpus {} not found",
                    path.display()
                )));
            }
            let sentences = distsim::read_sentences_file(path)?;
            pipeline.add_sets_from_corpus(&sentences, &instances, cfg.topk);
        }
        (None, Some(path)) => {
            if !path.exists() {
                return Err(CliError::missing(format!(
                    "collocation file {} not found",
                    path.display()
                )));
            }
            for set in contextcomp::read_collocation_sets_file(path)? {
                pipeline.add_set(set);
            }
        }
        (None, None) => {
            return Err(CliError::missing(
                "--corpus or --collocations is required for context",
            ))
        }
    }
    if let Some(path) = save_collocations {
        let mut w = io::BufWriter::new(create(path)?);
        for set in pipeline.sets() {
            set.write(&mut w)?;
        }
        w.flush()?;
    }

    let predictions = pipeline.classify_all(&instances)?;
    let accuracy = contextcomp::accuracy(&instances, &predictions).ok();
    match cfg.format {
        Format::Json => {
            let rows: Vec<_> = instances
                .iter()
                .zip(&predictions)
                .map(|(inst, p)| {
                    json!({
                        "phrase": inst.phrase_text(),
                        "start": inst.span.0,
                        "end": inst.span.1,
                        "fc": p.features.fc,
                        "srb": round4(p.features.srb),
                        "sra": round4(p.features.sra),
                        "label": p.label,
                    })
                })
                .collect();
            write_json(
                out,
                &json!({
                    "instances": rows,
                    "accuracy": accuracy.map(round4),
                }),
            )
        }
        Format::Tsv => {
            writeln!(out, "phrase\tstart\tend\tfc\tsrb\tsra\tlabel")?;
            for (inst, p) in instances.iter().zip(&predictions) {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    inst.phrase_text(),
                    inst.span.0,
                    inst.span.1,
                    p.features.fc,
                    fmt4(p.features.srb),
                    fmt4(p.features.sra),
                    p.label
                )?;
            }
            if let Some(a) = accuracy {
                writeln!(out, "# accuracy\t{}", fmt4(a))?;
            }
            Ok(())
        }
    }
}

pub fn cmd_eval(
    cfg: &RunConfig,
    features: &Path,
    mode: Option<Mode>,
    rules_path: Option<&Path>,
    out: &mut dyn Write,
) -> CliResult {
    let table = FeatureTable::read_file(features)?;
    let rules = match (mode, rules_path) {
        (Some(Mode::Run1), _) => ruleset::run1_rules(),
        (Some(Mode::Run2), _) => ruleset::run2_rules(),
        (Some(Mode::Run3), _) => ruleset::run3_rules(),
        (Some(Mode::Learned) | None, Some(path)) => {
            if !path.exists() {
                return Err(CliError::missing(format!(
                    "rules {} not found",
                    path.display()
                )));
            }
            RuleSet::read_file(path)?
        }
        (_, None) => return Err(CliError::missing("--mode or --rules is required for eval")),
    };
    let metrics = ruleset::evaluate(&rules, &table.rows);
    match cfg.format {
        Format::Json => write_json(out, &metrics_json(&metrics)),
        Format::Tsv => Ok(write_metrics_tsv(out, &metrics)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_decimals_half_even() {
        assert_eq!(fmt4(2.0 / 3.0), "0.6667");
        assert_eq!(fmt4(1.0), "1.0000");
        assert_eq!(fmt4(1.0 / 3.0), "0.3333");
        assert_eq!(fmt4(0.0), "0.0000");
        // 0.125 / 0.375 are exact in binary, so ties are real ties
        assert_eq!(fmt4(0.00125 * 100.0), "0.1250");
        assert_eq!(fmt4(0.000_025 * 2.5), "0.0001");
    }

    #[test]
    fn error_codes() {
        let e: CliError = Error::WordNotInNetwork("x".into()).into();
        assert_eq!(e.code, 3);
        let e: CliError = Error::DegenerateTraining.into();
        assert_eq!(e.code, 5);
        let e: CliError = Error::parse(4, "bad").into();
        assert_eq!(e.code, 2);
        assert_eq!(CliError::missing("x").code, 4);
    }

    #[test]
    fn params_file_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("params.toml");
        std::fs::write(&p, "max_path_cost = 30\nwindow = 2\n").unwrap();
        let cfg = RunConfig::from_opts(&GlobalOpts {
            params: Some(p.clone()),
            topk: Some(50),
            ..GlobalOpts::default()
        })
        .unwrap();
        assert_eq!(cfg.params.max_path_cost, 30);
        assert_eq!(cfg.params.min_path_cost, 8);
        assert_eq!((cfg.window, cfg.topk), (2, 50));
        std::fs::write(&p, "max_path_cost = 4\n").unwrap();
        let bad = RunConfig::from_opts(&GlobalOpts {
            params: Some(p.clone()),
            ..GlobalOpts::default()
        });
        assert_eq!(bad.unwrap_err().code, 2);
        std::fs::write(&p, "colour = 1\n").unwrap();
        assert!(RunConfig::from_opts(&GlobalOpts {
            params: Some(p),
            ..GlobalOpts::default()
        })
        .is_err());
    }

    #[test]
    fn weight_overrides_move_the_cap() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.tsv");
        std::fs::write(&p, "Other\t15\nSense\t3\n").unwrap();
        let cfg = RunConfig::from_opts(&GlobalOpts {
            weights: Some(p),
            ..GlobalOpts::default()
        })
        .unwrap();
        assert_eq!(cfg.params.max_path_cost, 30);
        assert_eq!(cfg.params.min_path_cost, 6);
    }
}
