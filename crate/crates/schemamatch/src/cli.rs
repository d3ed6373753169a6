//! The `schemamatch` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use schemamatch_core::baseline::{composite_match, cupid_match, lexical_match, similarity_flood_match, MatcherId};
use schemamatch_core::diag::Warnings;
use schemamatch_core::embedding::{EmbeddingProvider, LocalEmbedder, RetryingProvider};
use schemamatch_core::eval::{
    evaluate_f1, run_ablation, run_scalability, stats_row, Dataset, ABLATION_HEADER, SCALABILITY_HEADER, STATS_HEADER,
};
use schemamatch_core::gateway::{CompletionClient, MockClient, OracleClient};
use schemamatch_core::pipeline::{run_pipeline, PipelineConfig, Preset, SelectionStrategy};
use schemamatch_core::schema::{MatchSet, Schema};
use schemamatch_core::serializer::{BudgetConfig, ElementConfig};
use schemamatch_core::Error;

use crate::clock::StdClock;
use crate::config::Settings;
use crate::files::{load_mapping_file, load_schema_file, read_text, report_path, write_csv, write_json, write_mapping};
use crate::grid::{load_grid, DEFAULT_OVERHEAD_WORDS};
use crate::remote::{EmbeddingCache, RemoteClient, RemoteEmbedder};
use crate::AppError;

pub const DEFAULT_CONFIG_FILE: &str = "schemamatch.toml";

#[derive(Debug, Parser)]
#[command(name = "schemamatch", version, about = "Match columns between relational schemas")]
pub struct Cli {
    /// Settings file (TOML) [default: ./schemamatch.toml when present]
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Retries per completion prompt [default: llm.retries, 2]
    #[arg(long, global = true, value_name = "N")]
    pub retries: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the matching pipeline and write a mapping plus a run report
    Match(MatchArgs),
    /// Score a predicted mapping against a gold mapping
    Eval(EvalArgs),
    /// Write dataset statistics as CSV
    Stats(StatsArgs),
    /// Run the ablation grid and the budget sweep from a grid file
    Bench(BenchArgs),
    /// Run a classic matcher (lexical, flood, cupid, composite)
    Baseline(BaselineArgs),
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Source schema file
    #[arg(long, value_name = "FILE")]
    pub source: PathBuf,
    /// Target schema file
    #[arg(long, value_name = "FILE")]
    pub target: PathBuf,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Gold mapping; the report then includes F1, and `--client oracle` answers from it [default: none]
    #[arg(long, value_name = "FILE")]
    pub gold: Option<PathBuf>,
    /// Table selection: none, nested, vector, llm [default: llm; vector under --preset rematch]
    #[arg(long, value_name = "NAME")]
    pub strategy: Option<String>,
    /// Tables kept by vector selection
    #[arg(long, default_value_t = schemamatch_core::pipeline::DEFAULT_TOP_K)]
    pub k: usize,
    /// Schema elements in prompts, comma list of name,desc,keys,types
    #[arg(long, default_value = "name,desc,keys,types")]
    pub elements: String,
    /// Roll related columns into aliases [default: on for llmatch, off for rematch]
    #[arg(long, overrides_with = "no_rollup")]
    pub rollup: bool,
    /// Disable rollup (also disables drilldown unless --drilldown is given)
    #[arg(long)]
    pub no_rollup: bool,
    /// Re-expand matched aliases to member columns [default: on for llmatch, off for rematch]
    #[arg(long, overrides_with = "no_drilldown")]
    pub drilldown: bool,
    /// Expand matched aliases to all member pairs instead
    #[arg(long)]
    pub no_drilldown: bool,
    /// Words per prompt [default: unlimited]
    #[arg(long, value_name = "WORDS")]
    pub budget: Option<usize>,
    /// Words reserved in every prompt for instructions
    #[arg(long, value_name = "WORDS", default_value_t = DEFAULT_OVERHEAD_WORDS)]
    pub overhead: usize,
    /// Pipeline preset: llmatch or rematch
    #[arg(long, default_value = "llmatch")]
    pub preset: String,
    /// remote, mock:FILE, oracle[:GOLDFILE] or gated-oracle[:GOLDFILE]; the oracles answer from a gold mapping and are evaluation devices
    #[arg(long, default_value = "remote")]
    pub client: String,
    /// Output mapping; the report goes next to it as *.report.json
    #[arg(long, value_name = "FILE", default_value = "match.mapping.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predicted mapping file
    #[arg(long, value_name = "FILE")]
    pub pred: PathBuf,
    /// Gold mapping file
    #[arg(long, value_name = "FILE")]
    pub gold: PathBuf,
    #[command(flatten)]
    pub pair: PairArgs,
    /// Also write the report to this file [default: stdout only]
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Grid file whose datasets are summarized [default: none; use --source/--target/--gold]
    #[arg(long, value_name = "FILE")]
    pub grid: Option<PathBuf>,
    /// Source schema file [default: none]
    #[arg(long, value_name = "FILE", required_unless_present = "grid")]
    pub source: Option<PathBuf>,
    /// Target schema file [default: none]
    #[arg(long, value_name = "FILE", required_unless_present = "grid")]
    pub target: Option<PathBuf>,
    /// Gold mapping file [default: none]
    #[arg(long, value_name = "FILE", required_unless_present = "grid")]
    pub gold: Option<PathBuf>,
    /// Dataset name [default: stem of the gold file]
    #[arg(long)]
    pub name: Option<String>,
    /// Output CSV
    #[arg(long, value_name = "FILE", default_value = "stats.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Grid file (JSON)
    #[arg(long, value_name = "FILE")]
    pub grid: PathBuf,
    /// remote, mock:FILE, oracle or gated-oracle; the oracles answer from each dataset's gold mapping
    #[arg(long, default_value = "remote")]
    pub client: String,
    /// Which runs: all, ablation or scalability
    #[arg(long, default_value = "all", value_parser = ["all", "ablation", "scalability"])]
    pub mode: String,
    /// Output directory for ablation.csv and scalability.csv
    #[arg(long, value_name = "DIR", default_value = "bench-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// lexical, flood, cupid or composite
    #[arg(long, default_value = "flood")]
    pub matcher: String,
    /// Selection threshold [default: lexical.threshold 0.5, flood.threshold 0.3, cupid.threshold 0.5, composite.threshold 0.5]
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Composite members, comma list
    #[arg(long, default_value = "lexical,flood,cupid")]
    pub members: String,
    /// Gold mapping; adds F1 to the summary [default: none]
    #[arg(long, value_name = "FILE")]
    pub gold: Option<PathBuf>,
    /// Output mapping
    #[arg(long, value_name = "FILE", default_value = "baseline.mapping.json")]
    pub out: PathBuf,
}

/// Where completions come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClientSpec {
    Remote,
    Mock(PathBuf),
    Oracle(Option<PathBuf>),
    GatedOracle(Option<PathBuf>),
}

impl ClientSpec {
    pub fn parse(s: &str) -> Result<Self, Error> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(PathBuf::from(a))),
            None => (s, None),
        };
        match (name, arg) {
            ("remote", None) => Ok(Self::Remote),
            ("mock", Some(p)) => Ok(Self::Mock(p)),
            ("oracle", p) => Ok(Self::Oracle(p)),
            ("gated-oracle", p) => Ok(Self::GatedOracle(p)),
            _ => Err(Error::Config(format!(
                "unknown client {s:?}; expected remote, mock:FILE, oracle[:GOLDFILE] or gated-oracle[:GOLDFILE]"
            ))),
        }
    }
}

struct Context<'a> {
    settings: Settings,
    retries: usize,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Context<'_> {
    fn say(&mut self, value: serde_json::Value) -> Result<(), AppError> {
        writeln!(self.out, "{value}").map_err(|e| AppError::output("<stdout>", e))
    }

    fn warn_all(&mut self, warnings: &Warnings) {
        for w in warnings.iter() {
            let _ = writeln!(self.err, "{}", json!({ "warning": w }));
        }
    }

    fn provider(&self) -> Result<Box<dyn EmbeddingProvider>, AppError> {
        let e = &self.settings.embed;
        if e.provider == "local" {
            return Ok(Box::new(LocalEmbedder::new(e.dim)?));
        }
        let remote = RemoteEmbedder::from_settings(e, e.api_key.clone())?;
        let retrying = RetryingProvider::new(remote, e.retries, e.fallback);
        Ok(Box::new(EmbeddingCache::open(retrying, &e.cache)?))
    }

    fn client(
        &self,
        spec: &ClientSpec,
        gold: Option<&Path>,
        source: &Schema,
        target: &Schema,
        warnings: &mut Warnings,
    ) -> Result<Box<dyn CompletionClient>, AppError> {
        let gold_set = |file: &Option<PathBuf>, warnings: &mut Warnings| -> Result<MatchSet, AppError> {
            let path = file
                .as_deref()
                .or(gold)
                .ok_or_else(|| Error::Config("the oracle client needs a gold file (oracle:FILE or --gold)".into()))?;
            load_mapping_file(path, source, target, warnings)
        };
        Ok(match spec {
            ClientSpec::Remote => Box::new(RemoteClient::from_settings(&self.settings.llm)?),
            ClientSpec::Mock(p) => Box::new(MockClient::from_json(&read_text(p)?)?),
            ClientSpec::Oracle(f) => Box::new(OracleClient::new(gold_set(f, warnings)?)),
            ClientSpec::GatedOracle(f) => Box::new(OracleClient::description_gated(gold_set(f, warnings)?)),
        })
    }
}

pub fn pipeline_config(a: &MatchArgs, retries: usize) -> Result<PipelineConfig, Error> {
    let preset: Preset = a.preset.parse()?;
    let mut cfg = match preset {
        Preset::Rematch => PipelineConfig::rematch(a.k),
        _ => PipelineConfig::llmatch(SelectionStrategy::Llm),
    };
    cfg.preset = preset;
    if let Some(s) = &a.strategy {
        cfg.strategy = if s.contains(':') { s.parse()? } else { SelectionStrategy::parse(s, a.k)? };
    }
    cfg.elements = ElementConfig::parse_list(&a.elements)?;
    if a.rollup || a.no_rollup {
        cfg.rollup_source = a.rollup;
        cfg.rollup_target = a.rollup;
        if a.no_rollup && !a.drilldown {
            cfg.drilldown = false;
        }
    }
    if a.drilldown || a.no_drilldown {
        cfg.drilldown = a.drilldown;
    }
    cfg.budget = a.budget.map(|w| BudgetConfig::new(w, a.overhead)).transpose()?;
    cfg.retries = retries;
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_match(ctx: &mut Context<'_>, a: &MatchArgs) -> Result<(), AppError> {
    let cfg = pipeline_config(a, ctx.retries)?;
    let spec = ClientSpec::parse(&a.client)?;
    let mut warnings = Warnings::new();
    let source = load_schema_file(&a.pair.source, &mut warnings)?;
    let target = load_schema_file(&a.pair.target, &mut warnings)?;
    let client = ctx.client(&spec, a.gold.as_deref(), &source, &target, &mut warnings)?;
    let provider = ctx.provider()?;
    let (pred, report) = run_pipeline(&source, &target, &cfg, client.as_ref(), provider.as_ref(), &StdClock::new())?;
    let evaluation = match &a.gold {
        Some(g) => {
            let gold = load_mapping_file(g, &source, &target, &mut warnings)?;
            Some(evaluate_f1(&pred, &gold, &source, &target)?)
        }
        None => None,
    };
    write_mapping(&a.out, &pred)?;
    let report_file = report_path(&a.out);
    write_json(
        &report_file,
        &json!({ "run": report, "load_warnings": warnings, "evaluation": evaluation }),
    )?;
    ctx.warn_all(&warnings);
    ctx.warn_all(&report.warnings);
    ctx.say(json!({
        "pairs": pred.len(),
        "mapping": a.out,
        "report": report_file,
        "f1": evaluation.as_ref().map(|e| e.f1),
    }))
}

fn cmd_eval(ctx: &mut Context<'_>, a: &EvalArgs) -> Result<(), AppError> {
    let mut warnings = Warnings::new();
    let source = load_schema_file(&a.pair.source, &mut warnings)?;
    let target = load_schema_file(&a.pair.target, &mut warnings)?;
    let pred = load_mapping_file(&a.pred, &source, &target, &mut warnings)?;
    let gold = load_mapping_file(&a.gold, &source, &target, &mut warnings)?;
    let report = evaluate_f1(&pred, &gold, &source, &target)?;
    ctx.warn_all(&warnings);
    if let Some(out) = &a.out {
        write_json(out, &report)?;
    }
    let text = serde_json::to_string_pretty(&report).expect("reports serialize");
    writeln!(ctx.out, "{text}").map_err(|e| AppError::output("<stdout>", e))
}

fn cmd_stats(ctx: &mut Context<'_>, a: &StatsArgs) -> Result<(), AppError> {
    let mut warnings = Warnings::new();
    let datasets: Vec<Dataset> = match &a.grid {
        Some(g) => {
            let grid = crate::grid::parse_grid_file(g)?;
            crate::grid::load_datasets(&grid.datasets, g.parent().unwrap_or(Path::new(".")), &mut warnings)?
        }
        None => {
            let (s, t, g) = match (&a.source, &a.target, &a.gold) {
                (Some(s), Some(t), Some(g)) => (s, t, g),
                _ => return Err(AppError::Usage("stats needs --grid or all of --source, --target, --gold".into())),
            };
            let source = load_schema_file(s, &mut warnings)?;
            let target = load_schema_file(t, &mut warnings)?;
            let gold = load_mapping_file(g, &source, &target, &mut warnings)?;
            let name = a.name.clone().unwrap_or_else(|| {
                let f = g.file_name().and_then(|n| n.to_str()).unwrap_or("dataset");
                f.split('.').next().unwrap_or(f).to_string()
            });
            vec![Dataset { name, source, target, gold }]
        }
    };
    ctx.warn_all(&warnings);
    let rows: Vec<_> = datasets.iter().map(stats_row).collect();
    write_csv(&a.out, &STATS_HEADER, rows.iter().map(|r| r.to_record()))?;
    ctx.say(json!({ "datasets": rows.len(), "stats": a.out }))
}

fn cmd_bench(ctx: &mut Context<'_>, a: &BenchArgs) -> Result<(), AppError> {
    let loaded = load_grid(&a.grid, ctx.retries)?;
    ctx.warn_all(&loaded.warnings);
    let spec = ClientSpec::parse(&a.client)?;
    let mock_text = match &spec {
        ClientSpec::Mock(p) => Some(read_text(p)?),
        ClientSpec::Oracle(Some(_)) | ClientSpec::GatedOracle(Some(_)) => {
            return Err(Error::Config("bench oracles take no file; each dataset answers from its own gold".into()).into())
        }
        _ => None,
    };
    let llm = ctx.settings.llm.clone();
    let factory = |d: &Dataset| -> Result<Box<dyn CompletionClient>, Error> {
        Ok(match &spec {
            ClientSpec::Remote => Box::new(RemoteClient::from_settings(&llm)?),
            ClientSpec::Mock(_) => Box::new(MockClient::from_json(mock_text.as_deref().unwrap_or("[]"))?),
            ClientSpec::Oracle(_) => Box::new(OracleClient::new(d.gold.clone())),
            ClientSpec::GatedOracle(_) => Box::new(OracleClient::description_gated(d.gold.clone())),
        })
    };
    let provider = ctx.provider()?;
    let clock = StdClock::new();
    let mut written = serde_json::Map::new();
    if a.mode != "scalability" {
        let rows = run_ablation(&loaded.grid, &factory, provider.as_ref(), &clock)?;
        let path = a.out.join("ablation.csv");
        write_csv(&path, &ABLATION_HEADER, rows.iter().map(|r| r.to_record()))?;
        let failed = rows.iter().filter(|r| r.error.is_some()).count();
        written.insert("ablation".into(), json!({ "path": path, "rows": rows.len(), "failed_cells": failed }));
    }
    if a.mode != "ablation" {
        let mut rows = Vec::new();
        for d in &loaded.grid.datasets {
            let client = factory(d)?;
            rows.extend(run_scalability(
                &loaded.grid.budgets,
                d,
                &loaded.scalability,
                client.as_ref(),
                provider.as_ref(),
                &clock,
            )?);
        }
        let path = a.out.join("scalability.csv");
        write_csv(&path, &SCALABILITY_HEADER, rows.iter().map(|r| r.to_record()))?;
        written.insert("scalability".into(), json!({ "path": path, "rows": rows.len() }));
    }
    ctx.say(serde_json::Value::Object(written))
}

fn cmd_baseline(ctx: &mut Context<'_>, a: &BaselineArgs) -> Result<(), AppError> {
    let id: MatcherId = a.matcher.parse()?;
    if let Some(t) = a.threshold {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Config(format!("threshold must lie in [0, 1], got {t}")).into());
        }
    }
    let mut warnings = Warnings::new();
    let source = load_schema_file(&a.pair.source, &mut warnings)?;
    let target = load_schema_file(&a.pair.target, &mut warnings)?;
    let s = &ctx.settings;
    let mut flood = s.flood_config();
    let mut cupid = s.cupid_config();
    let mut extra = json!({});
    let pred = match id {
        MatcherId::Lexical => lexical_match(&source, &target, a.threshold.unwrap_or(s.lexical.threshold)),
        MatcherId::Flood => {
            flood.select_threshold = a.threshold.unwrap_or(flood.select_threshold);
            let (m, outcome) = similarity_flood_match(&source, &target, &flood);
            extra = json!({ "iterations": outcome.iterations, "converged": outcome.converged });
            if !outcome.converged {
                warnings.push("baseline", format!("flooding stopped after {} iterations", outcome.iterations));
            }
            m
        }
        MatcherId::Cupid => {
            cupid.select_threshold = a.threshold.unwrap_or(cupid.select_threshold);
            cupid_match(&source, &target, &cupid)
        }
        MatcherId::Composite => {
            let members: Vec<&str> = a.members.split(',').map(str::trim).filter(|m| !m.is_empty()).collect();
            composite_match(&source, &target, &members, a.threshold.unwrap_or(s.composite.threshold), &flood, &cupid)?
        }
    };
    let f1 = match &a.gold {
        Some(g) => {
            let gold = load_mapping_file(g, &source, &target, &mut warnings)?;
            Some(evaluate_f1(&pred, &gold, &source, &target)?.f1)
        }
        None => None,
    };
    write_mapping(&a.out, &pred)?;
    ctx.warn_all(&warnings);
    ctx.say(json!({ "matcher": id.as_str(), "pairs": pred.len(), "mapping": a.out, "f1": f1, "flood": extra }))
}

fn run(cli: &Cli, env: &dyn Fn(&str) -> Option<String>, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), AppError> {
    let config_file = match &cli.config {
        Some(p) => Some(p.clone()),
        None => Some(PathBuf::from(DEFAULT_CONFIG_FILE)).filter(|p| p.is_file()),
    };
    let mut flags = Vec::new();
    if let Some(r) = cli.retries {
        flags.push(("llm.retries", r.to_string()));
    }
    let settings = Settings::load(config_file.as_deref(), env, &flags)?;
    let retries = settings.llm.retries;
    let mut ctx = Context { settings, retries, out, err };
    match &cli.command {
        Command::Match(a) => cmd_match(&mut ctx, a),
        Command::Eval(a) => cmd_eval(&mut ctx, a),
        Command::Stats(a) => cmd_stats(&mut ctx, a),
        Command::Bench(a) => cmd_bench(&mut ctx, a),
        Command::Baseline(a) => cmd_baseline(&mut ctx, a),
    }
}

/// Parses `argv` and runs it. Returns the process exit code: 0 on success,
/// 1 on validation, configuration or usage errors, 2 on runtime failures.
/// Errors are written to `err` as one JSON line.
pub fn execute<I, T>(argv: I, env: &dyn Fn(&str) -> Option<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let failure = AppError::Usage(e.render().to_string().trim_end().to_string());
            let _ = writeln!(err, "{}", failure.to_json());
            return failure.exit_code();
        }
    };
    match run(&cli, env, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{}", e.to_json());
            e.exit_code()
        }
    }
}
