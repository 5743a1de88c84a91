//! Subcommands of the `lexforge` binary.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use lexforge::corpus::{CorpusBuilder, CorpusConfig, CorpusStore};
use lexforge::features::{feature_names, group_summary, write_tsv};
use lexforge::maxent::{information_gain, loo_evaluate, train, MaxEntError, Model, TrainConfig};
use lexforge::ontology::Ontology;
use lexforge::pipeline::{
    interest_entries, load_manual_names, name_entries, names_from_bundle, parse_labeled, plan_entries, schema_hash,
    RunConfig,
};
use lexforge::ranker::Method;
use lexforge::realize::Lexicon;
use lexforge::store::{agreement_report, judge_bundle, ranking_metrics, sha256_hex, ResourceBundle, TargetKind};

use crate::service;

/// Failure of a command: bad input (exit 1) or a fault of the tool (exit 2).
#[derive(Debug)]
pub enum CliError {
    User(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::User(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

fn user<E: fmt::Display>(e: E) -> CliError {
    CliError::User(e.to_string())
}

fn internal<E: fmt::Display>(e: E) -> CliError {
    CliError::Internal(e.to_string())
}

pub type CliResult = Result<(), CliError>;

#[derive(Debug, Parser)]
#[command(name = "lexforge", version, about = "Induce entity names and sentence plans from an ontology and a corpus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank name candidates for every entity and write a bundle.
    ExtractNames(ExtractNames),
    /// Rank sentence plans for every relation and write a bundle.
    ExtractPlans(ExtractPlans),
    /// Train the plan classifier on labeled feature vectors.
    Train(TrainArgs),
    /// Ranking metrics and judge agreement from the selections in a bundle.
    Evaluate(Evaluate),
    /// Serve a bundle for review over HTTP.
    Serve(Serve),
    /// Write the chosen names and plans as plain text.
    Export(Export),
}

#[derive(Debug, Args)]
pub struct Inputs {
    /// Ontology file.
    #[arg(long)]
    pub ontology: PathBuf,
    /// Annotated corpus file; repeatable.
    #[arg(long = "corpus", required = true)]
    pub corpora: Vec<PathBuf>,
    /// Documents kept per query.
    #[arg(long, default_value_t = 10)]
    pub max_docs: usize,
    /// Seed for tie breaking.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Candidates kept per target.
    #[arg(long, default_value_t = 5)]
    pub top_k: usize,
}

#[derive(Debug, Args)]
pub struct ExtractNames {
    #[command(flatten)]
    pub inputs: Inputs,
    /// Output bundle.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NamesSource {
    /// A file of manually authored names.
    Manual,
    /// The names selected in the bundle.
    Selected,
    /// The top candidate of each entity in the bundle.
    Top1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Sp,
    SpStar,
    Boot,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Sp => Method::Sp,
            MethodArg::SpStar => Method::SpStar,
            MethodArg::Boot => Method::Boot,
        }
    }
}

#[derive(Debug, Args)]
pub struct ExtractPlans {
    #[command(flatten)]
    pub inputs: Inputs,
    /// Where the names used as seeds come from.
    #[arg(long, value_enum, default_value_t = NamesSource::Manual)]
    pub names: NamesSource,
    /// Names file for `--names manual`.
    #[arg(long)]
    pub manual_names: Option<PathBuf>,
    /// Bundle holding the names for `selected` and `top1`; its entities and
    /// selections are carried over.
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    /// Selector whose marks count for `--names selected`.
    #[arg(long)]
    pub selector: Option<String>,
    /// Ranking shown for review; `boot` also runs the baseline.
    #[arg(long, value_enum, default_value_t = MethodArg::SpStar)]
    pub method: MethodArg,
    /// Also run the bootstrapping baseline.
    #[arg(long)]
    pub boot: bool,
    /// Trained classifier; without one every candidate scores 0.5.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Cosine threshold for matching seed names.
    #[arg(long, default_value_t = 0.1)]
    pub threshold: f64,
    /// Templates the baseline aims for.
    #[arg(long, default_value_t = 150)]
    pub boot_target: usize,
    /// Write the normalized feature vectors here.
    #[arg(long)]
    pub features_out: Option<PathBuf>,
    /// Output bundle.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Labeled data: `id`, `label`, then one column per feature.
    #[arg(long)]
    pub data: PathBuf,
    /// Output model.
    #[arg(long)]
    pub out: PathBuf,
    /// Report with learning curves and information gain.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Run the leave-one-out learning curves.
    #[arg(long)]
    pub loo: bool,
    #[arg(long, default_value_t = 1e-4)]
    pub l2: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct Evaluate {
    #[arg(long)]
    pub bundle: PathBuf,
    /// Selector whose marks are the gold standard.
    #[arg(long)]
    pub gold: Option<String>,
    /// Second judge compared against the gold one.
    #[arg(long)]
    pub other: Option<String>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Serve {
    #[arg(long)]
    pub bundle: PathBuf,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Directory of the review interface.
    #[arg(long = "static")]
    pub static_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Export {
    #[arg(long)]
    pub bundle: PathBuf,
    /// Use this selector's marks; otherwise the top candidates.
    #[arg(long)]
    pub selector: Option<String>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::User(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> CliResult {
    fs::write(path, bytes).map_err(|e| CliError::User(format!("{}: {e}", path.display())))
}

fn load_inputs(inputs: &Inputs) -> Result<(Ontology, CorpusStore, String), CliError> {
    let bytes = read(&inputs.ontology)?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::User(format!("{}: {e}", inputs.ontology.display())))?;
    let ontology = Ontology::parse(&text).map_err(|e| CliError::User(format!("{}: {e}", inputs.ontology.display())))?;
    let mut builder = CorpusBuilder::new(CorpusConfig {
        max_docs_per_query: inputs.max_docs,
    });
    for path in &inputs.corpora {
        let report = builder
            .ingest(path, "default")
            .map_err(|e| CliError::User(format!("{}: {e}", path.display())))?;
        log::info!("{}: {} documents", path.display(), report.documents);
    }
    Ok((ontology, builder.freeze(), sha256_hex(&bytes)))
}

fn run_config(inputs: &Inputs) -> RunConfig {
    RunConfig {
        max_docs_per_query: inputs.max_docs,
        top_k: inputs.top_k,
        seed: inputs.seed,
        ..RunConfig::default()
    }
}

fn load_bundle(path: &Path) -> Result<ResourceBundle, CliError> {
    ResourceBundle::load(path).map_err(user)
}

fn save_bundle(bundle: &ResourceBundle, path: &Path) -> CliResult {
    let text = bundle.to_canonical_json().map_err(internal)?;
    write(path, text.as_bytes())
}

pub fn extract_names(args: &ExtractNames) -> CliResult {
    let (ontology, store, hash) = load_inputs(&args.inputs)?;
    let lex = Lexicon::shared();
    let config = run_config(&args.inputs);
    let mut bundle = ResourceBundle::new(hash);
    bundle.config = config.snapshot();
    bundle.entities = name_entries(&ontology, &store, lex, &config).map_err(user)?;
    bundle.interest = interest_entries(&ontology, &store, lex, &names_from_bundle(&ontology, &bundle, None));
    for (id, e) in &bundle.entities {
        for w in &e.warnings {
            log::warn!("{id}: {w}");
        }
    }
    save_bundle(&bundle, &args.out)
}

pub fn extract_plans(args: &ExtractPlans) -> CliResult {
    let (ontology, store, hash) = load_inputs(&args.inputs)?;
    let lex = Lexicon::shared();
    let mut config = run_config(&args.inputs);
    config.threshold = args.threshold;
    config.boot_target = args.boot_target;

    let existing = args.bundle.as_deref().map(load_bundle).transpose()?;
    if let Some(b) = &existing {
        if b.ontology_sha256 != hash {
            log::warn!("bundle was built from a different ontology file");
        }
    }
    let names = match args.names {
        NamesSource::Manual => {
            let path = args
                .manual_names
                .as_deref()
                .ok_or_else(|| CliError::User("--names manual needs --manual-names".into()))?;
            load_manual_names(&ontology, path).map_err(user)?
        }
        NamesSource::Selected | NamesSource::Top1 => {
            let bundle = existing
                .as_ref()
                .ok_or_else(|| CliError::User("--names selected/top1 needs --bundle".into()))?;
            let selector = match args.names {
                NamesSource::Selected => Some(match &args.selector {
                    Some(s) => s.clone(),
                    None => match bundle.selectors().as_slice() {
                        [only] => only.clone(),
                        _ => return Err(CliError::User("several selectors in the bundle; pick one with --selector".into())),
                    },
                }),
                _ => None,
            };
            names_from_bundle(&ontology, bundle, selector.as_deref())
        }
    };
    let model = args
        .model
        .as_deref()
        .map(|p| Model::load(p).map_err(user))
        .transpose()?;
    if model.is_none() {
        log::warn!("no model given; all candidates score 0.5");
    }
    let method = Method::from(args.method);
    let boot = args.boot || method == Method::Boot;
    let run = plan_entries(&ontology, &store, lex, &names, &config, model.as_ref(), boot).map_err(user)?;

    let mut bundle = existing.unwrap_or_else(|| ResourceBundle::new(hash.clone()));
    bundle.ontology_sha256 = hash;
    bundle.config = config.snapshot();
    bundle.interest = interest_entries(&ontology, &store, lex, &names);
    bundle.relations = run.relations;
    for r in bundle.relations.values_mut() {
        r.review = Some(method);
    }
    bundle
        .selections
        .retain(|s| bundle.entities.contains_key(&s.target));
    for (id, r) in &bundle.relations {
        for w in &r.warnings {
            log::warn!("{id}: {w}");
        }
    }
    if let Some(path) = &args.features_out {
        let mut buf = Vec::new();
        write_tsv(&mut buf, &run.features).map_err(internal)?;
        write(path, &buf)?;
    }
    save_bundle(&bundle, &args.out)
}

pub fn train_model(args: &TrainArgs) -> CliResult {
    let text = String::from_utf8(read(&args.data)?).map_err(|e| CliError::User(format!("{}: {e}", args.data.display())))?;
    let (names, data) = parse_labeled(&text).map_err(|e| CliError::User(format!("{}: {e}", args.data.display())))?;
    let config = TrainConfig {
        l2: args.l2,
        max_iterations: args.max_iterations,
        seed: args.seed,
        ..TrainConfig::default()
    };
    let classify = |e: MaxEntError| match e {
        MaxEntError::SingleClass | MaxEntError::TooFew | MaxEntError::SchemaMismatch { .. } => user(e),
        other => internal(other),
    };
    let mut model = train(&data, &config).map_err(classify)?;
    if names == feature_names() {
        model.schema = schema_hash(&names);
    }
    if !model.converged {
        log::warn!("training stopped after {} iterations without converging", config.max_iterations);
    }
    model.save(&args.out).map_err(user)?;

    let curve = if args.loo {
        Some(loo_evaluate(&data, &config).map_err(classify)?)
    } else {
        None
    };
    let gain = information_gain(&data).map_err(classify)?;
    let groups = (names.len() == lexforge::features::FEATURE_COUNT).then(|| group_summary(&gain));
    let mut top: Vec<(usize, f64)> = gain.iter().copied().enumerate().collect();
    top.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let report = json!({
        "instances": data.len(),
        "positives": data.iter().filter(|i| i.positive).count(),
        "converged": model.converged,
        "loo": curve.as_ref().map(|c| c.iter().map(|p| json!({
            "fraction": p.fraction,
            "test_error": p.test_error,
            "train_error": p.train_error,
        })).collect::<Vec<_>>()),
        "information_gain": names.iter().zip(&gain).map(|(n, g)| json!({"feature": n, "gain": g})).collect::<Vec<_>>(),
        "information_gain_groups": groups,
        "top_features": top.iter().take(10).map(|(i, g)| json!({"feature": names[*i], "gain": g})).collect::<Vec<_>>(),
    });
    let text = serde_json::to_string_pretty(&report).map_err(internal)? + "\n";
    match &args.report {
        Some(path) => write(path, text.as_bytes()),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(internal),
    }
}

pub fn evaluate(args: &Evaluate) -> CliResult {
    let bundle = load_bundle(&args.bundle)?;
    let selectors = bundle.selectors();
    let gold = match (&args.gold, selectors.as_slice()) {
        (Some(g), _) => g.clone(),
        (None, [first, ..]) => first.clone(),
        (None, []) => return Err(CliError::User("the bundle has no selections".into())),
    };
    let mut report = json!({
        "gold": gold,
        "names": ranking_metrics(&judge_bundle(&bundle, TargetKind::Entity, &gold)),
        "plans": ranking_metrics(&judge_bundle(&bundle, TargetKind::Relation, &gold)),
    });
    let other = args.other.clone().or_else(|| selectors.iter().find(|s| **s != gold).cloned());
    if let Some(other) = other {
        let agreement = agreement_report(&bundle, &gold, &other).map_err(user)?;
        report["agreement"] = serde_json::to_value(agreement).map_err(internal)?;
    }
    let text = serde_json::to_string_pretty(&report).map_err(internal)? + "\n";
    match &args.out {
        Some(path) => write(path, text.as_bytes()),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(internal),
    }
}

pub fn serve(args: &Serve) -> CliResult {
    let bundle = load_bundle(&args.bundle)?;
    let state = service::AppState::new(bundle, Some(args.bundle.clone()));
    let app = service::router(state, args.static_dir.clone());
    let runtime = tokio::runtime::Runtime::new().map_err(internal)?;
    runtime.block_on(async {
        let addr = format!("{}:{}", args.host, args.port);
        let listener = tokio::net::TcpListener::bind(&addr)
            .await
            .map_err(|e| CliError::User(format!("cannot listen on {addr}: {e}")))?;
        log::info!("serving {} on http://{addr}", args.bundle.display());
        axum::serve(listener, app).await.map_err(internal)
    })
}

pub fn export(args: &Export) -> CliResult {
    let bundle = load_bundle(&args.bundle)?;
    let chosen = match &args.selector {
        Some(sel) => bundle.selected_candidates(sel),
        None => {
            let mut top = std::collections::BTreeMap::new();
            for (id, e) in &bundle.entities {
                if !e.candidates.is_empty() {
                    top.insert(id.clone(), 0);
                }
            }
            for (id, r) in &bundle.relations {
                if let Some(&c) = r.review_order().first() {
                    top.insert(id.clone(), c);
                }
            }
            top
        }
    };
    let mut names = String::from("# entity\tname\n");
    let mut plans = String::from("# relation\tplan\n");
    for (target, c) in &chosen {
        if let Some(e) = bundle.entities.get(target) {
            names.push_str(&format!("{target}\t{}\n", e.candidates[*c].name));
        } else if let Some(r) = bundle.relations.get(target) {
            plans.push_str(&format!("{target}\t{}\n", r.candidates[*c].plan));
        }
    }
    fs::create_dir_all(&args.out_dir).map_err(|e| CliError::User(format!("{}: {e}", args.out_dir.display())))?;
    write(&args.out_dir.join("names.txt"), names.as_bytes())?;
    write(&args.out_dir.join("plans.txt"), plans.as_bytes())
}

pub fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::ExtractNames(a) => extract_names(a),
        Command::ExtractPlans(a) => extract_plans(a),
        Command::Train(a) => train_model(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Serve(a) => serve(a),
        Command::Export(a) => export(a),
    }
}
