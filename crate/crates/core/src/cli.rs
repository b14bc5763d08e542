//! Command-line front end. [`run`] parses arguments, dispatches to the
//! library and maps failures onto the exit-code contract:
//! 0 success, 1 usage error, 2 input error, 3 oracle failure,
//! 4 unsatisfiable program under `--strict`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::dcg::{build_qatree, generate_language, read_dcg, render_dcg, tree_to_dcg, DcgError};
use crate::dual::contrapose;
use crate::engine::{self, Engine, EngineError};
use crate::explore::{default_stem, explore, save_artifacts, Agent, ExplorationConfig, ExploreError, HornShape};
use crate::fixpoint::SolverOptions;
use crate::json::load_json_program;
use crate::oracle::{CaptureOracle, ChatClient, ChatConfig, Oracle, OracleError, PromptTemplates, ReplayOracle};
use crate::program::{Program, ProgramKind, Status};
use crate::relgraph::{
    export_graph, generalization_edges, implication_edges, model_file_atoms, svo_edges, svo_triples, GraphError, GraphFormat,
};
use crate::soft::{
    export_abduced, soft_unify, AbducedLedger, EmbeddingBackend, EmbeddingConfig, HashingBackend, HttpEmbedder, SentenceStore,
    SoftError, SoftQuery,
};
use crate::syntax::{parse_program, serialize_program};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_ORACLE: i32 = 3;
pub const EXIT_UNSAT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "logicgen", version, about = "Build and run propositional logic programs elicited from language models")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Oracle source: `live`, `replay:<fixture.json>` or `capture:<fixture.json>`.
    #[arg(long, global = true, default_value = "live")]
    pub oracle: String,
    /// Base URL of the chat/embedding endpoint (default from LOGICGEN_BASE_URL or OPENAI_BASE_URL).
    #[arg(long, global = true)]
    pub base_url: Option<String>,
    /// Chat model name (default from LOGICGEN_MODEL).
    #[arg(long, global = true)]
    pub model_name: Option<String>,
    /// Prompt templates in TOML; the bundled wording is used otherwise.
    #[arg(long, global = true)]
    pub templates: Option<PathBuf>,
    /// Per-request timeout in seconds for live oracles.
    #[arg(long, global = true, default_value_t = 60)]
    pub timeout: u64,
    /// Retries on transient oracle failures.
    #[arg(long, global = true, default_value_t = 3)]
    pub max_retries: u32,
    /// Concurrent live oracle requests.
    #[arg(long, global = true, default_value_t = 4)]
    pub max_in_flight: usize,
    /// More log output on stderr; repeat for more detail.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimal model of a Horn program (falsified atoms of a dual program).
    Solve {
        /// Program in text (`.pro`) or JSON (`.json`) form.
        program: PathBuf,
        /// Exit with status 4 and print no model when a constraint fires.
        #[arg(long)]
        strict: bool,
        /// Only decide whether this atom holds; prints `true` or `false`.
        #[arg(long)]
        goal: Option<String>,
        #[arg(long, default_value = "fixpoint")]
        engine: Engine,
    },
    /// Contrapositive compilation of a dual program into a definite program.
    CompileDual {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Expand a goal through the oracle into a program, trace and model.
    Explore {
        #[arg(long)]
        goal: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value = "horn")]
        mode: ProgramKind,
        #[arg(long, default_value = "recursor")]
        agent: Agent,
        /// Rater acceptance threshold in 0..=100.
        #[arg(long, default_value_t = 50.0)]
        threshold: f64,
        /// Maximum items kept per expansion.
        #[arg(long, default_value_t = 5)]
        branching: usize,
        /// Emit one Horn clause per item instead of one conjunctive clause.
        #[arg(long)]
        disjunctive: bool,
        #[arg(long, default_value = "fixpoint")]
        engine: Engine,
        /// File stem of the artifacts; the first word of the goal by default.
        #[arg(long)]
        stem: Option<String>,
        /// Output directory.
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
    },
    /// Grow a question/answer tree and write it as a Prolog DCG.
    Dcg {
        #[arg(long)]
        question: String,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the question/answer tree as JSON.
        #[arg(long)]
        tree: Option<PathBuf>,
    },
    /// Print every sentence generated by a DCG file written by `dcg`.
    DcgGenerate { grammar: PathBuf },
    /// Sentence store and soft unification.
    #[command(subcommand)]
    Soft(SoftCommand),
    /// Relation graph of a program.
    Graph {
        program: PathBuf,
        /// Keep only edges inside the model: computed when given without a
        /// value, read from a model file otherwise.
        #[arg(long, num_args = 0..=1, default_missing_value = "")]
        model: Option<String>,
        /// Add generalization edges obtained from the oracle.
        #[arg(long)]
        generalize: bool,
        /// Atoms per generalization request.
        #[arg(long, default_value_t = 16)]
        batch: usize,
        /// Add subject/verb/object edges extracted from this sentence.
        #[arg(long)]
        svo: Vec<String>,
        #[arg(long, default_value = "dot")]
        format: GraphFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct BackendArgs {
    /// Embedding backend: `hash` (built-in, deterministic) or `http`.
    #[arg(long, default_value = "hash")]
    pub backend: String,
    /// Embedding model for the `http` backend (default from LOGICGEN_EMBED_MODEL).
    #[arg(long)]
    pub embed_model: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum SoftCommand {
    /// Add the lines of a text file to a store directory.
    Add {
        store: PathBuf,
        textfile: PathBuf,
        #[command(flatten)]
        backend: BackendArgs,
    },
    /// Soft-unify a query against a store.
    Query {
        store: PathBuf,
        #[arg(long)]
        q: String,
        #[arg(long, default_value_t = 3)]
        knn: usize,
        /// Distance bound in percent.
        #[arg(long, default_value_t = 70)]
        threshold: u32,
        /// Ledger file to record matches in; created when missing.
        #[arg(long)]
        ledger: Option<PathBuf>,
        #[command(flatten)]
        backend: BackendArgs,
    },
    /// Export a ledger as a Horn program.
    Export {
        ledger: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Probability-annotated listing.
        #[arg(long)]
        annotated: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Oracle(String),
    #[error("{0}")]
    Unsatisfiable(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Input(_) => EXIT_INPUT,
            CliError::Oracle(_) => EXIT_ORACLE,
            CliError::Unsatisfiable(_) => EXIT_UNSAT,
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Config(_) | OracleError::Fixture(_) | OracleError::Io(_) => CliError::Input(format!("oracle setup: {e}")),
            other => CliError::Oracle(other.to_string()),
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<SoftError> for CliError {
    fn from(e: SoftError) -> Self {
        match e {
            SoftError::Embed(_) | SoftError::Backend(_) => CliError::Oracle(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Oracle(o) => o.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

type CliResult = Result<(), CliError>;

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn write_file(path: &Path, text: &str) -> CliResult {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Loads a program: JSON when the file name ends in `.json`, the text
/// syntax otherwise.
pub fn load_program(path: &Path) -> Result<Program, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        load_json_program(&text).map_err(|e| format!("{}: {e}", path.display()))
    } else {
        parse_program(&text, None).map_err(|e| format!("{}:{e}", path.display()))
    }
}

fn program(path: &Path) -> Result<Program, CliError> {
    load_program(path).map_err(CliError::Input)
}

fn make_oracle(g: &GlobalArgs) -> Result<Box<dyn Oracle>, CliError> {
    let live = || -> Result<ChatClient, CliError> {
        let mut cfg = ChatConfig::from_env();
        if let Some(b) = &g.base_url {
            cfg.base_url = b.clone();
        }
        if let Some(m) = &g.model_name {
            cfg.model = m.clone();
        }
        cfg.timeout = Duration::from_secs(g.timeout);
        cfg.max_retries = g.max_retries;
        cfg.max_in_flight = g.max_in_flight;
        let templates = match &g.templates {
            Some(p) => PromptTemplates::load(p)?,
            None => PromptTemplates::default(),
        };
        Ok(ChatClient::new(cfg, templates))
    };
    match g.oracle.split_once(':') {
        None if g.oracle == "live" => Ok(Box::new(live()?)),
        Some(("replay", path)) => Ok(Box::new(ReplayOracle::load(path)?)),
        Some(("capture", path)) => {
            let client = live()?;
            let from = format!("{} at {}", client.config().model, client.config().base_url);
            Ok(Box::new(CaptureOracle::new(client, path, Some(from))))
        }
        _ => Err(CliError::Usage(format!(
            "invalid --oracle {:?}; expected live, replay:<file> or capture:<file>",
            g.oracle
        ))),
    }
}

fn make_backend(args: &BackendArgs, g: &GlobalArgs, known_dim: Option<usize>) -> Result<Box<dyn EmbeddingBackend>, CliError> {
    match args.backend.as_str() {
        "hash" => Ok(Box::new(HashingBackend::new(known_dim.unwrap_or(HashingBackend::DEFAULT_DIM)))),
        "http" => {
            let mut cfg = EmbeddingConfig::from_env();
            if let Some(b) = &g.base_url {
                cfg.base_url = b.clone();
            }
            if let Some(m) = &args.embed_model {
                cfg.model = m.clone();
            }
            cfg.timeout = Duration::from_secs(g.timeout);
            cfg.max_retries = g.max_retries;
            let e = HttpEmbedder::connect(cfg, known_dim).map_err(SoftError::from)?;
            Ok(Box::new(e))
        }
        other => Err(CliError::Usage(format!("unknown embedding backend {other:?}; expected hash or http"))),
    }
}

fn stored_dimension(store: &Path) -> Option<usize> {
    SentenceStore::load(store).ok().map(|s| s.dimension())
}

fn solve_cmd(out: &mut dyn Write, path: &Path, strict: bool, goal: Option<&str>, eng: Engine) -> CliResult {
    let p = program(path)?;
    if p.kind() == ProgramKind::Dual {
        if let Some(goal) = goal {
            if p.symbols().lookup(goal).is_none() {
                return Err(CliError::Input(format!("goal {goal:?} does not occur in the program")));
            }
            let falsified = engine::falsified_atoms(&p, eng)?;
            let hit = falsified.iter().any(|&a| p.text(a) == goal.trim());
            let _ = writeln!(out, "{hit}");
            return Ok(());
        }
        for a in engine::falsified_atoms(&p, eng)? {
            let _ = writeln!(out, "{}", p.text(a));
        }
        return Ok(());
    }

    let mut opts = if strict { SolverOptions::strict() } else { SolverOptions::default() };
    if let Some(goal) = goal {
        let atom = p
            .symbols()
            .lookup(goal)
            .ok_or_else(|| CliError::Input(format!("goal {goal:?} does not occur in the program")))?;
        opts.stop_at_goal = Some(atom);
    }
    let model = engine::solve(&p, eng, opts)?;
    if model.status == Status::Unsatisfiable && strict && model.proved_goal.is_none() {
        return Err(CliError::Unsatisfiable(format!("{}: an integrity constraint fired", path.display())));
    }
    if model.status == Status::Unsatisfiable {
        log::warn!("{}: an integrity constraint fired", path.display());
    }
    if goal.is_some() {
        let _ = writeln!(out, "{}", model.proved_goal.is_some());
    } else {
        for t in model.texts(p.symbols()) {
            let _ = writeln!(out, "{t}");
        }
    }
    Ok(())
}

fn soft_cmd(out: &mut dyn Write, cmd: &SoftCommand, g: &GlobalArgs) -> CliResult {
    match cmd {
        SoftCommand::Add { store, textfile, backend } => {
            let b = make_backend(backend, g, stored_dimension(store))?;
            let mut s = SentenceStore::open_or_create(store, b.as_ref())?;
            let lines: Vec<String> = read(textfile)?.lines().map(str::to_string).collect();
            let added = s.add_sentences(b.as_ref(), &lines)?;
            s.save(store)?;
            let _ = writeln!(out, "added {added} sentence(s); store holds {}", s.len());
        }
        SoftCommand::Query {
            store,
            q,
            knn,
            threshold,
            ledger,
            backend,
        } => {
            let s = SentenceStore::load(store)?;
            let b = make_backend(backend, g, Some(s.dimension()))?;
            let sq = SoftQuery::new(q.clone(), *knn, *threshold);
            let mut l = match ledger {
                Some(path) => Some(AbducedLedger::load_or_default(path)?),
                None => None,
            };
            let hits = soft_unify(&s, b.as_ref(), l.as_mut(), &sq)?;
            for (sentence, d) in &hits {
                let _ = writeln!(out, "{d:.4}\t{sentence}");
            }
            if let (Some(path), Some(l)) = (ledger, l) {
                l.save(path)?;
            }
        }
        SoftCommand::Export {
            ledger,
            output,
            annotated,
        } => {
            let l = AbducedLedger::load(ledger)?;
            let (p, listing) = export_abduced(&l);
            let text = serialize_program(&p);
            match output {
                Some(path) => write_file(path, &text)?,
                None => {
                    let _ = out.write_all(text.as_bytes());
                }
            }
            if let Some(path) = annotated {
                write_file(path, &listing)?;
            }
        }
    }
    Ok(())
}

fn graph_cmd(out: &mut dyn Write, cmd: &Command, g: &GlobalArgs) -> CliResult {
    let Command::Graph {
        program: path,
        model,
        generalize,
        batch,
        svo,
        format,
        output,
    } = cmd
    else {
        unreachable!("graph_cmd is only called for graph")
    };
    let p = program(path)?;
    let keep = match model.as_deref() {
        None => None,
        Some("") => Some(match p.kind() {
            ProgramKind::Horn => {
                let m = engine::solve(&p, Engine::Fixpoint, SolverOptions::default())?;
                m.texts(p.symbols()).into_iter().map(str::to_string).collect()
            }
            ProgramKind::Dual => engine::falsified_atoms(&p, Engine::Fixpoint)?
                .into_iter()
                .map(|a| p.text(a).to_string())
                .collect(),
        }),
        Some(file) => Some(model_file_atoms(&read(Path::new(file))?)),
    };
    let mut edges = implication_edges(&p, keep.as_ref());
    if *generalize || !svo.is_empty() {
        let oracle = make_oracle(g)?;
        if *generalize {
            let atoms: Vec<String> = crate::relgraph::nodes(&edges);
            let gen = generalization_edges(&atoms, *batch, oracle.as_ref())?;
            edges.extend(gen.edges);
        }
        for sentence in svo {
            let (triples, _) = svo_triples(sentence, oracle.as_ref())?;
            edges.extend(svo_edges(&triples));
        }
    }
    let text = export_graph(&edges, *format);
    match output {
        Some(path) => write_file(path, &text),
        None => {
            let _ = out.write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CliResult {
    let g = &cli.global;
    match &cli.command {
        Command::Solve {
            program,
            strict,
            goal,
            engine,
        } => solve_cmd(out, program, *strict, goal.as_deref(), *engine),
        Command::CompileDual { input, output } => {
            let p = program(input)?;
            let (compiled, _) = contrapose(&p).map_err(|e| CliError::Input(format!("{}: {e}", input.display())))?;
            let text = serialize_program(&compiled);
            match output {
                Some(path) => write_file(path, &text),
                None => {
                    let _ = out.write_all(text.as_bytes());
                    Ok(())
                }
            }
        }
        Command::Explore {
            goal,
            depth,
            mode,
            agent,
            threshold,
            branching,
            disjunctive,
            engine,
            stem,
            output,
        } => {
            let mut cfg = ExplorationConfig::new(goal.clone(), *depth, *mode);
            cfg.agent = *agent;
            cfg.rater_threshold = *threshold;
            cfg.max_branching = *branching;
            if *disjunctive {
                cfg.horn_shape = HornShape::Disjunctive;
            }
            let stem = stem.clone().unwrap_or_else(|| default_stem(goal));
            let oracle = make_oracle(g)?;
            match explore(&cfg, oracle.as_ref()) {
                Ok((p, trace)) => {
                    let paths = save_artifacts(output, &stem, &p, &trace, *engine).map_err(|e| CliError::Input(e.to_string()))?;
                    for path in [&paths.program, &paths.trace, &paths.model] {
                        let _ = writeln!(out, "{}", path.display());
                    }
                    Ok(())
                }
                Err(e) => {
                    if let Some(trace) = e.trace() {
                        let path = output.join(format!("{stem}_trace.json"));
                        let json = serde_json::to_string_pretty(trace).expect("trace serializes") + "\n";
                        write_file(&path, &json)?;
                        log::warn!("partial trace written to {}", path.display());
                    }
                    Err(match e {
                        ExploreError::Oracle { source, .. } => source.into(),
                        ExploreError::NothingAccepted { .. } => CliError::Oracle(e.to_string()),
                        other => CliError::Usage(other.to_string()),
                    })
                }
            }
        }
        Command::Dcg {
            question,
            depth,
            output,
            tree,
        } => {
            let oracle = make_oracle(g)?;
            let qa = match build_qatree(question, *depth, oracle.as_ref()) {
                Ok(t) => t,
                Err(DcgError::Oracle { source, .. }) => return Err(source.into()),
                Err(e) => return Err(CliError::Usage(e.to_string())),
            };
            let grammar = tree_to_dcg(&qa);
            write_file(output, &render_dcg(&grammar))?;
            if let Some(path) = tree {
                let json = serde_json::to_string_pretty(&qa).expect("tree serializes") + "\n";
                write_file(path, &json)?;
            }
            let _ = writeln!(
                out,
                "{} rule(s), {} question(s), {} open question(s)",
                grammar.rules.len(),
                grammar.questions.len(),
                grammar.opens.len()
            );
            Ok(())
        }
        Command::DcgGenerate { grammar } => {
            let g = read_dcg(&read(grammar)?).map_err(|e| CliError::Input(format!("{}: {e}", grammar.display())))?;
            if !g.is_acyclic() {
                return Err(CliError::Input(format!("{}: grammar has a cycle", grammar.display())));
            }
            for sentence in generate_language(&g) {
                let _ = writeln!(out);
                for terminal in sentence {
                    let _ = writeln!(out, "{terminal}");
                }
            }
            Ok(())
        }
        Command::Soft(cmd) => soft_cmd(out, cmd, g),
        cmd @ Command::Graph { .. } => graph_cmd(out, cmd, g),
    }
}

fn init_logging(verbosity: u8) {
    let level = match verbosity {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    init_logging(cli.global.verbose);
    match dispatch(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}
