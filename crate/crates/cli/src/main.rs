//! `sere`: query the explorer, check corpus files, or run the server.

use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sere_core::datasource::{ingest_corpus, LiveConfig};
use sere_core::{
    build_explorer, BackendError, BackendSpec, ExplorationResult, ExploreError, FieldSet,
    Format, LanguageCode, PipelineConfig,
};
use sere_service::ServeArgs;

mod table;

const EXIT_NO_MATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BACKEND: u8 = 3;
const EXIT_INVALID_CORPUS: u8 = 4;

#[derive(Parser)]
#[command(name = "sere", version, about = "Semantic relatedness explorer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Explore the terms related to TERM.
    Query(QueryArgs),
    /// Validate a corpus file and print index statistics.
    IngestCheck {
        path: PathBuf,
        #[arg(long, default_value = "en")]
        lang: String,
    },
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(clap::Args)]
struct QueryArgs {
    term: String,
    #[arg(long, default_value = "en")]
    lang: String,
    /// `live`, `corpus`, `corpus:<path>` or `corpus:<lang>=<path>,...`.
    #[arg(long, env = "SERE_BACKEND", default_value = "live")]
    backend: String,
    #[arg(long, env = "SERE_CORPUS_PATH", hide_env_values = true)]
    corpus_path: Option<PathBuf>,
    /// Comma-separated subset of category,description,snippets,sr,thumbnail.
    #[arg(long)]
    fields: Option<String>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Xml)]
    format: OutputFormat,
    /// Rows shown by the table format.
    #[arg(long, default_value_t = 20)]
    top: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Xml,
    Json,
    Table,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }
}

impl From<BackendError> for Failure {
    fn from(e: BackendError) -> Self {
        match e {
            BackendError::InvalidSpec(_) => Failure::new(EXIT_USAGE, e),
            _ => Failure::new(EXIT_BACKEND, e),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .expect("tokio runtime");
    let outcome = match cli.command {
        Command::Query(args) => runtime.block_on(query(args)),
        Command::IngestCheck { path, lang } => ingest_check(&path, &lang),
        Command::Serve(args) => runtime
            .block_on(sere_service::serve(args))
            .map_err(|e| Failure::new(EXIT_BACKEND, e)),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn backend_spec(args: &QueryArgs) -> Result<BackendSpec, Failure> {
    match (args.backend.as_str(), &args.corpus_path) {
        ("corpus", Some(path)) => Ok(BackendSpec::Corpus(vec![(None, path.clone())])),
        (spec, _) => Ok(spec.parse()?),
    }
}

async fn query(args: QueryArgs) -> Result<(), Failure> {
    if args.term.trim().is_empty() {
        return Err(Failure::new(EXIT_USAGE, "TERM must not be blank"));
    }
    let lang = LanguageCode::new(&args.lang).map_err(|e| Failure::new(EXIT_USAGE, e))?;
    let fields = match &args.fields {
        None => FieldSet::all(),
        Some(csv) => FieldSet::parse_csv(csv).map_err(|e| Failure::new(EXIT_USAGE, e))?,
    };
    let config = PipelineConfig::default()
        .with_env()
        .map_err(|e| Failure::new(EXIT_USAGE, e))?;
    let live = LiveConfig {
        inlink_cap: config.inlink_cap,
        ..LiveConfig::from_env()
    };
    let explorer = build_explorer(&backend_spec(&args)?, config, &[lang], lang, &live)?;
    let result = explorer
        .explore(lang, &args.term, fields)
        .await
        .map_err(|e| match e {
            ExploreError::NoMatch(_) => Failure::new(EXIT_NO_MATCH, e),
            ExploreError::EmptyQuery | ExploreError::UnsupportedLanguage(_) => {
                Failure::new(EXIT_USAGE, e)
            }
            ExploreError::AllSourcesFailed(_) | ExploreError::Provider(_) => {
                Failure::new(EXIT_BACKEND, e)
            }
        })?;
    for warning in &result.warnings {
        log::info!("{warning}");
    }
    emit(&result, args.format, args.top)
}

fn emit(result: &ExplorationResult, format: OutputFormat, top: usize) -> Result<(), Failure> {
    let body = match format {
        OutputFormat::Xml => Format::Xml.render(result),
        OutputFormat::Json => {
            let mut json = Format::Json.render(result);
            // Piped output stays byte-identical to the service body.
            if std::io::stdout().is_terminal() {
                json.push('\n');
            }
            json
        }
        OutputFormat::Table => table::render(result, top),
    };
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(body.as_bytes())
        .and_then(|_| stdout.flush())
        .map_err(|e| Failure::new(EXIT_BACKEND, e))
}

fn ingest_check(path: &std::path::Path, lang: &str) -> Result<(), Failure> {
    let lang = LanguageCode::new(lang).map_err(|e| Failure::new(EXIT_USAGE, e))?;
    let corpus = ingest_corpus(path, lang).map_err(|e| match e.line() {
        Some(_) => Failure::new(EXIT_INVALID_CORPUS, format!("{}: {e}", path.display())),
        None => Failure::new(EXIT_INVALID_CORPUS, e),
    })?;
    let stats = corpus.stats();
    println!("{} articles", stats.articles);
    println!("{} distinct tokens, {} postings", stats.distinct_tokens, stats.postings);
    println!("{} links to {} distinct targets", stats.links, stats.linked_targets);
    println!("{} distinct categories", stats.categories);
    Ok(())
}
