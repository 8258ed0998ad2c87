use std::io::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fuzzyrank_cli::api::{self, AppState};
use fuzzyrank_cli::evaluate::evaluate;
use fuzzyrank_cli::response::{self, SearchParams, SearchResponse};
use fuzzyrank_cli::{exit, load_engine, Failure, CONFIG_ENV};
use fuzzyrank_core::engine::{Engine, EngineConfig};
use fuzzyrank_core::eval::{planted_corpus, JudgmentSet};
use fuzzyrank_core::exec::Execution;
use fuzzyrank_core::index::{load_index, save_index, Index, IndexError};
use fuzzyrank_core::ingest::Corpus;

#[derive(Parser)]
#[command(
    name = "fuzzyrank",
    version,
    about = "Zone-weighted relevance ranking for scholarly articles"
)]
struct Cli {
    /// Run on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML or JSON engine config.
    #[arg(long, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Directory with organisms.csv, geologic_time.csv and regions.csv.
    #[arg(long)]
    taxonomy_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchFormat {
    Table,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a corpus directory and write an index file.
    Index {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Rank indexed documents for a query.
    Search {
        #[arg(long)]
        index: PathBuf,
        query: String,
        /// Keep only one level: high, medium or low.
        #[arg(long)]
        level: Option<String>,
        #[arg(long, default_value_t = response::DEFAULT_LIMIT)]
        limit: usize,
        #[arg(long, default_value_t = 0)]
        offset: usize,
        /// Show the score breakdown of every hit.
        #[arg(long)]
        explain: bool,
        #[arg(long, value_enum, default_value_t = SearchFormat::Table)]
        format: SearchFormat,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Compare both rankers with relevance judgments.
    Evaluate {
        #[arg(long)]
        corpus: PathBuf,
        /// judge_id,query,article_id,level rows; the bundled study when omitted.
        #[arg(long)]
        judgments: Option<PathBuf>,
        /// article_id,citation rows.
        #[arg(long)]
        citations: Option<PathBuf>,
        /// Queries to evaluate; every judged query when omitted.
        #[arg(long = "query")]
        queries: Vec<String>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Serve the JSON API and, optionally, a static UI bundle.
    Serve {
        #[arg(long)]
        index: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        #[arg(long)]
        static_dir: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Show configuration.
    Config {
        /// Print the default config as TOML.
        #[arg(long, required = true)]
        print_default: bool,
    },
    /// Write the 30-article planted corpus with its judgments.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn engine(args: &ConfigArgs, sequential: bool) -> Result<Engine, Failure> {
    let e = load_engine(args.config.as_deref(), args.taxonomy_dir.clone())?;
    Ok(if sequential {
        e.with_execution(Execution::Sequential)
    } else {
        e
    })
}

fn require_dir(dir: &Path, what: &str) -> Result<(), Failure> {
    if dir.is_dir() {
        Ok(())
    } else {
        Err(Failure::usage(anyhow!("{what} directory not found: {}", dir.display())))
    }
}

fn read_index(path: &Path, engine: &Engine) -> Result<Index, Failure> {
    if !path.is_file() {
        return Err(Failure::usage(anyhow!("index file not found: {}", path.display())));
    }
    let index = load_index(path).map_err(Failure::runtime)?;
    engine.check(&index).map_err(mismatch)?;
    Ok(index)
}

fn mismatch(e: IndexError) -> Failure {
    match e {
        IndexError::ConfigMismatch { .. } => {
            Failure::usage(anyhow!("{e}; rebuild the index with the current configuration"))
        }
        other => Failure::runtime(other),
    }
}

fn load_corpus(engine: &Engine, dir: &Path) -> Result<(Corpus, usize), Failure> {
    require_dir(dir, "corpus")?;
    let (corpus, report) = engine.load_corpus(dir).map_err(Failure::runtime)?;
    let failures: Vec<_> = report.failures().collect();
    for f in &failures {
        eprintln!("skipped {}: {}", f.path, f.error.as_deref().unwrap_or("unknown error"));
    }
    eprintln!(
        "loaded {} documents, {} failed",
        corpus.documents().len(),
        failures.len()
    );
    Ok((corpus, failures.len()))
}

/// Build time for the index header: SOURCE_DATE_EPOCH when set, so that
/// rebuilding the same corpus gives identical bytes.
fn built_at() -> Result<u64, Failure> {
    match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::usage(anyhow!("SOURCE_DATE_EPOCH must be an integer, got {v:?}"))),
        Err(_) => Ok(std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)),
    }
}

fn print_table(r: &SearchResponse, explain: bool) -> String {
    let mut out = String::new();
    if r.results.is_empty() {
        out.push_str(&format!("no results for {:?}\n", r.query));
        return out;
    }
    out.push_str(&format!(
        "{:>4}  {:<18} {:>8}  {:<16} {}\n",
        "#", "level", "score", "doc", "title"
    ));
    for (i, hit) in r.results.iter().enumerate() {
        out.push_str(&format!(
            "{:>4}  {:<18} {:>8.1}  {:<16} {}\n",
            r.offset + i + 1,
            hit.level_label,
            hit.score,
            hit.doc_id,
            hit.title
        ));
        if let Some(b) = hit.breakdown.as_ref().filter(|_| explain) {
            let zones: Vec<String> = b.per_zone.iter().map(|(z, v)| format!("{z:?} {v}")).collect();
            let kinds: Vec<String> = b.per_match_type.iter().map(|(m, v)| format!("{m:?} {v}")).collect();
            out.push_str(&format!(
                "        zone {} = {}; ontology {} = {}; {} occurrences, {} boosted; total {}\n",
                b.zone_component,
                zones.join(" + "),
                b.ontology_component,
                kinds.join(" + "),
                b.occurrence_count,
                b.context_boost_applied_to,
                b.total
            ));
        }
    }
    out.push_str(&format!("{} of {} hits shown\n", r.results.len(), r.total_hits));
    out
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map_err(Failure::runtime)
}

fn run(cli: Cli) -> Result<String, Failure> {
    let seq = cli.sequential;
    match cli.command {
        Command::Index { corpus, out, config } => {
            let engine = engine(&config, seq)?;
            let (docs, _) = load_corpus(&engine, &corpus)?;
            let index = engine.build_index(&docs, Some(built_at()?)).map_err(Failure::runtime)?;
            save_index(&index, &out).map_err(Failure::runtime)?;
            Ok(format!(
                "indexed {} documents ({} tokens) into {}\n",
                index.stats.document_count,
                index.stats.token_count,
                out.display()
            ))
        }
        Command::Search {
            index,
            query,
            level,
            limit,
            offset,
            explain,
            format,
            config,
        } => {
            let engine = engine(&config, seq)?;
            let index = read_index(&index, &engine)?;
            let params = SearchParams {
                q: Some(query),
                level,
                offset: Some(offset),
                limit: Some(limit),
                explain,
            };
            let r = response::search(&engine, &index, &params).map_err(|e| match e {
                response::RequestError::Index(e) => mismatch(e),
                other => Failure::usage(anyhow!("{other}")),
            })?;
            match format {
                SearchFormat::Json => to_json(&r).map(|s| s + "\n"),
                SearchFormat::Table => Ok(print_table(&r, explain)),
            }
        }
        Command::Evaluate {
            corpus,
            judgments,
            citations,
            queries,
            format,
            config,
        } => {
            let engine = engine(&config, seq)?;
            for p in judgments.iter().chain(&citations) {
                if !p.is_file() {
                    return Err(Failure::usage(anyhow!("file not found: {}", p.display())));
                }
            }
            let js = match &judgments {
                Some(j) => JudgmentSet::load_files(j, citations.as_deref()).map_err(Failure::usage)?,
                None => JudgmentSet::study(),
            };
            let (docs, failed) = load_corpus(&engine, &corpus)?;
            let report = evaluate(&engine, &docs, &js, &queries, failed).map_err(Failure::runtime)?;
            match format {
                ReportFormat::Json => to_json(&report).map(|s| s + "\n"),
                ReportFormat::Text => Ok(report.to_text()),
            }
        }
        Command::Serve {
            index,
            addr,
            static_dir,
            config,
        } => {
            let engine = engine(&config, seq)?;
            let index = read_index(&index, &engine)?;
            if let Some(d) = &static_dir {
                require_dir(d, "static")?;
            }
            serve(AppState { engine, index }, addr, static_dir)?;
            Ok(String::new())
        }
        Command::Config { print_default: _ } => Ok(EngineConfig::default().to_toml_string()),
        Command::Synth { out, seed } => {
            let p = planted_corpus(seed);
            p.write_to(&out).map_err(Failure::runtime)?;
            Ok(format!(
                "wrote {} articles and judgments to {}\n",
                p.articles.len(),
                out.display()
            ))
        }
    }
}

fn serve(state: AppState, addr: SocketAddr, static_dir: Option<PathBuf>) -> Result<(), Failure> {
    let rt = tokio::runtime::Runtime::new().map_err(Failure::runtime)?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("cannot listen on {addr}"))
            .map_err(Failure::runtime)?;
        eprintln!(
            "serving {} documents on http://{}",
            state.index.len(),
            listener.local_addr().map_err(Failure::runtime)?
        );
        let app = api::router(Arc::new(state), static_dir);
        axum::serve(listener, app)
            .with_graceful_shutdown(api::shutdown_signal())
            .await
            .map_err(Failure::runtime)?;
        eprintln!("shut down");
        Ok(())
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::USAGE as u8
            } else {
                exit::OK as u8
            });
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}
