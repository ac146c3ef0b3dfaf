//! The `eap` command line.
//!
//! Exit codes: 0 on success, 1 for runtime and I/O failures, 2 for bad
//! configuration, resources or input data.

mod config;
pub mod state;

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::{Arc, Mutex};

use clap::{Parser, Subcommand};
use eap_core::aggregate::{date_of_hour, AggregateConfig, AggregateStore, Recorder};
use eap_core::analyzer::classify;
use eap_core::evalkit::{
    precision_report, sample_for_annotation, EvalError, GoldRecord, Prediction, DEFAULT_PER_CLASS,
};
use eap_core::ingest::{replay, ReplayPlan, DEFAULT_BATCH_SIZE};
use eap_core::lexicon::LoadError;
use eap_core::model::ClassifiedTweet;
use serde::de::DeserializeOwned;
use thiserror::Error;

use crate::api::{self, AppState, DEFAULT_MAX_BODY};
pub use config::{parse_utc_offset, BasisArg, FileConfig, GlobalOpts, Settings};

pub const DEFAULT_ADDR: &str = "127.0.0.1:8080";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    ConfigRead { path: PathBuf, source: io::Error },
    #[error("{}: {detail}", path.display())]
    Config { path: PathBuf, detail: String },
    #[error("{flag}: {detail}")]
    InvalidFlag { flag: &'static str, detail: String },
    #[error("{}: {source}", path.display())]
    ResourceRead { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Resource { path: PathBuf, source: LoadError },
    #[error("{}: unusable state snapshot: {detail}", path.display())]
    State { path: PathBuf, detail: String },
    #[error("{}: line {line}: {detail}", path.display())]
    Input {
        path: PathBuf,
        line: usize,
        detail: String,
    },
    #[error("{0}")]
    Eval(#[from] EvalError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Stdio(#[from] io::Error),
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Stdio(_) | CliError::Bind { .. } => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "eap",
    version,
    about = "Emotion analysis for microblog streams"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Label each argument, or each stdin line when no argument is given.
    Classify { texts: Vec<String> },
    /// Ingest a JSONL corpus into the aggregate state.
    Replay {
        /// JSONL tweet records; `-` reads stdin.
        #[arg(long)]
        input: PathBuf,
        /// Records per second; unthrottled when absent.
        #[arg(long)]
        rate: Option<f64>,
        /// Snapshot to restore before and write after the replay.
        #[arg(long)]
        state: Option<PathBuf>,
        /// Also write one `{id, label, day}` line per classified tweet.
        #[arg(long)]
        predictions: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BATCH_SIZE)]
        batch_size: usize,
    },
    /// Serve the HTTP API until interrupted.
    Serve {
        /// Listen address [default: 127.0.0.1:8080].
        #[arg(long)]
        addr: Option<String>,
        #[arg(long)]
        state: Option<PathBuf>,
        /// Largest accepted ingest body in bytes.
        #[arg(long, default_value_t = DEFAULT_MAX_BODY)]
        max_body: usize,
    },
    /// Precision of predictions against gold labels.
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
    },
    /// Stratified random sample of predictions for annotation.
    Sample {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PER_CLASS)]
        per_class: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("eap: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let settings = Settings::resolve(&cli.global)?;
    match cli.command {
        Command::Classify { texts } => cmd_classify(&settings, texts),
        Command::Replay {
            input,
            rate,
            state,
            predictions,
            batch_size,
        } => {
            let state = state.or_else(|| settings.state.clone());
            cmd_replay(
                &settings,
                &input,
                rate,
                state.as_deref(),
                predictions.as_deref(),
                batch_size,
            )
        }
        Command::Serve {
            addr,
            state,
            max_body,
        } => {
            let addr = addr
                .or_else(|| settings.addr.clone())
                .unwrap_or_else(|| DEFAULT_ADDR.to_string());
            let state = state.or_else(|| settings.state.clone());
            cmd_serve(&settings, &addr, state.as_deref(), max_body)
        }
        Command::Eval { gold, pred } => cmd_eval(&gold, &pred),
        Command::Sample {
            pred,
            per_class,
            seed,
        } => cmd_sample(&pred, per_class, seed),
    }
}

fn cmd_classify(settings: &Settings, texts: Vec<String>) -> Result<(), CliError> {
    let resources = settings.resources()?;
    let mut out = BufWriter::new(io::stdout().lock());
    let mut emit = |text: &str| -> io::Result<()> {
        let (label, vector) = classify(text, &resources);
        writeln!(&mut out, "{label}\t{}", vector.to_colon_string())
    };
    if texts.is_empty() {
        for line in io::stdin().lock().lines() {
            let line = line?;
            emit(line.strip_suffix('\r').unwrap_or(&line))?;
        }
    } else {
        for text in &texts {
            emit(text)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Records into the store and optionally logs each prediction.
struct ReplaySink<'a> {
    store: &'a AggregateStore,
    config: AggregateConfig,
    predictions: Option<Mutex<BufWriter<File>>>,
    write_error: Mutex<Option<io::Error>>,
}

impl Recorder for ReplaySink<'_> {
    fn record(&self, tweet: &ClassifiedTweet) {
        self.store.record(tweet);
        let Some(out) = &self.predictions else {
            return;
        };
        let prediction = Prediction {
            id: tweet.tweet.id.clone(),
            label: tweet.label,
            day: date_of_hour(self.config.hour_of(tweet.tweet.created_at)).to_string(),
        };
        let mut out = out.lock().unwrap();
        let written = serde_json::to_writer(&mut *out, &prediction)
            .map_err(io::Error::from)
            .and_then(|()| out.write_all(b"\n"));
        if let Err(e) = written {
            self.write_error.lock().unwrap().get_or_insert(e);
        }
    }
}

fn cmd_replay(
    settings: &Settings,
    input: &Path,
    rate: Option<f64>,
    state_path: Option<&Path>,
    predictions: Option<&Path>,
    batch_size: usize,
) -> Result<(), CliError> {
    let plan = match rate {
        Some(r) => ReplayPlan::throttled(r).map_err(|e| CliError::InvalidFlag {
            flag: "--rate",
            detail: e.to_string(),
        })?,
        None => ReplayPlan::unthrottled().with_batch_size(batch_size),
    };
    let resources = settings.resources()?;
    let (store, dedup) = state::load(state_path, settings.aggregate, settings.dedup_capacity)?;
    let source: Box<dyn BufRead> = if input == Path::new("-") {
        Box::new(io::stdin().lock())
    } else {
        let file = File::open(input).map_err(|source| CliError::Io {
            path: input.to_path_buf(),
            source,
        })?;
        Box::new(BufReader::new(file))
    };
    let predictions_out = predictions
        .map(|path| {
            File::create(path)
                .map(|f| Mutex::new(BufWriter::new(f)))
                .map_err(|source| CliError::Io {
                    path: path.to_path_buf(),
                    source,
                })
        })
        .transpose()?;
    let sink = ReplaySink {
        store: &store,
        config: settings.aggregate,
        predictions: predictions_out,
        write_error: Mutex::new(None),
    };

    let outcome = replay(source, &plan, &resources, &dedup, &sink);
    let summary = match &outcome {
        Ok(summary) => summary,
        Err(e) => &e.summary,
    };
    println!(
        "{}",
        serde_json::to_string(summary).expect("summary serializes")
    );

    if let Some(path) = state_path {
        state::save(path, &store, &dedup)?;
    }
    if let Err(e) = outcome {
        return Err(CliError::Io {
            path: input.to_path_buf(),
            source: e.source,
        });
    }
    if let (Some(path), Some(out)) = (predictions, sink.predictions) {
        let io_err = |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        };
        if let Some(e) = sink.write_error.into_inner().unwrap() {
            return Err(io_err(e));
        }
        out.into_inner().unwrap().flush().map_err(io_err)?;
    }
    Ok(())
}

/// Resolves on Ctrl-C or SIGTERM. The SIGTERM handler is installed
/// before this returns, so no signal is lost once the caller proceeds.
fn shutdown_signal() -> io::Result<impl std::future::Future<Output = ()>> {
    #[cfg(unix)]
    let mut term = tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate())?;
    Ok(async move {
        #[cfg(unix)]
        let term = term.recv();
        #[cfg(not(unix))]
        let term = std::future::pending::<()>();
        tokio::select! {
            _ = tokio::signal::ctrl_c() => {}
            _ = term => {}
        }
    })
}

fn cmd_serve(
    settings: &Settings,
    addr: &str,
    state_path: Option<&Path>,
    max_body: usize,
) -> Result<(), CliError> {
    let resources = settings.resources()?;
    let (store, dedup) = state::load(state_path, settings.aggregate, settings.dedup_capacity)?;
    let app = AppState {
        store: Arc::new(store),
        dedup: Arc::new(dedup),
        resources: Arc::new(resources),
    };
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|source| CliError::Bind {
                addr: addr.to_string(),
                source,
            })?;
        let shutdown = shutdown_signal()?;
        eprintln!("eap: listening on {}", listener.local_addr()?);
        axum::serve(listener, api::router(app.clone(), max_body))
            .with_graceful_shutdown(shutdown)
            .await?;
        Ok::<_, CliError>(())
    })?;
    if let Some(path) = state_path {
        state::save(path, &app.store, &app.dedup)?;
        eprintln!("eap: state written to {}", path.display());
    }
    Ok(())
}

/// Parses a JSONL file, skipping blank lines.
fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let file = File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let input_err = |detail: String| CliError::Input {
            path: path.to_path_buf(),
            line: idx + 1,
            detail,
        };
        let line = line.map_err(|e| input_err(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| input_err(e.to_string()))?);
    }
    Ok(out)
}

fn cmd_eval(gold: &Path, pred: &Path) -> Result<(), CliError> {
    let gold: Vec<GoldRecord> = read_jsonl(gold)?;
    let predictions: Vec<Prediction> = read_jsonl(pred)?;
    let report = precision_report(&gold, &predictions)?;
    println!(
        "{}",
        serde_json::to_string(&report).expect("report serializes")
    );
    Ok(())
}

fn cmd_sample(pred: &Path, per_class: usize, seed: u64) -> Result<(), CliError> {
    if per_class == 0 {
        return Err(CliError::InvalidFlag {
            flag: "--per-class",
            detail: "must be positive".into(),
        });
    }
    let predictions: Vec<Prediction> = read_jsonl(pred)?;
    let mut out = BufWriter::new(io::stdout().lock());
    for p in sample_for_annotation(predictions, per_class, seed) {
        serde_json::to_writer(&mut out, &p).map_err(io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
