use std::fs;
use std::path::{Path, PathBuf};

use chrono::FixedOffset;
use clap::{Args, ValueEnum};
use eap_core::aggregate::{
    AggregateConfig, ScoreBasis, DEFAULT_ALARM_THRESHOLD, DEFAULT_UTC_OFFSET_SECS,
};
use eap_core::analyzer::{AnalyzerResources, RuleConfig};
use eap_core::ingest::DEFAULT_DEDUP_CAPACITY;
use eap_core::lexicon::{
    load_emoticons, load_lexicon, load_negators, LoadError, DEMO_EMOTICONS, DEMO_LEXICON,
    DEMO_NEGATORS,
};
use serde::Deserialize;

use super::CliError;

/// Flags shared by every subcommand. Anything left unset falls back to the
/// `--config` file, then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalOpts {
    /// TOML file providing defaults for the flags below.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Lexicon TSV (`term<TAB>emotion[<TAB>weight]`); defaults to the bundled demo.
    #[arg(long, global = true, value_name = "PATH")]
    pub lexicon: Option<PathBuf>,
    /// Emoticon TSV, same layout as the lexicon.
    #[arg(long, global = true, value_name = "PATH")]
    pub emoticons: Option<PathBuf>,
    /// Negator list, one term per line.
    #[arg(long, global = true, value_name = "PATH")]
    pub negators: Option<PathBuf>,
    /// Segments allowed between a negator and the term it cancels.
    #[arg(long, global = true, value_name = "N")]
    pub negation_window: Option<usize>,
    /// Daily scores strictly below this raise an alarm.
    #[arg(long, global = true, value_name = "SCORE")]
    pub alarm_threshold: Option<f64>,
    /// Denominator of the daily happiness score.
    #[arg(long, global = true, value_enum)]
    pub score_basis: Option<BasisArg>,
    /// Offset defining local hours and days, e.g. `+08:00`.
    #[arg(long, global = true, value_name = "±HH:MM")]
    pub utc_offset: Option<String>,
    /// Most recent tweet ids remembered for de-duplication.
    #[arg(long, global = true, value_name = "N")]
    pub dedup_capacity: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisArg {
    /// happy / (happy + sad + angry + surprise + fear)
    Emotional,
    /// happy / all tweets, neutral included
    All,
}

impl From<BasisArg> for ScoreBasis {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Emotional => ScoreBasis::Emotional,
            BasisArg::All => ScoreBasis::AllTweets,
        }
    }
}

/// Keys accepted in the config file. Relative paths resolve against the
/// file's directory.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub lexicon: Option<PathBuf>,
    pub emoticons: Option<PathBuf>,
    pub negators: Option<PathBuf>,
    pub negation_window: Option<usize>,
    pub alarm_threshold: Option<f64>,
    pub score_basis: Option<BasisArg>,
    pub utc_offset: Option<String>,
    pub dedup_capacity: Option<usize>,
    pub state: Option<PathBuf>,
    pub addr: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: FileConfig = toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.lexicon,
            &mut cfg.emoticons,
            &mut cfg.negators,
            &mut cfg.state,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

/// Fully resolved settings.
#[derive(Debug)]
pub struct Settings {
    pub lexicon: Option<PathBuf>,
    pub emoticons: Option<PathBuf>,
    pub negators: Option<PathBuf>,
    pub rules: RuleConfig,
    pub aggregate: AggregateConfig,
    pub dedup_capacity: usize,
    pub state: Option<PathBuf>,
    pub addr: Option<String>,
}

fn invalid(flag: &'static str, detail: impl ToString) -> CliError {
    CliError::InvalidFlag {
        flag,
        detail: detail.to_string(),
    }
}

pub fn parse_utc_offset(s: &str) -> Result<i32, CliError> {
    let offset: FixedOffset = s
        .parse()
        .map_err(|_| invalid("--utc-offset", format!("expected ±HH:MM, got {s:?}")))?;
    Ok(offset.local_minus_utc())
}

impl Settings {
    pub fn resolve(opts: &GlobalOpts) -> Result<Self, CliError> {
        let file = match &opts.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let window = opts.negation_window.or(file.negation_window);
        let rules = match window {
            Some(w) => RuleConfig::default()
                .with_negation_window(w)
                .map_err(|e| invalid("--negation-window", e))?,
            None => RuleConfig::default(),
        };
        let alarm_threshold = opts
            .alarm_threshold
            .or(file.alarm_threshold)
            .unwrap_or(DEFAULT_ALARM_THRESHOLD);
        if !alarm_threshold.is_finite() {
            return Err(invalid("--alarm-threshold", "must be a finite number"));
        }
        let utc_offset_secs = match opts.utc_offset.as_ref().or(file.utc_offset.as_ref()) {
            Some(s) => parse_utc_offset(s)?,
            None => DEFAULT_UTC_OFFSET_SECS,
        };
        let dedup_capacity = opts
            .dedup_capacity
            .or(file.dedup_capacity)
            .unwrap_or(DEFAULT_DEDUP_CAPACITY);
        if dedup_capacity == 0 {
            return Err(invalid("--dedup-capacity", "must be positive"));
        }
        Ok(Settings {
            lexicon: opts.lexicon.clone().or(file.lexicon),
            emoticons: opts.emoticons.clone().or(file.emoticons),
            negators: opts.negators.clone().or(file.negators),
            rules,
            aggregate: AggregateConfig {
                utc_offset_secs,
                alarm_threshold,
                score_basis: opts
                    .score_basis
                    .or(file.score_basis)
                    .map(ScoreBasis::from)
                    .unwrap_or_default(),
            },
            dedup_capacity,
            state: file.state,
            addr: file.addr,
        })
    }

    /// Loads and compiles the analyzer resources, bundled demo files
    /// standing in for any path not given.
    pub fn resources(&self) -> Result<AnalyzerResources, CliError> {
        let lexicon = read_resource(self.lexicon.as_deref(), DEMO_LEXICON, |b| load_lexicon(b))?;
        let emoticons = read_resource(self.emoticons.as_deref(), DEMO_EMOTICONS, |b| {
            load_emoticons(b)
        })?;
        let negators = read_resource(self.negators.as_deref(), DEMO_NEGATORS, |b| {
            load_negators(b)
        })?;
        Ok(AnalyzerResources::new(
            &lexicon,
            &emoticons,
            &negators,
            self.rules.clone(),
        ))
    }
}

fn read_resource<T>(
    path: Option<&Path>,
    bundled: &str,
    load: impl Fn(&[u8]) -> Result<T, LoadError>,
) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(load(bundled.as_bytes()).expect("bundled resources parse"));
    };
    let bytes = fs::read(path).map_err(|source| CliError::ResourceRead {
        path: path.to_path_buf(),
        source,
    })?;
    load(&bytes).map_err(|source| CliError::Resource {
        path: path.to_path_buf(),
        source,
    })
}
