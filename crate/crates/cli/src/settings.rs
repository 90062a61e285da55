//! Flags shared by all subcommands, and the key=value config file they can
//! be loaded from. Flags win over the file; the file wins over defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use chekhov_core::eval::OverlapMode;
use chekhov_core::explorer::{DEFAULT_DIRECTION_BIAS, DEFAULT_WALK_STEPS};
use chekhov_core::probe::TrivialityPatternSet;
use chekhov_core::text::Stopwords;
use clap::Args;

pub const DEFAULT_THRESHOLDS: [f64; 4] = [0.5, 0.65, 0.8, 0.95];

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Plain-text `key = value` config file; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory of story files (`*.world` files run on the mock engine).
    #[arg(long, global = true, value_name = "DIR")]
    pub games: Option<PathBuf>,
    /// Directory of walkthroughs named `<game_id>.txt`.
    #[arg(long, global = true, value_name = "DIR")]
    pub walkthroughs: Option<PathBuf>,
    /// Random-walk steps per game.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Games explored or probed concurrently.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Triviality pattern file, one case-insensitive substring per line.
    #[arg(long, global = true, value_name = "FILE")]
    pub patterns: Option<PathBuf>,
    /// Stopword file, one word per line; replaces the builtin list.
    #[arg(long, global = true, value_name = "FILE")]
    pub stopwords: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Comma-separated ascending thresholds.
    #[arg(long, global = true, value_name = "LIST")]
    pub thresholds: Option<String>,
    /// Action-target overlap mode: all | unique.
    #[arg(long, global = true)]
    pub mode: Option<String>,
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub games: Option<PathBuf>,
    pub walkthroughs: Option<PathBuf>,
    pub steps: usize,
    pub seed: u64,
    pub jobs: usize,
    pub patterns: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub out: PathBuf,
    pub thresholds: Vec<f64>,
    pub mode: OverlapMode,
    pub direction_bias: f64,
    pub max_moves: usize,
    pub timeout: Duration,
    pub alpha: f64,
    pub threshold: f64,
    pub ratios: [f64; 3],
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            games: None,
            walkthroughs: None,
            steps: DEFAULT_WALK_STEPS,
            seed: 0,
            jobs: 1,
            patterns: None,
            stopwords: None,
            out: PathBuf::from("out"),
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
            mode: OverlapMode::AllAts,
            direction_bias: DEFAULT_DIRECTION_BIAS,
            max_moves: 10_000,
            timeout: Duration::from_secs(10),
            alpha: chekhov_core::baseline::DEFAULT_ALPHA,
            threshold: 0.5,
            ratios: [0.8, 0.1, 0.1],
        }
    }
}

pub fn parse_config(contents: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (idx, raw) in contents.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key = value", idx + 1))?;
        map.insert(key.trim().replace('-', "_"), value.trim().to_string());
    }
    Ok(map)
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| anyhow!("invalid {key} {value:?}: {e}"))
}

pub fn parse_thresholds(list: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = list.split(',').map(|t| parse("threshold", t.trim())).collect::<Result<_>>()?;
    if values.is_empty() || values.iter().any(|t| !(0.0..=1.0).contains(t)) || values.windows(2).any(|w| w[0] > w[1]) {
        bail!("thresholds must be ascending values in [0, 1], got {list:?}");
    }
    Ok(values)
}

pub fn parse_mode(mode: &str) -> Result<OverlapMode> {
    match mode {
        "all" | "all_ats" => Ok(OverlapMode::AllAts),
        "unique" | "unique_ats" => Ok(OverlapMode::UniqueAts),
        other => bail!("mode must be all or unique, got {other:?}"),
    }
}

fn parse_ratios(list: &str) -> Result<[f64; 3]> {
    let values: Vec<f64> = list.split(',').map(|t| parse("ratio", t.trim())).collect::<Result<_>>()?;
    values.try_into().map_err(|_| anyhow!("ratios need three comma-separated values, got {list:?}"))
}

impl Settings {
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "games" => self.games = Some(value.into()),
            "walkthroughs" => self.walkthroughs = Some(value.into()),
            "steps" => self.steps = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "jobs" => self.jobs = parse(key, value)?,
            "patterns" => self.patterns = Some(value.into()),
            "stopwords" => self.stopwords = Some(value.into()),
            "out" => self.out = value.into(),
            "thresholds" => self.thresholds = parse_thresholds(value)?,
            "mode" => self.mode = parse_mode(value)?,
            "direction_bias" => self.direction_bias = parse(key, value)?,
            "max_moves" => self.max_moves = parse(key, value)?,
            "timeout_ms" => self.timeout = Duration::from_millis(parse(key, value)?),
            "alpha" => self.alpha = parse(key, value)?,
            "threshold" => self.threshold = parse(key, value)?,
            "ratios" => self.ratios = parse_ratios(value)?,
            other => bail!("unknown config key {other:?}"),
        }
        Ok(())
    }

    pub fn resolve(args: &GlobalArgs) -> Result<Self> {
        let mut settings = Settings::default();
        if let Some(path) = &args.config {
            let contents = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            for (key, value) in parse_config(&contents).with_context(|| format!("config {}", path.display()))? {
                settings.apply(&key, &value).with_context(|| format!("config {}", path.display()))?;
            }
        }
        let flags: [(&str, Option<String>); 10] = [
            ("games", args.games.as_ref().map(|p| p.display().to_string())),
            ("walkthroughs", args.walkthroughs.as_ref().map(|p| p.display().to_string())),
            ("steps", args.steps.map(|v| v.to_string())),
            ("seed", args.seed.map(|v| v.to_string())),
            ("jobs", args.jobs.map(|v| v.to_string())),
            ("patterns", args.patterns.as_ref().map(|p| p.display().to_string())),
            ("stopwords", args.stopwords.as_ref().map(|p| p.display().to_string())),
            ("out", args.out.as_ref().map(|p| p.display().to_string())),
            ("thresholds", args.thresholds.clone()),
            ("mode", args.mode.clone()),
        ];
        for (key, value) in flags {
            if let Some(value) = value {
                settings.apply(key, &value)?;
            }
        }
        if settings.jobs == 0 {
            bail!("jobs must be at least 1");
        }
        Ok(settings)
    }

    pub fn stopword_list(&self) -> Result<Stopwords> {
        match &self.stopwords {
            Some(path) => Stopwords::from_file(path).with_context(|| format!("reading stopwords {}", path.display())),
            None => Ok(Stopwords::builtin()),
        }
    }

    pub fn pattern_set(&self) -> Result<TrivialityPatternSet> {
        match &self.patterns {
            Some(path) => TrivialityPatternSet::from_file(path).with_context(|| format!("reading patterns {}", path.display())),
            None => Ok(TrivialityPatternSet::builtin()),
        }
    }

    pub fn out_file(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}
