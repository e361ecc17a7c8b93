use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use wdcprod_core::domains::{AbsentRank, Comparator};
use wdcprod_core::stats::ReportFormat;
use wdcprod_core::validity::NullMatch;

use crate::config::{IdentifierKind, PipelineConfig, TrustConfig};
use crate::error::CliError;

/// Parses a kebab-case enum value through its serde names.
fn kebab<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "wdcprod", version, about = "Profile, validate and clean product schema.org N-Quads")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full single-pass profile of a chunk set.
    Profile(RunArgs),
    /// Property verdicts and node validity.
    Validate {
        #[command(flatten)]
        run: RunArgs,
        /// Write one JSON line per checked property value.
        #[arg(long)]
        verdicts: Option<PathBuf>,
    },
    /// Language tags, numeric literals and identifier agreement.
    Languages(RunArgs),
    /// Per-subject window distribution.
    Windows(RunArgs),
    /// Pay-level domains with their ranks.
    Domains {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        ranks: RankArgs,
        #[command(flatten)]
        trust: TrustArgs,
        /// Domains listed in the report.
        #[arg(long)]
        top: Option<usize>,
    },
    /// Canonicalize concepts and drop invalid values, nodes, mislabelled
    /// literals and untrusted domains.
    Clean {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        ranks: RankArgs,
        #[command(flatten)]
        trust: TrustArgs,
        /// Cleaned N-Quads (gzip when the name ends in .gz).
        #[arg(long)]
        cleaned: Option<PathBuf>,
        /// Exclusion log, one JSON object per line.
        #[arg(long)]
        exclusions: Option<PathBuf>,
        #[arg(long)]
        no_property_filter: bool,
        #[arg(long)]
        no_node_filter: bool,
        /// Drop tagged literals the identifier disagrees with.
        #[arg(long)]
        language_filter: bool,
    },
    /// Classify vocabulary hosts and optionally rewrite them.
    Normalize {
        #[command(flatten)]
        run: RunArgs,
        /// Audit CSV of variant hosts and their canonical host.
        #[arg(long)]
        map: Option<PathBuf>,
        /// Canonicalized N-Quads; no other filter is applied.
        #[arg(long)]
        cleaned: Option<PathBuf>,
    },
    /// Write a synthetic corpus and its ground-truth sidecar.
    Generate(GenerateArgs),
    /// Download a fresh public suffix list.
    RefreshPsl {
        #[arg(long, default_value = "https://publicsuffix.org/list/public_suffix_list.dat")]
        url: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the merged configuration as TOML.
    Config(RunArgs),
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// Chunk files, directories or glob patterns.
    pub inputs: Vec<String>,
    /// TOML configuration; flags override it.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Chunk workers (0 = all cores).
    #[arg(short = 'j', long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub window: Option<u64>,
    #[arg(long)]
    pub holdback: Option<u64>,
    #[arg(long)]
    pub horizon: Option<u64>,
    #[arg(long)]
    pub window_offset: Option<u64>,
    /// Maximum normalized edit distance for vocabulary misspellings.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// exact or substring.
    #[arg(long, value_parser = kebab::<NullMatch>)]
    pub null_match: Option<NullMatch>,
    #[arg(long)]
    pub sample_rate: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// none, trigram, fasttext, command or table.
    #[arg(long, value_parser = kebab::<IdentifierKind>)]
    pub identifier: Option<IdentifierKind>,
    /// Identifier model or table file.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Identifier program.
    #[arg(long)]
    pub program: Option<PathBuf>,
    /// Public suffix list file instead of the bundled snapshot.
    #[arg(long)]
    pub psl: Option<PathBuf>,
    /// Report path; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// json or tsv.
    #[arg(long, value_parser = kebab::<ReportFormat>)]
    pub format: Option<ReportFormat>,
    /// Record the generation time in the report.
    #[arg(long)]
    pub stamp: bool,
}

#[derive(Debug, Args, Default)]
pub struct RankArgs {
    /// `pld,rank` CSV snapshot; disables network lookups.
    #[arg(long)]
    pub offline: Option<PathBuf>,
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long)]
    pub cache_ttl_days: Option<u64>,
    #[arg(long)]
    pub endpoint: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct TrustArgs {
    /// lower-is-trusted or higher-is-trusted.
    #[arg(long, value_parser = kebab::<Comparator>)]
    pub trust_comparator: Option<Comparator>,
    #[arg(long)]
    pub trust_threshold: Option<f64>,
    /// keep, drop or quarantine domains without a rank.
    #[arg(long, value_parser = kebab::<AbsentRank>)]
    pub absent: Option<AbsentRank>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Output directory for chunks and `truth.json`.
    #[arg(long)]
    pub out: PathBuf,
    /// Synthetic spec (TOML or JSON).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub chunks: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub valid_rate: Option<f64>,
    #[arg(long)]
    pub tag_correctness: Option<f64>,
    #[arg(long)]
    pub max_spread: Option<u64>,
    #[arg(long)]
    pub tail_rate: Option<f64>,
    #[arg(long)]
    pub gzip: bool,
}

impl RunArgs {
    /// Loads the config file, if any, and lays the flags over it.
    pub fn resolve(&self) -> Result<PipelineConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        if !self.inputs.is_empty() {
            c.inputs = self.inputs.clone();
        }
        let a = &mut c.analysis;
        macro_rules! set {
            ($($target:expr => $flag:expr),* $(,)?) => {
                $(if let Some(v) = $flag.clone() { $target = v; })*
            };
        }
        set!(
            c.workers => self.workers,
            a.window => self.window,
            a.holdback => self.holdback,
            a.window_offset => self.window_offset,
            a.misspelling_threshold => self.threshold,
            a.null_match => self.null_match,
            a.sample_rate => self.sample_rate,
            a.seed => self.seed,
            c.identifier.kind => self.identifier,
        );
        if self.horizon.is_some() {
            a.horizon = self.horizon;
        }
        if self.model.is_some() {
            c.identifier.model = self.model.clone();
        }
        if self.program.is_some() {
            c.identifier.program = self.program.clone();
        }
        if self.psl.is_some() {
            c.domains.psl = self.psl.clone();
        }
        if self.output.is_some() {
            c.output.report = self.output.clone();
        }
        if self.format.is_some() {
            c.output.format = self.format;
        }
        c.output.stamp |= self.stamp;
        Ok(c)
    }
}

impl RankArgs {
    pub fn apply(&self, c: &mut PipelineConfig) {
        if self.offline.is_some() {
            c.domains.offline = self.offline.clone();
        }
        if self.cache.is_some() {
            c.domains.cache = self.cache.clone();
        }
        if self.cache_ttl_days.is_some() {
            c.domains.cache_ttl_days = self.cache_ttl_days;
        }
        if let Some(e) = &self.endpoint {
            c.domains.endpoint = e.clone();
        }
    }
}

impl TrustArgs {
    pub fn apply(&self, c: &mut PipelineConfig) -> Result<(), CliError> {
        match (&mut c.trust, self.trust_comparator, self.trust_threshold) {
            (Some(t), comparator, threshold) => {
                if let Some(x) = comparator {
                    t.comparator = x;
                }
                if let Some(x) = threshold {
                    t.threshold = x;
                }
            }
            (None, Some(comparator), Some(threshold)) => {
                c.trust = Some(TrustConfig { comparator, threshold, absent: AbsentRank::default() });
            }
            (None, None, None) => {
                if self.absent.is_some() {
                    return Err(CliError::Usage("--absent needs a trust policy".into()));
                }
            }
            (None, _, _) => {
                return Err(CliError::Usage("a trust policy needs both --trust-comparator and --trust-threshold".into()));
            }
        }
        if let (Some(t), Some(absent)) = (&mut c.trust, self.absent) {
            t.absent = absent;
        }
        Ok(())
    }
}
