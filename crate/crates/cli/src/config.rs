//! Pipeline configuration: a TOML file merged with command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use wdcprod_core::domains::{AbsentRank, Comparator, TrustPolicy};
use wdcprod_core::language::DEFAULT_MIN_LENGTH;
use wdcprod_core::locality::DEFAULT_WINDOW;
use wdcprod_core::stats::ReportFormat;
use wdcprod_core::validity::NullMatch;
use wdcprod_core::vocab::DEFAULT_MISSPELLING_THRESHOLD;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Assembly window in quads.
    pub window: u64,
    /// Quads a closed node waits for late fragments before it is emitted.
    pub holdback: u64,
    /// Added to reported windows (1 counts the first quad).
    pub window_offset: u64,
    pub percentiles: Vec<f64>,
    /// Forget subjects unseen for this many quads when measuring windows.
    pub horizon: Option<u64>,
    pub misspelling_threshold: f64,
    pub null_match: NullMatch,
    pub sample_rate: f64,
    pub seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            window: DEFAULT_WINDOW,
            holdback: 0,
            window_offset: 0,
            percentiles: vec![50.0, 90.0, 99.0],
            horizon: None,
            misspelling_threshold: DEFAULT_MISSPELLING_THRESHOLD,
            null_match: NullMatch::Exact,
            sample_rate: 0.01,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentifierKind {
    #[default]
    None,
    /// Built-in character trigram profiles.
    Trigram,
    /// `fasttext predict-prob` with a lid.176 style model.
    Fasttext,
    /// Any program reading one text per line and printing `label prob`.
    Command,
    /// A JSON map from text to language code, or a generator sidecar.
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentifierConfig {
    pub kind: IdentifierKind,
    pub model: Option<PathBuf>,
    pub program: Option<PathBuf>,
    pub args: Vec<String>,
    pub min_length: usize,
}

impl Default for IdentifierConfig {
    fn default() -> Self {
        IdentifierConfig { kind: IdentifierKind::None, model: None, program: None, args: Vec::new(), min_length: DEFAULT_MIN_LENGTH }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainsConfig {
    /// Alternative public suffix list (see `refresh-psl`).
    pub psl: Option<PathBuf>,
    /// `pld,rank` snapshot. When set, the network is never used.
    pub offline: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub cache_ttl_days: Option<u64>,
    pub endpoint: String,
    pub batch_size: usize,
    pub max_in_flight: usize,
    /// Domains listed in the domains report.
    pub top: usize,
}

impl Default for DomainsConfig {
    fn default() -> Self {
        DomainsConfig {
            psl: None,
            offline: None,
            cache: None,
            cache_ttl_days: None,
            endpoint: wdcprod_core::domains::DEFAULT_ENDPOINT.into(),
            batch_size: 100,
            max_in_flight: 4,
            top: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrustConfig {
    pub comparator: Comparator,
    pub threshold: f64,
    #[serde(default)]
    pub absent: AbsentRank,
}

impl TrustConfig {
    pub fn policy(&self) -> TrustPolicy {
        TrustPolicy { comparator: self.comparator, threshold: self.threshold, absent: self.absent }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CleanConfig {
    pub property_filter: bool,
    pub node_filter: bool,
    pub language_filter: bool,
}

impl Default for CleanConfig {
    fn default() -> Self {
        CleanConfig { property_filter: true, node_filter: true, language_filter: false }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub report: Option<PathBuf>,
    pub format: Option<ReportFormat>,
    pub cleaned: Option<PathBuf>,
    pub exclusions: Option<PathBuf>,
    pub verdicts: Option<PathBuf>,
    pub canonical_map: Option<PathBuf>,
    /// Add a generation timestamp to reports.
    pub stamp: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Files, directories or glob patterns.
    pub inputs: Vec<String>,
    /// Chunk workers; 0 uses every core.
    pub workers: usize,
    pub analysis: AnalysisConfig,
    pub identifier: IdentifierConfig,
    pub domains: DomainsConfig,
    pub trust: Option<TrustConfig>,
    pub clean: CleanConfig,
    pub output: OutputConfig,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<PipelineConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let a = &self.analysis;
        let bad = |m: String| Err(CliError::Usage(m));
        if !(a.sample_rate > 0.0 && a.sample_rate <= 1.0) {
            return bad(format!("sample_rate must lie in (0, 1], got {}", a.sample_rate));
        }
        if !(a.misspelling_threshold > 0.0 && a.misspelling_threshold <= 1.0) {
            return bad(format!("misspelling_threshold must lie in (0, 1], got {}", a.misspelling_threshold));
        }
        if let Some(p) = a.percentiles.iter().find(|p| !(**p > 0.0 && **p <= 100.0)) {
            return bad(format!("percentiles must lie in (0, 100], got {p}"));
        }
        if self.domains.batch_size == 0 || self.domains.batch_size > 100 {
            return bad(format!("batch_size must lie in 1..=100, got {}", self.domains.batch_size));
        }
        if self.domains.max_in_flight == 0 {
            return bad("max_in_flight must be at least 1".into());
        }
        if let Some(t) = &self.trust {
            if !t.threshold.is_finite() {
                return bad("trust threshold must be finite".into());
            }
        }
        Ok(())
    }

    pub fn workers(&self) -> usize {
        if self.workers == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            self.workers
        }
    }

    pub fn format(&self) -> ReportFormat {
        self.output.format.unwrap_or(ReportFormat::Json)
    }

    /// The settings that shape results. Worker count, output paths and the
    /// rank cache location are left out, so they never change a report.
    pub fn effective(&self) -> Value {
        json!({
            "analysis": self.analysis,
            "identifier": self.identifier,
            "domains": {
                "psl": self.domains.psl,
                "offline": self.domains.offline,
                "endpoint": self.domains.endpoint,
                "top": self.domains.top,
            },
            "trust": self.trust,
            "clean": self.clean,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_toml() {
        let mut c = PipelineConfig::default();
        c.inputs = vec!["data/*.nq.gz".into()];
        c.workers = 8;
        c.analysis.holdback = 3;
        c.analysis.horizon = Some(10_000);
        c.identifier.kind = IdentifierKind::Fasttext;
        c.identifier.model = Some("lid.176.bin".into());
        c.trust = Some(TrustConfig { comparator: Comparator::HigherIsTrusted, threshold: 4.5, absent: AbsentRank::Drop });
        c.output.format = Some(ReportFormat::Tsv);
        let text = c.to_toml();
        assert_eq!(toml::from_str::<PipelineConfig>(&text).unwrap(), c);
        assert_eq!(toml::from_str::<PipelineConfig>(&PipelineConfig::default().to_toml()).unwrap(), PipelineConfig::default());
    }

    #[test]
    fn partial_files_fill_defaults() {
        let c: PipelineConfig = toml::from_str("[analysis]\nwindow = 20\n").unwrap();
        assert_eq!(c.analysis.window, 20);
        assert_eq!(c.analysis.sample_rate, 0.01);
        assert!(toml::from_str::<PipelineConfig>("windw = 3").is_err());
    }

    #[test]
    fn effective_config_ignores_workers_and_outputs() {
        let mut a = PipelineConfig::default();
        let mut b = a.clone();
        b.workers = 8;
        b.output.report = Some("x.json".into());
        b.domains.cache = Some("cache.csv".into());
        assert_eq!(a.effective(), b.effective());
        a.analysis.seed = 1;
        assert_ne!(a.effective(), b.effective());
    }

    #[test]
    fn range_checks() {
        let mut c = PipelineConfig::default();
        c.analysis.sample_rate = 0.0;
        assert!(c.validate().is_err());
        c.analysis.sample_rate = 1.0;
        c.domains.batch_size = 101;
        assert!(c.validate().is_err());
    }
}
