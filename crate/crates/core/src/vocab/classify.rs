use std::collections::HashMap;
use std::io;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use super::distance::normalized_levenshtein;
use super::host::{split_host, HostParts};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cluster {
    SchemaOrg,
    DataVocabulary,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variation {
    Base,
    SubdomainVariant,
    SldMisspelling,
    TldMisspelling,
    NotApplicable,
}

impl Cluster {
    pub fn as_str(self) -> &'static str {
        match self {
            Cluster::SchemaOrg => "schema-org",
            Cluster::DataVocabulary => "data-vocabulary",
            Cluster::Other => "other",
        }
    }
}

impl Variation {
    pub fn as_str(self) -> &'static str {
        match self {
            Variation::Base => "base",
            Variation::SubdomainVariant => "subdomain-variant",
            Variation::SldMisspelling => "sld-misspelling",
            Variation::TldMisspelling => "tld-misspelling",
            Variation::NotApplicable => "not-applicable",
        }
    }
}

/// One recognised vocabulary: its base host and which host prefixes still
/// count as the base concept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRule {
    pub cluster: Cluster,
    pub second_level: String,
    pub top_level: String,
    pub base_prefixes: Vec<String>,
}

impl ClusterRule {
    pub fn base_host(&self) -> String {
        format!("{}.{}", self.second_level, self.top_level)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VocabConfig {
    /// Maximum normalized edit distance for a second-level misspelling.
    pub misspelling_threshold: f64,
    pub clusters: Vec<ClusterRule>,
}

pub const DEFAULT_MISSPELLING_THRESHOLD: f64 = 0.3;

impl Default for VocabConfig {
    fn default() -> Self {
        VocabConfig {
            misspelling_threshold: DEFAULT_MISSPELLING_THRESHOLD,
            clusters: vec![
                ClusterRule {
                    cluster: Cluster::SchemaOrg,
                    second_level: "schema".into(),
                    top_level: "org".into(),
                    base_prefixes: vec![String::new(), "www".into()],
                },
                ClusterRule {
                    cluster: Cluster::DataVocabulary,
                    second_level: "data-vocabulary".into(),
                    top_level: "org".into(),
                    base_prefixes: vec![String::new()],
                },
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassifyDiagnostic {
    NoHost,
}

/// Classification of a host, independent of the URI path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HostClass {
    pub cluster: Cluster,
    pub variation: Variation,
    /// Base host of the cluster, absent for [`Cluster::Other`].
    pub canonical_host: Option<String>,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptClassification {
    pub cluster: Cluster,
    pub variation: Variation,
    /// Absent iff `cluster` is [`Cluster::Other`].
    pub canonical_uri: Option<String>,
    /// Normalized edit distance of the matched second-level domain.
    pub distance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<ClassifyDiagnostic>,
}

impl ConceptClassification {
    fn other(distance: f64, diagnostic: Option<ClassifyDiagnostic>) -> Self {
        ConceptClassification {
            cluster: Cluster::Other,
            variation: Variation::NotApplicable,
            canonical_uri: None,
            distance,
            diagnostic,
        }
    }

    /// The canonical URI when one exists, otherwise the input.
    pub fn canonical_or<'a>(&'a self, uri: &'a str) -> &'a str {
        self.canonical_uri.as_deref().unwrap_or(uri)
    }
}

fn classify_parts(parts: &HostParts, config: &VocabConfig) -> HostClass {
    let host = parts.host();

    for rule in &config.clusters {
        let base = rule.base_host();
        let prefix = if host == base {
            Some("")
        } else {
            host.strip_suffix(&base).and_then(|p| p.strip_suffix('.'))
        };
        if let Some(prefix) = prefix {
            let variation = if rule.base_prefixes.iter().any(|b| b == prefix) {
                Variation::Base
            } else {
                Variation::SubdomainVariant
            };
            return HostClass {
                cluster: rule.cluster,
                variation,
                canonical_host: Some(base),
                distance: 0.0,
            };
        }
    }

    let mut nearest: Option<(&ClusterRule, f64)> = None;
    for rule in &config.clusters {
        if parts.top_level != rule.top_level || parts.second_level == rule.second_level {
            continue;
        }
        let d = normalized_levenshtein(&parts.second_level, &rule.second_level);
        if d <= config.misspelling_threshold && nearest.is_none_or(|(_, best)| d < best) {
            nearest = Some((rule, d));
        }
    }
    if let Some((rule, d)) = nearest {
        return HostClass {
            cluster: rule.cluster,
            variation: Variation::SldMisspelling,
            canonical_host: Some(rule.base_host()),
            distance: d,
        };
    }

    let labels = parts.labels();
    for rule in &config.clusters {
        if let Some(pos) = labels.iter().rposition(|l| *l == rule.second_level) {
            if pos + 1 < labels.len() && labels[pos + 1..].join(".") != rule.top_level {
                return HostClass {
                    cluster: rule.cluster,
                    variation: Variation::TldMisspelling,
                    canonical_host: Some(rule.base_host()),
                    distance: 0.0,
                };
            }
        }
    }

    let distance = config
        .clusters
        .iter()
        .map(|r| normalized_levenshtein(&parts.second_level, &r.second_level))
        .fold(1.0, f64::min);
    HostClass {
        cluster: Cluster::Other,
        variation: Variation::NotApplicable,
        canonical_host: None,
        distance,
    }
}

fn finish(parts: &HostParts, class: &HostClass) -> ConceptClassification {
    ConceptClassification {
        cluster: class.cluster,
        variation: class.variation,
        canonical_uri: class.canonical_host.as_deref().map(|h| parts.with_host(h)),
        distance: class.distance,
        diagnostic: None,
    }
}

/// Classifies a vocabulary URI into a cluster and variation dimension.
///
/// Rules are tried in order: exact base host (optionally with an allowed
/// prefix), any other subdomain of the base host, a second-level label within
/// the misspelling threshold under the exact top level, the exact second-level
/// label followed by a different top level, and finally the `other` cluster.
pub fn classify_concept(uri: &str, config: &VocabConfig) -> ConceptClassification {
    match split_host(uri) {
        Ok(parts) => finish(&parts, &classify_parts(&parts, config)),
        Err(_) => ConceptClassification::other(1.0, Some(ClassifyDiagnostic::NoHost)),
    }
}

/// Classifier with a host-keyed cache, shared across worker threads.
#[derive(Debug)]
pub struct VocabNormalizer {
    config: VocabConfig,
    cache: RwLock<HashMap<String, HostClass>>,
}

impl Default for VocabNormalizer {
    fn default() -> Self {
        VocabNormalizer::new(VocabConfig::default())
    }
}

impl VocabNormalizer {
    pub fn new(config: VocabConfig) -> Self {
        VocabNormalizer {
            config,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn config(&self) -> &VocabConfig {
        &self.config
    }

    pub fn classify_host(&self, parts: &HostParts) -> HostClass {
        let host = parts.host();
        if let Some(hit) = self.cache.read().expect("vocab cache poisoned").get(&host) {
            return hit.clone();
        }
        let class = classify_parts(parts, &self.config);
        self.cache
            .write()
            .expect("vocab cache poisoned")
            .insert(host, class.clone());
        class
    }

    pub fn classify(&self, uri: &str) -> ConceptClassification {
        match split_host(uri) {
            Ok(parts) => finish(&parts, &self.classify_host(&parts)),
            Err(_) => ConceptClassification::other(1.0, Some(ClassifyDiagnostic::NoHost)),
        }
    }

    /// Canonical form of `uri`, or `uri` itself for the `other` cluster.
    pub fn canonicalize(&self, uri: &str) -> String {
        self.classify(uri).canonical_uri.unwrap_or_else(|| uri.to_string())
    }
}

/// One row of the canonicalization audit map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalMapEntry {
    pub variant_host: String,
    pub cluster: Cluster,
    pub variation: Variation,
    pub canonical_host: String,
}

impl CanonicalMapEntry {
    pub fn new(variant_host: String, class: &HostClass) -> Self {
        CanonicalMapEntry {
            variant_host,
            cluster: class.cluster,
            variation: class.variation,
            canonical_host: class.canonical_host.clone().unwrap_or_default(),
        }
    }
}

/// Writes the audit CSV: `variant-host,cluster,variation,canonical-host`.
pub fn write_canonical_map<W: io::Write>(
    entries: impl IntoIterator<Item = CanonicalMapEntry>,
    writer: W,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["variant-host", "cluster", "variation", "canonical-host"])?;
    for e in entries {
        w.write_record([
            e.variant_host.as_str(),
            e.cluster.as_str(),
            e.variation.as_str(),
            e.canonical_host.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classify(uri: &str) -> ConceptClassification {
        classify_concept(uri, &VocabConfig::default())
    }

    #[test]
    fn base_concepts() {
        let c = classify("http://schema.org/name");
        assert_eq!((c.cluster, c.variation), (Cluster::SchemaOrg, Variation::Base));
        assert_eq!(c.canonical_uri.as_deref(), Some("http://schema.org/name"));
        assert_eq!(c.distance, 0.0);

        let c = classify("https://www.schema.org/Product");
        assert_eq!(c.variation, Variation::Base);
        assert_eq!(c.canonical_uri.as_deref(), Some("https://schema.org/Product"));
    }

    #[test]
    fn documented_variants() {
        let c = classify("http://schema.ofg/Product");
        assert_eq!((c.cluster, c.variation), (Cluster::SchemaOrg, Variation::TldMisspelling));
        assert_eq!(c.canonical_uri.as_deref(), Some("http://schema.org/Product"));

        let c = classify("http://datavocabulary.org/Breadcrumb");
        assert_eq!((c.cluster, c.variation), (Cluster::DataVocabulary, Variation::SldMisspelling));
        assert_eq!(c.canonical_uri.as_deref(), Some("http://data-vocabulary.org/Breadcrumb"));
        assert!((c.distance - 1.0 / 15.0).abs() < 1e-12);

        let c = classify("http://www.data-vocabulary.org/Product");
        assert_eq!((c.cluster, c.variation), (Cluster::DataVocabulary, Variation::SubdomainVariant));

        let c = classify("http://schema.org.cn/Product/name");
        assert_eq!((c.cluster, c.variation), (Cluster::SchemaOrg, Variation::TldMisspelling));
        assert_eq!(c.canonical_uri.as_deref(), Some("http://schema.org/Product/name"));
    }

    #[test]
    fn unrelated_vocabularies_pass_through() {
        let c = classify("http://purl.org/dc/terms/title");
        assert_eq!((c.cluster, c.variation), (Cluster::Other, Variation::NotApplicable));
        assert!(c.canonical_uri.is_none());

        let c = classify("http://www.w3.org/1999/02/22-rdf-syntax-ns#type");
        assert_eq!(c.cluster, Cluster::Other);

        let c = classify("urn:x:schema.org");
        assert_eq!(c.cluster, Cluster::Other);
        assert_eq!(c.diagnostic, Some(ClassifyDiagnostic::NoHost));
    }

    #[test]
    fn threshold_is_configurable() {
        let strict = VocabConfig {
            misspelling_threshold: 0.1,
            ..VocabConfig::default()
        };
        assert_eq!(classify_concept("http://ruschema.org/x", &strict).cluster, Cluster::Other);
        assert_eq!(classify("http://ruschema.org/x").variation, Variation::SldMisspelling);
    }

    #[test]
    fn cached_and_uncached_agree() {
        let norm = VocabNormalizer::default();
        for uri in ["http://schema.org/a", "http://bib.schema.org/b", "http://scheme.org/c", "http://x.y/z"] {
            assert_eq!(norm.classify(uri), classify(uri));
            assert_eq!(norm.classify(uri), classify(uri));
        }
        assert_eq!(norm.canonicalize("http://x.y/z"), "http://x.y/z");
    }

    #[test]
    fn canonical_map_csv() {
        let class = classify_parts(&split_host("http://schema.ofg/").unwrap(), &VocabConfig::default());
        let mut out = Vec::new();
        write_canonical_map([CanonicalMapEntry::new("schema.ofg".into(), &class)], &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "variant-host,cluster,variation,canonical-host\nschema.ofg,schema-org,tld-misspelling,schema.org\n"
        );
    }
}
