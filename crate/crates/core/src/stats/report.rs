use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::profile::ProfileStats;
use crate::locality::WindowStats;
use crate::validity::PropertyKey;

pub const TOP_CLASSES: usize = 5;
pub const TOP_LANGUAGES: usize = 10;
pub const TOP_PLDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Tsv,
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("invalid report JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Hex SHA-256 over the canonical (key-sorted, compact) JSON form.
pub fn config_digest(config: &Value) -> String {
    let canonical = canonical_json(config);
    let digest = Sha256::digest(canonical.as_bytes());
    let mut out = String::from("sha256:");
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

fn canonical_json(v: &Value) -> String {
    match v {
        Value::Object(map) => {
            let sorted: BTreeMap<&String, String> = map.iter().map(|(k, v)| (k, canonical_json(v))).collect();
            let body: Vec<String> = sorted
                .into_iter()
                .map(|(k, v)| format!("{}:{}", Value::String(k.clone()), v))
                .collect();
            format!("{{{}}}", body.join(","))
        }
        Value::Array(items) => format!("[{}]", items.iter().map(canonical_json).collect::<Vec<_>>().join(",")),
        other => other.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub inputs: Vec<String>,
    pub config_digest: String,
    /// Only present when explicitly requested, so reports stay reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
}

/// A stats snapshot with its provenance and effective configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub provenance: Provenance,
    pub config: Value,
    /// Window used for the complete-rate line, if any.
    #[serde(default)]
    pub window: Option<u64>,
    /// Added to every reported window; 1 counts the first quad.
    #[serde(default)]
    pub window_offset: u64,
    #[serde(default = "default_percentiles")]
    pub percentiles: Vec<f64>,
    pub stats: ProfileStats,
    #[serde(default)]
    pub extras: BTreeMap<String, Value>,
}

fn default_percentiles() -> Vec<f64> {
    vec![50.0, 90.0, 99.0]
}

/// A ratio rendered with four decimals, `null` when undefined.
struct Fixed(Option<f64>);

impl Fixed {
    fn ratio(num: u64, den: u64) -> Fixed {
        Fixed((den > 0).then(|| num as f64 / den as f64))
    }
}

impl Serialize for Fixed {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Some(x) if x.is_finite() => {
                let raw = RawValue::from_string(format!("{x:.4}")).map_err(serde::ser::Error::custom)?;
                raw.serialize(s)
            }
            _ => s.serialize_none(),
        }
    }
}

impl std::fmt::Display for Fixed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            Some(x) if x.is_finite() => write!(f, "{x:.4}"),
            _ => f.write_str(""),
        }
    }
}

#[derive(Serialize)]
struct Ranked {
    name: String,
    count: u64,
    share: Fixed,
}

#[derive(Serialize)]
struct PropertyLine {
    nodes: u64,
    node_share: Fixed,
    valid: u64,
    invalid: u64,
    unvalidatable: u64,
    valid_share: Fixed,
    invalid_share: Fixed,
}

#[derive(Serialize)]
struct AgreementLine {
    agree: u64,
    disagree: u64,
    undetermined: u64,
    agree_share: Fixed,
    disagree_share: Fixed,
}

#[derive(Serialize)]
struct WindowLine {
    nodes: u64,
    mean: Fixed,
    max: Option<u64>,
    percentiles: BTreeMap<String, Option<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    complete_rate: Option<Fixed>,
}

#[derive(Serialize)]
struct Summary {
    quads: u64,
    malformed_lines: u64,
    product_nodes: u64,
    entity_classes_top: Vec<Ranked>,
    variation_shares: BTreeMap<String, BTreeMap<String, Fixed>>,
    node_validity: BTreeMap<&'static str, Fixed>,
    properties: BTreeMap<PropertyKey, PropertyLine>,
    language_raw_tags: usize,
    language_clusters: usize,
    languages_top: Vec<Ranked>,
    agreement: BTreeMap<String, AgreementLine>,
    windows: WindowLine,
    product_windows: WindowLine,
    subject_complete_rate: Fixed,
    plds_top: Vec<Ranked>,
    pld_count: usize,
}

#[derive(Serialize)]
struct Rendered<'a> {
    command: &'a str,
    provenance: &'a Provenance,
    config: &'a Value,
    window: Option<u64>,
    window_offset: u64,
    percentiles: &'a [f64],
    summary: Summary,
    stats: &'a ProfileStats,
    extras: &'a BTreeMap<String, Value>,
}

fn top(map: &BTreeMap<String, u64>, k: usize) -> Vec<Ranked> {
    let total: u64 = map.values().sum();
    let mut all: Vec<(&String, &u64)> = map.iter().collect();
    all.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    all.into_iter()
        .take(k)
        .map(|(name, &count)| Ranked {
            name: name.clone(),
            count,
            share: Fixed::ratio(count, total),
        })
        .collect()
}

fn percentile_key(p: f64) -> String {
    format!("p{p}")
}

impl Report {
    pub fn new(command: impl Into<String>, stats: ProfileStats, config: Value, inputs: Vec<String>) -> Self {
        let provenance = Provenance {
            tool: "wdcprod".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            inputs,
            config_digest: config_digest(&config),
            generated_at: None,
        };
        Report {
            command: command.into(),
            provenance,
            config,
            window: None,
            window_offset: 0,
            percentiles: default_percentiles(),
            stats,
            extras: BTreeMap::new(),
        }
    }

    fn window_line(&self, w: &WindowStats) -> WindowLine {
        let w = w.shifted(self.window_offset);
        WindowLine {
            nodes: w.total_nodes,
            mean: Fixed(w.mean()),
            max: w.max(),
            percentiles: self
                .percentiles
                .iter()
                .map(|&p| (percentile_key(p), w.percentile(p)))
                .collect(),
            complete_rate: self.window.map(|win| Fixed(w.complete_rate(win + self.window_offset))),
        }
    }

    fn summary(&self) -> Summary {
        let s = &self.stats;
        let variation_shares = s
            .variations
            .iter()
            .map(|(cluster, m)| {
                let total: u64 = m.values().sum();
                (cluster.clone(), m.iter().map(|(v, n)| (v.clone(), Fixed::ratio(*n, total))).collect())
            })
            .collect();
        let nodes = s.node_validity.valid + s.node_validity.invalid;
        let properties = PropertyKey::ALL
            .into_iter()
            .map(|k| {
                let c = s.property_validity.get(&k).copied().unwrap_or_default();
                let carried = s.property_frequency.get(&k).copied().unwrap_or(0);
                let line = PropertyLine {
                    nodes: carried,
                    node_share: Fixed::ratio(carried, s.product_nodes),
                    valid: c.valid,
                    invalid: c.invalid,
                    unvalidatable: c.unvalidatable,
                    valid_share: Fixed::ratio(c.valid, c.total()),
                    invalid_share: Fixed::ratio(c.invalid, c.total()),
                };
                (k, line)
            })
            .collect();
        let agreement = s
            .agreement
            .by_code
            .iter()
            .map(|(code, c)| {
                let line = AgreementLine {
                    agree: c.agree,
                    disagree: c.disagree,
                    undetermined: c.undetermined,
                    agree_share: Fixed::ratio(c.agree, c.support()),
                    disagree_share: Fixed::ratio(c.disagree, c.support()),
                };
                (code.clone(), line)
            })
            .collect();
        Summary {
            quads: s.quad_count,
            malformed_lines: s.malformed_lines,
            product_nodes: s.product_nodes,
            entity_classes_top: top(&s.entity_classes, TOP_CLASSES),
            variation_shares,
            node_validity: BTreeMap::from([
                ("valid_share", Fixed::ratio(s.node_validity.valid, nodes)),
                ("invalid_share", Fixed::ratio(s.node_validity.invalid, nodes)),
            ]),
            properties,
            language_raw_tags: s.language_tags.len(),
            language_clusters: s.language_clusters(),
            languages_top: top(&s.language_distribution, TOP_LANGUAGES),
            agreement,
            windows: self.window_line(&s.windows),
            product_windows: self.window_line(&s.product_windows),
            subject_complete_rate: Fixed(s.subject_complete_rate()),
            plds_top: top(&s.pld_counts.0, TOP_PLDS),
            pld_count: s.pld_counts.0.len(),
        }
    }

    pub fn render(&self, format: ReportFormat) -> Vec<u8> {
        match format {
            ReportFormat::Json => self.render_json().into_bytes(),
            ReportFormat::Tsv => self.render_tsv().into_bytes(),
        }
    }

    pub fn render_json(&self) -> String {
        let rendered = Rendered {
            command: &self.command,
            provenance: &self.provenance,
            config: &self.config,
            window: self.window,
            window_offset: self.window_offset,
            percentiles: &self.percentiles,
            summary: self.summary(),
            stats: &self.stats,
            extras: &self.extras,
        };
        let mut out = serde_json::to_string_pretty(&rendered).expect("report serializes");
        out.push('\n');
        out
    }

    /// Loads a rendered JSON report. The derived summary is ignored and
    /// recomputed on the next render.
    pub fn load_json(text: &str) -> Result<Report, ReportError> {
        Ok(serde_json::from_str(text)?)
    }

    /// `section<TAB>key<TAB>field<TAB>value` rows for spreadsheet import.
    pub fn render_tsv(&self) -> String {
        let s = &self.stats;
        let sum = self.summary();
        let mut rows: Vec<[String; 4]> = Vec::new();
        let mut row = |a: &str, b: &str, c: &str, d: String| rows.push([a.into(), b.into(), c.into(), d]);
        row("provenance", "command", "", self.command.clone());
        row("provenance", "version", "", self.provenance.version.clone());
        row("provenance", "config_digest", "", self.provenance.config_digest.clone());
        for input in &self.provenance.inputs {
            row("provenance", "input", "", input.clone());
        }
        row("corpus", "quads", "", s.quad_count.to_string());
        row("corpus", "malformed_lines", "", s.malformed_lines.to_string());
        row("corpus", "product_nodes", "", s.product_nodes.to_string());
        for r in &sum.entity_classes_top {
            row("entity_classes", &r.name, "count", r.count.to_string());
            row("entity_classes", &r.name, "share", r.share.to_string());
        }
        for (cluster, m) in &s.variations {
            for (v, n) in m {
                row("variations", cluster, v, n.to_string());
            }
        }
        for (k, line) in &sum.properties {
            let k = k.as_str();
            row("properties", k, "nodes", line.nodes.to_string());
            row("properties", k, "node_share", line.node_share.to_string());
            row("properties", k, "valid", line.valid.to_string());
            row("properties", k, "invalid", line.invalid.to_string());
            row("properties", k, "unvalidatable", line.unvalidatable.to_string());
            row("properties", k, "valid_share", line.valid_share.to_string());
        }
        row("node_validity", "valid", "", s.node_validity.valid.to_string());
        row("node_validity", "invalid", "", s.node_validity.invalid.to_string());
        row("node_validity", "valid_share", "", sum.node_validity["valid_share"].to_string());
        row("languages", "raw_tags", "", sum.language_raw_tags.to_string());
        row("languages", "clusters", "", sum.language_clusters.to_string());
        for r in &sum.languages_top {
            row("languages", &r.name, "count", r.count.to_string());
        }
        for (code, a) in &sum.agreement {
            row("agreement", code, "agree_share", a.agree_share.to_string());
            row("agreement", code, "disagree_share", a.disagree_share.to_string());
            row("agreement", code, "support", (a.agree + a.disagree).to_string());
        }
        for (name, w) in [("windows", &sum.windows), ("product_windows", &sum.product_windows)] {
            row(name, "nodes", "", w.nodes.to_string());
            row(name, "mean", "", w.mean.to_string());
            row(name, "max", "", w.max.map(|m| m.to_string()).unwrap_or_default());
            for (p, v) in &w.percentiles {
                row(name, p, "", v.map(|m| m.to_string()).unwrap_or_default());
            }
            if let Some(rate) = &w.complete_rate {
                row(name, "complete_rate", "", rate.to_string());
            }
        }
        for r in &sum.plds_top {
            row("plds", &r.name, "count", r.count.to_string());
        }
        let mut out = String::from("section\tkey\tfield\tvalue\n");
        for r in rows {
            let clean: Vec<String> = r.iter().map(|f| f.replace(['\t', '\n', '\r'], " ")).collect();
            out.push_str(&clean.join("\t"));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Report {
        let mut stats = ProfileStats::default();
        stats.quad_count = 10;
        for (c, n) in [
            ("http://schema.org/Product", 9),
            ("http://schema.org/Offer", 7),
            ("http://schema.org/ListItem", 5),
            ("http://data-vocabulary.org/Breadcrumb", 4),
            ("http://schema.org/AggregateRating", 3),
            ("http://schema.org/Brand", 1),
        ] {
            stats.entity_classes.insert(c.into(), n);
        }
        stats.node_validity.valid = 1;
        stats.node_validity.invalid = 2;
        stats.windows.record(3);
        let mut r = Report::new("profile", stats, json!({"window": 145, "seed": 1}), vec!["a.nq.gz".into()]);
        r.window = Some(145);
        r
    }

    #[test]
    fn digest_ignores_key_order() {
        let a = json!({"a": 1, "b": {"c": [1, 2], "d": "x"}});
        let b: Value = serde_json::from_str(r#"{"b": {"d": "x", "c": [1, 2]}, "a": 1}"#).unwrap();
        assert_eq!(config_digest(&a), config_digest(&b));
        assert_ne!(config_digest(&a), config_digest(&json!({"a": 2})));
        assert!(config_digest(&a).starts_with("sha256:"));
    }

    #[test]
    fn shares_have_four_decimals() {
        let text = sample().render_json();
        assert!(text.contains("\"valid_share\": 0.3333"), "{text}");
        assert!(text.contains("\"mean\": 3.0000"));
    }

    #[test]
    fn top_classes_mirror_table_layout() {
        let v: Value = serde_json::from_str(&sample().render_json()).unwrap();
        let top = v["summary"]["entity_classes_top"].as_array().unwrap();
        assert_eq!(top.len(), 5);
        assert_eq!(top[0]["name"], "http://schema.org/Product");
        assert_eq!(top[4]["name"], "http://schema.org/AggregateRating");
    }

    #[test]
    fn empty_stats_render_zeroed_sections() {
        let r = Report::new("profile", ProfileStats::default(), json!({}), vec![]);
        let v: Value = serde_json::from_str(&r.render_json()).unwrap();
        assert_eq!(v["summary"]["quads"], 0);
        assert!(v["summary"]["node_validity"]["valid_share"].is_null());
        assert_eq!(v["summary"]["properties"].as_object().unwrap().len(), 10);
        assert!(v["summary"]["windows"]["mean"].is_null());
    }

    #[test]
    fn json_round_trip_is_byte_stable() {
        let mut r = sample();
        r.extras.insert("ranks".into(), json!({"b.com": 7.25, "a.com": null}));
        let first = r.render_json();
        let again = Report::load_json(&first).unwrap().render_json();
        assert_eq!(first, again);
    }

    #[test]
    fn tsv_has_fixed_columns() {
        let tsv = sample().render_tsv();
        assert!(tsv.lines().all(|l| l.split('\t').count() == 4));
        assert!(tsv.contains("node_validity\tvalid_share\t\t0.3333"));
    }
}
