use std::collections::{BTreeMap, HashMap};
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SyntheticSpec;
use crate::domains::PldCounts;
use crate::language::MapIdentifier;
use crate::locality::WindowStats;
use crate::stats::{NodeValidityCounts, StatusCounts};
use crate::validity::PropertyKey;

/// Why a planted invalid node fails the valid-node rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvalidMode {
    FewValidProperties,
    NameNotShorter,
    NoValidName,
    NoValidDescription,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedNode {
    pub chunk: usize,
    /// Blank node label of the product subject.
    pub subject: String,
    pub page: String,
    pub pld: String,
    pub vocabulary_host: String,
    pub language: String,
    pub valid: bool,
    pub invalid_mode: Option<InvalidMode>,
    /// Verdict status per carried property.
    pub properties: BTreeMap<PropertyKey, crate::validity::Status>,
    pub window: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagCounts {
    pub correct: u64,
    pub wrong: u64,
}

impl TagCounts {
    pub fn total(&self) -> u64 {
        self.correct + self.wrong
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LanguageTruth {
    /// Planted tag correctness as an exact fraction.
    pub rate_numerator: u64,
    pub rate_denominator: u64,
    /// Tagged literals per declared language.
    pub declared: BTreeMap<String, TagCounts>,
    /// Natural-language literals left untagged.
    pub untagged: u64,
    /// True language of every planted natural-language literal.
    pub literal_languages: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkTruth {
    pub quads: u64,
    pub fillers: u64,
    pub product_nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub spec: SyntheticSpec,
    pub quads: u64,
    pub chunks: Vec<ChunkTruth>,
    pub product_nodes: u64,
    pub node_validity: NodeValidityCounts,
    pub property_frequency: BTreeMap<PropertyKey, u64>,
    pub property_validity: BTreeMap<PropertyKey, StatusCounts>,
    /// Subjects per canonical class.
    pub entity_classes: BTreeMap<String, u64>,
    /// Concept occurrences per cluster and variation.
    pub variations: BTreeMap<String, BTreeMap<String, u64>>,
    pub language: LanguageTruth,
    /// Windows of every subject.
    pub windows: WindowStats,
    pub product_windows: WindowStats,
    pub pld_counts: PldCounts,
    pub nodes: Vec<PlantedNode>,
}

impl GroundTruth {
    /// An identifier that returns the planted language of every generated
    /// text and abstains on anything else.
    pub fn oracle(&self) -> MapIdentifier {
        let table: HashMap<String, String> =
            self.language.literal_languages.iter().map(|(t, c)| (t.clone(), c.clone())).collect();
        MapIdentifier::new(table)
    }

    pub fn valid_node_share(&self) -> Option<f64> {
        let n = self.node_validity.valid + self.node_validity.invalid;
        (n > 0).then(|| self.node_validity.valid as f64 / n as f64)
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        text.push('\n');
        std::fs::write(path, text)
    }

    pub fn load(path: &Path) -> io::Result<GroundTruth> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}
