use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domains::PldCounts;
use crate::language::{is_numeric_literal, is_text_literal, reconcile_tag, AgreementTable};
use crate::locality::{AssembledNode, WindowStats};
use crate::nquads::{Quad, RDF_TYPE};
use crate::validity::{PropertyKey, ProductRecord, Status};
use crate::vocab::{Variation, VocabNormalizer};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusCounts {
    pub valid: u64,
    pub invalid: u64,
    pub unvalidatable: u64,
}

impl StatusCounts {
    pub fn add(&mut self, status: Status) {
        match status {
            Status::Valid => self.valid += 1,
            Status::Invalid => self.invalid += 1,
            Status::Unvalidatable => self.unvalidatable += 1,
        }
    }

    pub fn merge(&mut self, o: &StatusCounts) {
        self.valid += o.valid;
        self.invalid += o.invalid;
        self.unvalidatable += o.unvalidatable;
    }

    pub fn total(&self) -> u64 {
        self.valid + self.invalid + self.unvalidatable
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeValidityCounts {
    pub valid: u64,
    pub invalid: u64,
}

/// Raw counts behind every report. Merging is field-wise addition, so any
/// partition of a corpus folded separately and merged gives the same stats.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProfileStats {
    pub lines_read: u64,
    pub malformed_lines: u64,
    pub quad_count: u64,
    /// Nodes per canonical class.
    pub entity_classes: BTreeMap<String, u64>,
    /// Predicate and class occurrences per cluster and variation.
    pub variations: BTreeMap<String, BTreeMap<String, u64>>,
    /// Non-base vocabulary hosts and their occurrences.
    pub variant_hosts: BTreeMap<String, u64>,
    pub product_nodes: u64,
    /// Product nodes carrying each of the ten properties.
    pub property_frequency: BTreeMap<PropertyKey, u64>,
    /// Per product node and property, the best verdict among its values.
    pub property_validity: BTreeMap<PropertyKey, StatusCounts>,
    /// Failed values per rule.
    pub rule_failures: BTreeMap<String, u64>,
    pub node_validity: NodeValidityCounts,
    /// Tagged text literals per primary language subtag.
    pub language_distribution: BTreeMap<String, u64>,
    /// Tagged text literals per raw tag.
    pub language_tags: BTreeMap<String, u64>,
    pub untagged_text_literals: u64,
    pub numeric_literals: u64,
    pub sampled_literals: u64,
    pub agreement: AgreementTable,
    /// Product nodes per pay-level domain.
    pub pld_counts: PldCounts,
    /// Windows of all subjects.
    pub windows: WindowStats,
    /// Windows of assembled product records.
    pub product_windows: WindowStats,
    /// Assembled records, fragments included.
    pub records: u64,
    pub incomplete_records: u64,
    /// Subjects seen by the assembler (first fragments).
    pub subjects: u64,
    /// Subjects whose quads did not fit in one window.
    pub split_subjects: u64,
}

fn bump(map: &mut BTreeMap<String, u64>, key: &str, n: u64) {
    if let Some(c) = map.get_mut(key) {
        *c += n;
    } else {
        map.insert(key.to_string(), n);
    }
}

fn merge_counts<K: Ord + Clone>(into: &mut BTreeMap<K, u64>, from: &BTreeMap<K, u64>) {
    for (k, n) in from {
        *into.entry(k.clone()).or_default() += n;
    }
}

impl ProfileStats {
    pub fn merge(&mut self, o: &ProfileStats) {
        self.lines_read += o.lines_read;
        self.malformed_lines += o.malformed_lines;
        self.quad_count += o.quad_count;
        merge_counts(&mut self.entity_classes, &o.entity_classes);
        for (cluster, m) in &o.variations {
            merge_counts(self.variations.entry(cluster.clone()).or_default(), m);
        }
        merge_counts(&mut self.variant_hosts, &o.variant_hosts);
        self.product_nodes += o.product_nodes;
        merge_counts(&mut self.property_frequency, &o.property_frequency);
        for (k, c) in &o.property_validity {
            self.property_validity.entry(*k).or_default().merge(c);
        }
        merge_counts(&mut self.rule_failures, &o.rule_failures);
        self.node_validity.valid += o.node_validity.valid;
        self.node_validity.invalid += o.node_validity.invalid;
        merge_counts(&mut self.language_distribution, &o.language_distribution);
        merge_counts(&mut self.language_tags, &o.language_tags);
        self.untagged_text_literals += o.untagged_text_literals;
        self.numeric_literals += o.numeric_literals;
        self.sampled_literals += o.sampled_literals;
        self.agreement.merge(&o.agreement);
        self.pld_counts.merge(&o.pld_counts);
        self.windows.merge(&o.windows);
        self.product_windows.merge(&o.product_windows);
        self.records += o.records;
        self.incomplete_records += o.incomplete_records;
        self.subjects += o.subjects;
        self.split_subjects += o.split_subjects;
    }

    pub fn merged(mut self, o: &ProfileStats) -> ProfileStats {
        self.merge(o);
        self
    }

    fn fold_concept(&mut self, uri: &str, normalizer: &VocabNormalizer) {
        let class = normalizer.classify(uri);
        let m = self.variations.entry(class.cluster.as_str().to_string()).or_default();
        bump(m, class.variation.as_str(), 1);
        if !matches!(class.variation, Variation::Base | Variation::NotApplicable) {
            if let Ok(parts) = crate::vocab::split_host(uri) {
                bump(&mut self.variant_hosts, &parts.host(), 1);
            }
        }
    }

    /// Quad-level counters: concept variations and the language of text
    /// literals.
    pub fn fold_quad(&mut self, quad: &Quad, normalizer: &VocabNormalizer) {
        self.quad_count += 1;
        self.fold_concept(&quad.predicate, normalizer);
        if quad.predicate == RDF_TYPE {
            if let Some(class) = quad.object.as_iri() {
                self.fold_concept(class, normalizer);
            }
        }
        if let Some(lit) = is_text_literal(&quad.object) {
            if is_numeric_literal(&lit.lexical) {
                self.numeric_literals += 1;
                return;
            }
            match quad.object.language() {
                Some(tag) => {
                    bump(&mut self.language_tags, tag, 1);
                    if let Some(code) = reconcile_tag(tag) {
                        bump(&mut self.language_distribution, &code, 1);
                    }
                }
                None => self.untagged_text_literals += 1,
            }
        }
    }

    /// Node-level counters. `record` is the product view of the node, when
    /// the node is a product.
    pub fn fold_node(&mut self, node: &AssembledNode, record: Option<&ProductRecord>, normalizer: &VocabNormalizer) {
        let mut classes: Vec<String> = node
            .quads
            .iter()
            .filter(|q| q.predicate == RDF_TYPE)
            .filter_map(|q| q.object.as_iri())
            .map(|c| normalizer.canonicalize(c))
            .collect();
        classes.sort();
        classes.dedup();
        for c in &classes {
            bump(&mut self.entity_classes, c, 1);
        }
        self.records += 1;
        self.incomplete_records += u64::from(!node.complete);
        match node.fragment {
            0 => self.subjects += 1,
            1 => self.split_subjects += 1,
            _ => {}
        }
        if let Some(record) = record {
            self.fold_record(record);
        }
    }

    pub fn fold_record(&mut self, record: &ProductRecord) {
        self.product_nodes += 1;
        for key in PropertyKey::ALL {
            if let Some(status) = record.key_status(key) {
                *self.property_frequency.entry(key).or_default() += 1;
                self.property_validity.entry(key).or_default().add(status);
            }
        }
        for p in &record.properties {
            if let Some(rule) = p.verdict.and_then(|v| v.failed_rule) {
                bump(&mut self.rule_failures, rule.as_str(), 1);
            }
        }
        if record.node_valid {
            self.node_validity.valid += 1;
        } else {
            self.node_validity.invalid += 1;
        }
        if !record.pay_level_domain.is_empty() {
            self.pld_counts.add(&record.pay_level_domain);
        }
    }

    /// Share of subjects whose quads all landed in one record.
    pub fn subject_complete_rate(&self) -> Option<f64> {
        (self.subjects > 0).then(|| 1.0 - self.split_subjects as f64 / self.subjects as f64)
    }

    pub fn language_clusters(&self) -> usize {
        self.language_distribution.len()
    }
}
