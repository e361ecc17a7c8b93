use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

/// Primary language subtag: lowercased text before the first `-` or `_`.
/// `None` when nothing is left after trimming.
pub fn reconcile_tag(tag: &str) -> Option<String> {
    let primary = tag.trim().split(['-', '_']).next().unwrap_or("").trim();
    (!primary.is_empty()).then(|| primary.to_lowercase())
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageCluster {
    pub code: String,
    pub member_tags: BTreeSet<String>,
}

/// Groups observed raw tags by primary subtag.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagReconciler {
    clusters: BTreeMap<String, BTreeSet<String>>,
    unusable: BTreeSet<String>,
}

impl TagReconciler {
    pub fn observe(&mut self, tag: &str) -> Option<String> {
        match reconcile_tag(tag) {
            Some(code) => {
                if !self.clusters.get(&code).is_some_and(|m| m.contains(tag)) {
                    self.clusters.entry(code.clone()).or_default().insert(tag.to_string());
                }
                Some(code)
            }
            None => {
                self.unusable.insert(tag.to_string());
                None
            }
        }
    }

    pub fn merge(&mut self, other: &TagReconciler) {
        for (code, members) in &other.clusters {
            self.clusters.entry(code.clone()).or_default().extend(members.iter().cloned());
        }
        self.unusable.extend(other.unusable.iter().cloned());
    }

    pub fn raw_tag_count(&self) -> usize {
        self.clusters.values().map(BTreeSet::len).sum()
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn clusters(&self) -> impl Iterator<Item = LanguageCluster> + '_ {
        self.clusters.iter().map(|(code, members)| LanguageCluster {
            code: code.clone(),
            member_tags: members.clone(),
        })
    }
}
