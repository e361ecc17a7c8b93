//! Vocabulary variant detection.
//!
//! Predicate and class URIs are sorted into the schema.org cluster, the
//! data-vocabulary.org cluster, or everything else, together with the kind of
//! deviation from the base host (subdomain, second-level misspelling,
//! top-level misspelling). Variants are rewritten to the base host with
//! scheme and path untouched.

mod classify;
mod dbscan;
mod distance;
mod host;

pub use classify::{
    classify_concept, write_canonical_map, CanonicalMapEntry, ClassifyDiagnostic, Cluster, ClusterRule,
    ConceptClassification, HostClass, Variation, VocabConfig, VocabNormalizer, DEFAULT_MISSPELLING_THRESHOLD,
};
pub use dbscan::{dbscan_string_clusters, DbscanError, StringClusters};
pub use distance::{levenshtein, normalized_levenshtein};
pub use host::{split_host, HostError, HostParts};
