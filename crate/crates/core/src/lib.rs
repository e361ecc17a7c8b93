//! Streaming toolkit for product-specific schema.org data published by Web
//! Data Commons as gzipped N-Quads chunks.
//!
//! The crate is organised as one module per analysis:
//!
//! * [`nquads`]: tolerant single-pass chunk parsing and canonical writing.
//! * [`vocab`]: schema.org / data-vocabulary.org variant detection and
//!   canonicalization.
//! * [`validity`]: per-property heuristic checks and the valid-node rule.
//! * [`language`]: tag reconciliation, numeric filtering, sampling and
//!   agreement with a pluggable language identifier.
//! * [`locality`]: per-subject spread measurement and bounded-window node
//!   assembly.
//! * [`domains`]: pay-level domains, PageRank lookups and trust filtering.
//! * [`stats`]: mergeable profile accumulators and report rendering.
//! * [`pipeline`]: per-chunk passes and the parallel chunk driver.
//! * [`synth`]: deterministic synthetic corpora with ground truth.

pub mod domains;
pub mod language;
pub mod locality;
pub mod nquads;
pub mod par;
pub mod pipeline;
pub mod stats;
pub mod synth;
pub mod validity;
pub mod vocab;
