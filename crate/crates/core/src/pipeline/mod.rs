//! Per-chunk passes and the chunk driver.
//!
//! A chunk is streamed once. Every pass folds profile statistics; the
//! validate pass additionally exports verdicts and the clean pass writes
//! filtered N-Quads with an exclusion log. Chunks are independent, so the
//! driver runs them on a worker pool and merges results in chunk order.

mod chunk;
mod clean;
mod driver;

pub use chunk::{open_chunk, process_chunk, ChunkOutcome, ChunkSinks, Context};
pub use clean::{CleanPlan, CleanSummary, Exclusion};
pub use driver::{concat_parts, run_chunks, ChunkJob, ChunkStatus, PartKind, RunResult};
