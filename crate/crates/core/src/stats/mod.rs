//! Mergeable corpus statistics and report rendering.

mod profile;
mod report;

pub use profile::{NodeValidityCounts, ProfileStats, StatusCounts};
pub use report::{config_digest, Provenance, Report, ReportError, ReportFormat, TOP_CLASSES, TOP_LANGUAGES, TOP_PLDS};
