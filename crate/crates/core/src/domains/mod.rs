//! Pay-level domains, PageRank lookups and trust filtering.

mod cache;
mod pagerank;
mod pld;
mod transport;
mod trust;

pub use cache::{load_offline_ranks, RankCache, CacheError};
pub use pagerank::{
    fetch_ranks, DomainRank, OpenPageRankClient, RankClientConfig, RankLookup, RankSource, DEFAULT_ENDPOINT,
};
pub use pld::{pld_distribution, PayLevelDomain, PldCounts, PldError, PublicSuffixList, PSL_SNAPSHOT};
pub use transport::{HttpRequest, HttpResponse, Transport, TransportError, UreqTransport};
pub use trust::{trust_filter, AbsentRank, Comparator, TrustOutcome, TrustPolicy, TrustSummary};
