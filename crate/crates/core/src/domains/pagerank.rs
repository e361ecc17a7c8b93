use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::cache::RankCache;
use super::transport::{HttpRequest, Transport};

pub const DEFAULT_ENDPOINT: &str = "https://openpagerank.com/api/v1.0/getPageRank";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankSource {
    Api,
    Cache,
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainRank {
    pub pld: String,
    /// Provider score; absent when the provider knows no rank.
    pub rank_value: Option<f64>,
    pub rank_position: Option<u64>,
    /// Seconds since the Unix epoch.
    pub fetched_at: u64,
    pub source: RankSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankClientConfig {
    pub endpoint: String,
    pub api_key: String,
    /// Domains per request; the provider accepts at most 100.
    pub batch_size: usize,
    pub max_retries: u32,
    pub base_backoff: Duration,
    pub max_backoff: Duration,
    pub max_in_flight: usize,
}

impl RankClientConfig {
    pub fn new(api_key: impl Into<String>) -> Self {
        RankClientConfig {
            endpoint: DEFAULT_ENDPOINT.to_string(),
            api_key: api_key.into(),
            batch_size: 100,
            max_retries: 4,
            base_backoff: Duration::from_millis(500),
            max_backoff: Duration::from_secs(30),
            max_in_flight: 4,
        }
    }
}

#[derive(Deserialize)]
struct ApiEnvelope {
    #[serde(default)]
    response: Vec<ApiEntry>,
}

#[derive(Deserialize)]
struct ApiEntry {
    domain: String,
    #[serde(default)]
    status_code: u16,
    #[serde(default)]
    page_rank_decimal: Option<serde_json::Value>,
    #[serde(default)]
    rank: Option<serde_json::Value>,
}

fn number(v: &serde_json::Value) -> Option<f64> {
    match v {
        serde_json::Value::Number(n) => n.as_f64(),
        serde_json::Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
    .filter(|x: &f64| x.is_finite())
}

fn now_secs() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Client for the Open PageRank `getPageRank` endpoint.
pub struct OpenPageRankClient<T: Transport> {
    transport: T,
    config: RankClientConfig,
    requests: AtomicU64,
}

impl<T: Transport> OpenPageRankClient<T> {
    pub fn new(transport: T, config: RankClientConfig) -> Self {
        OpenPageRankClient {
            transport,
            config,
            requests: AtomicU64::new(0),
        }
    }

    /// Network requests issued so far, retries included.
    pub fn requests_issued(&self) -> u64 {
        self.requests.load(Ordering::Relaxed)
    }

    fn request_for(&self, batch: &[String]) -> HttpRequest {
        HttpRequest {
            url: self.config.endpoint.clone(),
            query: batch.iter().map(|d| ("domains[]".to_string(), d.clone())).collect(),
            headers: vec![("API-OPR".to_string(), self.config.api_key.clone())],
        }
    }

    fn backoff(&self, attempt: u32, hint: Option<Duration>) -> Duration {
        let exp = self.config.base_backoff.saturating_mul(1u32 << attempt.min(16));
        hint.unwrap_or_default().max(exp).min(self.config.max_backoff)
    }

    /// One batch, retrying throttling and server errors with exponential
    /// backoff. Domains missing from a successful response are reported
    /// with a rankless entry.
    pub fn fetch_batch(&self, batch: &[String]) -> Result<Vec<DomainRank>, String> {
        let request = self.request_for(batch);
        let mut attempt = 0;
        loop {
            self.requests.fetch_add(1, Ordering::Relaxed);
            let (retryable, cause, hint) = match self.transport.get(&request) {
                Ok(resp) if (200..300).contains(&resp.status) => return self.parse(batch, &resp.body),
                Ok(resp) => (
                    resp.status == 429 || resp.status >= 500,
                    format!("HTTP {}", resp.status),
                    resp.retry_after,
                ),
                Err(e) => (true, e.to_string(), None),
            };
            if !retryable || attempt >= self.config.max_retries {
                return Err(format!("{cause} after {} attempt(s)", attempt + 1));
            }
            std::thread::sleep(self.backoff(attempt, hint));
            attempt += 1;
        }
    }

    fn parse(&self, batch: &[String], body: &str) -> Result<Vec<DomainRank>, String> {
        let envelope: ApiEnvelope = serde_json::from_str(body).map_err(|e| format!("bad response body: {e}"))?;
        let fetched_at = now_secs();
        let mut found: BTreeMap<String, DomainRank> = BTreeMap::new();
        for entry in envelope.response {
            let known = entry.status_code == 0 || entry.status_code == 200;
            let domain = entry.domain.to_ascii_lowercase();
            found.insert(
                domain.clone(),
                DomainRank {
                    pld: domain,
                    rank_value: entry.page_rank_decimal.as_ref().and_then(number).filter(|_| known),
                    rank_position: entry.rank.as_ref().and_then(number).filter(|_| known).map(|r| r as u64),
                    fetched_at,
                    source: RankSource::Api,
                },
            );
        }
        Ok(batch
            .iter()
            .map(|d| {
                found.remove(d).unwrap_or(DomainRank {
                    pld: d.clone(),
                    rank_value: None,
                    rank_position: None,
                    fetched_at,
                    source: RankSource::Api,
                })
            })
            .collect())
    }

    /// Fetches all domains in batches, at most `max_in_flight` at a time.
    pub fn fetch_all(&self, plds: &[String]) -> (Vec<DomainRank>, BTreeMap<String, String>)
    where
        T: Sync,
    {
        let batches: Vec<&[String]> = plds.chunks(self.config.batch_size.clamp(1, 100)).collect();
        let next = AtomicUsize::new(0);
        let ranks = Mutex::new(Vec::new());
        let failures = Mutex::new(BTreeMap::new());
        let workers = self.config.max_in_flight.max(1).min(batches.len());
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(batch) = batches.get(i) else { break };
                    match self.fetch_batch(batch) {
                        Ok(found) => ranks.lock().unwrap().extend(found),
                        Err(cause) => {
                            let mut f = failures.lock().unwrap();
                            for d in batch.iter() {
                                f.insert(d.clone(), cause.clone());
                            }
                        }
                    }
                });
            }
        });
        let mut ranks = ranks.into_inner().unwrap();
        ranks.sort_by(|a, b| a.pld.cmp(&b.pld));
        (ranks, failures.into_inner().unwrap())
    }
}

/// Ranks for a set of domains and the causes for those left without one.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RankLookup {
    pub ranks: BTreeMap<String, DomainRank>,
    pub absent: BTreeMap<String, String>,
    pub network_requests: u64,
}

impl RankLookup {
    pub fn values(&self) -> BTreeMap<String, f64> {
        self.ranks
            .iter()
            .filter_map(|(p, r)| r.rank_value.map(|v| (p.clone(), v)))
            .collect()
    }
}

/// Resolves ranks from, in order: an offline snapshot (exclusive, never
/// touches the network), the cache, and the API client. Fresh API results
/// are appended to the cache.
pub fn fetch_ranks<T: Transport + Sync>(
    plds: impl IntoIterator<Item = String>,
    offline: Option<&BTreeMap<String, f64>>,
    cache: Option<&Mutex<RankCache>>,
    client: Option<&OpenPageRankClient<T>>,
) -> RankLookup {
    let wanted: BTreeSet<String> = plds.into_iter().filter(|p| !p.is_empty()).collect();
    let mut lookup = RankLookup::default();
    if let Some(snapshot) = offline {
        for pld in wanted {
            match snapshot.get(&pld) {
                Some(&v) => {
                    lookup.ranks.insert(
                        pld.clone(),
                        DomainRank {
                            pld,
                            rank_value: Some(v),
                            rank_position: None,
                            fetched_at: 0,
                            source: RankSource::File,
                        },
                    );
                }
                None => {
                    lookup.absent.insert(pld, "not in offline snapshot".into());
                }
            }
        }
        return lookup;
    }

    let mut misses = Vec::new();
    for pld in wanted {
        let hit = cache.and_then(|c| c.lock().unwrap().get(&pld).cloned());
        match hit {
            Some(mut rank) => {
                rank.source = RankSource::Cache;
                lookup.ranks.insert(pld, rank);
            }
            None => misses.push(pld),
        }
    }
    let Some(client) = client else {
        for pld in misses {
            lookup.absent.insert(pld, "no API client configured".into());
        }
        return lookup;
    };
    if misses.is_empty() {
        return lookup;
    }
    let before = client.requests_issued();
    let (fresh, failures) = client.fetch_all(&misses);
    lookup.network_requests = client.requests_issued() - before;
    if let Some(cache) = cache {
        let mut cache = cache.lock().unwrap();
        // A failing cache write costs a refetch next run, nothing more.
        let _ = cache.insert_all(&fresh);
    }
    for rank in fresh {
        lookup.ranks.insert(rank.pld.clone(), rank);
    }
    lookup.absent.extend(failures);
    lookup
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::transport::{HttpResponse, TransportError};

    struct Scripted {
        replies: Mutex<Vec<Result<HttpResponse, TransportError>>>,
        seen: Mutex<Vec<HttpRequest>>,
    }

    impl Transport for Scripted {
        fn get(&self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
            self.seen.lock().unwrap().push(request.clone());
            self.replies.lock().unwrap().remove(0)
        }
    }

    fn ok(body: &str) -> Result<HttpResponse, TransportError> {
        Ok(HttpResponse {
            status: 200,
            retry_after: None,
            body: body.into(),
        })
    }

    fn quick(key: &str) -> RankClientConfig {
        RankClientConfig {
            base_backoff: Duration::ZERO,
            ..RankClientConfig::new(key)
        }
    }

    #[test]
    fn retries_throttling_then_parses() {
        let transport = Scripted {
            replies: Mutex::new(vec![
                Ok(HttpResponse {
                    status: 429,
                    retry_after: None,
                    body: String::new(),
                }),
                ok(r#"{"status_code":200,"response":[
                    {"status_code":200,"error":"","page_rank_integer":6,"page_rank_decimal":6.1,"rank":"1200","domain":"rakuten.com"},
                    {"status_code":404,"error":"Domain not found","page_rank_integer":0,"page_rank_decimal":0,"rank":null,"domain":"nowhere.example"}]}"#),
            ]),
            seen: Mutex::new(Vec::new()),
        };
        let client = OpenPageRankClient::new(&transport, quick("k"));
        let ranks = client
            .fetch_batch(&["nowhere.example".into(), "rakuten.com".into()])
            .unwrap();
        assert_eq!(client.requests_issued(), 2);
        assert_eq!(ranks[1].rank_value, Some(6.1));
        assert_eq!(ranks[1].rank_position, Some(1200));
        assert_eq!(ranks[0].rank_value, None);
        let seen = transport.seen.lock().unwrap();
        assert_eq!(seen[0].headers, vec![("API-OPR".to_string(), "k".to_string())]);
        assert_eq!(seen[0].query[0], ("domains[]".to_string(), "nowhere.example".to_string()));
    }

    #[test]
    fn gives_up_on_client_errors() {
        let transport = Scripted {
            replies: Mutex::new(vec![Ok(HttpResponse {
                status: 401,
                retry_after: None,
                body: String::new(),
            })]),
            seen: Mutex::new(Vec::new()),
        };
        let client = OpenPageRankClient::new(&transport, quick("bad"));
        let err = client.fetch_batch(&["a.com".into()]).unwrap_err();
        assert!(err.contains("401"));
        assert_eq!(client.requests_issued(), 1);
    }

    #[test]
    fn backoff_grows_and_honours_hints() {
        let transport = Scripted {
            replies: Mutex::new(Vec::new()),
            seen: Mutex::new(Vec::new()),
        };
        let client = OpenPageRankClient::new(&transport, RankClientConfig::new("k"));
        assert_eq!(client.backoff(0, None), Duration::from_millis(500));
        assert_eq!(client.backoff(2, None), Duration::from_secs(2));
        assert_eq!(client.backoff(0, Some(Duration::from_secs(3))), Duration::from_secs(3));
        assert_eq!(client.backoff(10, None), Duration::from_secs(30));
    }
}
