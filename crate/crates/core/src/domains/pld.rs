use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;

use publicsuffix::{List, Psl};
use serde::{Deserialize, Serialize};

/// Identifies the bundled public suffix list.
pub const PSL_SNAPSHOT: &str = "publicsuffix-2.3.0 test data (public_suffix_list.dat, commit 4f385eb)";

const BUNDLED_PSL: &str = include_str!("../../data/public_suffix_list.dat");

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PayLevelDomain(pub String);

impl PayLevelDomain {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for PayLevelDomain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PldError {
    #[error("no host in {0:?}")]
    NoHost(String),
    #[error("cannot read public suffix list: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse public suffix list: {0}")]
    Parse(String),
}

pub struct PublicSuffixList {
    list: List,
}

impl PublicSuffixList {
    /// The vendored snapshot, parsed once per process.
    pub fn bundled() -> &'static PublicSuffixList {
        static LIST: OnceLock<PublicSuffixList> = OnceLock::new();
        LIST.get_or_init(|| PublicSuffixList::parse(BUNDLED_PSL).expect("bundled public suffix list parses"))
    }

    pub fn parse(text: &str) -> Result<Self, PldError> {
        let list: List = text.parse().map_err(|e: publicsuffix::Error| PldError::Parse(e.to_string()))?;
        if list.is_empty() {
            return Err(PldError::Parse("no rules".into()));
        }
        Ok(PublicSuffixList { list })
    }

    pub fn from_file(path: &Path) -> Result<Self, PldError> {
        PublicSuffixList::parse(&std::fs::read_to_string(path)?)
    }

    /// Registrable domain of a URL or bare host. IP hosts come back
    /// verbatim, as do hosts that are themselves public suffixes. Suffixes
    /// missing from the list fall back to the last two labels.
    pub fn extract_pld(&self, input: &str) -> Result<PayLevelDomain, PldError> {
        let host = host_of(input).ok_or_else(|| PldError::NoHost(input.to_string()))?;
        if let Host::Ip(ip) = host {
            return Ok(PayLevelDomain(ip));
        }
        let Host::Name(name) = host else { unreachable!() };
        let name = name.trim_end_matches('.').to_string();
        if name.is_empty() {
            return Err(PldError::NoHost(input.to_string()));
        }
        let pld = match self.list.domain(name.as_bytes()) {
            Some(d) => String::from_utf8_lossy(d.as_bytes()).into_owned(),
            None => name,
        };
        Ok(PayLevelDomain(pld))
    }

    /// Like [`extract_pld`](Self::extract_pld) but never fails; unusable
    /// input maps to the empty string.
    pub fn pld_or_empty(&self, input: &str) -> String {
        self.extract_pld(input).map(|p| p.0).unwrap_or_default()
    }
}

enum Host {
    Ip(String),
    Name(String),
}

fn host_of(input: &str) -> Option<Host> {
    let input = input.trim();
    let candidate;
    let parse_target = if input.contains("://") {
        input
    } else {
        candidate = format!("http://{input}");
        &candidate
    };
    let url = url::Url::parse(parse_target).ok()?;
    match url.host()? {
        url::Host::Domain(d) => Some(Host::Name(d.to_ascii_lowercase())),
        url::Host::Ipv4(ip) => Some(Host::Ip(ip.to_string())),
        url::Host::Ipv6(ip) => Some(Host::Ip(format!("[{ip}]"))),
    }
}

/// Node counts per pay-level domain.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PldCounts(pub BTreeMap<String, u64>);

impl PldCounts {
    pub fn add(&mut self, pld: &str) {
        self.add_n(pld, 1);
    }

    pub fn add_n(&mut self, pld: &str, n: u64) {
        if let Some(c) = self.0.get_mut(pld) {
            *c += n;
        } else {
            self.0.insert(pld.to_string(), n);
        }
    }

    pub fn merge(&mut self, other: &PldCounts) {
        for (pld, n) in &other.0 {
            self.add_n(pld, *n);
        }
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    /// The `k` largest counts, ties broken by domain name.
    pub fn top_k(&self, k: usize) -> Vec<(String, u64)> {
        let mut all: Vec<(String, u64)> = self.0.iter().map(|(p, n)| (p.clone(), *n)).collect();
        all.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        all.truncate(k);
        all
    }
}

pub fn pld_distribution<'a>(plds: impl IntoIterator<Item = &'a str>) -> PldCounts {
    let mut counts = PldCounts::default();
    for p in plds {
        counts.add(p);
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pld(s: &str) -> String {
        PublicSuffixList::bundled().extract_pld(s).unwrap().0
    }

    #[test]
    fn examples() {
        assert_eq!(pld("https://shop.rakuten.com/x"), "rakuten.com");
        assert_eq!(pld("https://a.b.example.co.uk/p"), "example.co.uk");
        assert_eq!(pld("http://127.0.0.1/x"), "127.0.0.1");
        assert_eq!(pld("http://[::1]:8080/x"), "[::1]");
        assert_eq!(pld("http://Shop.Example.COM./"), "example.com");
        assert_eq!(pld("http://www.shop.unknowntld/"), "shop.unknowntld");
        assert_eq!(pld("http://co.uk/"), "co.uk");
        assert!(PublicSuffixList::bundled().extract_pld("mailto:x").is_err());
    }

    #[test]
    fn idempotent_on_output() {
        for url in ["https://shop.rakuten.com/x", "https://a.b.example.co.uk/p", "http://127.0.0.1/x", "http://[::1]/"] {
            let once = pld(url);
            assert_eq!(pld(&once), once);
        }
    }

    #[test]
    fn counts_and_top_k() {
        let counts = pld_distribution(["b.com", "a.com", "c.com", "b.com"]);
        assert_eq!(counts.total(), 4);
        assert_eq!(counts.top_k(2), vec![("b.com".into(), 2), ("a.com".into(), 1)]);
        assert!(pld_distribution([]).0.is_empty());
    }
}
