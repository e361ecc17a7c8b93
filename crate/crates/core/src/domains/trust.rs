use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Which side of the threshold counts as trusted. There is deliberately no
/// default: the low-rank-is-trusted reading and the provider's
/// higher-is-more-authoritative scale point in opposite directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparator {
    LowerIsTrusted,
    HigherIsTrusted,
}

/// Routing for records whose domain has no rank.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbsentRank {
    Keep,
    Drop,
    #[default]
    Quarantine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrustPolicy {
    pub comparator: Comparator,
    pub threshold: f64,
    #[serde(default)]
    pub absent: AbsentRank,
}

impl TrustPolicy {
    /// Inclusive comparison against the threshold.
    pub fn trusts(&self, rank: f64) -> bool {
        match self.comparator {
            Comparator::LowerIsTrusted => rank <= self.threshold,
            Comparator::HigherIsTrusted => rank >= self.threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrustOutcome<R> {
    pub kept: Vec<R>,
    pub dropped: Vec<R>,
    pub quarantined: Vec<R>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrustSummary {
    pub kept: u64,
    pub dropped: u64,
    pub quarantined: u64,
    /// Excluded records per domain.
    pub excluded_by_pld: BTreeMap<String, u64>,
}

impl TrustSummary {
    pub fn merge(&mut self, other: &TrustSummary) {
        self.kept += other.kept;
        self.dropped += other.dropped;
        self.quarantined += other.quarantined;
        for (p, n) in &other.excluded_by_pld {
            *self.excluded_by_pld.entry(p.clone()).or_default() += n;
        }
    }
}

impl<R> TrustOutcome<R> {
    pub fn summary(&self, pld_of: impl Fn(&R) -> &str) -> TrustSummary {
        let mut excluded_by_pld = BTreeMap::new();
        for r in self.dropped.iter().chain(&self.quarantined) {
            *excluded_by_pld.entry(pld_of(r).to_string()).or_default() += 1;
        }
        TrustSummary {
            kept: self.kept.len() as u64,
            dropped: self.dropped.len() as u64,
            quarantined: self.quarantined.len() as u64,
            excluded_by_pld,
        }
    }
}

/// Splits records by the rank of their pay-level domain. Every record ends
/// up in exactly one of the three outputs, in input order.
pub fn trust_filter<R>(
    records: impl IntoIterator<Item = R>,
    pld_of: impl Fn(&R) -> &str,
    ranks: &BTreeMap<String, f64>,
    policy: &TrustPolicy,
) -> TrustOutcome<R> {
    let mut out = TrustOutcome {
        kept: Vec::new(),
        dropped: Vec::new(),
        quarantined: Vec::new(),
    };
    for r in records {
        let target = match ranks.get(pld_of(&r)) {
            Some(&rank) if policy.trusts(rank) => &mut out.kept,
            Some(_) => &mut out.dropped,
            None => match policy.absent {
                AbsentRank::Keep => &mut out.kept,
                AbsentRank::Drop => &mut out.dropped,
                AbsentRank::Quarantine => &mut out.quarantined,
            },
        };
        target.push(r);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ranks() -> BTreeMap<String, f64> {
        BTreeMap::from([("a".into(), 3.0), ("b".into(), 7.0)])
    }

    #[test]
    fn comparator_examples() {
        let lower = TrustPolicy {
            comparator: Comparator::LowerIsTrusted,
            threshold: 5.0,
            absent: AbsentRank::Quarantine,
        };
        let out = trust_filter(["a", "b", "c"], |r| r, &ranks(), &lower);
        assert_eq!(out.kept, vec!["a"]);
        assert_eq!(out.dropped, vec!["b"]);
        assert_eq!(out.quarantined, vec!["c"]);
        assert_eq!(out.summary(|r| r).excluded_by_pld.len(), 2);

        let higher = TrustPolicy {
            comparator: Comparator::HigherIsTrusted,
            ..lower
        };
        let out = trust_filter(["a", "b"], |r| r, &ranks(), &higher);
        assert_eq!(out.kept, vec!["b"]);
        assert_eq!(out.dropped, vec!["a"]);
    }

    #[test]
    fn threshold_is_inclusive() {
        let p = TrustPolicy {
            comparator: Comparator::LowerIsTrusted,
            threshold: 3.0,
            absent: AbsentRank::Keep,
        };
        assert!(p.trusts(3.0));
        assert!(!p.trusts(3.0001));
    }
}
