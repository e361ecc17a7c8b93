//! Deterministic synthetic product corpora with a ground-truth sidecar.
//!
//! A [`SyntheticSpec`] fixes the node count, the property mix, per-property
//! validity rates, the exact share of valid nodes, the exact share of
//! correctly tagged literals, the spread distribution of subjects, the rates
//! of vocabulary variants and a Zipf distribution over pay-level domains.
//! [`generate`] turns it into N-Quads chunks plus a [`GroundTruth`] that
//! records every planted fact, so the analyses can be checked against it.

mod generate;
mod slots;
mod truth;
mod words;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::validity::PropertyKey;

pub use generate::{generate, SyntheticCorpus};
pub use truth::{ChunkTruth, GroundTruth, InvalidMode, LanguageTruth, PlantedNode, TagCounts};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpreadSpec {
    /// Share of multi-quad subjects whose quads are spread out instead of
    /// contiguous.
    pub tail_rate: f64,
    /// Largest window any subject gets. At least 10, the smallest window a
    /// product carrying all ten properties can have.
    pub max_spread: u64,
}

impl Default for SpreadSpec {
    fn default() -> Self {
        SpreadSpec { tail_rate: 0.1, max_spread: 60 }
    }
}

/// Per-product-node probabilities of using a non-base vocabulary host.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VariantRates {
    pub data_vocabulary: f64,
    pub subdomain: f64,
    pub sld_misspelling: f64,
    pub tld_misspelling: f64,
}

impl Default for VariantRates {
    fn default() -> Self {
        VariantRates { data_vocabulary: 0.1, subdomain: 0.02, sld_misspelling: 0.01, tld_misspelling: 0.01 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PldSpec {
    pub count: usize,
    pub exponent: f64,
}

impl Default for PldSpec {
    fn default() -> Self {
        PldSpec { count: 200, exponent: 1.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub nodes: usize,
    pub chunks: usize,
    pub seed: u64,
    /// Probability that a product node carries each property.
    pub property_mix: BTreeMap<PropertyKey, f64>,
    /// Probability that a carried value passes its check. Adjusted per node
    /// where needed to hit the valid-node quota.
    pub validity_rates: BTreeMap<PropertyKey, f64>,
    /// Share of product nodes satisfying the valid-node rule, planted exactly
    /// (rounded to whole nodes).
    pub valid_node_rate: f64,
    /// Share of tagged literals whose tag names their true language, planted
    /// exactly per declared language.
    pub tag_correctness: f64,
    /// Relative weights of the true languages of product texts.
    pub languages: BTreeMap<String, f64>,
    pub spread: SpreadSpec,
    pub variants: VariantRates,
    pub plds: PldSpec,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        use PropertyKey::*;
        let property_mix = [
            (Name, 0.98),
            (Description, 0.8),
            (Image, 0.85),
            (Url, 0.8),
            (Offers, 0.9),
            (Brand, 0.5),
            (Sku, 0.4),
            (ProductId, 0.3),
            (AggregateRating, 0.3),
            (Price, 0.2),
        ];
        let validity_rates = PropertyKey::ALL.iter().filter(|k| k.is_validatable()).map(|&k| (k, 0.85)).collect();
        let languages = [("en", 0.45), ("de", 0.15), ("ru", 0.1), ("fr", 0.08), ("es", 0.07), ("it", 0.05), ("nl", 0.05), ("pl", 0.05)];
        SyntheticSpec {
            nodes: 1000,
            chunks: 1,
            seed: 0,
            property_mix: property_mix.into_iter().collect(),
            validity_rates,
            valid_node_rate: 0.25,
            tag_correctness: 0.7,
            languages: languages.into_iter().map(|(c, w)| (c.to_string(), w)).collect(),
            spread: SpreadSpec::default(),
            variants: VariantRates::default(),
            plds: PldSpec::default(),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SpecError {
    #[error("{0} must lie in [0, 1], got {1}")]
    Rate(String, f64),
    #[error("chunks must be at least 1")]
    NoChunks,
    #[error("max_spread must be at least 10, got {0}")]
    SpreadTooSmall(u64),
    #[error("unsupported language {0:?}")]
    Language(String),
    #[error("language weights must be positive and at least one language given")]
    Weights,
    #[error("pld count must be at least 1 and exponent non-negative")]
    Plds,
    #[error("variant rates sum to {0}, more than 1")]
    Variants(f64),
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        let rate = |name: String, v: f64| if (0.0..=1.0).contains(&v) { Ok(()) } else { Err(SpecError::Rate(name, v)) };
        for (k, v) in &self.property_mix {
            rate(format!("property_mix.{k}"), *v)?;
        }
        for (k, v) in &self.validity_rates {
            rate(format!("validity_rates.{k}"), *v)?;
        }
        rate("valid_node_rate".into(), self.valid_node_rate)?;
        rate("tag_correctness".into(), self.tag_correctness)?;
        rate("spread.tail_rate".into(), self.spread.tail_rate)?;
        let v = &self.variants;
        for (name, r) in [
            ("variants.data_vocabulary", v.data_vocabulary),
            ("variants.subdomain", v.subdomain),
            ("variants.sld_misspelling", v.sld_misspelling),
            ("variants.tld_misspelling", v.tld_misspelling),
        ] {
            rate(name.into(), r)?;
        }
        let sum = v.subdomain + v.sld_misspelling + v.tld_misspelling;
        if sum > 1.0 {
            return Err(SpecError::Variants(sum));
        }
        if self.chunks == 0 {
            return Err(SpecError::NoChunks);
        }
        if self.spread.max_spread < 10 {
            return Err(SpecError::SpreadTooSmall(self.spread.max_spread));
        }
        if self.languages.is_empty() || self.languages.values().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(SpecError::Weights);
        }
        if let Some(code) = self.languages.keys().find(|c| words::lexicon(c).is_none()) {
            return Err(SpecError::Language(code.clone()));
        }
        if self.plds.count == 0 || !(self.plds.exponent >= 0.0) {
            return Err(SpecError::Plds);
        }
        Ok(())
    }

    /// Languages the generator has vocabularies for.
    pub fn supported_languages() -> Vec<&'static str> {
        words::LEXICONS.iter().map(|l| l.code).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_spec_is_valid() {
        assert_eq!(SyntheticSpec::default().validate(), Ok(()));
    }

    #[test]
    fn rejects_out_of_range_rates() {
        let mut s = SyntheticSpec { tag_correctness: 1.5, ..Default::default() };
        assert!(matches!(s.validate(), Err(SpecError::Rate(..))));
        s.tag_correctness = 0.7;
        s.spread.max_spread = 9;
        assert_eq!(s.validate(), Err(SpecError::SpreadTooSmall(9)));
        s.spread.max_spread = 10;
        s.languages.insert("xx".into(), 1.0);
        assert_eq!(s.validate(), Err(SpecError::Language("xx".into())));
    }

    #[test]
    fn spec_round_trips_through_json() {
        let s = SyntheticSpec::default();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<SyntheticSpec>(&text).unwrap(), s);
    }
}
