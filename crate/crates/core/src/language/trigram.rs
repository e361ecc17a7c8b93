use std::collections::{BTreeSet, HashMap};

use super::identify::{IdentifyError, Identification, LanguageIdentifier};

const PROFILES: &str = include_str!("../../data/trigram_profiles.tsv");

pub const DEFAULT_MIN_LENGTH: usize = 20;
const DEFAULT_MIN_CONFIDENCE: f64 = 0.05;

/// Rank-order trigram classifier over the bundled profiles.
///
/// The distance to a profile sums, over the text's trigrams weighted by
/// count, the trigram's rank in the profile, with absent trigrams charged
/// the profile length. Short product literals carry too few repeats for the
/// text-side ranking to mean much, so only profile ranks are used.
/// Confidence is the relative gap between the two closest profiles, scaled
/// into `[0, 1]`.
#[derive(Debug, Clone)]
pub struct TrigramIdentifier {
    profiles: Vec<(String, HashMap<String, usize>)>,
    profile_len: usize,
    min_length: usize,
    min_confidence: f64,
}

impl Default for TrigramIdentifier {
    fn default() -> Self {
        TrigramIdentifier::from_tsv(PROFILES).expect("bundled trigram profiles are well formed")
    }
}

impl TrigramIdentifier {
    pub fn from_tsv(text: &str) -> Result<Self, String> {
        let mut profiles = Vec::new();
        let mut profile_len = 0;
        for (n, line) in text.lines().enumerate() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let (code, grams) = line
                .split_once('\t')
                .ok_or_else(|| format!("line {}: missing tab", n + 1))?;
            let ranks: HashMap<String, usize> = grams
                .split('|')
                .enumerate()
                .map(|(rank, g)| (g.to_string(), rank))
                .collect();
            profile_len = profile_len.max(ranks.len());
            profiles.push((code.to_string(), ranks));
        }
        if profiles.len() < 2 {
            return Err("need at least two profiles".into());
        }
        Ok(TrigramIdentifier {
            profiles,
            profile_len,
            min_length: DEFAULT_MIN_LENGTH,
            min_confidence: DEFAULT_MIN_CONFIDENCE,
        })
    }

    pub fn with_min_length(mut self, chars: usize) -> Self {
        self.min_length = chars;
        self
    }

    pub fn with_min_confidence(mut self, floor: f64) -> Self {
        self.min_confidence = floor;
        self
    }

    /// Text trigrams with counts, most frequent first, ties by trigram.
    fn ranked_trigrams(&self, text: &str) -> Vec<(String, usize)> {
        let cleaned: String = text
            .chars()
            .flat_map(char::to_lowercase)
            .map(|c| if c.is_alphabetic() { c } else { ' ' })
            .collect();
        let mut counts: HashMap<String, usize> = HashMap::new();
        for word in cleaned.split_whitespace() {
            let padded: Vec<char> = std::iter::once(' ').chain(word.chars()).chain(std::iter::once(' ')).collect();
            for w in padded.windows(3) {
                *counts.entry(w.iter().collect()).or_default() += 1;
            }
        }
        let mut ranked: Vec<(String, usize)> = counts.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(self.profile_len);
        ranked
    }

    /// Distance to every profile, closest first.
    pub fn distances(&self, text: &str) -> Vec<(&str, usize)> {
        let grams = self.ranked_trigrams(text);
        let mut out: Vec<(&str, usize)> = self
            .profiles
            .iter()
            .map(|(code, ranks)| {
                let d = grams
                    .iter()
                    .map(|(g, n)| n * ranks.get(g).map_or(self.profile_len, |&r| r))
                    .sum();
                (code.as_str(), d)
            })
            .collect();
        out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(b.0)));
        out
    }
}

impl LanguageIdentifier for TrigramIdentifier {
    fn name(&self) -> &str {
        "trigram"
    }

    fn supported_codes(&self) -> BTreeSet<String> {
        self.profiles.iter().map(|(c, _)| c.clone()).collect()
    }

    fn identify(&self, text: &str) -> Result<Option<Identification>, IdentifyError> {
        if text.trim().chars().count() < self.min_length.max(1) {
            return Ok(None);
        }
        let distances = self.distances(text);
        let (best, d1) = distances[0];
        let d2 = distances[1].1;
        if d2 == 0 {
            return Ok(None);
        }
        let confidence = ((d2 - d1) as f64 / d2 as f64 * CONFIDENCE_SCALE).min(1.0);
        if confidence < self.min_confidence {
            return Ok(None);
        }
        Ok(Some(Identification {
            code: best.to_string(),
            confidence,
        }))
    }
}

const CONFIDENCE_SCALE: f64 = 5.0;
