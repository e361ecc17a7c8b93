use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::identify::{normalize_code, Identification, LanguageIdentifier};
use super::sampling::LanguageSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Agreement {
    Agree,
    Disagree,
    Undetermined,
}

/// Compares a reconciled declared code with an identification. Different
/// codes only disagree when both are known ISO 639 languages.
pub fn judge(reconciled: Option<&str>, identified: Option<&Identification>) -> Agreement {
    let (Some(declared), Some(found)) = (reconciled.and_then(normalize_code), identified.and_then(|i| normalize_code(&i.code)))
    else {
        return Agreement::Undetermined;
    };
    if declared.code == found.code {
        Agreement::Agree
    } else if declared.mapped && found.mapped {
        Agreement::Disagree
    } else {
        Agreement::Undetermined
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementCounts {
    pub agree: u64,
    pub disagree: u64,
    pub undetermined: u64,
}

impl AgreementCounts {
    pub fn add(&mut self, a: Agreement) {
        match a {
            Agreement::Agree => self.agree += 1,
            Agreement::Disagree => self.disagree += 1,
            Agreement::Undetermined => self.undetermined += 1,
        }
    }

    pub fn merge(&mut self, other: &AgreementCounts) {
        self.agree += other.agree;
        self.disagree += other.disagree;
        self.undetermined += other.undetermined;
    }

    pub fn support(&self) -> u64 {
        self.agree + self.disagree
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodeShares {
    pub agree_share: f64,
    pub disagree_share: f64,
    pub support: u64,
}

/// Agreement counts per reconciled declared code. Samples without a
/// declared tag are only counted in `untagged`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementTable {
    pub by_code: BTreeMap<String, AgreementCounts>,
    pub untagged: u64,
    pub identifier_errors: u64,
}

impl AgreementTable {
    pub fn add(&mut self, sample: &LanguageSample) {
        match &sample.reconciled {
            Some(code) => self.by_code.entry(code.clone()).or_default().add(sample.agreement),
            None => self.untagged += 1,
        }
    }

    pub fn merge(&mut self, other: &AgreementTable) {
        for (code, counts) in &other.by_code {
            self.by_code.entry(code.clone()).or_default().merge(counts);
        }
        self.untagged += other.untagged;
        self.identifier_errors += other.identifier_errors;
    }

    /// Shares for codes with at least one determined sample.
    pub fn shares(&self) -> BTreeMap<String, CodeShares> {
        self.by_code
            .iter()
            .filter(|(_, c)| c.support() > 0)
            .map(|(code, c)| {
                let support = c.support();
                let shares = CodeShares {
                    agree_share: c.agree as f64 / support as f64,
                    disagree_share: c.disagree as f64 / support as f64,
                    support,
                };
                (code.clone(), shares)
            })
            .collect()
    }
}

/// Runs the identifier over the tagged samples, fills in `identified` and
/// `agreement`, and tallies the result. Identifier failures leave the sample
/// undetermined.
pub fn measure_agreement(samples: &mut [LanguageSample], identifier: &dyn LanguageIdentifier) -> AgreementTable {
    let mut table = AgreementTable::default();
    let tagged: Vec<usize> = (0..samples.len()).filter(|&i| samples[i].reconciled.is_some()).collect();
    let texts: Vec<&str> = tagged.iter().map(|&i| samples[i].literal.as_str()).collect();
    let found = identifier.identify_batch(&texts);
    for (&i, result) in tagged.iter().zip(found) {
        let sample = &mut samples[i];
        match result {
            Ok(id) => sample.identified = id,
            Err(_) => {
                table.identifier_errors += 1;
                sample.identified = None;
            }
        }
        sample.agreement = judge(sample.reconciled.as_deref(), sample.identified.as_ref());
    }
    for sample in samples.iter_mut() {
        if sample.reconciled.is_none() {
            sample.agreement = Agreement::Undetermined;
        }
        table.add(sample);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::{IdentifyError, MapIdentifier};
    use crate::nquads::Literal;
    use std::collections::BTreeSet;

    fn sample(text: &str, tag: Option<&str>) -> LanguageSample {
        let lit = match tag {
            Some(t) => Literal {
                lexical: text.into(),
                annotation: crate::nquads::Annotation::Language(t.into()),
            },
            None => Literal {
                lexical: text.into(),
                annotation: Default::default(),
            },
        };
        LanguageSample::from_literal(&lit, 0)
    }

    #[test]
    fn judging() {
        let id = |c: &str| Identification {
            code: c.into(),
            confidence: 1.0,
        };
        assert_eq!(judge(Some("en"), Some(&id("en"))), Agreement::Agree);
        assert_eq!(judge(Some("en"), Some(&id("__label__eng"))), Agreement::Agree);
        assert_eq!(judge(Some("en"), Some(&id("de"))), Agreement::Disagree);
        assert_eq!(judge(Some("en"), Some(&id("qq"))), Agreement::Undetermined);
        assert_eq!(judge(None, Some(&id("en"))), Agreement::Undetermined);
        assert_eq!(judge(Some("en"), None), Agreement::Undetermined);
    }

    #[test]
    fn all_agree() {
        let mut oracle = MapIdentifier::default();
        let mut samples = Vec::new();
        for i in 0..10 {
            let text = format!("english text {i}");
            oracle.insert(text.clone(), "en");
            samples.push(sample(&text, Some("en-GB")));
        }
        samples.push(sample("no tag here", None));
        let table = measure_agreement(&mut samples, &oracle);
        let shares = table.shares();
        assert_eq!(shares["en"].agree_share, 1.0);
        assert_eq!(shares["en"].support, 10);
        assert_eq!(table.untagged, 1);
        assert!(!shares.contains_key("de"));
    }

    struct Failing;
    impl LanguageIdentifier for Failing {
        fn name(&self) -> &str {
            "failing"
        }
        fn supported_codes(&self) -> BTreeSet<String> {
            BTreeSet::new()
        }
        fn identify(&self, _: &str) -> Result<Option<Identification>, IdentifyError> {
            Err(IdentifyError::Output("boom".into()))
        }
    }

    #[test]
    fn failures_stay_undetermined() {
        let mut samples = vec![sample("ein deutscher text", Some("de"))];
        let table = measure_agreement(&mut samples, &Failing);
        assert_eq!(table.identifier_errors, 1);
        assert_eq!(table.by_code["de"].undetermined, 1);
        assert!(table.shares().is_empty());
        assert_eq!(samples[0].agreement, Agreement::Undetermined);
    }
}
