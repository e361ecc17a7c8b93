use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::agreement::Agreement;
use super::identify::{normalize_code, Identification};
use super::numeric::is_numeric_literal;
use crate::nquads::{Annotation, Literal, Quad, Term};

const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";

/// Plain, language-tagged and `xsd:string` literals. Other datatypes are not
/// natural-language text.
pub fn is_text_literal(term: &Term) -> Option<&Literal> {
    let lit = term.as_literal()?;
    match &lit.annotation {
        Annotation::Plain | Annotation::Language(_) => Some(lit),
        Annotation::Datatype(dt) if dt == XSD_STRING || dt == RDF_LANG_STRING => Some(lit),
        Annotation::Datatype(_) => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageSample {
    pub literal: String,
    pub declared_tag: Option<String>,
    /// Declared tag reduced to its primary subtag and normalized code.
    pub reconciled: Option<String>,
    pub identified: Option<Identification>,
    pub agreement: Agreement,
    pub ordinal: u64,
}

impl LanguageSample {
    pub fn from_literal(lit: &Literal, ordinal: u64) -> Self {
        let declared_tag = match &lit.annotation {
            Annotation::Language(tag) => Some(tag.clone()),
            _ => None,
        };
        let reconciled = declared_tag.as_deref().and_then(normalize_code).map(|c| c.code);
        LanguageSample {
            literal: lit.lexical.clone(),
            declared_tag,
            reconciled,
            identified: None,
            agreement: Agreement::Undetermined,
            ordinal,
        }
    }
}

/// Seeded Bernoulli sampling of non-numeric text literals.
///
/// Each chunk gets its own ChaCha stream selected by the chunk index, so the
/// sample does not depend on how chunks are spread over workers.
#[derive(Debug, Clone)]
pub struct LiteralSampler {
    rate: f64,
    rng: ChaCha8Rng,
}

impl LiteralSampler {
    pub fn new(rate: f64, seed: u64, chunk_index: u64) -> Self {
        assert!(rate > 0.0 && rate <= 1.0, "sample rate must be in (0, 1], got {rate}");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk_index);
        LiteralSampler { rate, rng }
    }

    pub fn offer(&mut self, quad: &Quad) -> Option<LanguageSample> {
        let lit = is_text_literal(&quad.object)?;
        if is_numeric_literal(&lit.lexical) {
            return None;
        }
        if self.rate < 1.0 && !self.rng.gen_bool(self.rate) {
            return None;
        }
        Some(LanguageSample::from_literal(lit, quad.ordinal))
    }
}

pub fn sample_literals<'a>(
    quads: impl IntoIterator<Item = &'a Quad>,
    rate: f64,
    seed: u64,
    chunk_index: u64,
) -> Vec<LanguageSample> {
    let mut sampler = LiteralSampler::new(rate, seed, chunk_index);
    quads.into_iter().filter_map(|q| sampler.offer(q)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quads(n: usize) -> Vec<Quad> {
        (0..n)
            .map(|i| {
                let object = match i % 4 {
                    0 => Term::literal(format!("{i}")),
                    1 => Term::lang_literal(format!("word number {i}"), "en-US"),
                    2 => Term::typed_literal("text", "http://www.w3.org/2001/XMLSchema#date"),
                    _ => Term::literal("plain words"),
                };
                let mut q = Quad::new(Term::blank("s"), "http://p", object, None);
                q.ordinal = i as u64;
                q
            })
            .collect()
    }

    #[test]
    fn full_rate_takes_every_text_literal() {
        let qs = quads(100);
        let all = sample_literals(&qs, 1.0, 7, 0);
        assert_eq!(all.len(), 50);
        assert!(all.iter().all(|s| !is_numeric_literal(&s.literal)));
        assert_eq!(all[0].reconciled.as_deref(), Some("en"));
        assert_eq!(all[1].declared_tag, None);
    }

    #[test]
    fn deterministic_per_seed_and_chunk() {
        let qs = quads(4000);
        let a = sample_literals(&qs, 0.1, 42, 3);
        assert_eq!(a, sample_literals(&qs, 0.1, 42, 3));
        assert_ne!(a, sample_literals(&qs, 0.1, 42, 4));
        assert_ne!(a, sample_literals(&qs, 0.1, 43, 3));
    }

    #[test]
    #[should_panic]
    fn rejects_zero_rate() {
        LiteralSampler::new(0.0, 1, 0);
    }
}
