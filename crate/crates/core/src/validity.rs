//! Semantic validity of product properties.
//!
//! Each of the ten most frequent product properties has a rule set over the
//! object term (literal / node / URL shape, emptiness, null markers). A product
//! node is valid when at least five distinct properties carry a valid value
//! and its name is shorter than its description.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::locality::AssembledNode;
use crate::nquads::{Term, RDF_TYPE};
use crate::vocab::{Cluster, VocabNormalizer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropertyKey {
    Name,
    Description,
    Image,
    Url,
    Offers,
    Brand,
    Sku,
    ProductId,
    AggregateRating,
    Price,
}

impl PropertyKey {
    pub const ALL: [PropertyKey; 10] = [
        PropertyKey::Name,
        PropertyKey::Description,
        PropertyKey::Image,
        PropertyKey::Url,
        PropertyKey::Offers,
        PropertyKey::Brand,
        PropertyKey::Sku,
        PropertyKey::ProductId,
        PropertyKey::AggregateRating,
        PropertyKey::Price,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PropertyKey::Name => "name",
            PropertyKey::Description => "description",
            PropertyKey::Image => "image",
            PropertyKey::Url => "url",
            PropertyKey::Offers => "offers",
            PropertyKey::Brand => "brand",
            PropertyKey::Sku => "sku",
            PropertyKey::ProductId => "productid",
            PropertyKey::AggregateRating => "aggregaterating",
            PropertyKey::Price => "price",
        }
    }

    /// Key for a (canonicalized) predicate URI: its final path segment,
    /// lowercased. `None` for properties outside the ten.
    pub fn from_predicate(uri: &str) -> Option<PropertyKey> {
        let segment = uri.rsplit(['/', '#']).next()?.to_ascii_lowercase();
        PropertyKey::ALL.into_iter().find(|k| k.as_str() == segment)
    }

    pub fn is_validatable(self) -> bool {
        self != PropertyKey::Price
    }
}

impl fmt::Display for PropertyKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    MustBeTextLiteral,
    EmptyAfterPreprocessing,
    MustNotBeUrl,
    NullMarker,
    MustBeValidUrl,
    MustBeNodeOrUrl,
    MustBeLiteralUrlOrNode,
    MustBeNode,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::MustBeTextLiteral => "must-be-text-literal",
            Rule::EmptyAfterPreprocessing => "empty-after-preprocessing",
            Rule::MustNotBeUrl => "must-not-be-url",
            Rule::NullMarker => "null-marker",
            Rule::MustBeValidUrl => "must-be-valid-url",
            Rule::MustBeNodeOrUrl => "must-be-node-or-url",
            Rule::MustBeLiteralUrlOrNode => "must-be-literal-url-or-node",
            Rule::MustBeNode => "must-be-node",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Valid,
    Invalid,
    Unvalidatable,
}

/// `failed_rule` is present exactly when `status` is `Invalid`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ValidityVerdict {
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failed_rule: Option<Rule>,
}

impl ValidityVerdict {
    pub const VALID: ValidityVerdict = ValidityVerdict {
        status: Status::Valid,
        failed_rule: None,
    };
    pub const UNVALIDATABLE: ValidityVerdict = ValidityVerdict {
        status: Status::Unvalidatable,
        failed_rule: None,
    };

    pub fn invalid(rule: Rule) -> Self {
        ValidityVerdict {
            status: Status::Invalid,
            failed_rule: Some(rule),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.status == Status::Valid
    }
}

/// Collapses whitespace runs to one space and trims both ends.
pub fn preprocess_literal(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Length in characters after preprocessing.
pub fn preprocessed_len(text: &str) -> usize {
    text.split_whitespace().map(|w| w.chars().count()).sum::<usize>()
        + text.split_whitespace().count().saturating_sub(1)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NullMatch {
    /// The whole preprocessed text must equal a marker (case-insensitive).
    #[default]
    Exact,
    /// Any occurrence of a marker inside the text.
    Substring,
}

const NULL_MARKERS: [&str; 2] = ["null", "n/a"];

pub fn is_null_marker(text: &str) -> bool {
    is_null_marker_with(text, NullMatch::Exact)
}

pub fn is_null_marker_with(text: &str, mode: NullMatch) -> bool {
    let folded = preprocess_literal(text).to_lowercase();
    match mode {
        NullMatch::Exact => NULL_MARKERS.contains(&folded.as_str()),
        NullMatch::Substring => NULL_MARKERS.iter().any(|m| folded.contains(m)),
    }
}

fn is_http_url(text: &str) -> bool {
    let text = preprocess_literal(text);
    match url::Url::parse(&text) {
        Ok(u) => matches!(u.scheme(), "http" | "https") && u.host_str().is_some_and(|h| !h.is_empty()),
        Err(_) => false,
    }
}

/// An IRI, or a literal whose preprocessed text is an absolute http(s) URL.
pub fn is_valid_url(term: &Term) -> bool {
    match term {
        Term::Iri { .. } => true,
        Term::Literal(lit) => is_http_url(&lit.lexical),
        Term::BlankNode { .. } => false,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityConfig {
    pub null_match: NullMatch,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Validator {
    pub config: ValidityConfig,
}

impl Validator {
    pub fn new(config: ValidityConfig) -> Self {
        Validator { config }
    }

    pub fn check_property(&self, key: PropertyKey, object: &Term) -> ValidityVerdict {
        if !key.is_validatable() {
            return ValidityVerdict::UNVALIDATABLE;
        }
        let content = match object {
            Term::Literal(lit) => Some(lit.lexical.as_str()),
            Term::Iri { value } => Some(value.as_str()),
            Term::BlankNode { .. } => None,
        };
        if content.is_some_and(|c| is_null_marker_with(c, self.config.null_match)) {
            return ValidityVerdict::invalid(Rule::NullMarker);
        }
        let verdict = |ok: bool, rule| if ok { ValidityVerdict::VALID } else { ValidityVerdict::invalid(rule) };
        match key {
            PropertyKey::Name | PropertyKey::Description => match object {
                Term::Literal(lit) => {
                    if preprocessed_len(&lit.lexical) == 0 {
                        ValidityVerdict::invalid(Rule::EmptyAfterPreprocessing)
                    } else {
                        verdict(!is_http_url(&lit.lexical), Rule::MustNotBeUrl)
                    }
                }
                _ => ValidityVerdict::invalid(Rule::MustBeTextLiteral),
            },
            PropertyKey::Image | PropertyKey::Url => verdict(is_valid_url(object), Rule::MustBeValidUrl),
            PropertyKey::Offers => verdict(!object.is_literal(), Rule::MustBeNodeOrUrl),
            PropertyKey::Brand => match object {
                Term::Literal(lit) if preprocessed_len(&lit.lexical) == 0 => {
                    ValidityVerdict::invalid(Rule::EmptyAfterPreprocessing)
                }
                _ => ValidityVerdict::VALID,
            },
            PropertyKey::Sku | PropertyKey::ProductId => match object {
                Term::Literal(lit) => verdict(preprocessed_len(&lit.lexical) > 0, Rule::EmptyAfterPreprocessing),
                _ => ValidityVerdict::invalid(Rule::MustBeTextLiteral),
            },
            PropertyKey::AggregateRating => verdict(object.is_blank(), Rule::MustBeNode),
            PropertyKey::Price => ValidityVerdict::UNVALIDATABLE,
        }
    }
}

pub fn check_property(key: PropertyKey, object: &Term) -> ValidityVerdict {
    Validator::default().check_property(key, object)
}

/// One property statement of a product node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyValue {
    /// Canonicalized predicate URI.
    pub predicate: String,
    pub key: Option<PropertyKey>,
    pub object: Term,
    pub verdict: Option<ValidityVerdict>,
    /// Ordinal of the source quad.
    pub ordinal: u64,
}

/// A product node assembled from one subject's quads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductRecord {
    pub subject: Term,
    pub source_page: String,
    pub pay_level_domain: String,
    /// Canonicalized class URIs.
    pub types: Vec<String>,
    pub properties: Vec<PropertyValue>,
    pub node_valid: bool,
    pub complete: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NameDescriptionCheck {
    Satisfied,
    MissingName,
    MissingDescription,
    NameNotShorter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeCheck {
    pub valid: bool,
    pub valid_keys: usize,
    pub name_description: NameDescriptionCheck,
}

/// Minimum number of distinct properties with a valid value.
pub const MIN_VALID_PROPERTIES: usize = 5;

/// Applies the valid-node rule to a record whose verdicts are populated.
pub fn check_node(record: &ProductRecord) -> NodeCheck {
    let mut valid_keys: Vec<PropertyKey> = record
        .properties
        .iter()
        .filter(|p| p.verdict.is_some_and(|v| v.is_valid()))
        .filter_map(|p| p.key)
        .collect();
    valid_keys.sort();
    valid_keys.dedup();

    let valid_lengths = |key: PropertyKey| -> Vec<usize> {
        record
            .properties
            .iter()
            .filter(|p| p.key == Some(key) && p.verdict.is_some_and(|v| v.is_valid()))
            .filter_map(|p| p.object.as_literal())
            .map(|lit| preprocessed_len(&lit.lexical))
            .collect()
    };
    let names = valid_lengths(PropertyKey::Name);
    let descriptions = valid_lengths(PropertyKey::Description);
    let name_description = match (names.iter().min(), descriptions.iter().max()) {
        (None, _) => NameDescriptionCheck::MissingName,
        (_, None) => NameDescriptionCheck::MissingDescription,
        (Some(n), Some(d)) if n < d => NameDescriptionCheck::Satisfied,
        _ => NameDescriptionCheck::NameNotShorter,
    };
    NodeCheck {
        valid: valid_keys.len() >= MIN_VALID_PROPERTIES && name_description == NameDescriptionCheck::Satisfied,
        valid_keys: valid_keys.len(),
        name_description,
    }
}

/// Class URIs that mark a product node, after canonicalization.
pub fn is_product_class(canonical: &str) -> bool {
    matches!(
        canonical,
        "http://schema.org/Product"
            | "https://schema.org/Product"
            | "http://data-vocabulary.org/Product"
            | "https://data-vocabulary.org/Product"
    )
}

impl ProductRecord {
    /// Builds a record from an assembled node when it is typed as a product.
    pub fn from_node(
        node: &AssembledNode,
        normalizer: &VocabNormalizer,
        validator: &Validator,
        pld_of: impl Fn(&str) -> String,
    ) -> Option<ProductRecord> {
        let mut types = Vec::new();
        let mut properties = Vec::new();
        for quad in &node.quads {
            if quad.predicate == RDF_TYPE {
                if let Some(class) = quad.object.as_iri() {
                    types.push(normalizer.canonicalize(class));
                }
                continue;
            }
            let class = normalizer.classify(&quad.predicate);
            let predicate = class.canonical_or(&quad.predicate).to_string();
            let key = if class.cluster == Cluster::Other {
                None
            } else {
                PropertyKey::from_predicate(&predicate)
            };
            let verdict = key.map(|k| validator.check_property(k, &quad.object));
            properties.push(PropertyValue {
                predicate,
                key,
                object: quad.object.clone(),
                verdict,
                ordinal: quad.ordinal,
            });
        }
        if !types.iter().any(|t| is_product_class(t)) {
            return None;
        }
        let source_page = node.page().unwrap_or_default().to_string();
        let pay_level_domain = if source_page.is_empty() {
            String::new()
        } else {
            pld_of(&source_page)
        };
        let mut record = ProductRecord {
            subject: node.subject.clone(),
            source_page,
            pay_level_domain,
            types,
            properties,
            node_valid: false,
            complete: node.complete,
        };
        record.node_valid = check_node(&record).valid;
        Some(record)
    }

    pub fn keys(&self) -> impl Iterator<Item = PropertyKey> + '_ {
        self.properties.iter().filter_map(|p| p.key)
    }

    /// Per-key summary: valid if any value is valid, else invalid if any value
    /// is invalid, else unvalidatable.
    pub fn key_status(&self, key: PropertyKey) -> Option<Status> {
        let mut seen = None;
        for p in self.properties.iter().filter(|p| p.key == Some(key)) {
            match p.verdict.map(|v| v.status) {
                Some(Status::Valid) => return Some(Status::Valid),
                Some(Status::Invalid) => seen = Some(Status::Invalid),
                Some(Status::Unvalidatable) if seen.is_none() => seen = Some(Status::Unvalidatable),
                _ => {}
            }
        }
        seen
    }
}
