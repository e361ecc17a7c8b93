use std::fmt;

use serde::{Deserialize, Serialize};

/// An RDF term as it appears in a WDC N-Quads statement.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Term {
    Iri { value: String },
    BlankNode { label: String },
    Literal(Literal),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub lexical: String,
    #[serde(default, skip_serializing_if = "Annotation::is_plain")]
    pub annotation: Annotation,
}

/// Language tag or datatype attached to a literal. The two are mutually
/// exclusive.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Annotation {
    #[default]
    Plain,
    Language(String),
    Datatype(String),
}

impl Annotation {
    pub fn is_plain(&self) -> bool {
        matches!(self, Annotation::Plain)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermKind {
    Iri,
    BlankNode,
    Literal,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("IRI must not be empty")]
    EmptyIri,
    #[error("blank node label must be non-empty and free of whitespace: {0:?}")]
    BadBlankLabel(String),
    #[error("language tag must be non-empty and free of whitespace: {0:?}")]
    BadLanguageTag(String),
    #[error("predicate must be an IRI")]
    PredicateNotIri,
    #[error("subject must be an IRI or blank node")]
    SubjectIsLiteral,
}

impl Term {
    pub fn iri(value: impl Into<String>) -> Self {
        Term::Iri {
            value: value.into(),
        }
    }

    pub fn blank(label: impl Into<String>) -> Self {
        Term::BlankNode {
            label: label.into(),
        }
    }

    pub fn literal(lexical: impl Into<String>) -> Self {
        Term::Literal(Literal {
            lexical: lexical.into(),
            annotation: Annotation::Plain,
        })
    }

    pub fn lang_literal(lexical: impl Into<String>, tag: impl Into<String>) -> Self {
        Term::Literal(Literal {
            lexical: lexical.into(),
            annotation: Annotation::Language(tag.into()),
        })
    }

    pub fn typed_literal(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        Term::Literal(Literal {
            lexical: lexical.into(),
            annotation: Annotation::Datatype(datatype.into()),
        })
    }

    pub fn kind(&self) -> TermKind {
        match self {
            Term::Iri { .. } => TermKind::Iri,
            Term::BlankNode { .. } => TermKind::BlankNode,
            Term::Literal(_) => TermKind::Literal,
        }
    }

    /// The IRI text, blank node label, or literal lexical form.
    pub fn lexical(&self) -> &str {
        match self {
            Term::Iri { value } => value,
            Term::BlankNode { label } => label,
            Term::Literal(lit) => &lit.lexical,
        }
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri { value } => Some(value),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::BlankNode { .. })
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    pub fn language(&self) -> Option<&str> {
        match self {
            Term::Literal(Literal {
                annotation: Annotation::Language(tag),
                ..
            }) => Some(tag),
            _ => None,
        }
    }

    pub fn datatype(&self) -> Option<&str> {
        match self {
            Term::Literal(Literal {
                annotation: Annotation::Datatype(dt),
                ..
            }) => Some(dt),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), TermError> {
        match self {
            Term::Iri { value } if value.is_empty() => Err(TermError::EmptyIri),
            Term::BlankNode { label } if label.is_empty() || label.chars().any(char::is_whitespace) => {
                Err(TermError::BadBlankLabel(label.clone()))
            }
            Term::Literal(Literal {
                annotation: Annotation::Language(tag),
                ..
            }) if tag.is_empty() || tag.chars().any(char::is_whitespace) => {
                Err(TermError::BadLanguageTag(tag.clone()))
            }
            Term::Literal(Literal {
                annotation: Annotation::Datatype(dt),
                ..
            }) if dt.is_empty() => Err(TermError::EmptyIri),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        super::write::write_term(&mut out, self);
        f.write_str(&out)
    }
}

/// One N-Quads statement. `graph` is `None` for bare triples.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Quad {
    pub subject: Term,
    pub predicate: String,
    pub object: Term,
    pub graph: Option<Term>,
    /// 0-based position in the chunk stream; assigned by the stream, 0 otherwise.
    #[serde(default)]
    pub ordinal: u64,
}

impl Quad {
    pub fn new(subject: Term, predicate: impl Into<String>, object: Term, graph: Option<Term>) -> Self {
        Quad {
            subject,
            predicate: predicate.into(),
            object,
            graph,
            ordinal: 0,
        }
    }

    pub fn validate(&self) -> Result<(), TermError> {
        if self.subject.is_literal() {
            return Err(TermError::SubjectIsLiteral);
        }
        if self.predicate.is_empty() {
            return Err(TermError::PredicateNotIri);
        }
        self.subject.validate()?;
        self.object.validate()?;
        if let Some(g) = &self.graph {
            if g.is_literal() {
                return Err(TermError::SubjectIsLiteral);
            }
            g.validate()?;
        }
        Ok(())
    }

    /// Page URL carried in the graph position, if it is an IRI.
    pub fn page(&self) -> Option<&str> {
        self.graph.as_ref().and_then(Term::as_iri)
    }

    /// Same statement content, ignoring the ordinal.
    pub fn same_statement(&self, other: &Quad) -> bool {
        self.subject == other.subject
            && self.predicate == other.predicate
            && self.object == other.object
            && self.graph == other.graph
    }
}
