//! Tolerant, order-preserving N-Quads reading and writing for WDC chunk files.
//!
//! Parsing recovers per line: a malformed statement is counted and skipped
//! without affecting its neighbours. IRIs are only checked for bracket shape;
//! literal datatypes are kept but not interpreted.

mod parse;
mod stream;
mod term;
mod write;

pub use parse::{parse_quad, ParseError, ParseErrorKind};
pub use stream::{stream_chunk, MalformedSample, ParseReport, QuadStream, StreamError, StreamOptions};
pub use term::{Annotation, Literal, Quad, Term, TermError, TermKind};
pub use write::{write_quad, write_quad_into};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
