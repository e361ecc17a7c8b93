use std::fmt::Write as _;

use super::term::{Annotation, Quad, Term};

fn escape_iri(out: &mut String, iri: &str) {
    for c in iri.chars() {
        match c {
            '\u{0}'..='\u{20}' | '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
}

fn escape_literal(out: &mut String, lexical: &str) {
    for c in lexical.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c == '\u{7f}' => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
}

pub(crate) fn write_term(out: &mut String, term: &Term) {
    match term {
        Term::Iri { value } => {
            out.push('<');
            escape_iri(out, value);
            out.push('>');
        }
        Term::BlankNode { label } => {
            out.push_str("_:");
            out.push_str(label);
        }
        Term::Literal(lit) => {
            out.push('"');
            escape_literal(out, &lit.lexical);
            out.push('"');
            match &lit.annotation {
                Annotation::Plain => {}
                Annotation::Language(tag) => {
                    out.push('@');
                    out.push_str(tag);
                }
                Annotation::Datatype(dt) => {
                    out.push_str("^^<");
                    escape_iri(out, dt);
                    out.push('>');
                }
            }
        }
    }
}

/// Serializes a quad as one canonical N-Quads line, without the newline.
pub fn write_quad(quad: &Quad) -> String {
    let mut out = String::with_capacity(128);
    write_quad_into(&mut out, quad);
    out
}

pub fn write_quad_into(out: &mut String, quad: &Quad) {
    write_term(out, &quad.subject);
    out.push_str(" <");
    escape_iri(out, &quad.predicate);
    out.push_str("> ");
    write_term(out, &quad.object);
    if let Some(g) = &quad.graph {
        out.push(' ');
        write_term(out, g);
    }
    out.push_str(" .");
}
