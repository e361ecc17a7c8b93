//! Strategies and oracles shared by the property tests and the acceptance
//! suite.
#![allow(dead_code)]

use std::collections::HashMap;

use proptest::prelude::*;
use wdcprod_core::domains::PublicSuffixList;
use wdcprod_core::locality::WindowStats;
use wdcprod_core::nquads::{parse_quad, write_quad, Quad, Term};
use wdcprod_core::pipeline::{process_chunk, ChunkSinks, Context};
use wdcprod_core::stats::ProfileStats;
use wdcprod_core::validity::{PropertyKey, Rule, Status};
use wdcprod_core::vocab::VocabNormalizer;

pub fn iri() -> impl Strategy<Value = String> {
    prop_oneof![
        "https?://[a-z0-9.-]{1,12}\\.[a-z]{2,4}/[A-Za-z0-9/_.~%-]{0,16}",
        "[a-z]{1,6}:\\PC{1,20}",
        "http://example\\.org/[<>\"{}|^`\\\\ \t]{1,4}\\PC{0,6}",
        any::<String>().prop_filter("non-empty", |s| !s.is_empty()),
    ]
}

pub fn blank() -> impl Strategy<Value = Term> {
    "[A-Za-z0-9_\\p{L}]([A-Za-z0-9_.\\p{L}-]{0,10}[A-Za-z0-9_-])?".prop_map(Term::blank)
}

pub fn literal() -> impl Strategy<Value = Term> {
    let lexical = prop_oneof![
        any::<String>(),
        "\\PC{0,30}",
        "[\"\\\\\n\r\t\u{0}-\u{1f}\u{7f} a-z]{0,12}",
    ];
    prop_oneof![
        lexical.clone().prop_map(Term::literal),
        (lexical.clone(), "[a-z]{2,3}(-[A-Za-z0-9]{2,8}){0,2}").prop_map(|(l, t)| Term::lang_literal(l, t)),
        (lexical, iri()).prop_map(|(l, d)| Term::typed_literal(l, d)),
    ]
}

pub fn resource() -> impl Strategy<Value = Term> {
    prop_oneof![iri().prop_map(Term::iri), blank()]
}

pub fn quad() -> impl Strategy<Value = Quad> {
    (
        resource(),
        iri(),
        prop_oneof![resource(), literal()],
        proptest::option::weighted(0.8, resource()),
    )
        .prop_map(|(s, p, o, g)| Quad::new(s, p, o, g))
}

/// Edits a valid line without adding line breaks.
#[derive(Debug, Clone)]
pub enum Mutation {
    Delete(usize),
    Insert(usize, char),
    Truncate(usize),
    Duplicate(usize, usize),
}

pub fn mutation() -> impl Strategy<Value = Mutation> {
    let noise = prop_oneof![
        prop::sample::select(vec!['<', '>', '"', '\\', ' ', '.', '_', ':', '@', '^', '#', '\t', 'u', '\u{0}']),
        any::<char>().prop_filter("no line breaks", |c| *c != '\n' && *c != '\r'),
    ];
    prop_oneof![
        any::<usize>().prop_map(Mutation::Delete),
        (any::<usize>(), noise).prop_map(|(i, c)| Mutation::Insert(i, c)),
        any::<usize>().prop_map(Mutation::Truncate),
        (any::<usize>(), any::<usize>()).prop_map(|(a, b)| Mutation::Duplicate(a, b)),
    ]
}

pub fn mutate(line: &str, m: &Mutation) -> String {
    let chars: Vec<char> = line.chars().collect();
    let n = chars.len().max(1);
    let mut out = chars.clone();
    match *m {
        Mutation::Delete(i) if !chars.is_empty() => {
            out.remove(i % chars.len());
        }
        Mutation::Delete(_) => {}
        Mutation::Insert(i, c) => out.insert(i % (chars.len() + 1), c),
        Mutation::Truncate(i) => out.truncate(i % n),
        Mutation::Duplicate(a, b) => {
            let (a, b) = (a % n, b % n);
            let (lo, hi) = (a.min(b), a.max(b).min(chars.len()));
            let piece: Vec<char> = chars[lo..hi].to_vec();
            out.splice(hi..hi, piece);
        }
    }
    out.into_iter().collect()
}

/// Random pages of product-ish statements: variant vocabulary hosts, the
/// ten properties with good and bad values, tagged and numeric literals.
pub fn product_lines(max_pages: usize) -> impl Strategy<Value = String> {
    let hosts = prop::sample::select(vec![
        "http://schema.org/",
        "https://schema.org/",
        "http://bib.schema.org/",
        "http://scheme.org/",
        "http://schema.org.cn/",
        "http://www.data-vocabulary.org/",
        "http://rdf.data-vocabulary.org/",
        "http://example.com/vocab/",
    ]);
    let props = prop::sample::select(vec![
        "name", "description", "image", "url", "offers", "brand", "sku", "productID", "aggregateRating", "price", "color",
    ]);
    let object = prop_oneof![
        "[a-z]{1,8}( [a-z]{1,8}){0,5}".prop_map(|s| format!("\"{s}\"")),
        ("[a-z]{2,10}( [a-z]{2,8}){0,4}", prop::sample::select(vec!["en", "de", "en-GB", "fr", "EN"]))
            .prop_map(|(s, t)| format!("\"{s}\"@{t}")),
        "[0-9]{1,6}".prop_map(|s| format!("\"{s}\"")),
        prop::sample::select(vec!["\"null\"", "\"N/A\"", "\"  \"", "\"http://x.org/a\"", "_:o1", "<http://x.org/img.jpg>"])
            .prop_map(str::to_string),
    ];
    let statement = (hosts.clone(), props, object).prop_map(|(h, p, o)| (format!("{h}Product/{p}"), o));
    let page = (
        0u8..20,
        prop::sample::select(vec!["shop.com", "www.store.co.uk", "a.b.example.de", "localhost"]),
        hosts,
        prop::sample::select(vec!["Product", "Offer", "Brand"]),
        prop::collection::vec(statement, 0..12),
    );
    prop::collection::vec(page, 1..=max_pages.max(1)).prop_map(|pages| {
        let mut out = String::new();
        for (i, (id, domain, host, class, statements)) in pages.into_iter().enumerate() {
            let graph = format!("<http://{domain}/p/{i}>");
            let subject = format!("_:n{id}");
            out.push_str(&format!("{subject} <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <{host}{class}> {graph} .\n"));
            for (p, o) in statements {
                out.push_str(&format!("{subject} <{p}> {o} {graph} .\n"));
            }
        }
        out
    })
}

pub fn context(normalizer: &VocabNormalizer) -> Context<'_> {
    let mut ctx = Context::new(normalizer, PublicSuffixList::bundled());
    ctx.sample_rate = 1.0;
    ctx
}

pub fn profile_text(text: &str, index: u64, ctx: &Context<'_>) -> ProfileStats {
    let outcome = process_chunk(text.as_bytes(), false, index, ctx, None, &mut ChunkSinks::default());
    assert_eq!(outcome.error, None);
    outcome.stats
}

/// Random stream over a pool of subjects, ordinals set to positions.
pub fn subject_stream(max_len: usize) -> impl Strategy<Value = Vec<Quad>> {
    (1usize..200, 0usize..=max_len).prop_flat_map(|(pool, len)| {
        prop::collection::vec(0..pool, len).prop_map(|ids| {
            ids.into_iter()
                .enumerate()
                .map(|(i, id)| {
                    let mut q = Quad::new(Term::blank(format!("s{id}")), "http://schema.org/name", Term::literal("x"), None);
                    q.ordinal = i as u64;
                    q
                })
                .collect()
        })
    })
}

/// Quadratic window oracle: for each first occurrence, scan the whole tail
/// for the subject's last quad.
pub fn brute_force_windows(quads: &[Quad]) -> WindowStats {
    let mut ids: HashMap<&Term, u32> = HashMap::new();
    let seq: Vec<u32> = quads
        .iter()
        .map(|q| {
            let next = ids.len() as u32;
            *ids.entry(&q.subject).or_insert(next)
        })
        .collect();
    let mut stats = WindowStats::default();
    for i in 0..seq.len() {
        if seq[..i].contains(&seq[i]) {
            continue;
        }
        let mut last = i;
        for (j, s) in seq.iter().enumerate().skip(i + 1) {
            if *s == seq[i] {
                last = j;
            }
        }
        stats.record((last - i) as u64);
    }
    stats
}

/// Line offsets where no subject has quads on both sides.
pub fn closed_cuts(quads: &[Quad]) -> Vec<usize> {
    let mut last: HashMap<&Term, usize> = HashMap::new();
    for (i, q) in quads.iter().enumerate() {
        last.insert(&q.subject, i);
    }
    let mut reach = 0;
    let mut cuts = Vec::new();
    for (i, q) in quads.iter().enumerate() {
        if i > 0 && reach < i {
            cuts.push(i);
        }
        reach = reach.max(last[&q.subject]);
    }
    cuts
}

pub fn lines(quads: &[Quad]) -> String {
    let mut out = String::new();
    for q in quads {
        out.push_str(&write_quad(q));
        out.push('\n');
    }
    out
}

pub struct RuleCase {
    pub line: usize,
    pub key: PropertyKey,
    pub object: Term,
    pub status: Status,
    pub rule: Option<Rule>,
}

/// The committed property-rule fixture.
pub fn rule_cases() -> Vec<RuleCase> {
    let text = include_str!("../fixtures/property_rules.tsv");
    let kebab = |s: &str| serde_json::Value::String(s.to_string());
    text.lines()
        .enumerate()
        .skip(1)
        .map(|(i, row)| {
            let cols: Vec<&str> = row.split('\t').collect();
            assert_eq!(cols.len(), 4, "fixture line {}", i + 1);
            let key = PropertyKey::from_predicate(cols[0]).unwrap_or_else(|| panic!("unknown property {}", cols[0]));
            let statement = format!("_:s <http://schema.org/Product/{}> {} <http://shop.com/> .", cols[0], cols[1]);
            let object = parse_quad(&statement).unwrap_or_else(|e| panic!("fixture line {}: {e}", i + 1)).object;
            RuleCase {
                line: i + 1,
                key,
                object,
                status: serde_json::from_value(kebab(cols[2])).unwrap(),
                rule: (!cols[3].is_empty()).then(|| serde_json::from_value(kebab(cols[3])).unwrap()),
            }
        })
        .collect()
}

/// Profiles a generated corpus whole, then again split at the chosen
/// closed cuts with each part as its own chunk.
pub fn serial_and_chunked(seed: u64, nodes: usize, picks: &[bool]) -> (ProfileStats, ProfileStats, usize) {
    let corpus = wdcprod_core::synth::generate(&wdcprod_core::synth::SyntheticSpec { nodes, seed, ..Default::default() }).unwrap();
    let quads = &corpus.chunks[0];
    let normalizer = VocabNormalizer::default();
    let ctx = context(&normalizer);
    let serial = profile_text(&lines(quads), 0, &ctx);
    let mut bounds = vec![0];
    bounds.extend(closed_cuts(quads).into_iter().zip(picks.iter().cycle()).filter(|(_, p)| **p).map(|(c, _)| c));
    bounds.push(quads.len());
    let mut merged = ProfileStats::default();
    for (i, w) in bounds.windows(2).enumerate() {
        merged.merge(&profile_text(&lines(&quads[w[0]..w[1]]), i as u64, &ctx));
    }
    (serial, merged, bounds.len() - 1)
}
