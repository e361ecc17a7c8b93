use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use flate2::write::GzEncoder;
use flate2::Compression;
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::slots::{assign_tags, fraction};
use super::truth::{ChunkTruth, GroundTruth, InvalidMode, LanguageTruth, PlantedNode, TagCounts};
use super::words::{lexicon, Lexicon};
use super::{SpecError, SyntheticSpec};
use crate::domains::PldCounts;
use crate::locality::WindowStats;
use crate::nquads::{write_quad_into, Quad, Term, RDF_TYPE};
use crate::stats::{NodeValidityCounts, StatusCounts};
use crate::validity::{PropertyKey, Status, MIN_VALID_PROPERTIES};
use crate::vocab::{Cluster, Variation};

const SCHEMA: &str = "schema.org";
const DATA_VOCABULARY: &str = "data-vocabulary.org";

struct Hosts {
    base: &'static str,
    subdomain: &'static [&'static str],
    sld: &'static [&'static str],
    tld: &'static [&'static str],
}

const SCHEMA_HOSTS: Hosts = Hosts {
    base: SCHEMA,
    subdomain: &["bib.schema.org", "health-lifesci.schema.org", "pending.schema.org"],
    sld: &["scheme.org", "ruschema.org", "shema.org"],
    tld: &["schema.org.cn", "schema.ofg", "schema.org.ru"],
};

const DATA_VOCABULARY_HOSTS: Hosts = Hosts {
    base: DATA_VOCABULARY,
    subdomain: &["www.data-vocabulary.org", "rdf.data-vocabulary.org"],
    sld: &["datavocabulary.org", "data-vocabulery.org"],
    tld: &[],
};

fn host_table() -> HashMap<&'static str, (Cluster, Variation)> {
    let mut table = HashMap::new();
    for (hosts, cluster) in [(&SCHEMA_HOSTS, Cluster::SchemaOrg), (&DATA_VOCABULARY_HOSTS, Cluster::DataVocabulary)] {
        table.insert(hosts.base, (cluster, Variation::Base));
        for (list, variation) in [
            (hosts.subdomain, Variation::SubdomainVariant),
            (hosts.sld, Variation::SldMisspelling),
            (hosts.tld, Variation::TldMisspelling),
        ] {
            for h in list {
                table.insert(*h, (cluster, variation));
            }
        }
    }
    table
}

fn local_name(key: PropertyKey) -> &'static str {
    match key {
        PropertyKey::Name => "name",
        PropertyKey::Description => "description",
        PropertyKey::Image => "image",
        PropertyKey::Url => "url",
        PropertyKey::Offers => "offers",
        PropertyKey::Brand => "brand",
        PropertyKey::Sku => "sku",
        PropertyKey::ProductId => "productID",
        PropertyKey::AggregateRating => "aggregateRating",
        PropertyKey::Price => "price",
    }
}

const VALIDATABLE: [PropertyKey; 9] = [
    PropertyKey::Name,
    PropertyKey::Description,
    PropertyKey::Image,
    PropertyKey::Url,
    PropertyKey::Offers,
    PropertyKey::Brand,
    PropertyKey::Sku,
    PropertyKey::ProductId,
    PropertyKey::AggregateRating,
];

/// Generated chunks (ordinals are stream positions) and their ground truth.
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub chunks: Vec<Vec<Quad>>,
    pub truth: GroundTruth,
}

impl SyntheticCorpus {
    pub fn write_chunk(&self, chunk: usize, out: &mut impl Write) -> io::Result<()> {
        let mut line = String::new();
        for q in &self.chunks[chunk] {
            line.clear();
            write_quad_into(&mut line, q);
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    /// Writes `chunk-NNNN.nq` (or `.nq.gz`) files into `dir`.
    pub fn write_chunks(&self, dir: &Path, gzip: bool) -> io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut paths = Vec::with_capacity(self.chunks.len());
        for c in 0..self.chunks.len() {
            let ext = if gzip { "nq.gz" } else { "nq" };
            let path = dir.join(format!("chunk-{c:04}.{ext}"));
            let file = BufWriter::new(File::create(&path)?);
            if gzip {
                let mut enc = GzEncoder::new(file, Compression::default());
                self.write_chunk(c, &mut enc)?;
                enc.finish()?.flush()?;
            } else {
                let mut file = file;
                self.write_chunk(c, &mut file)?;
                file.flush()?;
            }
            paths.push(path);
        }
        Ok(paths)
    }
}

struct Entity {
    quads: Vec<Quad>,
    class: String,
    window: u64,
    node: Option<usize>,
}

struct PendingText {
    entity: usize,
    quad: usize,
    language: usize,
}

#[derive(Clone, Copy, PartialEq)]
enum Layout {
    NameShorter,
    NameLonger,
}

struct PropertyPlan {
    values: BTreeMap<PropertyKey, bool>,
    mode: Option<InvalidMode>,
    layout: Layout,
}

fn count_valid(values: &BTreeMap<PropertyKey, bool>) -> usize {
    values.iter().filter(|(k, v)| k.is_validatable() && **v).count()
}

fn top_up(values: &mut BTreeMap<PropertyKey, bool>, excluded: Option<PropertyKey>, rng: &mut impl Rng) {
    while count_valid(values) < MIN_VALID_PROPERTIES {
        let candidates: Vec<PropertyKey> = VALIDATABLE
            .into_iter()
            .filter(|k| Some(*k) != excluded && values.get(k) != Some(&true))
            .collect();
        let k = *candidates.choose(rng).expect("enough keys to reach the minimum");
        values.insert(k, true);
    }
}

fn plan_properties(spec: &SyntheticSpec, valid: bool, rng: &mut impl Rng) -> PropertyPlan {
    let mut values = BTreeMap::new();
    for key in PropertyKey::ALL {
        if rng.gen_bool(spec.property_mix.get(&key).copied().unwrap_or(0.0)) {
            let ok = !key.is_validatable() || rng.gen_bool(spec.validity_rates.get(&key).copied().unwrap_or(1.0));
            values.insert(key, ok);
        }
    }
    let mut layout = Layout::NameShorter;
    let mode = if valid {
        values.insert(PropertyKey::Name, true);
        values.insert(PropertyKey::Description, true);
        top_up(&mut values, None, rng);
        None
    } else {
        let mode = *[
            InvalidMode::FewValidProperties,
            InvalidMode::NameNotShorter,
            InvalidMode::NoValidName,
            InvalidMode::NoValidDescription,
        ]
        .choose(rng)
        .unwrap();
        match mode {
            InvalidMode::FewValidProperties => {
                while count_valid(&values) >= MIN_VALID_PROPERTIES {
                    let valid: Vec<PropertyKey> =
                        values.iter().filter(|(k, v)| k.is_validatable() && **v).map(|(k, _)| *k).collect();
                    let k = *valid.choose(rng).unwrap();
                    if rng.gen_bool(0.5) {
                        values.remove(&k);
                    } else {
                        values.insert(k, false);
                    }
                }
            }
            InvalidMode::NameNotShorter => {
                values.insert(PropertyKey::Name, true);
                values.insert(PropertyKey::Description, true);
                top_up(&mut values, None, rng);
                layout = Layout::NameLonger;
            }
            InvalidMode::NoValidName | InvalidMode::NoValidDescription => {
                let (missing, kept) = if mode == InvalidMode::NoValidName {
                    (PropertyKey::Name, PropertyKey::Description)
                } else {
                    (PropertyKey::Description, PropertyKey::Name)
                };
                if rng.gen_bool(0.5) {
                    values.remove(&missing);
                } else {
                    values.insert(missing, false);
                }
                values.insert(kept, true);
                top_up(&mut values, Some(missing), rng);
            }
        }
        Some(mode)
    };
    PropertyPlan { values, mode, layout }
}

fn words(lex: &Lexicon, n: usize, rng: &mut impl Rng) -> String {
    (0..n)
        .map(|i| if i % 2 == 0 { *lex.adjectives.choose(rng).unwrap() } else { *lex.nouns.choose(rng).unwrap() })
        .collect::<Vec<_>>()
        .join(" ")
}

struct NodeContext<'a> {
    index: usize,
    host: &'a str,
    page: String,
    site: String,
    graph: Term,
}

impl NodeContext<'_> {
    fn quad(&self, subject: &Term, predicate: String, object: Term) -> Quad {
        Quad::new(subject.clone(), predicate, object, Some(self.graph.clone()))
    }
}

fn invalid_text(ctx: &NodeContext, rng: &mut impl Rng) -> Term {
    match rng.gen_range(0..5) {
        0 => Term::literal("null"),
        1 => Term::literal("N/A"),
        2 => Term::literal("   "),
        3 => Term::literal(ctx.page.clone()),
        _ => Term::iri(format!("{}#text", ctx.page)),
    }
}

/// Builds a non-text value of `key`, pushing any entity it points to.
fn value(key: PropertyKey, ok: bool, ctx: &NodeContext, extra: &mut Vec<Entity>, rng: &mut impl Rng) -> Term {
    let i = ctx.index;
    let schema = |local: &str| format!("http://{SCHEMA}/{local}");
    match (key, ok) {
        (PropertyKey::Image, true) => match rng.gen_range(0..2) {
            0 => Term::iri(format!("{}/img/{i}.jpg", ctx.site)),
            _ => Term::literal(format!("https://cdn.{}/img/{i}.jpg", ctx.site.trim_start_matches("http://"))),
        },
        (PropertyKey::Image, false) => match rng.gen_range(0..3) {
            0 => Term::literal(format!("img/{i}.jpg")),
            1 => Term::literal("N/A"),
            _ => Term::blank(format!("img{i}")),
        },
        (PropertyKey::Url, true) => match rng.gen_range(0..2) {
            0 => Term::iri(ctx.page.clone()),
            _ => Term::literal(ctx.page.clone()),
        },
        (PropertyKey::Url, false) => match rng.gen_range(0..3) {
            0 => Term::literal("see website"),
            1 => Term::literal("null"),
            _ => Term::blank(format!("url{i}")),
        },
        (PropertyKey::Offers, true) => {
            if rng.gen_bool(0.8) {
                let subject = Term::blank(format!("o{i}"));
                let cents = rng.gen_range(100..100_000u32);
                extra.push(Entity {
                    quads: vec![
                        ctx.quad(&subject, RDF_TYPE.into(), Term::iri(schema("Offer"))),
                        ctx.quad(&subject, schema("Offer/price"), Term::literal(format!("{}.{:02}", cents / 100, cents % 100))),
                        ctx.quad(&subject, schema("Offer/priceCurrency"), Term::literal("EUR")),
                    ],
                    class: schema("Offer"),
                    window: 0,
                    node: None,
                });
                subject
            } else {
                Term::iri(format!("{}#offer", ctx.page))
            }
        }
        (PropertyKey::Offers, false) => match rng.gen_range(0..2) {
            0 => Term::literal("free shipping"),
            _ => Term::literal("19.99"),
        },
        (PropertyKey::Brand, true) => match rng.gen_range(0..3) {
            0 => Term::literal(format!("Brand{}", i % 97)),
            1 => Term::iri(format!("{}/brand/{}", ctx.site, i % 97)),
            _ => {
                let subject = Term::blank(format!("b{i}"));
                extra.push(Entity {
                    quads: vec![
                        ctx.quad(&subject, RDF_TYPE.into(), Term::iri(schema("Brand"))),
                        ctx.quad(&subject, schema("Brand/name"), Term::literal(format!("Brand{}", i % 97))),
                    ],
                    class: schema("Brand"),
                    window: 0,
                    node: None,
                });
                subject
            }
        },
        (PropertyKey::Brand, false) => match rng.gen_range(0..3) {
            0 => Term::literal(""),
            1 => Term::literal("null"),
            _ => Term::literal(" \t "),
        },
        (PropertyKey::Sku, true) => Term::literal(format!("SKU-{i:06}")),
        (PropertyKey::ProductId, true) => Term::literal(format!("{i:08}")),
        (PropertyKey::Sku | PropertyKey::ProductId, false) => match rng.gen_range(0..3) {
            0 => Term::literal(""),
            1 => Term::literal("n/a"),
            _ => Term::iri(format!("{}/id/{i}", ctx.site)),
        },
        (PropertyKey::AggregateRating, true) => {
            let subject = Term::blank(format!("r{i}"));
            extra.push(Entity {
                quads: vec![
                    ctx.quad(&subject, RDF_TYPE.into(), Term::iri(schema("AggregateRating"))),
                    ctx.quad(&subject, schema("AggregateRating/ratingValue"), Term::literal(format!("{}.{}", rng.gen_range(1..5), rng.gen_range(0..10)))),
                ],
                class: schema("AggregateRating"),
                window: 0,
                node: None,
            });
            subject
        }
        (PropertyKey::AggregateRating, false) => match rng.gen_range(0..2) {
            0 => Term::literal("4.5"),
            _ => Term::iri(format!("{}/reviews/{i}", ctx.site)),
        },
        (PropertyKey::Price, _) => Term::literal(format!("€ {},{:02}", rng.gen_range(1..500), rng.gen_range(0..100))),
        (PropertyKey::Name | PropertyKey::Description, _) => unreachable!("texts are built by the caller"),
    }
}

fn pick_host(spec: &SyntheticSpec, rng: &mut impl Rng) -> &'static str {
    let hosts = if rng.gen_bool(spec.variants.data_vocabulary) { &DATA_VOCABULARY_HOSTS } else { &SCHEMA_HOSTS };
    let v = &spec.variants;
    let r: f64 = rng.gen();
    let list = if r < v.subdomain {
        hosts.subdomain
    } else if r < v.subdomain + v.sld_misspelling {
        hosts.sld
    } else if r < v.subdomain + v.sld_misspelling + v.tld_misspelling {
        hosts.tld
    } else {
        &[]
    };
    list.choose(rng).copied().unwrap_or(hosts.base)
}

fn pld_names(count: usize) -> Vec<String> {
    (0..count)
        .map(|k| match k % 4 {
            0 => format!("shop{k}.com"),
            1 => format!("store{k}.co.uk"),
            2 => format!("markt{k}.de"),
            _ => format!("boutique{k}.fr"),
        })
        .collect()
}

fn cumulative(weights: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

fn sample_cumulative(cdf: &[f64], rng: &mut impl Rng) -> usize {
    let x = rng.gen::<f64>() * cdf.last().copied().unwrap_or(0.0);
    cdf.partition_point(|&c| c <= x).min(cdf.len() - 1)
}

/// Lays entities out so that each one spans exactly its planned window:
/// first quad at `start`, last at `start + window`, the rest in free slots
/// between. Returns the position of every quad per entity.
fn schedule(entities: &[Entity], order: &[usize], rng: &mut impl Rng) -> (Vec<Vec<usize>>, Vec<bool>) {
    let mut occupied: Vec<bool> = Vec::new();
    let mut positions = vec![Vec::new(); entities.len()];
    let mut cursor = 0usize;
    for &e in order {
        let q = entities[e].quads.len();
        let w = entities[e].window as usize;
        let mut start = cursor;
        let placed = loop {
            if occupied.len() < start + w + 1 {
                occupied.resize(start + w + 1, false);
            }
            if !occupied[start] && !occupied[start + w] {
                if q == 1 {
                    break vec![start];
                }
                let free: Vec<usize> = (start + 1..start + w).filter(|&p| !occupied[p]).collect();
                if free.len() >= q - 2 {
                    let mut middle: Vec<usize> = index::sample(rng, free.len(), q - 2).into_iter().map(|j| free[j]).collect();
                    middle.sort_unstable();
                    let mut all = Vec::with_capacity(q);
                    all.push(start);
                    all.extend(middle);
                    all.push(start + w);
                    break all;
                }
            }
            start += 1;
        };
        for &p in &placed {
            occupied[p] = true;
        }
        positions[e] = placed;
        while cursor < occupied.len() && occupied[cursor] {
            cursor += 1;
        }
    }
    let end = occupied.iter().rposition(|&o| o).map_or(0, |p| p + 1);
    occupied.truncate(end);
    (positions, occupied)
}

fn concept_host(uri: &str) -> &str {
    let rest = uri.split_once("://").map_or(uri, |(_, r)| r);
    rest.split('/').next().unwrap_or("")
}

/// Generates a corpus and its ground truth. Identical specs give identical
/// output.
pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticCorpus, SpecError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let languages: Vec<&Lexicon> = spec.languages.keys().map(|c| lexicon(c).expect("validated")).collect();
    let language_cdf = cumulative(spec.languages.values().copied());
    let plds = pld_names(spec.plds.count);
    let pld_cdf = cumulative((1..=spec.plds.count).map(|r| 1.0 / (r as f64).powf(spec.plds.exponent)));

    let n_valid = (spec.valid_node_rate * spec.nodes as f64).round() as usize;
    let mut validity: Vec<bool> = (0..spec.nodes).map(|i| i < n_valid).collect();
    validity.shuffle(&mut rng);

    let mut entities: Vec<Entity> = Vec::new();
    let mut pending: Vec<PendingText> = Vec::new();
    let mut nodes: Vec<PlantedNode> = Vec::with_capacity(spec.nodes);
    let mut node_entities: Vec<Vec<usize>> = Vec::with_capacity(spec.nodes);

    for (i, &valid) in validity.iter().enumerate() {
        let lang = sample_cumulative(&language_cdf, &mut rng);
        let lex = languages[lang];
        let pld = &plds[sample_cumulative(&pld_cdf, &mut rng)];
        let sub = *["www", "shop", "m"].choose(&mut rng).unwrap();
        let site = format!("http://{sub}.{pld}");
        let page = format!("{site}/product/{i}");
        let host = pick_host(spec, &mut rng);
        let ctx = NodeContext { index: i, host, page: page.clone(), site, graph: Term::iri(page.clone()) };
        let plan = plan_properties(spec, valid, &mut rng);

        let subject = Term::blank(format!("p{i}"));
        let class = format!("http://{}/Product", ctx.host);
        let canonical_class = if DATA_VOCABULARY_HOSTS.base == host
            || DATA_VOCABULARY_HOSTS.subdomain.contains(&host)
            || DATA_VOCABULARY_HOSTS.sld.contains(&host)
        {
            format!("http://{DATA_VOCABULARY}/Product")
        } else {
            format!("http://{SCHEMA}/Product")
        };

        let short = format!("{} {i}", words(lex, 2, &mut rng));
        let long = format!("{short} {}", words(lex, rng.gen_range(3..9), &mut rng));
        let (name_text, description_text) = match plan.layout {
            Layout::NameShorter => (short, long),
            Layout::NameLonger => (format!("{long} {}", words(lex, rng.gen_range(1..4), &mut rng)), long),
        };

        let product = entities.len();
        let mut quads = vec![ctx.quad(&subject, RDF_TYPE.into(), Term::iri(class))];
        let mut extra = Vec::new();
        let mut properties = BTreeMap::new();
        for (&key, &ok) in &plan.values {
            let predicate = format!("http://{}/Product/{}", ctx.host, local_name(key));
            let object = match key {
                PropertyKey::Name if ok => Term::literal(name_text.clone()),
                PropertyKey::Description if ok => Term::literal(description_text.clone()),
                PropertyKey::Name | PropertyKey::Description => invalid_text(&ctx, &mut rng),
                _ => value(key, ok, &ctx, &mut extra, &mut rng),
            };
            let status = match (key.is_validatable(), ok) {
                (false, _) => Status::Unvalidatable,
                (true, true) => Status::Valid,
                (true, false) => Status::Invalid,
            };
            properties.insert(key, status);
            quads.push(ctx.quad(&subject, predicate, object));
        }
        quads[1..].shuffle(&mut rng);
        let text_positions: Vec<usize> = quads
            .iter()
            .enumerate()
            .filter(|(_, q)| {
                q.object.as_literal().is_some_and(|l| l.lexical == name_text || l.lexical == description_text)
                    && matches!(PropertyKey::from_predicate(&q.predicate), Some(PropertyKey::Name | PropertyKey::Description))
            })
            .map(|(j, _)| j)
            .collect();
        pending.extend(text_positions.into_iter().map(|j| PendingText { entity: product, quad: j, language: lang }));

        let mut ids = vec![product];
        entities.push(Entity { quads, class: canonical_class, window: 0, node: Some(i) });
        for e in extra {
            ids.push(entities.len());
            entities.push(e);
        }
        node_entities.push(ids);
        nodes.push(PlantedNode {
            chunk: 0,
            subject: format!("p{i}"),
            page,
            pld: pld.clone(),
            vocabulary_host: host.to_string(),
            language: lex.code.to_string(),
            valid,
            invalid_mode: plan.mode,
            properties,
            window: 0,
        });
    }

    // Declared tags.
    let truth_langs: Vec<usize> = pending.iter().map(|p| p.language).collect();
    let declared = assign_tags(&truth_langs, languages.len(), spec.tag_correctness, &mut rng);
    let (num, den) = fraction(spec.tag_correctness);
    let mut language = LanguageTruth { rate_numerator: num, rate_denominator: den, ..Default::default() };
    for (p, d) in pending.iter().zip(&declared) {
        let quad = &mut entities[p.entity].quads[p.quad];
        let text = quad.object.lexical().to_string();
        language.literal_languages.insert(text.clone(), languages[p.language].code.to_string());
        match d {
            Some(l) => {
                let tag = *languages[*l].tags.choose(&mut rng).unwrap();
                quad.object = Term::lang_literal(text, tag);
                let counts = language.declared.entry(languages[*l].code.to_string()).or_insert_with(TagCounts::default);
                if *l == p.language {
                    counts.correct += 1;
                } else {
                    counts.wrong += 1;
                }
            }
            None => language.untagged += 1,
        }
    }

    // Windows.
    let mut forced = spec.spread.tail_rate > 0.0;
    for ids in &node_entities {
        for &e in ids {
            let q = entities[e].quads.len() as u64;
            let min = q.saturating_sub(1);
            entities[e].window = if q <= 1 {
                0
            } else if forced {
                forced = false;
                spec.spread.max_spread.max(min)
            } else if rng.gen_bool(spec.spread.tail_rate) {
                rng.gen_range(min..=spec.spread.max_spread.max(min))
            } else {
                min
            };
        }
    }

    // Chunks.
    let table = host_table();
    let mut truth = GroundTruth {
        spec: spec.clone(),
        quads: 0,
        chunks: Vec::with_capacity(spec.chunks),
        product_nodes: spec.nodes as u64,
        node_validity: NodeValidityCounts { valid: n_valid as u64, invalid: (spec.nodes - n_valid) as u64 },
        property_frequency: BTreeMap::new(),
        property_validity: BTreeMap::new(),
        entity_classes: BTreeMap::new(),
        variations: BTreeMap::new(),
        language,
        windows: WindowStats::default(),
        product_windows: WindowStats::default(),
        pld_counts: PldCounts::default(),
        nodes: Vec::new(),
    };
    let mut chunks = Vec::with_capacity(spec.chunks);
    let mut filler_count = 0usize;
    for c in 0..spec.chunks {
        let range = c * spec.nodes / spec.chunks..(c + 1) * spec.nodes / spec.chunks;
        let order: Vec<usize> = range.clone().flat_map(|n| node_entities[n].iter().copied()).collect();
        let (positions, occupied) = schedule(&entities, &order, &mut rng);
        let mut stream: Vec<Option<Quad>> = vec![None; occupied.len()];
        for &e in &order {
            for (quad, &p) in entities[e].quads.iter().zip(&positions[e]) {
                stream[p] = Some(quad.clone());
            }
        }
        let page = Term::iri(format!("http://www.{}/category/{c}", plds[0]));
        let mut fillers = 0u64;
        for slot in stream.iter_mut().filter(|s| s.is_none()) {
            let class = if rng.gen_bool(0.5) {
                format!("http://{SCHEMA}/ListItem")
            } else {
                format!("http://{DATA_VOCABULARY}/Breadcrumb")
            };
            *slot = Some(Quad::new(Term::blank(format!("f{filler_count}")), RDF_TYPE, Term::iri(class.clone()), Some(page.clone())));
            *truth.entity_classes.entry(class).or_default() += 1;
            truth.windows.record(0);
            filler_count += 1;
            fillers += 1;
        }
        let quads: Vec<Quad> = stream
            .into_iter()
            .enumerate()
            .map(|(p, q)| {
                let mut q = q.expect("every slot filled");
                q.ordinal = p as u64;
                q
            })
            .collect();
        for &e in &order {
            let entity = &entities[e];
            *truth.entity_classes.entry(entity.class.clone()).or_default() += 1;
            truth.windows.record(entity.window);
            if let Some(n) = entity.node {
                truth.product_windows.record(entity.window);
                nodes[n].chunk = c;
                nodes[n].window = entity.window;
            }
        }
        for q in &quads {
            let mut concept = |uri: &str| {
                let (cluster, variation) = if uri == RDF_TYPE {
                    (Cluster::Other, Variation::NotApplicable)
                } else {
                    table.get(concept_host(uri)).copied().unwrap_or((Cluster::Other, Variation::NotApplicable))
                };
                *truth.variations.entry(cluster.as_str().into()).or_default().entry(variation.as_str().into()).or_default() += 1;
            };
            concept(&q.predicate);
            if q.predicate == RDF_TYPE {
                if let Some(class) = q.object.as_iri() {
                    concept(class);
                }
            }
        }
        truth.quads += quads.len() as u64;
        truth.chunks.push(ChunkTruth { quads: quads.len() as u64, fillers, product_nodes: range.len() as u64 });
        chunks.push(quads);
    }

    for node in &nodes {
        truth.pld_counts.add(&node.pld);
        for (&key, &status) in &node.properties {
            *truth.property_frequency.entry(key).or_default() += 1;
            truth.property_validity.entry(key).or_insert_with(StatusCounts::default).add(status);
        }
    }
    truth.nodes = nodes;
    Ok(SyntheticCorpus { chunks, truth })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locality::window_distribution;
    use crate::vocab::VocabNormalizer;

    fn small() -> SyntheticSpec {
        SyntheticSpec { nodes: 300, chunks: 2, seed: 11, ..Default::default() }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate(&small()).unwrap();
        let b = generate(&small()).unwrap();
        assert_eq!(a.chunks, b.chunks);
        assert_eq!(a.truth, b.truth);
        let c = generate(&SyntheticSpec { seed: 12, ..small() }).unwrap();
        assert_ne!(a.chunks, c.chunks);
    }

    #[test]
    fn planted_windows_are_exact() {
        let corpus = generate(&small()).unwrap();
        let mut measured = WindowStats::default();
        for chunk in &corpus.chunks {
            measured.merge(&window_distribution(chunk));
        }
        assert_eq!(measured, corpus.truth.windows);
        assert_eq!(measured.max(), Some(corpus.truth.spec.spread.max_spread));
    }

    #[test]
    fn planted_hosts_classify_as_planted() {
        let normalizer = VocabNormalizer::default();
        for (host, (cluster, variation)) in host_table() {
            let c = normalizer.classify(&format!("http://{host}/Product"));
            assert_eq!((c.cluster, c.variation), (cluster, variation), "{host}");
        }
    }

    #[test]
    fn exact_node_quota() {
        let spec = SyntheticSpec { nodes: 1000, valid_node_rate: 0.1066, ..small() };
        let corpus = generate(&spec).unwrap();
        assert_eq!(corpus.truth.node_validity.valid, 107);
        assert_eq!(corpus.truth.nodes.iter().filter(|n| n.valid).count(), 107);
    }
}
