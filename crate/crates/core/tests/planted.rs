use std::collections::BTreeMap;

use wdcprod_core::domains::PublicSuffixList;
use wdcprod_core::locality::{assemble_nodes, AssemblyConfig};
use wdcprod_core::pipeline::{process_chunk, ChunkSinks, Context};
use wdcprod_core::stats::ProfileStats;
use wdcprod_core::synth::{generate, SyntheticCorpus, SyntheticSpec};
use wdcprod_core::validity::check_node;
use wdcprod_core::vocab::VocabNormalizer;

fn profile(corpus: &SyntheticCorpus, ctx: &Context<'_>) -> ProfileStats {
    let mut total = ProfileStats::default();
    for c in 0..corpus.chunks.len() {
        let mut bytes = Vec::new();
        corpus.write_chunk(c, &mut bytes).unwrap();
        let outcome = process_chunk(bytes.as_slice(), false, c as u64, ctx, None, &mut ChunkSinks::default());
        assert_eq!(outcome.error, None);
        assert_eq!(outcome.parse.malformed_lines, 0);
        total.merge(&outcome.stats);
    }
    total
}

#[test]
fn profile_reproduces_every_planted_count() {
    let spec = SyntheticSpec { nodes: 2000, chunks: 3, seed: 5, ..Default::default() };
    let corpus = generate(&spec).unwrap();
    let truth = &corpus.truth;
    let oracle = truth.oracle();
    let normalizer = VocabNormalizer::default();
    let mut ctx = Context::new(&normalizer, PublicSuffixList::bundled());
    ctx.sample_rate = 1.0;
    ctx.identifier = Some(&oracle);
    let stats = profile(&corpus, &ctx);

    assert_eq!(stats.quad_count, truth.quads);
    assert_eq!(stats.product_nodes, truth.product_nodes);
    assert_eq!(stats.node_validity, truth.node_validity);
    assert_eq!(stats.property_frequency, truth.property_frequency);
    assert_eq!(stats.property_validity, truth.property_validity);
    assert_eq!(stats.entity_classes, truth.entity_classes);
    assert_eq!(stats.variations, truth.variations);
    assert_eq!(stats.windows, truth.windows);
    assert_eq!(stats.product_windows, truth.product_windows);
    assert_eq!(stats.pld_counts, truth.pld_counts);
    assert_eq!(stats.split_subjects, 0);

    let declared: BTreeMap<String, u64> = truth.language.declared.iter().map(|(c, n)| (c.clone(), n.total())).collect();
    assert_eq!(stats.language_distribution, declared);
    for (code, planted) in &truth.language.declared {
        let measured = &stats.agreement.by_code[code];
        assert_eq!((measured.agree, measured.disagree), (planted.correct, planted.wrong), "{code}");
        assert_eq!(measured.agree * 10, measured.support() * 7, "{code}");
    }
}

#[test]
fn check_node_matches_the_plant() {
    let corpus = generate(&SyntheticSpec { nodes: 1500, seed: 9, ..Default::default() }).unwrap();
    let normalizer = VocabNormalizer::default();
    let ctx = Context::new(&normalizer, PublicSuffixList::bundled());
    let planted: BTreeMap<String, bool> = corpus.truth.nodes.iter().map(|n| (format!("_:{}", n.subject), n.valid)).collect();
    let (nodes, _) = assemble_nodes(corpus.chunks[0].iter().cloned(), AssemblyConfig::default());
    let mut seen = 0;
    for node in &nodes {
        if let Some(record) = ctx.record_of(node) {
            let expected = planted[&record.subject.to_string()];
            assert_eq!(check_node(&record).valid, expected, "{}", record.subject);
            assert_eq!(record.node_valid, expected);
            seen += 1;
        }
    }
    assert_eq!(seen, 1500);
}
