use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use serde_json::json;

use super::clean::{CleanPlan, CleanSummary, Cleaner};
use crate::domains::PublicSuffixList;
use crate::language::{measure_agreement, LanguageIdentifier, LiteralSampler};
use crate::locality::{AssembledNode, AssemblyConfig, NodeAssembler, WindowTracker};
use crate::nquads::{stream_chunk, ParseReport, StreamOptions};
use crate::stats::ProfileStats;
use crate::validity::{ProductRecord, Validator};
use crate::vocab::VocabNormalizer;

/// Shared, read-only state for chunk passes.
pub struct Context<'a> {
    pub normalizer: &'a VocabNormalizer,
    pub validator: Validator,
    pub psl: &'a PublicSuffixList,
    pub assembly: AssemblyConfig,
    pub sample_rate: f64,
    pub seed: u64,
    pub stream: StreamOptions,
    pub identifier: Option<&'a dyn LanguageIdentifier>,
    /// Close subjects unseen for this many quads when measuring windows.
    pub window_horizon: Option<u64>,
}

impl<'a> Context<'a> {
    /// Default knobs: exact null matching, the default assembly window, a
    /// 1% sample with seed 0 and no identifier.
    pub fn new(normalizer: &'a VocabNormalizer, psl: &'a PublicSuffixList) -> Self {
        Context {
            normalizer,
            validator: Validator::default(),
            psl,
            assembly: AssemblyConfig::default(),
            sample_rate: 0.01,
            seed: 0,
            stream: StreamOptions::default(),
            identifier: None,
            window_horizon: None,
        }
    }

    pub fn record_of(&self, node: &AssembledNode) -> Option<ProductRecord> {
        ProductRecord::from_node(node, self.normalizer, &self.validator, |page| self.psl.pld_or_empty(page))
    }
}

/// Optional outputs of one chunk pass.
#[derive(Default)]
pub struct ChunkSinks<'w> {
    pub verdicts: Option<&'w mut dyn Write>,
    pub cleaned: Option<&'w mut dyn Write>,
    pub exclusions: Option<&'w mut dyn Write>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChunkOutcome {
    pub stats: ProfileStats,
    pub parse: ParseReport,
    pub clean: Option<CleanSummary>,
    /// Set when the chunk was aborted; `stats` then covers only the part
    /// read before the failure.
    pub error: Option<String>,
}

/// Opens a chunk file, detecting gzip by its magic bytes.
pub fn open_chunk(path: &Path) -> io::Result<(BufReader<File>, bool)> {
    let mut reader = BufReader::with_capacity(1 << 16, File::open(path)?);
    let head = reader.fill_buf()?;
    let compressed = head.len() >= 2 && head[0] == 0x1f && head[1] == 0x8b;
    Ok((reader, compressed))
}

fn write_verdicts(out: &mut dyn Write, chunk: u64, record: &ProductRecord) -> io::Result<()> {
    for p in &record.properties {
        let (Some(key), Some(verdict)) = (p.key, p.verdict) else {
            continue;
        };
        let line = json!({
            "chunk": chunk,
            "ordinal": p.ordinal,
            "subject": record.subject.to_string(),
            "property": key.as_str(),
            "predicate": p.predicate,
            "object": p.object.to_string(),
            "status": verdict.status,
            "failed_rule": verdict.failed_rule.map(|r| r.as_str()),
        });
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Streams one chunk through the requested passes.
pub fn process_chunk<R: Read>(
    source: R,
    compressed: bool,
    index: u64,
    ctx: &Context<'_>,
    plan: Option<&CleanPlan>,
    sinks: &mut ChunkSinks<'_>,
) -> ChunkOutcome {
    let mut stats = ProfileStats::default();
    let mut tracker = match ctx.window_horizon {
        Some(h) => WindowTracker::with_horizon(h),
        None => WindowTracker::new(),
    };
    let mut sampler = LiteralSampler::new(ctx.sample_rate, ctx.seed, index);
    let mut samples = Vec::new();
    let mut assembler = NodeAssembler::new(ctx.assembly);
    let mut cleaner = plan.map(|p| Cleaner::new(p, index));
    let mut nodes = Vec::new();
    let mut error = None;

    let handle = |nodes: &mut Vec<AssembledNode>,
                  stats: &mut ProfileStats,
                  tracker: &mut WindowTracker,
                  cleaner: &mut Option<Cleaner>,
                  sinks: &mut ChunkSinks<'_>,
                  last: bool|
     -> io::Result<()> {
        for node in nodes.iter() {
            let record = ctx.record_of(node);
            stats.fold_node(node, record.as_ref(), ctx.normalizer);
            if record.is_some() {
                tracker.mark_product(&node.subject, node.last_ordinal() - node.first_ordinal());
            }
            if let (Some(out), Some(record)) = (sinks.verdicts.as_deref_mut(), &record) {
                write_verdicts(out, index, record)?;
            }
        }
        if let Some(cleaner) = cleaner.as_mut() {
            cleaner.push(std::mem::take(nodes), ctx, sinks, last)?;
        } else {
            nodes.clear();
        }
        Ok(())
    };

    let mut stream = stream_chunk(source, compressed, ctx.stream);
    for item in stream.by_ref() {
        let quad = match item {
            Ok(q) => q,
            Err(e) => {
                error = Some(e.to_string());
                break;
            }
        };
        stats.fold_quad(&quad, ctx.normalizer);
        tracker.push(&quad);
        if let Some(s) = sampler.offer(&quad) {
            samples.push(s);
        }
        assembler.push(quad, &mut nodes);
        if nodes.len() >= 256 {
            if let Err(e) = handle(&mut nodes, &mut stats, &mut tracker, &mut cleaner, sinks, false) {
                error = Some(format!("write failed: {e}"));
                break;
            }
        }
    }
    let parse = stream.into_report();
    if error.is_none() {
        assembler.finish(&mut nodes);
        if let Err(e) = handle(&mut nodes, &mut stats, &mut tracker, &mut cleaner, sinks, true) {
            error = Some(format!("write failed: {e}"));
        }
    }
    stats.lines_read = parse.lines_read;
    stats.malformed_lines = parse.malformed_lines;
    (stats.windows, stats.product_windows) = tracker.finish_with_products();
    stats.sampled_literals = samples.len() as u64;
    stats.agreement = match ctx.identifier {
        Some(id) => measure_agreement(&mut samples, id),
        None => {
            let mut table = crate::language::AgreementTable::default();
            for s in &samples {
                table.add(s);
            }
            table
        }
    };
    ChunkOutcome {
        stats,
        parse,
        clean: cleaner.map(Cleaner::into_summary),
        error,
    }
}
