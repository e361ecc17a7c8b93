use std::collections::{BTreeMap, HashSet};
use std::io;

use serde::{Deserialize, Serialize};

use super::chunk::{ChunkSinks, Context};
use crate::domains::{trust_filter, AbsentRank, TrustPolicy, TrustSummary};
use crate::language::{is_numeric_literal, is_text_literal, judge, normalize_code, Agreement};
use crate::locality::AssembledNode;
use crate::nquads::{write_quad, Quad, Term, RDF_TYPE};
use crate::validity::Status;

/// Which filters the clean pass applies. Concept canonicalization always
/// runs; the other stages run in field order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CleanPlan {
    /// Drop tagged literals whose declared language the identifier
    /// contradicts. Needs an identifier in the context.
    pub language_filter: bool,
    /// Drop values that fail their property rule.
    pub property_filter: bool,
    /// Drop product nodes that are not valid.
    pub node_filter: bool,
    pub trust: Option<(TrustPolicy, BTreeMap<String, f64>)>,
}

/// One line of the exclusion log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub chunk: u64,
    pub stage: String,
    pub reason: String,
    pub subject: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordinal: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicate: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pld: Option<String>,
    pub quads: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanSummary {
    pub quads_in: u64,
    pub quads_out: u64,
    /// Quads whose predicate or class was rewritten to its canonical form.
    pub canonicalized: u64,
    pub dropped_quads: BTreeMap<String, u64>,
    pub dropped_nodes: BTreeMap<String, u64>,
    pub trust: TrustSummary,
}

impl CleanSummary {
    pub fn merge(&mut self, o: &CleanSummary) {
        self.quads_in += o.quads_in;
        self.quads_out += o.quads_out;
        self.canonicalized += o.canonicalized;
        for (k, n) in &o.dropped_quads {
            *self.dropped_quads.entry(k.clone()).or_default() += n;
        }
        for (k, n) in &o.dropped_nodes {
            *self.dropped_nodes.entry(k.clone()).or_default() += n;
        }
        self.trust.merge(&o.trust);
    }
}

const LITERAL_BATCH: usize = 2048;

pub(super) struct Cleaner<'p> {
    plan: &'p CleanPlan,
    chunk: u64,
    pending: Vec<AssembledNode>,
    pending_literals: usize,
    summary: CleanSummary,
}

fn canonicalize(node: &mut AssembledNode, ctx: &Context<'_>) -> u64 {
    let mut changed = 0;
    for q in &mut node.quads {
        let mut touched = false;
        let predicate = ctx.normalizer.canonicalize(&q.predicate);
        if predicate != q.predicate {
            q.predicate = predicate;
            touched = true;
        }
        if q.predicate == RDF_TYPE {
            if let Term::Iri { value } = &mut q.object {
                let class = ctx.normalizer.canonicalize(value);
                if &class != value {
                    *value = class;
                    touched = true;
                }
            }
        }
        changed += u64::from(touched);
    }
    changed
}

fn tagged_text(q: &Quad) -> Option<(&str, &str)> {
    let lit = is_text_literal(&q.object)?;
    let tag = q.object.language()?;
    (!is_numeric_literal(&lit.lexical)).then_some((lit.lexical.as_str(), tag))
}

impl<'p> Cleaner<'p> {
    pub(super) fn new(plan: &'p CleanPlan, chunk: u64) -> Self {
        Cleaner {
            plan,
            chunk,
            pending: Vec::new(),
            pending_literals: 0,
            summary: CleanSummary::default(),
        }
    }

    pub(super) fn into_summary(self) -> CleanSummary {
        self.summary
    }

    pub(super) fn push(
        &mut self,
        nodes: Vec<AssembledNode>,
        ctx: &Context<'_>,
        sinks: &mut ChunkSinks<'_>,
        last: bool,
    ) -> io::Result<()> {
        for mut node in nodes {
            self.summary.quads_in += node.quads.len() as u64;
            self.summary.canonicalized += canonicalize(&mut node, ctx);
            if self.plan.language_filter {
                self.pending_literals += node.quads.iter().filter(|q| tagged_text(q).is_some()).count();
            }
            self.pending.push(node);
        }
        if last || self.pending_literals >= LITERAL_BATCH || !self.plan.language_filter {
            self.flush(ctx, sinks)?;
        }
        Ok(())
    }

    fn exclude(&mut self, sinks: &mut ChunkSinks<'_>, e: Exclusion, node_level: bool) -> io::Result<()> {
        let counter = if node_level {
            &mut self.summary.dropped_nodes
        } else {
            &mut self.summary.dropped_quads
        };
        *counter.entry(e.reason.clone()).or_default() += 1;
        if node_level {
            *self.summary.dropped_quads.entry(e.reason.clone()).or_default() += e.quads;
        }
        if let Some(out) = sinks.exclusions.as_deref_mut() {
            writeln!(out, "{}", serde_json::to_string(&e).expect("exclusion serializes"))?;
        }
        Ok(())
    }

    fn language_drops(&self, ctx: &Context<'_>) -> HashSet<(usize, u64)> {
        let mut drops = HashSet::new();
        let Some(identifier) = ctx.identifier.filter(|_| self.plan.language_filter) else {
            return drops;
        };
        let mut keys = Vec::new();
        let mut texts = Vec::new();
        let mut tags = Vec::new();
        for (n, node) in self.pending.iter().enumerate() {
            for q in &node.quads {
                if let Some((text, tag)) = tagged_text(q) {
                    keys.push((n, q.ordinal));
                    texts.push(text);
                    tags.push(tag);
                }
            }
        }
        let found = identifier.identify_batch(&texts);
        for ((key, tag), result) in keys.into_iter().zip(tags).zip(found) {
            let declared = normalize_code(tag).map(|c| c.code);
            let identified = result.ok().flatten();
            if judge(declared.as_deref(), identified.as_ref()) == Agreement::Disagree {
                drops.insert(key);
            }
        }
        drops
    }

    fn flush(&mut self, ctx: &Context<'_>, sinks: &mut ChunkSinks<'_>) -> io::Result<()> {
        let language = self.language_drops(ctx);
        let pending = std::mem::take(&mut self.pending);
        self.pending_literals = 0;
        let mut survivors: Vec<(String, AssembledNode)> = Vec::new();
        for (n, mut node) in pending.into_iter().enumerate() {
            let subject = node.subject.to_string();
            let mut kept = Vec::with_capacity(node.quads.len());
            for q in std::mem::take(&mut node.quads) {
                if language.contains(&(n, q.ordinal)) {
                    self.exclude(
                        sinks,
                        Exclusion {
                            chunk: self.chunk,
                            stage: "language".into(),
                            reason: "language-disagreement".into(),
                            subject: subject.clone(),
                            ordinal: Some(q.ordinal),
                            predicate: Some(q.predicate.clone()),
                            pld: None,
                            quads: 1,
                        },
                        false,
                    )?;
                } else {
                    kept.push(q);
                }
            }
            node.quads = kept;

            if let Some(record) = ctx.record_of(&node) {
                if self.plan.property_filter {
                    let invalid: BTreeMap<u64, String> = record
                        .properties
                        .iter()
                        .filter_map(|p| {
                            let v = p.verdict?;
                            (v.status == Status::Invalid).then(|| (p.ordinal, v.failed_rule.map_or("invalid", |r| r.as_str()).to_string()))
                        })
                        .collect();
                    let mut kept = Vec::with_capacity(node.quads.len());
                    for q in std::mem::take(&mut node.quads) {
                        match invalid.get(&q.ordinal) {
                            Some(rule) => self.exclude(
                                sinks,
                                Exclusion {
                                    chunk: self.chunk,
                                    stage: "property".into(),
                                    reason: rule.clone(),
                                    subject: subject.clone(),
                                    ordinal: Some(q.ordinal),
                                    predicate: Some(q.predicate.clone()),
                                    pld: None,
                                    quads: 1,
                                },
                                false,
                            )?,
                            None => kept.push(q),
                        }
                    }
                    node.quads = kept;
                }
                if self.plan.node_filter && !record.node_valid {
                    self.exclude(
                        sinks,
                        Exclusion {
                            chunk: self.chunk,
                            stage: "node".into(),
                            reason: "invalid-node".into(),
                            subject: subject.clone(),
                            ordinal: None,
                            predicate: None,
                            pld: None,
                            quads: node.quads.len() as u64,
                        },
                        true,
                    )?;
                    continue;
                }
            }
            if node.quads.is_empty() {
                continue;
            }
            let pld = node.page().map(|p| ctx.psl.pld_or_empty(p)).unwrap_or_default();
            survivors.push((pld, node));
        }

        let kept = match &self.plan.trust {
            Some((policy, ranks)) => {
                let outcome = trust_filter(survivors, |(pld, _)| pld.as_str(), ranks, policy);
                self.summary.trust.merge(&outcome.summary(|(pld, _)| pld.as_str()));
                let absent_reason = match policy.absent {
                    AbsentRank::Drop => "absent-rank",
                    _ => "untrusted",
                };
                for (reason, group) in [("untrusted", &outcome.dropped), ("quarantined", &outcome.quarantined)] {
                    for (pld, node) in group {
                        let reason = if reason == "untrusted" && !ranks.contains_key(pld) {
                            absent_reason
                        } else {
                            reason
                        };
                        self.exclude(
                            sinks,
                            Exclusion {
                                chunk: self.chunk,
                                stage: "trust".into(),
                                reason: reason.into(),
                                subject: node.subject.to_string(),
                                ordinal: None,
                                predicate: None,
                                pld: Some(pld.clone()),
                                quads: node.quads.len() as u64,
                            },
                            true,
                        )?;
                    }
                }
                outcome.kept
            }
            None => survivors,
        };

        for (_, node) in kept {
            self.summary.quads_out += node.quads.len() as u64;
            if let Some(out) = sinks.cleaned.as_deref_mut() {
                for q in &node.quads {
                    writeln!(out, "{}", write_quad(q))?;
                }
            }
        }
        Ok(())
    }
}
