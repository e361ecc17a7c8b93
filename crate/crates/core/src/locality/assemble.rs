use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, VecDeque};
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::nquads::{Quad, Term};

pub const DEFAULT_WINDOW: u64 = 145;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct AssemblyConfig {
    /// Quads read past a subject's first quad before the subject is closed.
    pub window: u64,
    /// Emit fragments flagged incomplete instead of dropping them.
    pub emit_incomplete: bool,
    /// Closed nodes wait this many further quads before release, so a late
    /// quad can still flag the earlier fragment.
    pub holdback: u64,
}

impl Default for AssemblyConfig {
    fn default() -> Self {
        AssemblyConfig {
            window: DEFAULT_WINDOW,
            emit_incomplete: true,
            holdback: 0,
        }
    }
}

/// All quads of one subject seen within one window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssembledNode {
    pub subject: Term,
    pub quads: Vec<Quad>,
    pub complete: bool,
    /// 0 for the first record of a subject, counting up for late fragments.
    pub fragment: u32,
}

impl AssembledNode {
    pub fn first_ordinal(&self) -> u64 {
        self.quads.first().map_or(0, |q| q.ordinal)
    }

    pub fn last_ordinal(&self) -> u64 {
        self.quads.last().map_or(0, |q| q.ordinal)
    }

    /// Page of the node's first quad that carries one.
    pub fn page(&self) -> Option<&str> {
        self.quads.iter().find_map(Quad::page)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssemblyStats {
    pub quads_in: u64,
    pub records_out: u64,
    pub fragments: u64,
    pub incomplete_records: u64,
    pub dropped_records: u64,
    pub dropped_quads: u64,
    pub peak_buffered_quads: u64,
}

struct Open {
    first: u64,
    fragment: u32,
    late: bool,
    quads: Vec<Quad>,
}

pub(crate) fn subject_key(subject: &Term) -> u64 {
    let mut h = DefaultHasher::new();
    subject.hash(&mut h);
    h.finish()
}

/// Bounded-window grouping of a chunk's quads by subject.
///
/// Feed quads in ordinal order with [`push`](Self::push); closed nodes come
/// back in the order they were closed. Call [`finish`](Self::finish) at the
/// end of the chunk.
pub struct NodeAssembler {
    config: AssemblyConfig,
    open: HashMap<Term, Open>,
    order: VecDeque<(u64, Term)>,
    closed: HashMap<u64, u32>,
    pending: VecDeque<(u64, AssembledNode)>,
    buffered: u64,
    stats: AssemblyStats,
}

impl NodeAssembler {
    pub fn new(config: AssemblyConfig) -> Self {
        assert!(config.window >= 1, "window must be at least 1");
        NodeAssembler {
            config,
            open: HashMap::new(),
            order: VecDeque::new(),
            closed: HashMap::new(),
            pending: VecDeque::new(),
            buffered: 0,
            stats: AssemblyStats::default(),
        }
    }

    pub fn stats(&self) -> &AssemblyStats {
        &self.stats
    }

    pub fn push(&mut self, quad: Quad, out: &mut Vec<AssembledNode>) {
        let ord = quad.ordinal;
        self.stats.quads_in += 1;
        self.close_expired(ord);
        self.release(ord, out);

        if let Some(open) = self.open.get_mut(&quad.subject) {
            open.quads.push(quad);
        } else {
            let key = subject_key(&quad.subject);
            let (fragment, late) = match self.closed.get(&key) {
                Some(&last_fragment) => {
                    self.stats.fragments += 1;
                    for (_, node) in self.pending.iter_mut().rev() {
                        if node.subject == quad.subject {
                            node.complete = false;
                            break;
                        }
                    }
                    (last_fragment + 1, true)
                }
                None => (0, false),
            };
            self.order.push_back((ord, quad.subject.clone()));
            self.open.insert(
                quad.subject.clone(),
                Open {
                    first: ord,
                    fragment,
                    late,
                    quads: vec![quad],
                },
            );
        }
        self.buffered += 1;
        self.stats.peak_buffered_quads = self.stats.peak_buffered_quads.max(self.buffered);
    }

    fn close_expired(&mut self, ord: u64) {
        while let Some((first, _)) = self.order.front() {
            if ord - first <= self.config.window {
                break;
            }
            let (first, subject) = self.order.pop_front().unwrap();
            self.close(first, subject, ord);
        }
    }

    fn close(&mut self, first: u64, subject: Term, ord: u64) {
        let Some(open) = self.open.remove(&subject) else {
            return;
        };
        debug_assert_eq!(open.first, first);
        self.buffered -= open.quads.len() as u64;
        self.closed.insert(subject_key(&subject), open.fragment);
        let node = AssembledNode {
            subject,
            quads: open.quads,
            complete: !open.late,
            fragment: open.fragment,
        };
        self.pending.push_back((ord + self.config.holdback, node));
    }

    fn release(&mut self, ord: u64, out: &mut Vec<AssembledNode>) {
        while let Some((due, _)) = self.pending.front() {
            if *due > ord {
                break;
            }
            let (_, node) = self.pending.pop_front().unwrap();
            self.emit(node, out);
        }
    }

    fn emit(&mut self, node: AssembledNode, out: &mut Vec<AssembledNode>) {
        if !node.complete {
            self.stats.incomplete_records += 1;
            if !self.config.emit_incomplete {
                self.stats.dropped_records += 1;
                self.stats.dropped_quads += node.quads.len() as u64;
                return;
            }
        }
        self.stats.records_out += 1;
        out.push(node);
    }

    pub fn finish(mut self, out: &mut Vec<AssembledNode>) -> AssemblyStats {
        while let Some((first, subject)) = self.order.pop_front() {
            self.close(first, subject, 0);
        }
        while let Some((_, node)) = self.pending.pop_front() {
            self.emit(node, out);
        }
        self.stats
    }
}

/// Convenience wrapper over [`NodeAssembler`] for in-memory streams.
pub fn assemble_nodes(quads: impl IntoIterator<Item = Quad>, config: AssemblyConfig) -> (Vec<AssembledNode>, AssemblyStats) {
    let mut assembler = NodeAssembler::new(config);
    let mut out = Vec::new();
    for q in quads {
        assembler.push(q, &mut out);
    }
    let stats = assembler.finish(&mut out);
    (out, stats)
}
