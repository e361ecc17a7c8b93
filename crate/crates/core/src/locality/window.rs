use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::assemble::subject_key;
use crate::nquads::{Quad, Term};

/// Window of `subject`, or `None` when it never occurs.
pub fn min_window<'a>(quads: impl IntoIterator<Item = &'a Quad>, subject: &Term) -> Option<u64> {
    let mut span: Option<(u64, u64)> = None;
    for q in quads.into_iter().filter(|q| &q.subject == subject) {
        span = Some(match span {
            None => (q.ordinal, q.ordinal),
            Some((first, _)) => (first, q.ordinal),
        });
    }
    span.map(|(first, last)| last - first)
}

/// Histogram of per-subject windows.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowStats {
    pub histogram: BTreeMap<u64, u64>,
    pub total_nodes: u64,
}

impl WindowStats {
    pub fn record(&mut self, window: u64) {
        *self.histogram.entry(window).or_default() += 1;
        self.total_nodes += 1;
    }

    pub fn merge(&mut self, other: &WindowStats) {
        for (w, n) in &other.histogram {
            *self.histogram.entry(*w).or_default() += n;
        }
        self.total_nodes += other.total_nodes;
    }

    pub fn mean(&self) -> Option<f64> {
        if self.total_nodes == 0 {
            return None;
        }
        let sum: u128 = self.histogram.iter().map(|(w, n)| *w as u128 * *n as u128).sum();
        Some(sum as f64 / self.total_nodes as f64)
    }

    /// Nearest-rank percentile: the smallest window such that at least `p`
    /// percent of nodes have a window no larger than it.
    pub fn percentile(&self, p: f64) -> Option<u64> {
        if self.total_nodes == 0 || !(0.0..=100.0).contains(&p) {
            return None;
        }
        let rank = ((p / 100.0) * self.total_nodes as f64).ceil().max(1.0) as u64;
        let mut seen = 0;
        for (w, n) in &self.histogram {
            seen += n;
            if seen >= rank {
                return Some(*w);
            }
        }
        self.histogram.keys().next_back().copied()
    }

    pub fn max(&self) -> Option<u64> {
        self.histogram.keys().next_back().copied()
    }

    /// Share of nodes whose quads all fall within `window`.
    pub fn complete_rate(&self, window: u64) -> Option<f64> {
        if self.total_nodes == 0 {
            return None;
        }
        let complete: u64 = self.histogram.range(..=window).map(|(_, n)| n).sum();
        Some(complete as f64 / self.total_nodes as f64)
    }

    /// The same distribution with every window shifted by `offset`, used to
    /// report windows that count the first quad.
    pub fn shifted(&self, offset: u64) -> WindowStats {
        WindowStats {
            histogram: self.histogram.iter().map(|(w, n)| (w + offset, *n)).collect(),
            total_nodes: self.total_nodes,
        }
    }
}

/// Single-pass window measurement.
///
/// Subjects are keyed by a 64-bit hash to keep per-subject state small.
/// Exact by default (up to hash collisions). With a horizon, subjects not seen for more than
/// `horizon` quads are closed, which bounds memory at the cost of splitting
/// subjects that come back later.
///
/// Subjects flagged with [`WindowTracker::mark_product`] also land in a
/// second histogram, measured over their whole span rather than the
/// assembled fragment.
#[derive(Debug, Default)]
pub struct WindowTracker {
    spans: HashMap<u64, (u64, u64)>,
    horizon: Option<u64>,
    last_sweep: u64,
    stats: WindowStats,
    products: HashSet<u64>,
    product_stats: WindowStats,
}

impl WindowTracker {
    pub fn new() -> Self {
        WindowTracker::default()
    }

    pub fn with_horizon(horizon: u64) -> Self {
        WindowTracker {
            horizon: Some(horizon),
            ..WindowTracker::default()
        }
    }

    pub fn push(&mut self, quad: &Quad) {
        let ord = quad.ordinal;
        self.spans
            .entry(subject_key(&quad.subject))
            .and_modify(|span| span.1 = ord)
            .or_insert((ord, ord));
        if let Some(h) = self.horizon {
            if ord.saturating_sub(self.last_sweep) > h {
                self.last_sweep = ord;
                let (stats, product_stats, products) = (&mut self.stats, &mut self.product_stats, &mut self.products);
                self.spans.retain(|key, (first, last)| {
                    let live = ord - *last <= h;
                    if !live {
                        stats.record(*last - *first);
                        if products.remove(key) {
                            product_stats.record(*last - *first);
                        }
                    }
                    live
                });
            }
        }
    }

    /// Flags a subject as a product node. A subject already closed by the
    /// horizon falls back to `span`.
    pub fn mark_product(&mut self, subject: &Term, span: u64) {
        let key = subject_key(subject);
        if self.spans.contains_key(&key) {
            self.products.insert(key);
        } else {
            self.product_stats.record(span);
        }
    }

    pub fn live_subjects(&self) -> usize {
        self.spans.len()
    }

    pub fn finish(self) -> WindowStats {
        self.finish_with_products().0
    }

    /// Closes every subject, returning all windows and product windows.
    pub fn finish_with_products(mut self) -> (WindowStats, WindowStats) {
        for (key, (first, last)) in self.spans {
            self.stats.record(last - first);
            if self.products.contains(&key) {
                self.product_stats.record(last - first);
            }
        }
        (self.stats, self.product_stats)
    }
}

pub fn window_distribution<'a>(quads: impl IntoIterator<Item = &'a Quad>) -> WindowStats {
    let mut tracker = WindowTracker::new();
    for q in quads {
        tracker.push(q);
    }
    tracker.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream(subjects: &[&str]) -> Vec<Quad> {
        subjects
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mut q = Quad::new(Term::blank(*s), "http://p", Term::literal("x"), None);
                q.ordinal = i as u64;
                q
            })
            .collect()
    }

    #[test]
    fn min_window_examples() {
        let mut subjects = vec!["z"; 10];
        subjects[5] = "a";
        subjects[6] = "a";
        subjects[7] = "a";
        subjects[9] = "b";
        let qs = stream(&subjects);
        assert_eq!(min_window(&qs, &Term::blank("a")), Some(2));
        assert_eq!(min_window(&qs, &Term::blank("b")), Some(0));
        assert_eq!(min_window(&qs, &Term::blank("nope")), None);
    }

    #[test]
    fn contiguous_groups() {
        let qs = stream(&["a", "a", "a", "b", "c", "c"]);
        let stats = window_distribution(&qs);
        assert_eq!(stats.histogram, BTreeMap::from([(0, 1), (1, 1), (2, 1)]));
        assert_eq!(stats.mean(), Some(1.0));
    }

    #[test]
    fn empty_stream() {
        let stats = window_distribution(&[]);
        assert_eq!(stats.total_nodes, 0);
        assert_eq!(stats.mean(), None);
        assert_eq!(stats.percentile(99.0), None);
    }

    #[test]
    fn percentiles_and_rates() {
        let mut stats = WindowStats::default();
        for w in 0..100 {
            stats.record(w);
        }
        assert_eq!(stats.percentile(99.0), Some(98));
        assert_eq!(stats.percentile(100.0), Some(99));
        assert_eq!(stats.percentile(0.0), Some(0));
        assert_eq!(stats.complete_rate(98), Some(0.99));
        assert_eq!(stats.shifted(1).percentile(99.0), Some(99));
    }

    #[test]
    fn horizon_splits_returning_subjects() {
        let qs = stream(&["a", "b", "c", "d", "e", "a"]);
        assert_eq!(window_distribution(&qs).max(), Some(5));
        let mut t = WindowTracker::with_horizon(2);
        for q in &qs {
            t.push(q);
        }
        let stats = t.finish();
        assert_eq!(stats.max(), Some(0));
        assert_eq!(stats.total_nodes, 6);
    }
}
