use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::distance::normalized_levenshtein;
use crate::par::*;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringClusters {
    pub clusters: Vec<BTreeSet<String>>,
    pub noise: BTreeSet<String>,
}

impl StringClusters {
    pub fn cluster_of(&self, s: &str) -> Option<&BTreeSet<String>> {
        self.clusters.iter().find(|c| c.contains(s))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DbscanError {
    #[error("eps must be in (0, 1], got {0}")]
    Eps(f64),
    #[error("min_pts must be at least 1")]
    MinPts,
}

#[derive(Clone, Copy, PartialEq)]
enum Label {
    Unvisited,
    Noise,
    Cluster(usize),
}

/// DBSCAN over normalized Levenshtein distance.
///
/// Points are visited in lexicographic order, so border points reachable from
/// two clusters join the one discovered first. A point is core when its
/// eps-neighbourhood (itself included) holds at least `min_pts` points.
pub fn dbscan_string_clusters(
    strings: &BTreeSet<String>,
    eps: f64,
    min_pts: usize,
) -> Result<StringClusters, DbscanError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(DbscanError::Eps(eps));
    }
    if min_pts == 0 {
        return Err(DbscanError::MinPts);
    }
    let points: Vec<&String> = strings.iter().collect();
    let neighbours: Vec<Vec<usize>> = (0..points.len())
        .into_par_iter()
        .map(|i| {
            (0..points.len())
                .filter(|&j| normalized_levenshtein(points[i], points[j]) <= eps)
                .collect()
        })
        .collect();

    let mut labels = vec![Label::Unvisited; points.len()];
    let mut n_clusters = 0;
    for start in 0..points.len() {
        if labels[start] != Label::Unvisited {
            continue;
        }
        if neighbours[start].len() < min_pts {
            labels[start] = Label::Noise;
            continue;
        }
        let id = n_clusters;
        n_clusters += 1;
        labels[start] = Label::Cluster(id);
        let mut queue: VecDeque<usize> = neighbours[start].iter().copied().collect();
        while let Some(p) = queue.pop_front() {
            match labels[p] {
                Label::Noise => labels[p] = Label::Cluster(id),
                Label::Unvisited => {
                    labels[p] = Label::Cluster(id);
                    if neighbours[p].len() >= min_pts {
                        queue.extend(neighbours[p].iter().copied());
                    }
                }
                Label::Cluster(_) => {}
            }
        }
    }

    let mut out = StringClusters {
        clusters: vec![BTreeSet::new(); n_clusters],
        noise: BTreeSet::new(),
    };
    for (p, label) in labels.into_iter().enumerate() {
        match label {
            Label::Cluster(id) => {
                out.clusters[id].insert(points[p].clone());
            }
            _ => {
                out.noise.insert(points[p].clone());
            }
        }
    }
    Ok(out)
}
