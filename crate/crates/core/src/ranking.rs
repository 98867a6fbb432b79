//! Nearest-neighbor rankings and the statistics used to evaluate them.

use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::hitting::HittingTimeResult;
use crate::hypergraph::Hypergraph;
use crate::kernel::Scenario;

/// Neighbors of a target in ascending distance, ties by ascending node id.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedNeighbors {
    pub target: usize,
    pub scenario: Option<Scenario>,
    pub entries: Vec<(usize, f64)>,
}

impl RankedNeighbors {
    /// Ranks arbitrary `(node, distance)` pairs, e.g. from an external method.
    pub fn from_distances(target: usize, mut entries: Vec<(usize, f64)>) -> Self {
        entries.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        Self { target, scenario: None, entries }
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn top(&self, k: usize) -> &[(usize, f64)] {
        &self.entries[..k.min(self.entries.len())]
    }
}

pub fn rank_neighbors(result: &HittingTimeResult, top_n: Option<usize>) -> RankedNeighbors {
    let mut ranked = RankedNeighbors::from_distances(result.target, result.iter().collect());
    ranked.scenario = Some(result.scenario);
    if let Some(n) = top_n {
        ranked.entries.truncate(n);
    }
    ranked
}

/// Average (fractional) ranks, 1-based, keyed by node.
fn fractional_ranks(r: &RankedNeighbors) -> HashMap<usize, f64> {
    let e = &r.entries;
    let mut ranks = HashMap::with_capacity(e.len());
    let mut start = 0;
    while start < e.len() {
        let mut end = start + 1;
        while end < e.len() && e[end].1 == e[start].1 {
            end += 1;
        }
        // positions start..end share rank (start+1 + end) / 2
        let rank = (start + 1 + end) as f64 / 2.0;
        for &(node, _) in &e[start..end] {
            ranks.insert(node, rank);
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation of two rankings over the same node set, with
/// tied distances sharing their average rank.
pub fn spearman(a: &RankedNeighbors, b: &RankedNeighbors) -> Result<f64> {
    let ra = fractional_ranks(a);
    let rb = fractional_ranks(b);
    if ra.len() != a.len() || rb.len() != b.len() || ra.len() != rb.len() || !ra.keys().all(|k| rb.contains_key(k)) {
        return Err(Error::MismatchedNodeSets);
    }
    let mut nodes: Vec<usize> = ra.keys().copied().collect();
    nodes.sort_unstable();
    let x: Vec<f64> = nodes.iter().map(|n| ra[n]).collect();
    let y: Vec<f64> = nodes.iter().map(|n| rb[n]).collect();
    if x == y {
        return Ok(1.0);
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (xi, yi) in x.iter().zip(&y) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx) * (xi - mx);
        syy += (yi - my) * (yi - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantRanking);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Fraction of the top-`k` neighbors whose label equals the target's.
/// Unlabelled neighbors count as disagreeing.
pub fn label_agreement<L: Eq + Hash>(r: &RankedNeighbors, labels: &HashMap<usize, L>, k: usize) -> Result<f64> {
    let own = labels.get(&r.target).ok_or(Error::MissingLabel(r.target))?;
    let top = r.top(k);
    if top.is_empty() {
        return Ok(0.0);
    }
    let same = top.iter().filter(|(n, _)| labels.get(n) == Some(own)).count();
    Ok(same as f64 / top.len() as f64)
}

pub fn jaccard<T: Eq + Hash>(a: &HashSet<T>, b: &HashSet<T>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 0.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// Mean Jaccard similarity between the target's tag set and each top-`k`
/// neighbor's.
pub fn jaccard_topk<T: Eq + Hash>(r: &RankedNeighbors, subjects: &HashMap<usize, HashSet<T>>, k: usize) -> Result<f64> {
    let own = subjects.get(&r.target).ok_or(Error::MissingTags(r.target))?;
    let top = r.top(k);
    if top.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for (node, _) in top {
        let tags = subjects.get(node).ok_or(Error::MissingTags(*node))?;
        total += jaccard(own, tags);
    }
    Ok(total / top.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistogramKind {
    NodeDegree,
    HyperedgeDegree,
    ExpandedEdgeWeight,
}

/// `(value, count)` pairs, ascending, with values binned to 6 decimals.
pub fn degree_histogram(h: &Hypergraph, which: HistogramKind) -> Vec<(f64, usize)> {
    let values: Vec<f64> = match which {
        HistogramKind::NodeDegree => h.node_degrees().to_vec(),
        HistogramKind::HyperedgeDegree => h.hyperedge_degrees().to_vec(),
        HistogramKind::ExpandedEdgeWeight => h.expand_to_graph().into_iter().map(|e| e.2).collect(),
    };
    let mut bins: std::collections::BTreeMap<i64, usize> = Default::default();
    for v in values {
        *bins.entry((v * 1e6).round() as i64).or_default() += 1;
    }
    bins.into_iter().map(|(k, c)| (k as f64 / 1e6, c)).collect()
}
