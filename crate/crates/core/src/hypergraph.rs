//! Weighted hypergraph storage.
//!
//! A hypergraph is kept as its sparse incidence matrix `e[i][α]` in both
//! orientations: per node, the hyperedges it belongs to, and per hyperedge,
//! its members. Both lists are sorted and hold strictly positive weights only.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// One incidence entry: `(index, weight)`, where the index is a hyperedge for
/// node-side lists and a node for hyperedge-side lists.
pub type Incidence = (usize, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    node_incidence: Vec<Vec<Incidence>>,
    hyperedge_incidence: Vec<Vec<Incidence>>,
    node_degree: Vec<f64>,
    hyperedge_degree: Vec<f64>,
}

impl Hypergraph {
    /// Builds a hypergraph from hyperedge member lists.
    ///
    /// The node count is one past the largest node id mentioned, so nodes that
    /// never appear are impossible to express here; use [`Hypergraph::with_nodes`]
    /// when isolated nodes must exist.
    pub fn from_hyperedges(edges: &[Vec<Incidence>]) -> Result<Self> {
        let node_count = edges
            .iter()
            .flat_map(|e| e.iter().map(|&(n, _)| n + 1))
            .max()
            .unwrap_or(0);
        Self::with_nodes(node_count, edges)
    }

    pub fn with_nodes(node_count: usize, edges: &[Vec<Incidence>]) -> Result<Self> {
        let mut node_incidence: Vec<Vec<Incidence>> = vec![Vec::new(); node_count];
        let mut hyperedge_incidence = Vec::with_capacity(edges.len());

        for (alpha, members) in edges.iter().enumerate() {
            let mut sorted = members.clone();
            for &(node, weight) in &sorted {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
                // NaN fails this comparison too.
                if !(weight > 0.0 && weight.is_finite()) {
                    return Err(Error::NonPositiveWeight { node, hyperedge: alpha, weight });
                }
            }
            sorted.sort_by_key(|&(n, _)| n);
            if let Some(w) = sorted.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::DuplicateMembership { node: w[0].0, hyperedge: alpha });
            }
            for &(node, weight) in &sorted {
                node_incidence[node].push((alpha, weight));
            }
            hyperedge_incidence.push(sorted);
        }

        let node_degree = node_incidence.iter().map(|l| l.iter().map(|e| e.1).sum()).collect();
        let hyperedge_degree = hyperedge_incidence.iter().map(|l| l.iter().map(|e| e.1).sum()).collect();
        Ok(Self { node_incidence, hyperedge_incidence, node_degree, hyperedge_degree })
    }

    pub fn node_count(&self) -> usize {
        self.node_incidence.len()
    }

    pub fn hyperedge_count(&self) -> usize {
        self.hyperedge_incidence.len()
    }

    /// Total number of stored incidence entries.
    pub fn incidence_count(&self) -> usize {
        self.hyperedge_incidence.iter().map(Vec::len).sum()
    }

    /// Hyperedges containing `node`, sorted by hyperedge index.
    pub fn node_incidence(&self, node: usize) -> &[Incidence] {
        &self.node_incidence[node]
    }

    /// Members of `hyperedge`, sorted by node index.
    pub fn members(&self, hyperedge: usize) -> &[Incidence] {
        &self.hyperedge_incidence[hyperedge]
    }

    pub fn hyperedges(&self) -> impl Iterator<Item = &[Incidence]> {
        self.hyperedge_incidence.iter().map(Vec::as_slice)
    }

    /// `D_i`, the sum of node `i`'s membership weights.
    pub fn node_degree(&self, node: usize) -> f64 {
        self.node_degree[node]
    }

    pub fn node_degrees(&self) -> &[f64] {
        &self.node_degree
    }

    /// `δ_α`, the sum of the member weights of hyperedge `α`.
    pub fn hyperedge_degree(&self, hyperedge: usize) -> f64 {
        self.hyperedge_degree[hyperedge]
    }

    pub fn hyperedge_degrees(&self) -> &[f64] {
        &self.hyperedge_degree
    }

    pub fn check_node(&self, node: usize) -> Result<()> {
        if node < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node, node_count: self.node_count() })
        }
    }

    /// Partition of the nodes into connected components.
    ///
    /// Components are listed in order of their smallest node, each sorted
    /// ascending. An isolated node forms its own component.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let labels = self.component_labels();
        let count = labels.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut components = vec![Vec::new(); count];
        for (node, &c) in labels.iter().enumerate() {
            components[c].push(node);
        }
        components
    }

    /// Component index of every node, numbered by first appearance.
    pub fn component_labels(&self) -> Vec<usize> {
        const UNSEEN: usize = usize::MAX;
        let n = self.node_count();
        let mut label = vec![UNSEEN; n];
        let mut edge_seen = vec![false; self.hyperedge_count()];
        let mut stack = Vec::new();
        let mut next = 0;
        for start in 0..n {
            if label[start] != UNSEEN {
                continue;
            }
            label[start] = next;
            stack.push(start);
            while let Some(node) = stack.pop() {
                for &(alpha, _) in &self.node_incidence[node] {
                    if std::mem::replace(&mut edge_seen[alpha], true) {
                        continue;
                    }
                    for &(other, _) in &self.hyperedge_incidence[alpha] {
                        if label[other] == UNSEEN {
                            label[other] = next;
                            stack.push(other);
                        }
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.component_labels().iter().all(|&c| c == 0)
    }

    /// Sub-hypergraph induced by `nodes` (which must be sorted and unique).
    ///
    /// Hyperedges keep only their members inside `nodes`; hyperedges left
    /// empty are dropped. Node `k` of the result is `nodes[k]` of `self`.
    pub fn induced(&self, nodes: &[usize]) -> Result<Hypergraph> {
        let mut local = vec![usize::MAX; self.node_count()];
        for (k, &node) in nodes.iter().enumerate() {
            self.check_node(node)?;
            local[node] = k;
        }
        let edges: Vec<Vec<Incidence>> = self
            .hyperedge_incidence
            .iter()
            .map(|members| {
                members
                    .iter()
                    .filter(|&&(n, _)| local[n] != usize::MAX)
                    .map(|&(n, w)| (local[n], w))
                    .collect::<Vec<_>>()
            })
            .filter(|m| !m.is_empty())
            .collect();
        Hypergraph::with_nodes(nodes.len(), &edges)
    }

    /// Clique expansion: one weighted edge per co-occurring node pair.
    ///
    /// The weight of `{i, j}` is `Σ_α min(e_iα, e_jα)` over the hyperedges
    /// shared by both nodes. Edges are returned with `i < j`, sorted.
    pub fn expand_to_graph(&self) -> Vec<(usize, usize, f64)> {
        let mut pairs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for members in &self.hyperedge_incidence {
            for (a, &(i, wi)) in members.iter().enumerate() {
                for &(j, wj) in &members[a + 1..] {
                    *pairs.entry((i, j)).or_insert(0.0) += wi.min(wj);
                }
            }
        }
        pairs.into_iter().map(|((i, j), w)| (i, j, w)).collect()
    }
}
