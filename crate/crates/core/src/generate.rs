//! Synthetic hypergraph generators for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, Incidence};

#[derive(Debug, Clone)]
pub struct PreferentialParams {
    /// Hyperedge sizes are uniform on `min_size..=max_size`.
    pub min_size: usize,
    pub max_size: usize,
    /// Fresh nodes introduced by each new hyperedge.
    pub new_nodes_per_edge: usize,
    /// Membership weights are `1 + G` with `G ~ Geometric(weight_p)`.
    pub weight_p: f64,
}

impl Default for PreferentialParams {
    fn default() -> Self {
        Self { min_size: 2, max_size: 5, new_nodes_per_edge: 1, weight_p: 0.5 }
    }
}

/// Grows a hypergraph by preferential attachment.
///
/// Starts from the hyperedge `{0, 1}`. Every further hyperedge brings
/// `new_nodes_per_edge` fresh nodes and fills the rest of its size with
/// distinct existing nodes drawn with probability proportional to their
/// current degree. Weights are integers, so degree-proportional sampling is
/// done with a stub list holding each node once per unit of weight.
pub fn preferential_hypergraph(nodes: usize, seed: u64, params: &PreferentialParams) -> Result<Hypergraph> {
    if nodes < 2 {
        return Err(Error::InvalidParams(format!("need at least 2 nodes, got {nodes}")));
    }
    if params.min_size < 2 || params.max_size < params.min_size {
        return Err(Error::InvalidParams(format!(
            "hyperedge size range {}..={} must start at 2 or more",
            params.min_size, params.max_size
        )));
    }
    if params.new_nodes_per_edge == 0 || params.new_nodes_per_edge >= params.min_size {
        return Err(Error::InvalidParams("new_nodes_per_edge must be in 1..min_size".into()));
    }
    if !(params.weight_p > 0.0 && params.weight_p <= 1.0) {
        return Err(Error::InvalidParams(format!("weight_p must be in (0, 1], got {}", params.weight_p)));
    }
    let weights = Geometric::new(params.weight_p)
        .map_err(|e| Error::InvalidParams(format!("weight_p {}: {e}", params.weight_p)))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<Vec<Incidence>> = vec![vec![(0, 1.0), (1, 1.0)]];
    let mut stubs: Vec<usize> = vec![0, 1];
    let mut next = 2;
    let mut chosen = Vec::new();

    while next < nodes {
        let size = rng.random_range(params.min_size..=params.max_size);
        let fresh = params.new_nodes_per_edge.min(nodes - next);
        let wanted = (size - fresh).min(next);
        chosen.clear();
        while chosen.len() < wanted {
            let candidate = stubs[rng.random_range(0..stubs.len())];
            if !chosen.contains(&candidate) {
                chosen.push(candidate);
            }
        }
        chosen.extend(next..next + fresh);
        next += fresh;

        let mut edge = Vec::with_capacity(chosen.len());
        for &node in &chosen {
            let w = 1 + weights.sample(&mut rng) as usize;
            stubs.extend(std::iter::repeat_n(node, w));
            edge.push((node, w as f64));
        }
        edges.push(edge);
    }
    Hypergraph::with_nodes(nodes, &edges)
}

#[derive(Debug, Clone)]
pub struct PlantedParams {
    pub communities: usize,
    pub community_size: usize,
    pub hyperedges_per_community: usize,
    /// Fraction of hyperedges that mix two communities.
    pub cross_fraction: f64,
    pub min_size: usize,
    pub max_size: usize,
    pub max_weight: u32,
}

impl Default for PlantedParams {
    fn default() -> Self {
        Self {
            communities: 20,
            community_size: 50,
            hyperedges_per_community: 100,
            cross_fraction: 0.02,
            min_size: 2,
            max_size: 5,
            max_weight: 3,
        }
    }
}

/// Hypergraph with planted communities; returns it with each node's community.
///
/// Each community gets `hyperedges_per_community` hyperedges of its own; the
/// first `community_size` of them chain through a shuffled node order, so
/// every community is internally connected. Mixed hyperedges are added on
/// top so that they make up `cross_fraction` of the total. They first link
/// community `c` to `c + 1` in a ring, then pair random communities, so the
/// result is connected whenever there are at least as many mixed hyperedges
/// as communities.
pub fn planted_communities(params: &PlantedParams, seed: u64) -> Result<(Hypergraph, Vec<usize>)> {
    let &PlantedParams { communities, community_size, hyperedges_per_community, .. } = params;
    if communities == 0 || community_size < params.max_size || params.min_size < 2 || params.max_size < params.min_size {
        return Err(Error::InvalidParams("planted community sizes are inconsistent".into()));
    }
    if !(0.0..=1.0).contains(&params.cross_fraction) || params.max_weight == 0 {
        return Err(Error::InvalidParams("cross_fraction must be in [0, 1] and max_weight positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<usize> = (0..communities * community_size).map(|v| v / community_size).collect();
    let member = |c: usize, k: usize| c * community_size + k;
    let plain = communities * hyperedges_per_community;
    // mixed / (plain + mixed) = cross_fraction
    let mixed = if params.cross_fraction < 1.0 {
        (params.cross_fraction * plain as f64 / (1.0 - params.cross_fraction)).round() as usize
    } else {
        plain
    };
    let mut edges = Vec::with_capacity(plain + mixed);

    for c in 0..communities {
        let mut order: Vec<usize> = (0..community_size).collect();
        order.shuffle(&mut rng);
        for j in 0..hyperedges_per_community {
            let size = rng.random_range(params.min_size..=params.max_size);
            let mut nodes = Vec::with_capacity(size);
            if j < community_size {
                nodes.push(member(c, order[j]));
                nodes.push(member(c, order[(j + 1) % community_size]));
            }
            while nodes.len() < size {
                let v = member(c, rng.random_range(0..community_size));
                if !nodes.contains(&v) {
                    nodes.push(v);
                }
            }
            edges.push(nodes);
        }
    }
    for m in 0..mixed {
        let (a, b) = if m < communities {
            (m, (m + 1) % communities)
        } else {
            let a = rng.random_range(0..communities);
            let mut b = rng.random_range(0..communities);
            while communities > 1 && b == a {
                b = rng.random_range(0..communities);
            }
            (a, b)
        };
        let size = rng.random_range(params.min_size..=params.max_size);
        let mut nodes = vec![member(a, rng.random_range(0..community_size))];
        while nodes.len() < size {
            let c = if nodes.len() == 1 { b } else if rng.random_bool(0.5) { a } else { b };
            let v = member(c, rng.random_range(0..community_size));
            if !nodes.contains(&v) {
                nodes.push(v);
            }
        }
        edges.push(nodes);
    }

    let weighted: Vec<Vec<Incidence>> = edges
        .into_iter()
        .map(|e| e.into_iter().map(|v| (v, rng.random_range(1..=params.max_weight) as f64)).collect())
        .collect();
    Ok((Hypergraph::with_nodes(labels.len(), &weighted)?, labels))
}

/// Random connected hypergraph: a spanning set of hyperedges (each new node
/// joins one earlier node plus random extras) followed by `extra` random
/// hyperedges. Weights are uniform on `[0.2, 5)`.
pub fn random_connected(nodes: usize, extra: usize, max_size: usize, seed: u64) -> Result<Hypergraph> {
    if nodes < 2 || max_size < 2 {
        return Err(Error::InvalidParams("need nodes >= 2 and max_size >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(nodes + extra);
    let fill = |rng: &mut ChaCha8Rng, mut members: Vec<usize>, limit: usize| {
        let size = rng.random_range(2..=max_size.min(limit)).max(members.len());
        while members.len() < size {
            let v = rng.random_range(0..limit);
            if !members.contains(&v) {
                members.push(v);
            }
        }
        members.into_iter().map(|v| (v, rng.random_range(0.2..5.0))).collect::<Vec<Incidence>>()
    };
    for v in 1..nodes {
        let anchor = rng.random_range(0..v);
        let e = fill(&mut rng, vec![v, anchor], v + 1);
        edges.push(e);
    }
    for _ in 0..extra {
        let e = fill(&mut rng, Vec::new(), nodes);
        edges.push(e);
    }
    Hypergraph::with_nodes(nodes, &edges)
}
