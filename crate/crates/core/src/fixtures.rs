//! Small hand-checkable hypergraphs shared by tests, benches and docs.

use crate::hypergraph::Hypergraph;

/// Five nodes, three unit-weight hyperedges: `{0,1,2}`, `{2,3}`, `{3,4}`.
///
/// With node 3 as target, node 4 is an adherent and the frustrated walk has
/// expected hitting times 35, 35, 30 and 2 from nodes 0, 1, 2 and 4.
pub fn five_node_example() -> Hypergraph {
    Hypergraph::from_hyperedges(&[
        vec![(0, 1.0), (1, 1.0), (2, 1.0)],
        vec![(2, 1.0), (3, 1.0)],
        vec![(3, 1.0), (4, 1.0)],
    ])
    .expect("fixture is valid")
}

/// The path `0 - 1 - 2` as two unit hyperedges.
pub fn three_node_path() -> Hypergraph {
    Hypergraph::from_hyperedges(&[vec![(0, 1.0), (1, 1.0)], vec![(1, 1.0), (2, 1.0)]]).expect("fixture is valid")
}

/// A single hyperedge `{0, 1}`.
pub fn two_node_edge() -> Hypergraph {
    Hypergraph::from_hyperedges(&[vec![(0, 1.0), (1, 1.0)]]).expect("fixture is valid")
}

/// Node ids in [`hub_leaf_friend`].
pub const HUB: usize = 0;
pub const FRIEND: usize = 1;
pub const LEAF: usize = 2;

/// A hub with a heavy presence in ten hyperedges, a friend sharing all of
/// them at high weight, ten minor members cycling through them, and a leaf
/// whose single hyperedge contains only the hub.
pub fn hub_leaf_friend() -> Hypergraph {
    let minors = 10;
    let mut edges = Vec::new();
    for k in 0..minors {
        let a = 3 + k;
        let b = 3 + (k + 1) % minors;
        edges.push(vec![(HUB, 5.0), (FRIEND, 3.0), (a, 1.0), (b, 1.0)]);
    }
    edges.push(vec![(HUB, 5.0), (LEAF, 1.0)]);
    Hypergraph::from_hyperedges(&edges).expect("fixture is valid")
}
