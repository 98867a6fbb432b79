//! Transition kernels of the simple and frustrated random walks.
//!
//! Both walks are built from the same pairwise affinity
//!
//! ```text
//! w_ij = Σ_α (δ_α − e_iα) · min(e_iα, e_jα)        (i ≠ j)
//! d_i  = Σ_{k≠i} w_ik
//! ```
//!
//! The simple walk moves `i → j` with probability `w_ij / d_i`. The
//! frustrated walk multiplies that proposal by the acceptance `w_ji / d_j`
//! and keeps the rejected mass on the diagonal.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::linalg::CsrMatrix;
use crate::par::{self, Execution};

/// Tolerated negative rounding on a frustrated diagonal before it is an error.
const DIAGONAL_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Simple,
    Frustrated,
}

impl Scenario {
    pub const ALL: [Scenario; 2] = [Scenario::Simple, Scenario::Frustrated];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Simple => "simple",
            Scenario::Frustrated => "frustrated",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "simple" | "srw" => Ok(Scenario::Simple),
            "frustrated" | "frw" => Ok(Scenario::Frustrated),
            other => Err(Error::InvalidParams(format!("unknown scenario '{other}'"))),
        }
    }
}

/// Pairwise affinities `w_ij` and out-strengths `d_i` of a hypergraph.
#[derive(Debug, Clone)]
pub struct Affinities {
    weights: CsrMatrix,
    out_strength: Vec<f64>,
    component: Vec<usize>,
}

impl Affinities {
    pub fn compute(h: &Hypergraph) -> Self {
        Self::compute_with(h, Execution::default())
    }

    pub fn compute_with(h: &Hypergraph, exec: Execution) -> Self {
        let n = h.node_count();
        let rows = par::map_indexed_with(
            exec,
            n,
            || (vec![0.0f64; n], Vec::<usize>::new()),
            |(acc, touched), i| affinity_row(h, i, acc, touched),
        );
        let weights = CsrMatrix::from_sorted_rows(rows);
        let out_strength = (0..n).map(|i| weights.row(i).1.iter().sum()).collect();
        Self { weights, out_strength, component: h.component_labels() }
    }

    pub fn node_count(&self) -> usize {
        self.out_strength.len()
    }

    /// `w_ij` for all neighbors `j` of `i`, sorted by `j`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        self.weights.row(i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.weights.get(i, j)
    }

    pub fn out_strength(&self, i: usize) -> f64 {
        self.out_strength[i]
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.weights
    }

    /// Whether `a` and `b` lie in the same connected component.
    pub fn connected(&self, a: usize, b: usize) -> bool {
        self.component[a] == self.component[b]
    }

    fn check_strengths(&self) -> Result<()> {
        match self.out_strength.iter().position(|&d| d <= 0.0 || d.is_nan()) {
            Some(i) => Err(Error::IsolatedNode(i)),
            None => Ok(()),
        }
    }
}

fn affinity_row(h: &Hypergraph, i: usize, acc: &mut [f64], touched: &mut Vec<usize>) -> (Vec<usize>, Vec<f64>) {
    for &(alpha, e_i) in h.node_incidence(i) {
        let members = h.members(alpha);
        // δ_α − e_iα, summed directly so a dominant e_iα cannot cancel it away
        let cohesion: f64 = members.iter().filter(|m| m.0 != i).map(|m| m.1).sum();
        if cohesion == 0.0 {
            continue;
        }
        for &(j, e_j) in members {
            if j == i {
                continue;
            }
            if acc[j] == 0.0 {
                touched.push(j);
            }
            acc[j] += cohesion * e_i.min(e_j);
        }
    }
    touched.sort_unstable();
    let mut cols = Vec::with_capacity(touched.len());
    let mut vals = Vec::with_capacity(touched.len());
    for &j in touched.iter() {
        if acc[j] > 0.0 {
            cols.push(j);
            vals.push(acc[j]);
        }
        acc[j] = 0.0;
    }
    touched.clear();
    (cols, vals)
}

/// Neighbor affinities of node `i`: every `j ≠ i` with `w_ij > 0`.
pub fn node_affinities(h: &Hypergraph, i: usize) -> Result<Vec<(usize, f64)>> {
    h.check_node(i)?;
    let mut acc = vec![0.0; h.node_count()];
    let mut touched = Vec::new();
    let (c, v) = affinity_row(h, i, &mut acc, &mut touched);
    Ok(c.into_iter().zip(v).collect())
}

/// Row-stochastic transition matrix of one walk scenario.
#[derive(Debug, Clone)]
pub struct TransitionKernel {
    scenario: Scenario,
    matrix: CsrMatrix,
    affinities: Arc<Affinities>,
}

impl TransitionKernel {
    pub fn new(h: &Hypergraph, scenario: Scenario) -> Result<Self> {
        Self::from_affinities(Arc::new(Affinities::compute(h)), scenario, Execution::default())
    }

    pub fn from_affinities(affinities: Arc<Affinities>, scenario: Scenario, exec: Execution) -> Result<Self> {
        affinities.check_strengths()?;
        let matrix = match scenario {
            Scenario::Simple => simple_matrix(&affinities, exec),
            Scenario::Frustrated => frustrated_matrix(&affinities, exec)?,
        };
        Ok(Self { scenario, matrix, affinities })
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn affinities(&self) -> &Affinities {
        &self.affinities
    }

    pub fn node_count(&self) -> usize {
        self.matrix.dim()
    }

    pub fn probability(&self, from: usize, to: usize) -> f64 {
        self.matrix.get(from, to)
    }

    /// Neighbors of `i`: nodes with a non-zero affinity, excluding `i` itself.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        self.affinities.row(i).0
    }
}

/// Kernels for both scenarios sharing one affinity computation.
pub fn both_kernels(h: &Hypergraph, exec: Execution) -> Result<(TransitionKernel, TransitionKernel)> {
    let aff = Arc::new(Affinities::compute_with(h, exec));
    Ok((
        TransitionKernel::from_affinities(aff.clone(), Scenario::Simple, exec)?,
        TransitionKernel::from_affinities(aff, Scenario::Frustrated, exec)?,
    ))
}

pub fn simple_kernel(h: &Hypergraph) -> Result<TransitionKernel> {
    TransitionKernel::new(h, Scenario::Simple)
}

pub fn frustrated_kernel(h: &Hypergraph) -> Result<TransitionKernel> {
    TransitionKernel::new(h, Scenario::Frustrated)
}

fn simple_matrix(aff: &Affinities, exec: Execution) -> CsrMatrix {
    let rows = par::map_indexed(exec, aff.node_count(), |i| {
        let (c, v) = aff.row(i);
        let d = aff.out_strength(i);
        (c.to_vec(), v.iter().map(|w| w / d).collect())
    });
    CsrMatrix::from_sorted_rows(rows)
}

fn frustrated_matrix(aff: &Affinities, exec: Execution) -> Result<CsrMatrix> {
    let reverse = aff.matrix().transpose();
    let rows = par::map_indexed(exec, aff.node_count(), |i| -> Result<(Vec<usize>, Vec<f64>)> {
        let (c, v) = aff.row(i);
        let (rc, rv) = reverse.row(i);
        let d_i = aff.out_strength(i);
        let mut cols = Vec::with_capacity(c.len() + 1);
        let mut vals = Vec::with_capacity(c.len() + 1);
        let mut off_diagonal = 0.0;
        let mut diag_slot = None;
        let mut k = 0;
        for (&j, &w_ij) in c.iter().zip(v) {
            while k < rc.len() && rc[k] < j {
                k += 1;
            }
            if k == rc.len() || rc[k] != j {
                continue;
            }
            let w_ji = rv[k];
            if diag_slot.is_none() && j > i {
                diag_slot = Some(cols.len());
            }
            let t = (w_ij / d_i) * (w_ji / aff.out_strength(j));
            if t > 0.0 {
                off_diagonal += t;
                cols.push(j);
                vals.push(t);
            }
        }
        let mut diag = 1.0 - off_diagonal;
        if diag < 0.0 {
            if diag > -DIAGONAL_CLAMP {
                diag = 0.0;
            } else {
                return Err(Error::Internal(format!("frustrated diagonal {diag:e} at node {i}")));
            }
        }
        if diag > 0.0 {
            let slot = diag_slot.unwrap_or(cols.len());
            cols.insert(slot, i);
            vals.insert(slot, diag);
        }
        Ok((cols, vals))
    });
    Ok(CsrMatrix::from_sorted_rows(rows.into_iter().collect::<Result<_>>()?))
}
