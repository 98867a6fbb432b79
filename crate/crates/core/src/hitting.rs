//! Expected hitting times to a target node.
//!
//! For a target `t`, the walk restricted to the non-target nodes is the
//! substochastic matrix `B` (the kernel with row and column `t` removed).
//! With `x1[i] = T[i][t]`, the hitting-time distribution obeys
//! `P(N = n) = B^{n-1} x1` and the expected hitting times solve
//! `(I − B) x = 1`.
//!
//! Adherents, nodes whose only neighbor is `t`, are taken out of the system
//! and given closed forms: one step for the simple walk and `1/p` for the
//! frustrated walk, where `p = T[s][t]` is the acceptance probability.

use crate::error::{Error, Result};
use crate::kernel::{Scenario, TransitionKernel};
use crate::linalg::{solve_general, solve_spd, spectral_radius_estimate, CsrMatrix, Method, SolveOptions, SolveReport, SpectralEstimate};
use crate::par::{self, Execution};

/// Nodes whose only neighbor is `t`, with the probability `p` of stepping to
/// `t` (always 1 for the simple walk).
pub fn find_adherents(kernel: &TransitionKernel, t: usize) -> Result<Vec<(usize, f64)>> {
    check_node(kernel, t)?;
    Ok((0..kernel.node_count())
        .filter(|&s| s != t && kernel.neighbors(s) == [t])
        .map(|s| {
            let p = match kernel.scenario() {
                Scenario::Simple => 1.0,
                Scenario::Frustrated => kernel.probability(s, t),
            };
            (s, p)
        })
        .collect())
}

fn check_node(kernel: &TransitionKernel, node: usize) -> Result<()> {
    if node < kernel.node_count() {
        Ok(())
    } else {
        Err(Error::NodeOutOfRange { node, node_count: kernel.node_count() })
    }
}

/// The linear system for one target.
#[derive(Debug, Clone)]
pub struct TargetSystem {
    pub target: usize,
    pub scenario: Scenario,
    /// Hypergraph node behind each row of `b_matrix`, ascending.
    pub kept_nodes: Vec<usize>,
    pub adherents: Vec<(usize, f64)>,
    pub b_matrix: CsrMatrix,
    /// One-step probability of reaching the target from each kept node.
    pub x1: Vec<f64>,
}

impl TargetSystem {
    /// Builds the system, failing with [`Error::TargetIsWholeGraph`] when
    /// every source is an adherent and nothing is left to solve.
    pub fn build(kernel: &TransitionKernel, t: usize) -> Result<Self> {
        let sys = Self::build_allow_empty(kernel, t)?;
        if sys.kept_nodes.is_empty() {
            return Err(Error::TargetIsWholeGraph(t));
        }
        Ok(sys)
    }

    fn build_allow_empty(kernel: &TransitionKernel, t: usize) -> Result<Self> {
        check_node(kernel, t)?;
        let n = kernel.node_count();
        let aff = kernel.affinities();
        if let Some(node) = (0..n).find(|&s| !aff.connected(s, t)) {
            return Err(Error::Disconnected { target: t, node });
        }
        let adherents = find_adherents(kernel, t)?;
        let mut excluded = vec![false; n];
        excluded[t] = true;
        for &(s, _) in &adherents {
            excluded[s] = true;
        }
        let kept_nodes: Vec<usize> = (0..n).filter(|&s| !excluded[s]).collect();
        let b_matrix = kernel.matrix().principal_submatrix(&kept_nodes);
        let x1 = kept_nodes.iter().map(|&s| kernel.probability(s, t)).collect();
        Ok(Self { target: t, scenario: kernel.scenario(), kept_nodes, adherents, b_matrix, x1 })
    }

    /// Number of unknowns, `|V − {t}| − |adherents|`.
    pub fn dim(&self) -> usize {
        self.kept_nodes.len()
    }

    pub fn spectral_radius(&self, iters: usize, seed: u64) -> SpectralEstimate {
        spectral_radius_estimate(&self.b_matrix, iters, seed)
    }

    /// Solves `(I − B) x = 1`, with conjugate gradients for the frustrated
    /// walk (symmetric `I − B`) and BiCGSTAB for the simple walk.
    pub fn solve(&self, opts: &SolveOptions) -> Result<(Vec<f64>, SolveReport)> {
        let n = self.dim();
        if n == 0 {
            let method = self.method();
            return Ok((Vec::new(), SolveReport { iterations: 0, relative_residual: 0.0, converged: true, method }));
        }
        let a = self.b_matrix.identity_minus();
        let ones = vec![1.0; n];
        let sol = match self.method() {
            Method::Cg => solve_spd(&a, &ones, opts)?,
            Method::BiCgStab => solve_general(&a, &ones, opts)?,
        };
        Ok((sol.x, sol.report))
    }

    fn method(&self) -> Method {
        match self.scenario {
            Scenario::Frustrated => Method::Cg,
            Scenario::Simple => Method::BiCgStab,
        }
    }
}

/// Expected hitting times from every source to one target.
#[derive(Debug, Clone)]
pub struct HittingTimeResult {
    pub target: usize,
    pub scenario: Scenario,
    /// Indexed by node; the target's own entry is 0.
    pub times: Vec<f64>,
    pub report: SolveReport,
    pub adherents: Vec<(usize, f64)>,
}

impl HittingTimeResult {
    /// `(source, expected hitting time)` for every source `s ≠ t`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.times.iter().copied().enumerate().filter(move |&(s, _)| s != self.target)
    }

    pub fn get(&self, source: usize) -> Option<f64> {
        (source != self.target).then(|| self.times.get(source).copied()).flatten()
    }
}

pub fn expected_hitting_times(kernel: &TransitionKernel, t: usize, opts: &SolveOptions) -> Result<HittingTimeResult> {
    let sys = TargetSystem::build_allow_empty(kernel, t)?;
    let (x, report) = sys.solve(opts)?;
    let mut times = vec![0.0; kernel.node_count()];
    for (&s, &e) in sys.kept_nodes.iter().zip(&x) {
        times[s] = e;
    }
    for &(s, p) in &sys.adherents {
        times[s] = 1.0 / p;
    }
    Ok(HittingTimeResult { target: t, scenario: kernel.scenario(), times, report, adherents: sys.adherents })
}

/// Solves each target independently. With [`Execution::Parallel`] the
/// targets are spread over the worker pool and each solve runs sequentially.
pub fn hitting_times_for_targets(
    kernel: &TransitionKernel,
    targets: &[usize],
    opts: &SolveOptions,
    exec: Execution,
) -> Vec<Result<HittingTimeResult>> {
    let inner = SolveOptions { exec: if exec.is_parallel() { Execution::Sequential } else { opts.exec }, ..*opts };
    par::map_indexed(exec, targets.len(), |k| expected_hitting_times(kernel, targets[k], &inner))
}

/// `P(N = n)` for `n = 1..=n_max` from every node to one target.
#[derive(Debug, Clone)]
pub struct HittingTimeDistribution {
    pub target: usize,
    /// `probabilities[n - 1][s] = P(N_t^{(s)} = n)`; the target column is 0.
    pub probabilities: Vec<Vec<f64>>,
}

impl HittingTimeDistribution {
    pub fn probability(&self, source: usize, n: usize) -> f64 {
        self.probabilities[n - 1][source]
    }

    /// `Σ_{n ≤ n_max} P(N = n)` for one source.
    pub fn total(&self, source: usize) -> f64 {
        self.probabilities.iter().map(|row| row[source]).sum()
    }

    /// Running values of `Σ_{m ≤ n} m · P(N = m)` for `n = 1..=n_max`.
    pub fn truncated_means(&self, source: usize) -> Vec<f64> {
        self.probabilities
            .iter()
            .enumerate()
            .scan(0.0, |acc, (k, row)| {
                *acc += (k + 1) as f64 * row[source];
                Some(*acc)
            })
            .collect()
    }
}

/// Iterates `X_n = B X_{n−1}` from `X_1 = x1`; adherents follow the
/// geometric law `(1 − p)^{n−1} p`.
pub fn hitting_time_distribution(kernel: &TransitionKernel, t: usize, n_max: usize) -> Result<HittingTimeDistribution> {
    if n_max == 0 {
        return Err(Error::InvalidParams("n_max must be at least 1".into()));
    }
    let sys = TargetSystem::build_allow_empty(kernel, t)?;
    let n = kernel.node_count();
    let mut probabilities = Vec::with_capacity(n_max);
    let mut current = sys.x1.clone();
    let mut next = vec![0.0; current.len()];
    for step in 1..=n_max {
        let mut row = vec![0.0; n];
        for (&s, &p) in sys.kept_nodes.iter().zip(&current) {
            row[s] = p;
        }
        for &(s, p) in &sys.adherents {
            row[s] = (1.0 - p).powi(step as i32 - 1) * p;
        }
        probabilities.push(row);
        sys.b_matrix.matvec_into(&current, &mut next, Execution::Sequential)?;
        std::mem::swap(&mut current, &mut next);
    }
    Ok(HittingTimeDistribution { target: t, probabilities })
}
