//! Step-by-step simulation of the walks.
//!
//! Every transition drawn from a kernel row counts as one step, including a
//! frustrated walker staying put after a declined proposal.
//!
//! Randomness comes from ChaCha8 streams: the seed selects the key and a
//! work-unit index selects the stream, so results do not depend on how many
//! threads run the units or in which order they finish.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernel::{Scenario, TransitionKernel};
use crate::par::{self, Execution};

/// Runs per work unit; fixed so the stream assignment is thread-independent.
const RUNS_PER_CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy)]
pub struct WalkConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub max_steps: u64,
    pub runs: u64,
    pub exec: Execution,
}

impl WalkConfig {
    pub fn new(scenario: Scenario, runs: u64, seed: u64) -> Self {
        Self { scenario, seed, max_steps: 10_000_000, runs, exec: Execution::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.runs == 0 || self.max_steps == 0 {
            return Err(Error::InvalidParams("runs and max_steps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Cumulative row distributions for sampling successors by binary search.
#[derive(Debug, Clone)]
pub struct RowSampler<'a> {
    kernel: &'a TransitionKernel,
    cumulative: Vec<f64>,
}

impl<'a> RowSampler<'a> {
    pub fn new(kernel: &'a TransitionKernel) -> Self {
        let m = kernel.matrix();
        let mut cumulative = Vec::with_capacity(m.nnz());
        for i in 0..m.dim() {
            let mut acc = 0.0;
            for &p in m.row(i).1 {
                acc += p;
                cumulative.push(acc);
            }
        }
        Self { kernel, cumulative }
    }

    pub fn step<R: Rng + ?Sized>(&self, from: usize, rng: &mut R) -> usize {
        let m = self.kernel.matrix();
        let (cols, _) = m.row(from);
        let cum = &self.cumulative[m.row_range(from)];
        // rows sum to 1 only up to rounding; scale the draw to the actual total
        let u = rng.random::<f64>() * cum[cum.len() - 1];
        let k = cum.partition_point(|&c| c <= u).min(cols.len() - 1);
        cols[k]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HittingEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√completed`; absent with one sample.
    pub std_error: Option<f64>,
    pub completed: u64,
    pub censored: u64,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    completed: u64,
    censored: u64,
    sum: u128,
    sum_sq: u128,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            completed: self.completed + o.completed,
            censored: self.censored + o.censored,
            sum: self.sum + o.sum,
            sum_sq: self.sum_sq + o.sum_sq,
        }
    }
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Mean hitting time of `t` from `s` over `cfg.runs` simulated walks.
/// Walks still running after `max_steps` are censored and left out of the mean.
pub fn simulate_hitting_time(kernel: &TransitionKernel, s: usize, t: usize, cfg: &WalkConfig) -> Result<HittingEstimate> {
    cfg.validate()?;
    let n = kernel.node_count();
    for node in [s, t] {
        if node >= n {
            return Err(Error::NodeOutOfRange { node, node_count: n });
        }
    }
    if s == t {
        return Err(Error::InvalidParams("source and target must differ".into()));
    }
    if kernel.scenario() != cfg.scenario {
        return Err(Error::InvalidParams(format!(
            "kernel is {} but the walk config asks for {}",
            kernel.scenario(),
            cfg.scenario
        )));
    }
    let sampler = RowSampler::new(kernel);
    let chunks = cfg.runs.div_ceil(RUNS_PER_CHUNK);
    let tallies = par::map_indexed(cfg.exec, chunks as usize, |c| {
        let c = c as u64;
        let runs = RUNS_PER_CHUNK.min(cfg.runs - c * RUNS_PER_CHUNK);
        let mut rng = stream(cfg.seed, c);
        let mut tally = Tally::default();
        for _ in 0..runs {
            let mut node = s;
            let mut steps = 0u64;
            while node != t && steps < cfg.max_steps {
                node = sampler.step(node, &mut rng);
                steps += 1;
            }
            if node == t {
                tally.completed += 1;
                tally.sum += steps as u128;
                tally.sum_sq += (steps as u128) * (steps as u128);
            } else {
                tally.censored += 1;
            }
        }
        tally
    });
    let total = tallies.into_iter().fold(Tally::default(), Tally::merge);
    if total.completed == 0 {
        return Err(Error::AllCensored { runs: cfg.runs, max_steps: cfg.max_steps });
    }
    let k = total.completed as f64;
    let mean = total.sum as f64 / k;
    let std_error = (total.completed > 1).then(|| {
        // exact integer numerator: k Σx² − (Σx)²
        let spread = total.completed as u128 * total.sum_sq - total.sum * total.sum;
        let var = spread as f64 / (k * (k - 1.0));
        (var / k).sqrt()
    });
    Ok(HittingEstimate { mean, std_error, completed: total.completed, censored: total.censored })
}

/// One walk of `steps` transitions from every node (paths have `steps + 1`
/// entries). Node `i` uses stream `i` of `seed`.
pub fn sample_paths(kernel: &TransitionKernel, steps: usize, seed: u64, exec: Execution) -> Result<Vec<Vec<usize>>> {
    if steps == 0 {
        return Err(Error::InvalidParams("steps per node must be at least 1".into()));
    }
    let sampler = RowSampler::new(kernel);
    Ok(par::map_indexed(exec, kernel.node_count(), |start| {
        let mut rng = stream(seed, start as u64);
        let mut path = Vec::with_capacity(steps + 1);
        let mut node = start;
        path.push(node);
        for _ in 0..steps {
            node = sampler.step(node, &mut rng);
            path.push(node);
        }
        path
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::kernel::{frustrated_kernel, simple_kernel};

    #[test]
    fn two_node_walk_takes_one_step() {
        let k = simple_kernel(&fixtures::two_node_edge()).unwrap();
        let est = simulate_hitting_time(&k, 0, 1, &WalkConfig::new(Scenario::Simple, 1000, 3)).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.std_error, Some(0.0));
        assert_eq!(est.completed, 1000);
    }

    #[test]
    fn single_run_has_no_std_error() {
        let k = frustrated_kernel(&fixtures::five_node_example()).unwrap();
        let est = simulate_hitting_time(&k, 0, 3, &WalkConfig::new(Scenario::Frustrated, 1, 3)).unwrap();
        assert_eq!(est.std_error, None);
        assert!(est.mean >= 2.0);
    }

    #[test]
    fn one_step_budget_censors_everything() {
        let k = frustrated_kernel(&fixtures::five_node_example()).unwrap();
        let cfg = WalkConfig { max_steps: 1, ..WalkConfig::new(Scenario::Frustrated, 100, 3) };
        assert_eq!(simulate_hitting_time(&k, 0, 3, &cfg).unwrap_err(), Error::AllCensored { runs: 100, max_steps: 1 });
    }

    #[test]
    fn censoring_is_counted() {
        let k = frustrated_kernel(&fixtures::five_node_example()).unwrap();
        let cfg = WalkConfig { max_steps: 3, ..WalkConfig::new(Scenario::Frustrated, 10_000, 3) };
        let est = simulate_hitting_time(&k, 4, 3, &cfg).unwrap();
        assert_eq!(est.completed + est.censored, 10_000);
        assert!(est.censored > 0);
    }

    #[test]
    fn rejects_bad_requests() {
        let k = simple_kernel(&fixtures::five_node_example()).unwrap();
        let cfg = WalkConfig::new(Scenario::Simple, 10, 0);
        assert!(simulate_hitting_time(&k, 3, 3, &cfg).is_err());
        assert!(simulate_hitting_time(&k, 0, 9, &cfg).is_err());
        let frw = WalkConfig::new(Scenario::Frustrated, 10, 0);
        assert!(simulate_hitting_time(&k, 0, 3, &frw).is_err());
        let none = WalkConfig::new(Scenario::Simple, 0, 0);
        assert!(simulate_hitting_time(&k, 0, 3, &none).is_err());
    }

    #[test]
    fn execution_does_not_change_estimate() {
        let k = frustrated_kernel(&fixtures::five_node_example()).unwrap();
        let seq = WalkConfig { exec: Execution::Sequential, ..WalkConfig::new(Scenario::Frustrated, 20_000, 9) };
        let par = WalkConfig { exec: Execution::Parallel, ..seq };
        assert_eq!(simulate_hitting_time(&k, 2, 3, &seq).unwrap(), simulate_hitting_time(&k, 2, 3, &par).unwrap());
    }

    #[test]
    fn paths_shape_and_determinism() {
        let k = simple_kernel(&fixtures::five_node_example()).unwrap();
        let paths = sample_paths(&k, 3200, 5, Execution::Parallel).unwrap();
        assert_eq!(paths.len(), 5);
        assert!(paths.iter().all(|p| p.len() == 3201));
        assert_eq!(paths, sample_paths(&k, 3200, 5, Execution::Sequential).unwrap());
        assert_eq!(sample_paths(&k, 1, 0, Execution::Sequential).unwrap()[4], vec![4, 3]);
        assert!(sample_paths(&k, 0, 0, Execution::Sequential).is_err());
    }

    #[test]
    fn consecutive_path_nodes_are_kernel_transitions() {
        let k = frustrated_kernel(&fixtures::hub_leaf_friend()).unwrap();
        for path in sample_paths(&k, 500, 1, Execution::Sequential).unwrap() {
            for w in path.windows(2) {
                assert!(k.probability(w[0], w[1]) > 0.0);
            }
        }
    }
}
