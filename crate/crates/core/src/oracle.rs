//! Dense probability-generating-function oracle for small systems.
//!
//! `f(z) = z (I − zB)^{-1} x1` collects the hitting-time distribution of
//! every source. `f(1)` is the total probability of ever hitting the target
//! (all ones), and `(I − B) f'(1) = f(1)` yields the expected hitting times.
//!
//! Unlike the sparse engine, adherents are kept inside `B` here, so their
//! closed forms are checked rather than assumed.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernel::TransitionKernel;

pub const DEFAULT_DENSE_LIMIT: usize = 2000;
pub const NORMALIZATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct GeneratingFunction {
    target: usize,
    node_count: usize,
    sources: Vec<usize>,
    b: DMatrix<f64>,
    x1: DVector<f64>,
}

impl GeneratingFunction {
    pub fn new(kernel: &TransitionKernel, t: usize, dense_limit: usize) -> Result<Self> {
        let n = kernel.node_count();
        if t >= n {
            return Err(Error::NodeOutOfRange { node: t, node_count: n });
        }
        let sources: Vec<usize> = (0..n).filter(|&s| s != t).collect();
        if sources.len() > dense_limit {
            return Err(Error::DenseLimitExceeded { limit: dense_limit, size: sources.len() });
        }
        let m = kernel.matrix();
        let b = DMatrix::from_fn(sources.len(), sources.len(), |i, j| m.get(sources[i], sources[j]));
        let x1 = DVector::from_iterator(sources.len(), sources.iter().map(|&s| m.get(s, t)));
        Ok(Self { target: t, node_count: n, sources, b, x1 })
    }

    /// `f(z)` for every source, in ascending node order (target skipped).
    pub fn value(&self, z: f64) -> Result<Vec<f64>> {
        let k = self.sources.len();
        let a = DMatrix::identity(k, k) - &self.b * z;
        let y = a.lu().solve(&self.x1).ok_or_else(|| Error::Internal(format!("I − zB singular at z = {z}")))?;
        Ok((y * z).as_slice().to_vec())
    }

    /// `max_s |f_s(1) − 1|`.
    pub fn normalization_defect(&self) -> Result<f64> {
        Ok(self.value(1.0)?.iter().map(|f| (f - 1.0).abs()).fold(0.0, f64::max))
    }

    /// `f'(1)` scattered to node order; the target's entry is 0.
    pub fn expected_hitting_times(&self) -> Result<Vec<f64>> {
        let k = self.sources.len();
        let lu = (DMatrix::identity(k, k) - &self.b).lu();
        let f1 = lu.solve(&self.x1).ok_or_else(|| Error::Internal("I − B singular".into()))?;
        let derivative = lu.solve(&f1).ok_or_else(|| Error::Internal("I − B singular".into()))?;
        let mut times = vec![0.0; self.node_count];
        for (&s, &e) in self.sources.iter().zip(derivative.iter()) {
            times[s] = e;
        }
        Ok(times)
    }

    pub fn target(&self) -> usize {
        self.target
    }
}

/// Expected hitting times from the dense generating function.
///
/// The normalization `f(1) = 1` is checked to [`NORMALIZATION_TOL`]: a
/// violation is an error in debug builds and a logged warning otherwise.
pub fn generating_function_oracle(kernel: &TransitionKernel, t: usize, dense_limit: usize) -> Result<Vec<f64>> {
    let gf = GeneratingFunction::new(kernel, t, dense_limit)?;
    let defect = gf.normalization_defect()?;
    if defect > NORMALIZATION_TOL {
        if cfg!(debug_assertions) {
            return Err(Error::NormalizationFailed { defect });
        }
        log::warn!("generating function normalization off by {defect:e} for target {t}");
    }
    gf.expected_hitting_times()
}
