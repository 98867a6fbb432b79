use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::csr::CsrMatrix;

/// Power-iteration estimate of the Perron root of a non-negative matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    /// Lower Collatz–Wielandt bound `min_i (Mv)_i / v_i`; never exceeds ρ.
    pub estimate: f64,
    /// Upper Collatz–Wielandt bound `max_i (Mv)_i / v_i`; never below ρ.
    pub upper_bound: f64,
    pub iterations: usize,
}

/// Estimates `ρ(m)` for a non-negative matrix by iterating the lazy operator
/// `(I + m) / 2`, which shares the Perron vector of `m` but is aperiodic.
///
/// The start vector is `1 + ε·u` with `u` drawn from `seed`, so the first
/// lower bound is close to the minimum row sum and the bound only increases
/// from there. Iteration stops when the two bounds meet within `1e-12`.
pub fn spectral_radius_estimate(m: &CsrMatrix, iters: usize, seed: u64) -> SpectralEstimate {
    let n = m.dim();
    if n == 0 {
        return SpectralEstimate { estimate: 0.0, upper_bound: 0.0, iterations: 0 };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| 1.0 + 1e-6 * rng.random::<f64>()).collect();
    let mut mv = vec![0.0; n];
    let mut lower = 0.0;
    let mut upper = f64::INFINITY;

    for it in 0..=iters {
        m.matvec_into(&v, &mut mv, crate::par::Execution::Sequential).expect("square matrix");
        lower = f64::INFINITY;
        upper = 0.0;
        for (a, b) in mv.iter().zip(&v) {
            let ratio = a / b;
            lower = lower.min(ratio);
            upper = upper.max(ratio);
        }
        if upper - lower <= 1e-12 || it == iters {
            return SpectralEstimate { estimate: lower, upper_bound: upper, iterations: it };
        }
        let mut scale = 0.0f64;
        for (vi, mvi) in v.iter_mut().zip(&mv) {
            *vi = 0.5 * (*vi + mvi);
            scale = scale.max(*vi);
        }
        v.iter_mut().for_each(|vi| *vi /= scale);
    }
    SpectralEstimate { estimate: lower, upper_bound: upper, iterations: iters }
}
