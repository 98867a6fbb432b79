//! Krylov solvers for `A x = b`: conjugate gradients for symmetric
//! positive-definite systems and BiCGSTAB for general nonsingular ones.
//! Both accept an optional Jacobi (diagonal) preconditioner.

use std::fmt;

use super::csr::CsrMatrix;
use crate::error::{Error, Result};
use crate::par::Execution;

/// Number of consecutive breakdown restarts tolerated before giving up.
const MAX_BREAKDOWNS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Cg,
    BiCgStab,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Cg => "cg",
            Method::BiCgStab => "bicgstab",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// `‖b − A x‖₂ / ‖b‖₂`, recomputed from the returned `x`.
    pub relative_residual: f64,
    pub converged: bool,
    pub method: Method,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub x: Vec<f64>,
    pub report: SolveReport,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub tol: f64,
    /// Defaults to `max(1000, 2n)` when `None`.
    pub max_iter: Option<usize>,
    pub jacobi: bool,
    pub exec: Execution,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: None, jacobi: false, exec: Execution::Sequential }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    fn iteration_cap(&self, n: usize) -> usize {
        self.max_iter.unwrap_or_else(|| 1000.max(2 * n))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

struct System<'a> {
    a: &'a CsrMatrix,
    b: &'a [f64],
    b_norm: f64,
    inv_diag: Option<Vec<f64>>,
    exec: Execution,
}

impl<'a> System<'a> {
    fn new(a: &'a CsrMatrix, b: &'a [f64], opts: &SolveOptions) -> Result<Self> {
        if b.len() != a.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), actual: b.len() });
        }
        let inv_diag = opts.jacobi.then(|| {
            a.diagonal().into_iter().map(|d| if d > 0.0 && d.is_finite() { 1.0 / d } else { 1.0 }).collect()
        });
        Ok(Self { a, b, b_norm: norm(b), inv_diag, exec: opts.exec })
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.a.matvec_into(x, y, self.exec).expect("dimensions checked at construction");
    }

    fn precondition(&self, r: &[f64], z: &mut [f64]) {
        match &self.inv_diag {
            Some(d) => z.iter_mut().zip(r).zip(d).for_each(|((zi, ri), di)| *zi = ri * di),
            None => z.copy_from_slice(r),
        }
    }

    fn relative(&self, r_norm: f64) -> f64 {
        if self.b_norm > 0.0 {
            r_norm / self.b_norm
        } else {
            r_norm
        }
    }

    /// Overwrites `r` with `b − A x` and returns its relative norm.
    fn true_residual(&self, x: &[f64], r: &mut [f64]) -> f64 {
        self.apply(x, r);
        for (ri, bi) in r.iter_mut().zip(self.b) {
            *ri = bi - *ri;
        }
        self.relative(norm(r))
    }

    fn finish(&self, x: Vec<f64>, iterations: usize, tol: f64, method: Method) -> Result<Solution> {
        let mut r = vec![0.0; x.len()];
        let relative_residual = self.true_residual(&x, &mut r);
        let converged = relative_residual <= tol;
        let report = SolveReport { iterations, relative_residual, converged, method };
        if converged {
            Ok(Solution { x, report })
        } else {
            Err(Error::NotConverged(report))
        }
    }
}

/// Conjugate gradients. `a` must be symmetric positive definite; this is only
/// detected indirectly, through curvature breakdown or non-convergence.
pub fn solve_spd(a: &CsrMatrix, b: &[f64], opts: &SolveOptions) -> Result<Solution> {
    let sys = System::new(a, b, opts)?;
    let n = a.dim();
    let cap = opts.iteration_cap(n);
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    if sys.relative(norm(&r)) <= opts.tol {
        return sys.finish(x, 0, opts.tol, Method::Cg);
    }
    let mut z = vec![0.0; n];
    let mut q = vec![0.0; n];
    sys.precondition(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut iterations = 0;

    while iterations < cap {
        sys.apply(&p, &mut q);
        let curvature = dot(&p, &q);
        if !(curvature > 0.0 && curvature.is_finite()) {
            break;
        }
        let alpha = rz / curvature;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        iterations += 1;

        if sys.relative(norm(&r)) <= opts.tol {
            // the recurrence residual drifts from the true one; confirm
            if sys.true_residual(&x, &mut r) <= opts.tol {
                break;
            }
            sys.precondition(&r, &mut z);
            p.copy_from_slice(&z);
            rz = dot(&r, &z);
            continue;
        }

        sys.precondition(&r, &mut z);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    sys.finish(x, iterations, opts.tol, Method::Cg)
}

/// BiCGSTAB with right preconditioning, for nonsymmetric nonsingular `a`.
/// Breakdowns trigger a restart from the current iterate; repeated
/// breakdowns without progress end the solve as not converged.
pub fn solve_general(a: &CsrMatrix, b: &[f64], opts: &SolveOptions) -> Result<Solution> {
    let sys = System::new(a, b, opts)?;
    let n = a.dim();
    let cap = opts.iteration_cap(n);
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    if sys.relative(norm(&r)) <= opts.tol {
        return sys.finish(x, 0, opts.tol, Method::BiCgStab);
    }

    let mut r_hat = r.clone();
    let mut p = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut p_hat = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut s_hat = vec![0.0; n];
    let mut t = vec![0.0; n];
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut iterations = 0;
    let mut breakdowns = 0;

    macro_rules! restart {
        () => {{
            breakdowns += 1;
            if breakdowns > MAX_BREAKDOWNS {
                break;
            }
            r_hat.copy_from_slice(&r);
            p.iter_mut().for_each(|e| *e = 0.0);
            v.iter_mut().for_each(|e| *e = 0.0);
            rho = 1.0;
            alpha = 1.0;
            omega = 1.0;
            continue;
        }};
    }

    while iterations < cap {
        let rho_next = dot(&r_hat, &r);
        if rho_next == 0.0 || !rho_next.is_finite() {
            restart!();
        }
        let beta = (rho_next / rho) * (alpha / omega);
        rho = rho_next;
        for k in 0..n {
            p[k] = r[k] + beta * (p[k] - omega * v[k]);
        }
        sys.precondition(&p, &mut p_hat);
        sys.apply(&p_hat, &mut v);
        let denom = dot(&r_hat, &v);
        if denom == 0.0 || !denom.is_finite() {
            restart!();
        }
        alpha = rho / denom;
        for k in 0..n {
            s[k] = r[k] - alpha * v[k];
        }
        iterations += 1;

        if sys.relative(norm(&s)) <= opts.tol {
            axpy(alpha, &p_hat, &mut x);
            if sys.true_residual(&x, &mut r) <= opts.tol {
                break;
            }
            restart!();
        }

        sys.precondition(&s, &mut s_hat);
        sys.apply(&s_hat, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        axpy(alpha, &p_hat, &mut x);
        axpy(omega, &s_hat, &mut x);
        for k in 0..n {
            r[k] = s[k] - omega * t[k];
        }

        if sys.relative(norm(&r)) <= opts.tol {
            if sys.true_residual(&x, &mut r) <= opts.tol {
                break;
            }
            restart!();
        }
        if omega == 0.0 || !omega.is_finite() {
            restart!();
        }
        breakdowns = 0;
    }
    sys.finish(x, iterations, opts.tol, Method::BiCgStab)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense(m: &CsrMatrix) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(m.dim(), m.dim());
        for (i, j, v) in m.triplets() {
            d[(i, j)] = v;
        }
        d
    }

    fn dense_solve(m: &CsrMatrix, b: &[f64]) -> Vec<f64> {
        dense(m).lu().solve(&DVector::from_column_slice(b)).unwrap().as_slice().to_vec()
    }

    fn worked_example_system() -> CsrMatrix {
        CsrMatrix::from_rows(vec![
            vec![(0, 11.0 / 20.0), (1, 0.25), (2, 0.2)],
            vec![(0, 0.25), (1, 11.0 / 20.0), (2, 0.2)],
            vec![(0, 0.2), (1, 0.2), (2, 0.5)],
        ])
        .unwrap()
        .identity_minus()
    }

    #[test]
    fn identity_in_one_iteration() {
        let b = vec![1.0, -2.0, 3.5];
        for sol in [
            solve_spd(&CsrMatrix::identity(3), &b, &SolveOptions::default()).unwrap(),
            solve_general(&CsrMatrix::identity(3), &b, &SolveOptions::default()).unwrap(),
        ] {
            assert_eq!(sol.x, b);
            assert_eq!(sol.report.iterations, 1);
            assert!(sol.report.converged);
        }
    }

    #[test]
    fn diagonal_system() {
        let a = CsrMatrix::from_diagonal(&[2.0, 4.0]);
        let sol = solve_spd(&a, &[2.0, 4.0], &SolveOptions::default()).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-14 && (sol.x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn worked_example_cg() {
        let sol = solve_spd(&worked_example_system(), &[1.0; 3], &SolveOptions::default()).unwrap();
        for (x, e) in sol.x.iter().zip([35.0, 35.0, 30.0]) {
            assert!((x - e).abs() < 1e-8, "{x} vs {e}");
        }
        assert!(sol.report.iterations <= 3);
    }

    #[test]
    fn worked_example_bicgstab_and_jacobi() {
        let a = worked_example_system();
        for jacobi in [false, true] {
            let opts = SolveOptions { jacobi, ..Default::default() };
            for sol in [solve_general(&a, &[1.0; 3], &opts).unwrap(), solve_spd(&a, &[1.0; 3], &opts).unwrap()] {
                for (x, e) in sol.x.iter().zip([35.0, 35.0, 30.0]) {
                    assert!((x - e).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn zero_rhs() {
        let sol = solve_general(&worked_example_system(), &[0.0; 3], &SolveOptions::default()).unwrap();
        assert_eq!(sol.x, vec![0.0; 3]);
        assert_eq!(sol.report.iterations, 0);
    }

    #[test]
    fn singular_system_does_not_converge() {
        let a = CsrMatrix::from_rows(vec![vec![(0, 1.0)], vec![]]).unwrap();
        match solve_general(&a, &[1.0, 1.0], &SolveOptions::default()) {
            Err(Error::NotConverged(report)) => {
                assert!(!report.converged);
                assert_eq!(report.method, Method::BiCgStab);
                assert!(report.relative_residual > 1e-3);
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
        assert!(matches!(solve_spd(&a, &[1.0, 1.0], &SolveOptions::default()), Err(Error::NotConverged(_))));
    }

    #[test]
    fn rhs_length_checked() {
        let err = solve_spd(&CsrMatrix::identity(2), &[1.0], &SolveOptions::default()).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, actual: 1 });
    }

    fn random_spd(n: usize, seed: u64) -> CsrMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // G Gᵀ + I with sparse G
        let mut g = vec![vec![0.0; n]; n];
        for row in g.iter_mut() {
            for v in row.iter_mut() {
                if rng.random_bool(0.3) {
                    *v = rng.random_range(-1.0..1.0);
                }
            }
        }
        let mut rows = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                let mut s: f64 = (0..n).map(|k| g[i][k] * g[j][k]).sum();
                if i == j {
                    s += 1.0;
                }
                rows[i].push((j, s));
            }
        }
        CsrMatrix::from_rows(rows).unwrap()
    }

    fn random_dominant(n: usize, seed: u64) -> CsrMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = vec![Vec::new(); n];
        for (i, row) in rows.iter_mut().enumerate() {
            let mut off = 0.0;
            for j in 0..n {
                if j != i && rng.random_bool(0.2) {
                    let v: f64 = rng.random_range(-1.0..1.0);
                    off += v.abs();
                    row.push((j, v));
                }
            }
            row.push((i, off + rng.random_range(0.5..2.0)));
        }
        CsrMatrix::from_rows(rows).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn cg_matches_dense_and_finishes_within_n(n in 1usize..=50, seed in any::<u64>()) {
            let a = random_spd(n, seed);
            let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin() + 1.0).collect();
            let sol = solve_spd(&a, &b, &SolveOptions::default()).unwrap();
            // n steps in exact arithmetic; rounding may cost a couple more
            prop_assert!(sol.report.iterations <= n + 2, "{} iterations for n = {n}", sol.report.iterations);
            let exact = dense_solve(&a, &b);
            for (x, e) in sol.x.iter().zip(&exact) {
                prop_assert!((x - e).abs() <= 1e-8 * (1.0 + e.abs()));
            }
        }

        #[test]
        fn bicgstab_matches_dense(n in 1usize..=50, seed in any::<u64>(), jacobi in any::<bool>()) {
            let a = random_dominant(n, seed);
            let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.71).cos()).collect();
            let opts = SolveOptions { jacobi, ..Default::default() };
            let sol = solve_general(&a, &b, &opts).unwrap();
            let exact = dense_solve(&a, &b);
            for (x, e) in sol.x.iter().zip(&exact) {
                prop_assert!((x - e).abs() <= 1e-8 * (1.0 + e.abs()));
            }
        }
    }
}
