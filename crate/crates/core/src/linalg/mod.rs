//! Sparse numerical kernel: CSR storage, Krylov solvers and a power-iteration
//! spectral radius estimate.

mod csr;
mod solve;
mod spectral;

pub use csr::CsrMatrix;
pub use solve::{solve_general, solve_spd, Method, Solution, SolveOptions, SolveReport};
pub use spectral::{spectral_radius_estimate, SpectralEstimate};
