//! Ground-truth engines: explicit magic-state construction, the exact top
//! eigenvalue of the EPR Hamiltonian, and brute-force angle optimization.

pub mod hamiltonian;
mod spectrum;
mod statevector;
mod variational;

use serde::Serialize;

use crate::graph::Graph;
use crate::magic_state::EnergyError;
use crate::matching;
use crate::rational;

pub use spectrum::{epr_lambda_max, Method, SpectrumOptions, SpectrumResult};
pub use statevector::{build_chi, build_chi_ordered, Op1, StateVector, P, Q, X, Y, Z};
pub use variational::{optimize_thetas, RestartRecord, VariationalOptions, VariationalResult};

/// Known spectrum of a single unit edge, descending.
pub const K2_SPECTRUM: [f64; 4] = [2.0, 0.0, 0.0, 0.0];

/// Environment variable overriding the qubit cap of the oracle entry points.
pub const QUBIT_CAP_ENV: &str = "FED_ORACLE_QUBITS";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("{n} qubits exceed the oracle cap of {cap}")]
    TooManyQubits { n: usize, cap: usize },
    #[error("eigensolver residual {residual:e} above tolerance {tol:e}")]
    NotConverged { residual: f64, tol: f64 },
    #[error(transparent)]
    Energy(#[from] EnergyError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FmBoundReport {
    pub lambda_max: f64,
    pub method: Method,
    pub residual: f64,
    #[serde(rename = "wG")]
    pub w_g: f64,
    pub mwfm_value: String,
    /// w_G + w(FM_G)
    pub bound: f64,
    pub slack: f64,
    /// slack / λ_max: how far the matching bound overshoots.
    pub overestimate: f64,
}

/// Compares λ_max with `w_G + w(FM_G)`.
pub fn verify_fm_bound(g: &Graph, opts: &SpectrumOptions) -> Result<FmBoundReport, OracleError> {
    let spectrum = epr_lambda_max(g, opts)?;
    let fm = matching::mwfm(g);
    let w_g = rational::to_f64(&g.total_weight());
    let bound = w_g + rational::to_f64(fm.value());
    let slack = bound - spectrum.lambda_max;
    Ok(FmBoundReport {
        lambda_max: spectrum.lambda_max,
        method: spectrum.method,
        residual: spectrum.residual,
        w_g,
        mwfm_value: rational::format(fm.value()),
        bound,
        slack,
        overestimate: slack / spectrum.lambda_max,
    })
}
