//! Fractional Entanglement Distribution (FED) for the EPR model.
//!
//! The pipeline picks a fractional matching on a graph, turns each edge's
//! fraction into a two-qubit rotation angle of a magic graph state, and
//! certifies the resulting energy against the matching upper bound
//! `λ_max ≤ w_G + w(FM_G)`:
//!
//! * [`graph`]: weighted multigraphs, edge degrees, edge-list I/O
//! * [`matching`]: exact LP matchings (maximum, homogeneous, quasi-homogeneous,
//!   interval-constrained) and their quality ratios
//! * [`magic_state`]: angle assignment and closed-form energies
//! * [`ratio`]: the `T`/`R` bounds, max–min ratio solvers and certificates
//! * [`oracle`]: statevector and exact-diagonalization ground truth

pub mod generators;
pub mod graph;
pub mod magic_state;
pub mod matching;
pub mod oracle;
pub mod ratio;
pub mod rational;
mod search;

pub use graph::{Graph, GraphError};
pub use magic_state::{EnergyError, EnergyReport, ThetaAssignment};
pub use matching::{FractionalMatching, MatchingError, MatchingKind};
pub use oracle::OracleError;
pub use ratio::{Certificate, RatioError, RatioSolution};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Ratio(#[from] RatioError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}
