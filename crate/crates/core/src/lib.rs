//! Entanglement detection for multipartite quantum states from ranks of
//! reduced density matrices, with a partial-transpose baseline and
//! factorization of pure states into fully entangled blocks.
//!
//! Particles are numbered from 1 in every user-facing string and report.
//! Internally subsystem indices are 0-based and the joint basis index uses
//! particle 1 as the most significant digit.

pub mod catalog;
pub mod cli;
pub mod criteria;
pub mod error;
pub mod factorize;
pub mod io;
pub mod linalg;
pub mod state;

pub use criteria::{
    analyze, check_partition, check_partition_pair, entanglement_verdict, pure_entangled, pure_fully_entangled,
    rank_lattice, Partition, RankLattice, Verdict, VerdictTag, Violation,
};
pub use error::{Error, ErrorClass, Result};
pub use factorize::{factorize_pure, factorize_pure_with, verify_factorization, FactorizationResult, FactorizeOptions};
pub use linalg::{ComplexMatrix, RankTolerance};
pub use num_complex::Complex64;
pub use state::{DensityMatrix, DimVector, PureState, State, SubsystemSet};
