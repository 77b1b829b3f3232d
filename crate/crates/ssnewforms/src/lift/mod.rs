//! Integer eigenbases for the small-degree factors of the T_2
//! characteristic polynomial, split into Galois orbits.

pub mod candidates;
pub mod detect;
pub mod orbit;
pub mod search;

pub use candidates::enumerate_candidates;
pub use detect::{detect_factors, strip_eisenstein};
pub use orbit::{eigenvalue_of, lift_factor, saturate, separate_orbits, GaloisOrbit};
pub use search::{lift_1dim, lift_highdim, HighDimLift};

use crate::linalg::SparseSignedMatrix;
use crate::ssgraph::GraphError;
use std::collections::HashMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LiftError {
    /// Recoverable: retry under another ν.
    #[error("lift failure: {0}")]
    LiftFailure(String),
    #[error("search cap reached after {0} attempts")]
    AttemptCap(usize),
    #[error("internal: {0}")]
    Internal(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl LiftError {
    pub fn is_recoverable(&self) -> bool {
        matches!(self, LiftError::LiftFailure(_) | LiftError::AttemptCap(_))
    }
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct LiftSearchConfig {
    /// Scalings c = 1..max_1dim tried in the one-dimensional lift.
    pub max_1dim: usize,
    /// Initial bound on candidate-column entries.
    pub entry_bound: i64,
    /// Largest bound tried before giving up.
    pub max_entry_bound: i64,
    /// Frequent rows considered beyond the minimum.
    pub extra_rows: usize,
    pub max_row_sets: usize,
    /// Refresh the starting vector after this many ℓ.
    pub refresh_every: usize,
    pub refresh_tries: usize,
    pub max_ell: u64,
    /// Candidate (row set, column) pairs tried per factor.
    pub attempt_cap: usize,
}

impl Default for LiftSearchConfig {
    fn default() -> Self {
        Self {
            max_1dim: 50,
            entry_bound: 3,
            max_entry_bound: 5,
            extra_rows: 3,
            max_row_sets: 20,
            refresh_every: 5,
            refresh_tries: 4,
            max_ell: 200,
            attempt_cap: 5_000_000,
        }
    }
}

/// Hecke operators T_ℓ on one Atkin–Lehner block, built on demand.
pub trait HeckeSource: Sync {
    fn level(&self) -> u64;
    fn block(&self, ell: u64) -> Result<Arc<SparseSignedMatrix>, LiftError>;
}

/// Fixed table of block matrices; for tests and small levels.
pub struct HeckeTable {
    pub level: u64,
    pub blocks: HashMap<u64, Arc<SparseSignedMatrix>>,
}

impl HeckeSource for HeckeTable {
    fn level(&self) -> u64 {
        self.level
    }

    fn block(&self, ell: u64) -> Result<Arc<SparseSignedMatrix>, LiftError> {
        self.blocks.get(&ell).cloned().ok_or_else(|| LiftError::LiftFailure(format!("T_{ell} not available")))
    }
}
