//! Output records. Integers are decimal strings; see docs/output-schema.md.

use crate::lift::GaloisOrbit;
use crate::linalg::CharpolyRecord;
use crate::mestre::QExpansion;
use crate::sieve::DegreeReport;
use crate::ssgraph::Block;
use crate::zpoly::ZPoly;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

fn strs(v: &[BigInt]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// Auxiliary prime of the χ_ν the orbit was detected in.
    pub nu: String,
    /// Every ν whose χ_ν was computed for this block, in order.
    pub nu_history: Vec<String>,
    pub lift_retries: String,
    pub multiplicity: String,
    pub generator_ell: String,
    pub probe_primes: Vec<String>,
    pub exact_primes: Vec<String>,
    pub seed: String,
}

/// One Galois orbit of newforms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewformRecord {
    pub version: u32,
    pub level: String,
    pub al_sign: String,
    pub dim: String,
    /// Ascending coefficients.
    pub a2_minpoly: Vec<String>,
    pub field_minpoly: Vec<String>,
    pub field_disc: String,
    /// Integral basis elements as rational coordinates "n" or "n/d" in the
    /// power basis of a root of `field_minpoly`.
    pub basis: Vec<Vec<String>>,
    /// a_1..a_N, each as integer coordinates in `basis`.
    pub coeffs: Vec<Vec<String>>,
    pub provenance: Provenance,
}

impl NewformRecord {
    pub fn new(orbit: &GaloisOrbit, qe: &QExpansion, provenance: Provenance) -> Self {
        let k = &orbit.field;
        Self {
            version: SCHEMA_VERSION,
            level: orbit.level.to_string(),
            al_sign: orbit.block.al_sign().to_string(),
            dim: orbit.dim().to_string(),
            a2_minpoly: strs(&orbit.rho),
            field_minpoly: strs(k.poly()),
            field_disc: k.disc().to_string(),
            basis: k.integral_basis().iter().map(|b| b.iter().map(ToString::to_string).collect()).collect(),
            coeffs: qe.coeffs.iter().map(|c| strs(c)).collect(),
            provenance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub dim: usize,
    pub a2_minpoly: Vec<String>,
    pub multiplicity: usize,
}

impl OrbitSummary {
    pub fn new(rho: &ZPoly, dim: usize, multiplicity: usize) -> Self {
        Self { dim, a2_minpoly: strs(rho), multiplicity }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SieveOutcome {
    Skipped,
    Ran(DegreeReport),
    Failed { message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: String,
    pub message: String,
    pub nu_history: Vec<u64>,
    pub retries: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockReport {
    pub block: Block,
    pub al_sign: i32,
    /// Dimension of the block, Eisenstein class included.
    pub dim: usize,
    pub cusp_dim: usize,
    pub charpoly: Option<CharpolyRecord>,
    pub nu_history: Vec<u64>,
    pub orbits: Vec<OrbitSummary>,
    pub sieve: SieveOutcome,
    /// Σ orbit dims plus the certified remainder equals `cusp_dim`.
    pub dims_accounted: Option<bool>,
    pub failures: Vec<StageFailure>,
}

impl BlockReport {
    pub fn empty(block: Block, dim: usize, cusp_dim: usize) -> Self {
        Self {
            block,
            al_sign: block.al_sign(),
            dim,
            cusp_dim,
            charpoly: None,
            nu_history: Vec::new(),
            orbits: Vec::new(),
            sieve: SieveOutcome::Skipped,
            dims_accounted: None,
            failures: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub version: u32,
    pub level: u64,
    /// dim S_2(Γ_0(p)).
    pub genus: usize,
    pub ncoeffs: usize,
    pub blocks: Vec<BlockReport>,
    pub notes: Vec<String>,
    pub partial: bool,
    pub failures: Vec<StageFailure>,
}
