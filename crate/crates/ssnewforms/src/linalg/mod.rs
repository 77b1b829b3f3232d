//! Exact linear algebra over F_ν.

pub mod dense;
pub mod sparse;
pub mod wiedemann;

pub use sparse::{LinalgError, SparseSignedMatrix};
pub use wiedemann::{
    berlekamp_massey, charpoly_complete, charpoly_mod_nu, nu_primes, wiedemann_minpoly, CharpolyRecord,
    KrylovTrace, Wiedemann, WiedemannParams,
};
