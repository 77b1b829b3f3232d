//! Weight-2 newforms of prime level from supersingular isogeny graphs.

pub mod gf;
pub mod lift;
pub mod linalg;
pub mod mestre;
pub mod nf;
pub mod pipeline;
pub mod series;
pub mod sieve;
pub mod ssgraph;
pub mod zpoly;
