//! Gaussian-prime sieving, greedy path classification driven by prime-gap
//! bound models, and percolation ("moat") analysis over the prime lattice.
//!
//! Modules:
//!
//! * [`arith`]: deterministic primality, Gaussian-prime recognition, octant sieve.
//! * [`gapmodels`]: prime-gap upper-bound functions `g(p)`.
//! * [`paths`]: greedy path decomposition, audits, path-count bounds, isolation radii.
//! * [`moat`]: step-bounded components, escape thresholds, minimax hops.
//! * [`walk`]: bounded-step walks and dominance tables.
//! * [`circlecount`]: Gauss-circle lattice counts.
//! * [`persistence`]: binary segment cache.

pub mod arith;
pub mod circlecount;
pub mod error;
pub mod gapmodels;
pub mod moat;
pub mod paths;
pub mod persistence;
pub mod unionfind;
pub mod walk;

pub use arith::{GaussianPrime, NormSegment, SieveOptions};
pub use error::{Error, Result};
pub use gapmodels::{GapKind, GapModel, LogBase};
pub use moat::{MoatComponent, Region, StepBound};
pub use paths::{Path, PathDecomposition};
pub use walk::{Strategy, WalkConfig, WalkReport};
