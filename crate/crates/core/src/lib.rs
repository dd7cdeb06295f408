//! Exact enumeration, weighted counting, and sampling toolkit for three
//! families of combinatorial objects in bijective correspondence:
//!
//! * twenty-vertex (20V) ice configurations on quadrangular domains `Q_k`
//!   of the triangular lattice,
//! * mixed six-vertex (6V) ice configurations on rectangular domains `M_k`
//!   of the square lattice, and
//! * triple-free Gelfand-Tsetlin patterns with bottom row `k`.
//!
//! All arithmetic is exact: counts are big integers, probabilities are big
//! rationals, and vertex weights live in the ring ℚ[q]/(q⁸+1) ⊗ ℚ[y]/(y⁶−2)
//! so identities can be checked with zero tolerance.
//!
//! The crate is organized bottom-up: [`lattice`] defines the domains and
//! configuration representations, [`ring`] and [`formula`] the exact
//! arithmetic, [`twenty`] and [`six`] the model-specific enumeration and
//! statistics, [`triangle`] the pattern side of the correspondence, and
//! [`kernel`] the probabilistic-bijection layer together with the exact
//! fiber sampler.

pub mod caps;
pub mod error;
pub mod formula;
pub mod kernel;
pub mod lattice;
pub mod ring;
pub mod six;
pub mod triangle;
pub mod twenty;

pub use caps::Caps;
pub use error::{Error, Result};
