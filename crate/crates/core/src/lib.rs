//! Quantum information with Fibonacci anyons.
//!
//! The crate models a multiplicity-free anyon theory ([`AnyonModel`]), the
//! fusion-tree bases of N-anyon systems ([`SectorBasis`]), F-move recoupling
//! between tree shapes, and states/operators that respect the charge
//! superselection rule: every physical state lives in a single global-charge
//! sector and every operator is block diagonal across sectors.
//!
//! On top of that sit the bipartite tools (operator embedding, the anyonic
//! partial trace, purity, spectra), correlation diagnostics for two-anyon
//! states, and a small protocol engine for teleporting a qubit through a
//! shared four-anyon resource.
//!
//! ```
//! use std::sync::Arc;
//! use anyonic_core::{fibonacci_model, SectorBasis, TreeShape};
//!
//! let model = Arc::new(fibonacci_model());
//! let basis = SectorBasis::new(model, TreeShape::left_comb(4)).unwrap();
//! assert_eq!(basis.dim(), 34);
//! ```

pub mod correlations;
mod error;
pub mod fusion;
pub mod io;
pub mod model;
pub mod random;
pub mod recoupling;
pub mod state;
pub mod teleport;

pub use error::{Error, Result};
pub use fusion::{FusionTree, Sector, SectorBasis, TreeShape};
pub use model::{fibonacci_model, validate_model, AnyonModel, Charge, ModelViolation, ViolationKind};
pub use recoupling::{braid_adjacent, change_shape, elementary_fmove, BasisChange, BraidDirection, Rotation};
pub use state::{
    embed_local, fidelity, partial_trace, partial_trace_pure, purity, spectrum, trace, validate_cssr, AnyonState,
    Bipartition, BlockOperator, Side,
};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
