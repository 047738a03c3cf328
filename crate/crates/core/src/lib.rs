//! Exact simulation of multi-copy protocols for unitary imaginary-time
//! evolution and ground-state preparation.
//!
//! The crate provides:
//!
//! - dense complex linear algebra and quantum primitives ([`qcore`]),
//! - Hamiltonian and initial-state builders with cached spectra ([`models`]),
//! - the two-copy SWAP-generated gates and their embeddings ([`gates`]),
//! - bookkeeping-vector schedule compilation for the tree, hedge, and
//!   single-layer circuit families ([`compiler`]),
//! - execution engines: full multi-copy statevector simulation, the
//!   two-copy tree recurrence, mid-circuit post-selection, and the analytic
//!   virtual-cooling pipeline ([`engines`]),
//! - error-bound evaluation, step-size optimization, and batch parameter
//!   sweeps with CSV/JSON emission ([`analysis`]).
//!
//! The `mcqite` binary exposes the sweeps as a scriptable CLI.

pub mod analysis;
pub mod compiler;
pub mod engines;
pub mod error;
pub mod gates;
pub mod models;
pub mod numerics;
pub mod qcore;

pub use error::{Error, Result};
pub use numerics::NumericsConfig;
