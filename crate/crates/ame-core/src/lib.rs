//! Construction, decision, and certification of absolutely maximally
//! entangled (AME) and `k`-uniform states on heterogeneous multipartite
//! systems, where the local dimensions need not be equal.
//!
//! A pure state is `k`-uniform when every `k`-party reduced density matrix is
//! maximally mixed; an AME state is `floor(parties/2)`-uniform. The crate
//! provides
//!
//! * closed-form constructors for tripartite AME families such as
//!   `m x m x n`, `l x m x km`, and `2 x m x (m+n)` ([`constructors`]);
//! * an exact-rational feasibility solver for the magic-solution-array
//!   equations that decide `l x m x n` existence, with Farkas certificates
//!   for the infeasible side ([`msa`], [`linear`]);
//! * marginal-based verification, dimension prechecks, and projective
//!   steering ([`verifier`]);
//! * multi-isometry and `k`-unitarity checks on coefficient matrices
//!   ([`isometry`]);
//! * irreducibility classification with pencil-rank certificates
//!   ([`irreducibility`]);
//! * party splitting and merging that grow the party count while preserving
//!   uniformity ([`composer`]);
//! * serialization of states and solver artifacts as canonical JSON ([`io`]).
//!
//! Amplitudes carry optional exact annotations of the form
//! `sqrt(rational) * root of unity` ([`exact`]), so constructed states can be
//! checked with exact arithmetic instead of floating point where it matters.

pub mod composer;
pub mod constructors;
pub mod error;
pub mod exact;
pub mod io;
pub mod irreducibility;
pub mod isometry;
pub mod linear;
pub mod msa;
mod pencil;
pub mod shape;
pub mod state;
pub mod verifier;

pub use error::{Error, Result};
pub use shape::SystemShape;
pub use state::{Amplitude, DensityMatrix, PureState};
