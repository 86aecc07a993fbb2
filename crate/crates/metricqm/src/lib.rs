//! metricqm — a finite-dimensional quantum simulator for metric-deformed
//! inner products ⟨φ,ψ⟩_A = ⟨φ|A|ψ⟩.
//!
//! The crate implements the state-dependent renormalized evolution a
//! deformed metric forces on pure states, the two-qubit Alice/Bob protocol
//! in which Bob's basis choice becomes visible to Alice, and a randomized
//! certifier that finds a signalling witness for any A not proportional to
//! the identity (and provably finds none when A = cI).
//!
//! Module map:
//! - [`linalg`]: dense complex matrices, Jacobi eigensolver, partial trace,
//!   PSD square roots, trace distance.
//! - [`metric`]: the validated metric operator A, the deformed inner
//!   product, axiom checks, Bloch-ellipsoid decomposition.
//! - [`states`]: pure states, ensembles, density matrices, the Tr(Aρ) = 1
//!   trace condition, standard and A-weighted probabilities.
//! - [`dynamics`]: the nonlinear renormalized update map and its
//!   convexity-defect diagnostic.
//! - [`protocol`]: steering, the end-to-end protocol, λ sweeps, and the
//!   signalling certifier.

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod metric;
pub mod protocol;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector};
pub use metric::MetricOperator;
