//! Scattering theory for the half-line matrix Schrodinger operator
//! `-psi'' + V(x) psi = k^2 psi` with a general selfadjoint boundary
//! condition `-B^dagger psi(0) + A^dagger psi'(0) = 0`.

pub mod boundary;
pub mod error;
pub mod jost;
pub mod matkernel;
pub mod ode;
pub mod potential;
pub mod quadrature;
pub mod scattering;
pub mod spectrum;

pub use boundary::{BoundaryPair, CanonicalBoundary, ChannelKind, Transform};
pub use error::{Error, Result};
pub use jost::{JostEvaluation, JostOptions, SpectralPoint};
pub use matkernel::{ComplexMatrix, ComplexVector};
pub use potential::{MomentSet, PotentialKind, PotentialModel};
