//! Repeated configuration measurements on a ring of lattice fermions and the
//! classical exclusion process they converge to.
//!
//! - [`fock`]: Fock space, fermionic operators and the configuration projectors.
//! - [`hamiltonian`]: hopping + potential + interaction ring Hamiltonian.
//! - [`measurement`]: propagators, the transition matrix `U_t`, repeated
//!   measurement laws, sampled trajectories and Zeno survival.
//! - [`zeno`]: the emergent generator and checks of the long-time limit.
//! - [`ssep`]: exclusion process master equation, sampling and densities.
//! - [`io`]: CSV and text formats.

pub mod error;
pub mod fock;
pub mod hamiltonian;
pub mod io;
pub mod measurement;
pub mod ssep;
pub mod zeno;

pub use error::{Error, Result};
pub use fock::{Configuration, OperatorMatrix};
pub use hamiltonian::{build_hamiltonian, HamiltonianSpec, PotentialFamily};
pub use measurement::{Distribution, Spectrum, TransitionMatrix};
pub use zeno::GeneratorMatrix;
