//! Simulation and security analysis of multiqubit quantum secret sharing.
//!
//! The crate is organized bottom-up:
//!
//! - [`qsim`]: dense statevector and density-matrix primitives.
//! - [`states`]: the W, W̄, G, GHZ, ξ and v families and white-noise mixtures.
//! - [`attack`]: the coherent individual attack on the Bobs' register and the
//!   resulting information-theoretic security quantities.
//! - [`protocol`]: Monte Carlo runs of the sharing procedure with sifting and
//!   key reconstruction.
//! - [`bell`]: two-qubit CHSH analysis, correlation tensors and white-noise
//!   thresholds.
//! - [`rdm`]: reduced-density-matrix determination checks.
//! - [`export`]: JSON and CSV document types shared by the command line tool
//!   and the Python bindings.

pub mod attack;
pub mod bell;
pub mod error;
pub mod export;
pub mod protocol;
pub mod qsim;
pub mod rdm;
pub mod states;

pub use error::{QssError, Result};
pub use qsim::{DensityMatrix, Outcome, PauliAxis, PauliString, PureState, QuantumState};
pub use states::CarrierFamily;
