//! Perfect state transfer on hypercube networks of capacitively coupled
//! phase qubits.
//!
//! Frequencies are angular (rad/s) and times are in seconds throughout.
//! The [`units`] helpers convert from the GHz / ns values used in practice.

pub mod circuit;
pub mod decoherence;
pub mod disorder;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod topology;

pub use circuit::{CircuitParams, CouplingMatrix, FLUX_QUANTUM};
pub use decoherence::{DecoherenceParams, SubspaceDensityMatrix};
pub use disorder::{DisorderConfig, DisorderEnsembleResult};
pub use dynamics::{EffectiveHamiltonian, TransferResult, TransferSpec};
pub use error::{Error, Result};
pub use topology::{Hypercube, NodeLabel};

pub mod units {
    use std::f64::consts::TAU;

    /// Cyclic GHz to angular rad/s.
    pub fn ghz_to_angular(ghz: f64) -> f64 {
        TAU * ghz * 1e9
    }

    pub fn angular_to_ghz(omega: f64) -> f64 {
        omega / (TAU * 1e9)
    }

    pub fn ns(t: f64) -> f64 {
        t * 1e-9
    }

    pub fn to_ns(seconds: f64) -> f64 {
        seconds * 1e9
    }
}
