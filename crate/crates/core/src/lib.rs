//! Verification of quantum state copies with a heterodyne-style ancilla
//! rotation, single- and multi-qubit Pauli tomography, fidelity witnesses
//! and the quantum-key-distribution decoding tables built on them.

pub mod angle;
pub mod circuit;
pub mod error;
pub mod heterodyne;
pub mod linalg;
pub mod metrics;
pub mod protocols;
pub mod qkd;
pub mod reference;
pub mod rng;
pub mod state;
pub mod tomography;
pub mod topology;

pub use angle::Angle;
pub use circuit::{run_density_matrix, run_statevector, Basis, Circuit, Gate, NoiseModel, ShotTable};
pub use error::{Error, Result};
pub use metrics::{computational_tvd, fidelity, project_to_physical, total_variation_distance, trace_distance};
pub use state::{DensityMatrix, ProbabilityDistribution, StateVector, TensorProduct};
