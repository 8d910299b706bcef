//! State-vector and density-matrix simulation.

pub mod density;
pub mod exec;
pub mod gates;
pub mod noise;
pub mod statevector;

pub use density::{partial_trace, DensityMatrix};
pub use exec::{bitstring, mix_seed, shot_rng, uniform, Counts, Program, Sampler, Simulator};
pub use noise::{apply_noise_channel, Channel, NoiseModel};
pub use statevector::StateVector;
