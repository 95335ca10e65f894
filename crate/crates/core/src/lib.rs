//! Bounds on quantum information sent through `n` sequential, error-corrected
//! noisy channels.
//!
//! Every numerical routine is generic over the scalar type through [`Real`]
//! (implemented for `f32` and `f64`). The aliases below fix the scalar to
//! `f64`, which is what the CLI and the acceptance suite use; the `…F32`
//! aliases exist for lower-precision experiments.
//!
//! Module overview:
//!
//! - [`numerics`]: dense complex matrices, Jacobi eigensolver, norms
//! - [`channels`]: Kraus channels, Choi matrices, density operators
//! - [`transfer`]: qubit T-matrices, canonical form, limit channel, `μ`, `R_n`
//! - [`capacity`]: entropies, coherent information, continuity bound, diamond intervals
//! - [`noise`]: amplitude damping, bosonic damping, pure loss
//! - [`qec`]: codes, Knill-Laflamme checks, recovery, tail bounds, Chernoff estimates
//! - [`network`]: node assembly, sequence analysis, sweeps
//! - [`io`]: JSON formats for channels and codes

pub mod capacity;
pub mod channels;
pub mod error;
pub mod io;
pub mod network;
pub mod noise;
pub mod numerics;
pub mod optimize;
pub mod qec;
pub mod random;
pub mod scalar;
pub mod transfer;

pub use error::{Error, Result};
pub use scalar::{Cx, Real, Tolerances};

pub type ComplexMatrix = numerics::Matrix<f64>;
pub type HermitianEig = numerics::HermitianEig<f64>;
pub type QuantumChannel = channels::Channel<f64>;
pub type Density = channels::DensityOperator<f64>;
pub type TransferMatrix = transfer::TransferMatrix<f64>;
pub type CanonicalTransfer = transfer::CanonicalTransfer<f64>;
pub type SpectralReport = transfer::SpectralReport<f64>;
pub type Code = qec::Code<f64>;
pub type KLReport = qec::KLReport<f64>;
pub type NodeSpec = network::NodeSpec<f64>;

pub type ComplexMatrixF32 = numerics::Matrix<f32>;
pub type QuantumChannelF32 = channels::Channel<f32>;
pub type DensityF32 = channels::DensityOperator<f32>;
pub type TransferMatrixF32 = transfer::TransferMatrix<f32>;
