//! Tensor SVD by higher-order orthogonal iteration, with the simulation
//! ensembles, planted-clique reduction and Monte Carlo harness used to study
//! it.

pub mod ensembles;
pub mod error;
pub mod experiments;
pub mod hooi;
pub mod io;
pub mod linalg;
pub mod planted_clique;
pub mod rng;
pub mod tensor;

pub use error::{Error, Result};
pub use hooi::{hooi, HooiConfig, HooiResult, Init, StopReason, Tolerance, TuckerFactors};
pub use linalg::OrthonormalBasis;
pub use rng::{RngStream, Role, Sampler};
pub use tensor::{Matrix, Mode, Tensor3};
