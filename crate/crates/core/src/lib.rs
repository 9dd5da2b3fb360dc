//! Spectral statistics of Wigner random matrices under weak moment
//! assumptions.
//!
//! A Wigner matrix here is `W = X / sqrt(n)` where `X` is real symmetric with
//! i.i.d. standardized entries on and above the diagonal. The crate samples
//! such matrices for Gaussian and Pareto-tailed entry laws, diagonalizes
//! them, and measures how closely the empirical spectrum follows the
//! semicircle law: Kolmogorov distance, eigenvalue rigidity, eigenvector
//! delocalization, edge fluctuations against Tracy–Widom, and the resolvent
//! identities that drive local-law proofs. The [`experiments`] module turns
//! those measurements into reproducible batch runs (CSV + manifest + SVG).
//!
//! Everything numerical is generic over [`scalar::Scalar`] (`f32` or `f64`);
//! the aliases at the crate root fix the `f64` instantiation that the CLI
//! and the experiment harness use.

pub mod eigensolver;
pub mod ensemble;
pub mod error;
pub mod experiments;
pub mod quad;
pub mod resolvent;
pub mod rng;
pub mod scalar;
pub mod semicircle;
pub mod special;
pub mod statistics;
pub mod svg;
pub mod tracywidom;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Scalar type used by the CLI and the experiment harness.
pub type Real = f64;

pub type SymmetricMatrix64 = ensemble::SymmetricMatrix<f64>;
pub type SpectralData64 = eigensolver::SpectralData<f64>;
pub type TruncatedTriple64 = ensemble::TruncatedTriple<f64>;
pub type QuantileTable64 = semicircle::QuantileTable<f64>;
pub type StatSummary64 = statistics::StatSummary<f64>;
pub type GammaApprox64 = tracywidom::GammaApprox<f64>;

pub type SymmetricMatrix32 = ensemble::SymmetricMatrix<f32>;
pub type SpectralData32 = eigensolver::SpectralData<f32>;
