//! Pseudospectral simulation and diagnostics for generalized Tricomi-type
//! degenerate hyperbolic equations `∂t²u − t^m Δu = F`.
//!
//! The crate is organised bottom-up:
//!
//! - [`kummer`]: the confluent hypergeometric function Φ(a, b; z).
//! - [`propagator`]: the per-frequency fundamental pair V1, V2 of `∂t² + t^m ρ²`.
//! - [`spectral`]: periodic grids, transforms, Sobolev norms, Hilbert transform, file formats.
//! - [`linear`]: exact-per-mode homogeneous solves, Duhamel integrals and an RK4 oracle.
//! - [`semilinear`]: Picard fixed-point solvers for the second-, third- and fourth-order problems.
//! - [`initial_data`]: jump-across-a-hyperplane and degree-zero-homogeneous data families.
//! - [`probe`]: characteristic surfaces, tangent vector fields, ridges and power-law fits.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod initial_data;
pub mod keyvalue;
pub mod kummer;
pub mod linear;
pub mod probe;
pub mod propagator;
pub mod semilinear;
pub mod spectral;

use thiserror::Error;

pub use kummer::{KummerError, KummerParams};
pub use propagator::PropagatorSample;
pub use spectral::{Field, Grid, Space, SpectralTrajectory};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Kummer(#[from] KummerError),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("quadrature error: {0}")]
    Quadrature(String),
    #[error("undefined contraction ratio: the two iterates coincide")]
    UndefinedRatio,
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
