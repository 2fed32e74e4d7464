//! Spectral graph methods with dense-oracle validation.
//!
//! This crate implements the classical spectral toolbox for weighted
//! undirected graphs:
//!
//! - [`graph`]: graph construction, deterministic and random generators,
//!   and the quotient-cut objectives (expansion, sparsity, conductance,
//!   normalized cut).
//! - [`spectra`]: a dense Jacobi eigensolver used as the oracle everywhere,
//!   Fiedler vectors, sweep cuts, Cheeger reports, and k-way spectral
//!   clustering.
//! - [`diffusion`]: random-walk operators, stationary distributions, mixing
//!   bounds, heat kernels, dense personalized PageRank, and the
//!   regularized-SDP characterization of diffusion kernels.
//! - [`local`]: strongly local clustering via residual pushing, weakly local
//!   clustering via correlation-constrained spectral programs, and the
//!   equivalence checks connecting them.
//! - [`resistance`]: Laplacian pseudo-inverses, effective resistances, and
//!   edge leverage scores.
//! - [`sparsify`]: leverage-score sampling sparsifiers and spectral
//!   similarity measurement.
//! - [`solver`]: dense, conjugate-gradient, and sparsifier-preconditioned
//!   Laplacian solves, plus three semi-supervised label-propagation systems.
//! - [`sbm`]: stochastic blockmodel generators and spectral recovery.
//!
//! Everything is deterministic given an explicit seed, and every method at
//! desk scale is checked against an independent dense computation.
//!
//! The `parallel` feature (on by default) runs Monte Carlo trial loops and
//! large dense products on a rayon pool; disabling it falls back to
//! sequential loops with identical results.

pub mod diffusion;
pub mod error;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod local;
pub mod par;
pub mod resistance;
pub mod sbm;
pub mod solver;
pub mod sparsify;
pub mod spectra;

pub use error::{Error, Result};
pub use graph::{Graph, LaplacianKind, NodeSet, PartitionScore};
pub use spectra::EigenSystem;
