//! Numerics for space-fractional diffusion.
//!
//! The crate covers both sides of the micro/macro picture:
//!
//! * [`stable`] draws univariate, one-sided and 2-D elliptical α-stable
//!   variates and evaluates their characteristic functions.
//! * [`mittag_leffler`] evaluates `E_β(z)`, its derivatives and the CTRW
//!   jump-count law built from them.
//! * [`green`] computes reference densities of the fractional diffusion
//!   equation by Fourier quadrature.
//! * [`riesz`] is the explicit Grünwald–Letnikov solver for the Riesz
//!   fractional diffusion equation on a periodic lattice.
//! * [`agents`] simulates Lévy-flight agent ensembles and continuous-time
//!   random walks.
//!
//! Data-parallel loops go through [`Execution`]; with the `parallel` feature
//! disabled every path runs sequentially and produces identical results.

pub mod agents;
pub mod error;
pub mod exec;
pub mod green;
pub mod mittag_leffler;
pub mod quadrature;
pub mod riesz;
pub mod rng;
pub mod special;
pub mod stable;
pub mod stats;

pub use error::{Error, Result};
pub use exec::Execution;
pub use rng::RandomStream;
