//! Spectral asymptotics of the adiabatic Laplacian on a Kronecker-foliated torus.
//!
//! The flat torus `ℝ²/ℤ²` carries the foliation by lines of slope `α`. Blowing
//! up the transverse direction gives the metric family `g_h = g_F + h⁻²g_H`
//! and the Laplacian `Δ_h = Δ_F + h²Δ_H`, whose eigenvalue counting function
//! `N_h(λ)` is a lattice-point count in an ellipse that degenerates as
//! `h → 0`. This crate provides:
//!
//! * [`slope`]: exact slopes and certified continued fractions
//! * [`spectrum`]: eigenvalues and exact strip-wise counting of `N_h(λ)`
//! * [`leafwise`]: distribution functions and the leafwise spectrum `N_F`
//! * [`weyl`]: the adiabatic Weyl convolution against `dN_F`
//! * [`asymptotics`]: the closed-form leading terms as `h → 0`
//! * [`heat`]: the heat trace by spectral and image series
//!
//! Strip loops run on rayon when the `parallel` feature is on (the default);
//! see [`Execution`].

// `!(x > 0.0)` is used deliberately so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod exec;
pub mod heat;
pub mod leafwise;
pub mod quadrature;
pub mod slope;
pub mod spectrum;
pub mod weyl;

pub use error::{Error, Result};
pub use exec::Execution;
pub use heat::{HeatTraceResult, TraceMethod};
pub use leafwise::{DistributionFunction, LeafSpectrum, SmoothDensity, StepFunction};
pub use slope::{ContinuedFraction, IrrationalTag, Slope, SlopeKind, Terms};
pub use spectrum::{AdiabaticScale, EigenvalueRecord, EnergyUnit, EnergyWindow, LatticeCount};
pub use weyl::WeylParams;
