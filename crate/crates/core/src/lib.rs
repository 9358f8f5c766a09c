//! Quasicrystal frequency sets on the circle, discrepancy of irrational
//! rotations, explicit sawtooth coboundaries, and finite-section analysis
//! of exponential systems on multiband sets.
//!
//! The library is organized around the rotation number α:
//!
//! - [`diophantine`] — exact quadratic / double-double arithmetic for α,
//!   its orbit {kα}, continued fractions, and ℤα+ℤ certificates;
//! - [`torus_sets`] — semi-closed intervals and multiband sets on 𝕋;
//! - [`quasicrystal`] — the frequency sets Λ_α(S) and density diagnostics;
//! - [`discrepancy`] — D(n,S) trajectories, BMO statistics, dichotomy reports;
//! - [`coboundary`] — the explicit sawtooth transfer function g and the
//!   quarter-condition block-average check;
//! - [`frames`] — Gram sections of exponential systems and Riesz-bound trends;
//! - [`ergodic`] — spectral measures, variances of ergodic sums, and
//!   coboundary solving for trigonometric polynomials.
//!
//! All operations are deterministic: fixed seeds give bit-identical results.

pub mod dd;
pub mod quad;

pub mod diophantine;

pub mod torus_sets;

pub mod quasicrystal;

pub mod discrepancy;

pub mod coboundary;

pub mod eigen;
pub mod frames;

pub mod ergodic;

pub use diophantine::{DiophantineError, IrrationalAlpha, LatticeElement, TorusPoint};
pub use torus_sets::{Closure, MultibandSet, TorusInterval};
