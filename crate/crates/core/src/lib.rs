//! Exact computational engine for the Frahm-Inozemtsev (FI) spin chain and the
//! hyperbolic spin dynamical model it freezes out of.
//!
//! The chain couples N spins sitting at sites determined by the zeros of a
//! generalized Laguerre polynomial; its spectrum is generated combinatorially
//! by motifs with a quadratic dispersion, so every level is an exact integer
//! combination `A*beta + B` of the inverse-length parameter `beta`.  This
//! crate keeps that structure exact end to end:
//!
//! * [`geometry`] — sites from Laguerre zeros (Golub-Welsch plus Newton
//!   polishing), couplings, and the prepotential/potential pair whose unique
//!   critical point reproduces the sites.
//! * [`motif`] — motif/composition combinatorics, the spectrum as an exact
//!   rational table with big-integer degeneracies, partition-function
//!   evaluation by two independent routes, spectral extremes and duality.
//! * [`ed`] — dense exact diagonalization of the spin Hamiltonian and level
//!   matching against the motif tables.
//! * [`dynamical`] — bound-state energies of the spin Calogero-Sutherland
//!   type model, partition functions by run-length dynamic programming, and
//!   the freezing check `Z_spin/Z_scalar -> Z_chain`.
//! * [`dunkl`] — exact rational Dunkl operators acting on monomials, with
//!   triangularity and diagonal-spectrum reports.
//! * [`stats`] — closed-form vs empirical moments (exact), Gaussian level
//!   cumulative comparison, unfolding, nearest-neighbour spacings and regime
//!   diagnostics.
//!
//! Everything downstream of floating-point diagonalization is either exact
//! (`BigRational` energies, `BigUint` degeneracies) or carries an explicit
//! tolerance; all containers iterate in a deterministic order.

pub mod dunkl;
pub mod dynamical;
pub mod ed;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod motif;
pub mod rational;
pub mod stats;

pub use error::{FiError, Result};
pub use rational::{parse_rational, rational_to_f64, rational_to_string, Rational};

pub use num_bigint::{BigInt, BigUint};
