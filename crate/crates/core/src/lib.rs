//! Orientation-averaged photoelectron angular distributions and circular
//! dichroism (PECD) for randomly oriented molecules, computed within
//! second-order time-dependent perturbation theory, together with
//! derivative-free optimization of shaped laser pulses that maximize the
//! dichroism.
//!
//! The crate is organized around a small set of data products:
//!
//! * [`model::MolecularModel`] — orbital energies and bound-bound /
//!   bound-continuum partial-wave dipole tables (ingested, never computed).
//! * [`field::PulseTrain`] — a sum-of-Gaussians parametrization of the
//!   driving field, plus its spectrum and the one- and two-photon time
//!   integrals entering every anisotropy parameter.
//! * [`anisotropy::BetaTable`] — orientation-averaged anisotropy parameters
//!   for the one-photon, two-photon and interference pathways.
//! * [`observables::PecdMap`] — the normalized dichroism map assembled from
//!   the anisotropy parameters.
//! * [`oracle`] — independent ground-truth engines (brute-force Euler-angle
//!   quadrature and weak-field time propagation) used to validate every
//!   analytic formula.
//! * [`control`] — objectives, constraints, the principal-axis optimizer and
//!   the scan experiments (delay scans, bichromatic maps, multi-REMPI).
//!
//! All internal quantities are in Hartree atomic units; see [`units`] for
//! the conversion constants used at the I/O boundary.

pub mod angular;
pub mod anisotropy;
pub mod control;
pub mod error;
pub mod field;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod quad;
pub mod units;

pub use error::{Error, Result};
