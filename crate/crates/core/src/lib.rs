//! Simulation and analysis of hybrid entanglement between a dual-rail
//! polarization qubit and a cat-state (coherent-superposition) qubit.
//!
//! Modules build on each other bottom-up: [`fock`] holds the truncated
//! Fock-space algebra, [`channels`] the optical elements and measurements,
//! [`protocol`] the state-preparation / teleportation / swapping pipelines,
//! [`tomography`] homodyne sampling and maximum-likelihood reconstruction,
//! and [`analysis`] the derived figures of merit.

pub mod error;
pub mod fock;
pub mod linalg;
pub mod channels;
pub mod protocol;
pub mod analysis;
pub mod tomography;
pub mod config;

pub use error::{Error, Result};
