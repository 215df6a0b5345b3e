//! Supersymmetric analysis of a neutral spin-1/2 particle with an anomalous
//! magnetic moment in three Aharonov-Casher electric-field configurations:
//! a uniformly charged sphere, an infinite charged slab and an infinite
//! charged cylinder.
//!
//! All quantities are in Gaussian-CGS units. The spectral parameter is
//! `epsilon = E^2 - M^2`, measured in cm^-2.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fields;
pub mod oracle;
pub mod quad;
pub mod radial;
pub mod slab;
pub mod specfun;
pub mod units;
pub mod zeromode;

#[cfg(feature = "cli")]
pub mod cli;

pub use error::{Error, Result};
pub use fields::{ChargeConfiguration, FieldConvention};
pub use units::{CouplingSet, PhysicalConstants};
