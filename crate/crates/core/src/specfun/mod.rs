//! Special-function kernel: Kummer's `1F1`, integer-order Bessel `J_nu`, and
//! spin-orbit eigenvalues of the spherical spinor channels.

mod bessel;
mod dd;
mod kummer;

pub use bessel::bessel_j;
pub use kummer::{kummer_1f1, KUMMER_Z_MAX};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angular channel of a spherical spinor. `two_j` stores `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelQuantumNumbers {
    pub l: u32,
    pub two_j: u32,
    /// Eigenvalue of `sigma . L`.
    pub w: i32,
}

impl ChannelQuantumNumbers {
    pub fn new(l: u32, two_j: u32) -> Result<Self> {
        let w = spin_orbit_eigenvalue(l, two_j)?;
        Ok(Self { l, two_j, w })
    }

    /// `j` as a float.
    pub fn j(&self) -> f64 {
        f64::from(self.two_j) / 2.0
    }
}

/// Eigenvalue of `sigma . L` on the `(l, j)` spinor: `l` for `j = l + 1/2`,
/// `-(l + 1)` for `j = l - 1/2`.
pub fn spin_orbit_eigenvalue(l: u32, two_j: u32) -> Result<i32> {
    let l2 = 2 * l;
    if two_j == l2 + 1 {
        Ok(l as i32)
    } else if l > 0 && two_j + 1 == l2 {
        Ok(-(l as i32) - 1)
    } else {
        Err(Error::InvalidChannel { l, two_j })
    }
}
