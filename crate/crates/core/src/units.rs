//! Physical constants and coupling parameters.
//!
//! Convention: `eta = e * kappa_n / (M_n c^2)` carries units of cm/esu, so
//! that `eta * E` is an inverse length when `E` is given in esu/cm^2.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{ChargeConfiguration, Geometry};

/// Gaussian-CGS constants entering the couplings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    /// Elementary charge [esu].
    pub e_esu: f64,
    /// Anomalous magnetic moment, dimensionless and signed.
    pub kappa_n: f64,
    /// Neutron rest energy [erg].
    pub m_n_c2_erg: f64,
    #[serde(default = "override_label")]
    pub source_label: String,
}

fn override_label() -> String {
    "user override".to_string()
}

impl PhysicalConstants {
    pub const DEFAULT_E_ESU: f64 = 4.8032e-10;
    pub const DEFAULT_KAPPA_N: f64 = 1.9130;
    pub const DEFAULT_M_N_C2_ERG: f64 = 1.5053e-3;

    pub fn new(e_esu: f64, kappa_n: f64, m_n_c2_erg: f64, source_label: impl Into<String>) -> Result<Self> {
        let c = Self {
            e_esu,
            kappa_n,
            m_n_c2_erg,
            source_label: source_label.into(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_esu.is_finite() && self.e_esu > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "e_esu must be positive, got {}",
                self.e_esu
            )));
        }
        if !(self.m_n_c2_erg.is_finite() && self.m_n_c2_erg > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "m_n_c2_erg must be positive, got {}",
                self.m_n_c2_erg
            )));
        }
        if !self.kappa_n.is_finite() || self.kappa_n == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "kappa_n must be finite and non-zero, got {}",
                self.kappa_n
            )));
        }
        Ok(())
    }
}

impl Default for PhysicalConstants {
    /// Frozen table, version 1. The moment is stored as a positive magnitude;
    /// supply a negative `kappa_n` to use the physical neutron sign.
    fn default() -> Self {
        Self {
            e_esu: Self::DEFAULT_E_ESU,
            kappa_n: Self::DEFAULT_KAPPA_N,
            m_n_c2_erg: Self::DEFAULT_M_N_C2_ERG,
            source_label: "table v1: CODATA-derived, e = 4.8032e-10 esu, |kappa_n| = 1.9130, M_n c^2 = 1.5053e-3 erg"
                .to_string(),
        }
    }
}

/// Couplings derived for one charge configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSet {
    /// `eta` [cm/esu].
    pub eta_cm_per_esu: f64,
    /// Sphere and cylinder: the first-order coupling `beta` [cm^-2].
    /// Slab: the confinement bound `4 pi eta rho0` [cm^-2].
    pub beta: f64,
    pub geometry: Geometry,
}

impl CouplingSet {
    pub fn for_config(cfg: &ChargeConfiguration, c: &PhysicalConstants) -> Self {
        let eta = coupling_eta(c);
        let beta = match *cfg {
            ChargeConfiguration::Sphere { rho0, .. } => beta_sphere(rho0, c),
            ChargeConfiguration::Slab { rho0, .. } => 4.0 * PI * eta * rho0,
            ChargeConfiguration::Cylinder { rho, .. } => beta_cylinder(rho, c),
        };
        Self {
            eta_cm_per_esu: eta,
            beta,
            geometry: cfg.geometry(),
        }
    }
}

/// `eta = e kappa_n / (M_n c^2)` [cm/esu], signed.
pub fn coupling_eta(c: &PhysicalConstants) -> f64 {
    c.e_esu * c.kappa_n / c.m_n_c2_erg
}

/// `beta = 4 pi rho0 eta / 3` for the charged sphere.
pub fn beta_sphere(rho0: f64, c: &PhysicalConstants) -> f64 {
    4.0 * PI * rho0 * coupling_eta(c) / 3.0
}

/// `beta = -e rho kappa_n / (4 M_n c^2)` for the charged cylinder.
pub fn beta_cylinder(rho: f64, c: &PhysicalConstants) -> f64 {
    -coupling_eta(c) * rho / 4.0
}

/// Upper bound `4 pi eta rho0` on `k^2` for the slab ground-state family.
pub fn slab_k_bound(rho0: f64, c: &PhysicalConstants) -> Result<f64> {
    let value = 4.0 * PI * coupling_eta(c) * rho0;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::NonconfiningSign { value })
    }
}

/// Minimum linear charge density `4 pi M_n c^2 / |e kappa_n|` [esu/cm] for
/// which `beta r0^2 < -1` can hold on the cylinder. Independent of `r0`.
pub fn lambda_threshold(c: &PhysicalConstants) -> f64 {
    4.0 * PI * c.m_n_c2_erg / (c.e_esu * c.kappa_n).abs()
}

/// Linear charge density `lambda = rho pi r0^2` of a cylinder.
pub fn linear_density(rho: f64, r0: f64) -> f64 {
    rho * PI * r0 * r0
}
