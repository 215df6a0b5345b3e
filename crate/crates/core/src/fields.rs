//! Piecewise electric fields of the three charge configurations.
//!
//! [`FieldConvention::Printed`] reproduces the published expressions as
//! written. [`FieldConvention::StrictGauss`] substitutes fields that obey
//! `div E = 4 pi rho` exactly (slab exterior `2 pi rho0 L`, cylinder
//! `2 pi rho x`). The sphere is identical under both.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Sphere,
    Slab,
    Cylinder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldConvention {
    #[default]
    Printed,
    StrictGauss,
}

/// Uniform charge distributions. Densities in esu/cm^3, lengths in cm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ChargeConfiguration {
    Sphere {
        #[serde(rename = "rho")]
        rho0: f64,
        r0: f64,
    },
    /// Slab of thickness `L` centred on the xy plane.
    Slab {
        #[serde(rename = "rho")]
        rho0: f64,
        #[serde(rename = "L")]
        thickness: f64,
    },
    /// Infinite cylinder along z.
    Cylinder { rho: f64, r0: f64 },
}

impl ChargeConfiguration {
    pub fn geometry(&self) -> Geometry {
        match self {
            Self::Sphere { .. } => Geometry::Sphere,
            Self::Slab { .. } => Geometry::Slab,
            Self::Cylinder { .. } => Geometry::Cylinder,
        }
    }

    pub fn density(&self) -> f64 {
        match *self {
            Self::Sphere { rho0, .. } | Self::Slab { rho0, .. } => rho0,
            Self::Cylinder { rho, .. } => rho,
        }
    }

    /// Radius, or slab thickness.
    pub fn size(&self) -> f64 {
        match *self {
            Self::Sphere { r0, .. } | Self::Cylinder { r0, .. } => r0,
            Self::Slab { thickness, .. } => thickness,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (rho, size, name) = match *self {
            Self::Sphere { rho0, r0 } => (rho0, r0, "r0"),
            Self::Slab { rho0, thickness } => (rho0, thickness, "L"),
            Self::Cylinder { rho, r0 } => (rho, r0, "r0"),
        };
        if !rho.is_finite() {
            return Err(Error::InvalidParameter(format!("density must be finite, got {rho}")));
        }
        if !(size.is_finite() && size > 0.0) {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {size}")));
        }
        Ok(())
    }

    /// Coordinate that selects the interior/exterior branch: `|x|` for the
    /// sphere, `|z|` for the slab, the cylindrical radius for the cylinder.
    fn branch_coordinate(&self, x: [f64; 3]) -> f64 {
        match self {
            Self::Sphere { .. } => norm(x),
            Self::Slab { .. } => x[2].abs(),
            Self::Cylinder { .. } => x[0].hypot(x[1]),
        }
    }

    fn interface(&self) -> f64 {
        match *self {
            Self::Sphere { r0, .. } | Self::Cylinder { r0, .. } => r0,
            Self::Slab { thickness, .. } => thickness / 2.0,
        }
    }

    /// Charge density at a point.
    pub fn density_at(&self, x: [f64; 3]) -> f64 {
        if self.branch_coordinate(x) <= self.interface() {
            self.density()
        } else {
            0.0
        }
    }
}

fn norm(x: [f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

/// Electric field [esu/cm^2] at `x` [cm]. Interface points use the interior
/// branch.
pub fn efield(cfg: &ChargeConfiguration, x: [f64; 3], convention: FieldConvention) -> [f64; 3] {
    match *cfg {
        ChargeConfiguration::Sphere { rho0, r0 } => {
            let r = norm(x);
            let k = if r <= r0 {
                4.0 * PI * rho0 / 3.0
            } else {
                4.0 * PI * rho0 * r0.powi(3) / (3.0 * r.powi(3))
            };
            [k * x[0], k * x[1], k * x[2]]
        }
        ChargeConfiguration::Slab { rho0, thickness } => {
            let z = x[2];
            let ez = if z.abs() <= thickness / 2.0 {
                4.0 * PI * rho0 * z
            } else {
                let magnitude = match convention {
                    FieldConvention::Printed => 4.0 * PI * rho0 * thickness,
                    FieldConvention::StrictGauss => 2.0 * PI * rho0 * thickness,
                };
                magnitude * z.signum()
            };
            [0.0, 0.0, ez]
        }
        ChargeConfiguration::Cylinder { rho, r0 } => {
            let s = x[0].hypot(x[1]);
            let prefactor = match convention {
                FieldConvention::Printed => 0.5,
                FieldConvention::StrictGauss => 2.0 * PI,
            };
            let k = if s <= r0 {
                prefactor * rho
            } else {
                prefactor * rho * r0 * r0 / (s * s)
            };
            [k * x[0], k * x[1], 0.0]
        }
    }
}

/// Radial (or z) component of the field along the branch coordinate, as a
/// function of that coordinate.
pub fn radial_field(cfg: &ChargeConfiguration, r: f64, convention: FieldConvention) -> f64 {
    let x = match cfg.geometry() {
        Geometry::Sphere | Geometry::Cylinder => [r, 0.0, 0.0],
        Geometry::Slab => [0.0, 0.0, r],
    };
    let e = efield(cfg, x, convention);
    match cfg.geometry() {
        Geometry::Slab => e[2],
        _ => e[0],
    }
}

/// Central-difference `div E - 4 pi rho` at `x` with step `h`.
pub fn divergence_check(cfg: &ChargeConfiguration, x: [f64; 3], h: f64, convention: FieldConvention) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    let d = (cfg.branch_coordinate(x) - cfg.interface()).abs();
    if d <= h {
        return Err(Error::BoundaryPoint { h });
    }
    let mut div = 0.0;
    for axis in 0..3 {
        let mut plus = x;
        let mut minus = x;
        plus[axis] += h;
        minus[axis] -= h;
        div += (efield(cfg, plus, convention)[axis] - efield(cfg, minus, convention)[axis]) / (2.0 * h);
    }
    Ok(div - 4.0 * PI * cfg.density_at(x))
}
