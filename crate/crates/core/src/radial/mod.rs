//! Radial eigenvalue problem for the sphere and cylinder geometries.
//!
//! Both reduce to `psi'' = (V(r) - eps) psi` on `r > 0` with a piecewise
//! superpotential `W` that changes form at `r0`. In three dimensions
//! `psi = r phi` and `s = w`; in two dimensions `psi = sqrt(r) phi` and
//! `s = nu`.

mod ode;
mod spectrum;

pub use ode::{Integrator, OdeEnd, OdeSample};
pub use spectrum::{find_spectrum, state_residual, BoundState, SpectrumReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{ChargeConfiguration, Geometry};
use crate::specfun::{kummer_1f1, ChannelQuantumNumbers};
use crate::units::{beta_cylinder, beta_sphere, PhysicalConstants};

pub(crate) const RTOL: f64 = 1e-12;
/// Series start, as a fraction of `r0`.
pub const R_MIN_FRACTION: f64 = 1e-6;

/// Sign of the spin-orbit cross term `2 s W / r` in the potential.
///
/// `Factorized` gives `H = A^dagger A` with `A = d/dr - s/r + W`; `Printed`
/// flips the cross term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialConvention {
    #[default]
    Factorized,
    Printed,
}

impl PotentialConvention {
    fn cross_sign(self) -> f64 {
        match self {
            PotentialConvention::Factorized => -1.0,
            PotentialConvention::Printed => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Channel {
    Spherical { l: u32, two_j: u32 },
    Planar { nu: i32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialProblem {
    pub geometry: Geometry,
    pub channel: Channel,
    /// Spin-orbit eigenvalue in 3D, `nu` in 2D.
    pub w: i32,
    /// cm^-2
    pub beta: f64,
    /// cm; may be infinite for an interior that extends everywhere.
    pub r0: f64,
    #[serde(default)]
    pub convention: PotentialConvention,
}

impl RadialProblem {
    pub fn sphere(l: u32, two_j: u32, beta: f64, r0: f64) -> Result<Self> {
        let q = ChannelQuantumNumbers::new(l, two_j)?;
        let p = Self {
            geometry: Geometry::Sphere,
            channel: Channel::Spherical { l, two_j },
            w: q.w,
            beta,
            r0,
            convention: PotentialConvention::Factorized,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn cylinder(nu: i32, beta: f64, r0: f64) -> Result<Self> {
        let p = Self {
            geometry: Geometry::Cylinder,
            channel: Channel::Planar { nu },
            w: nu,
            beta,
            r0,
            convention: PotentialConvention::Factorized,
        };
        p.validate()?;
        Ok(p)
    }

    /// Problem for a sphere or cylinder charge configuration.
    pub fn from_config(cfg: &ChargeConfiguration, c: &PhysicalConstants, channel: Channel) -> Result<Self> {
        cfg.validate()?;
        match (cfg, channel) {
            (ChargeConfiguration::Sphere { rho0, r0 }, Channel::Spherical { l, two_j }) => {
                Self::sphere(l, two_j, beta_sphere(*rho0, c), *r0)
            }
            (ChargeConfiguration::Cylinder { rho, r0 }, Channel::Planar { nu }) => {
                Self::cylinder(nu, beta_cylinder(*rho, c), *r0)
            }
            (ChargeConfiguration::Slab { .. }, _) => Err(Error::InvalidParameter(
                "the slab geometry has no radial problem".into(),
            )),
            _ => Err(Error::InvalidParameter(
                "channel kind does not match the geometry".into(),
            )),
        }
    }

    pub fn with_convention(mut self, convention: PotentialConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r0 > 0.0) {
            return Err(Error::InvalidParameter(format!("r0 must be positive, got {}", self.r0)));
        }
        if !self.beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "beta must be finite, got {}",
                self.beta
            )));
        }
        match (self.geometry, self.channel) {
            (Geometry::Sphere, Channel::Spherical { l, two_j }) => {
                let q = ChannelQuantumNumbers::new(l, two_j)?;
                if q.w != self.w {
                    return Err(Error::InvalidParameter(format!(
                        "w = {} does not match the channel",
                        self.w
                    )));
                }
                Ok(())
            }
            (Geometry::Cylinder, Channel::Planar { nu }) if nu == self.w => Ok(()),
            _ => Err(Error::InvalidParameter("inconsistent geometry and channel".into())),
        }
    }

    pub fn dimension(&self) -> u32 {
        match self.geometry {
            Geometry::Cylinder => 2,
            _ => 3,
        }
    }

    /// Index `L` of the centrifugal term `L(L+1)/r^2`.
    pub fn centrifugal_index(&self) -> f64 {
        match self.channel {
            Channel::Spherical { l, .. } => f64::from(l),
            Channel::Planar { nu } => f64::from(nu.abs()) - 0.5,
        }
    }

    /// Signed slope of the interior superpotential `W = gamma r`.
    pub fn gamma(&self) -> f64 {
        match self.geometry {
            Geometry::Cylinder => -self.beta,
            _ => self.beta,
        }
    }

    /// Superpotential and its derivative.
    pub fn superpotential(&self, r: f64) -> (f64, f64) {
        self.superpotential_branch(r, r > self.r0)
    }

    /// Interior or exterior formula regardless of where `r` lies.
    pub fn superpotential_branch(&self, r: f64, outside: bool) -> (f64, f64) {
        let g = self.gamma();
        if !outside {
            return (g * r, g);
        }
        match self.geometry {
            Geometry::Cylinder => {
                let a = g * self.r0 * self.r0;
                (a / r, -a / (r * r))
            }
            _ => {
                let a = g * self.r0.powi(3);
                (a / (r * r), -2.0 * a / r.powi(3))
            }
        }
    }

    /// The `W`-dependent part of the potential.
    pub fn coupling_potential(&self, r: f64) -> f64 {
        self.coupling_branch(r, r > self.r0)
    }

    fn coupling_branch(&self, r: f64, outside: bool) -> f64 {
        let (w, dw) = self.superpotential_branch(r, outside);
        let d = f64::from(self.dimension());
        let s = f64::from(self.w);
        -dw - (d - 1.0) * w / r + self.convention.cross_sign() * 2.0 * s * w / r + w * w
    }

    /// Interior constant: `U = U0 + gamma^2 r^2` for `r <= r0`.
    pub fn interior_offset(&self) -> f64 {
        let d = f64::from(self.dimension());
        let s = f64::from(self.w);
        -self.gamma() * (d - self.convention.cross_sign() * 2.0 * s)
    }

    /// Coefficient `c` of the exterior `c / r^2` tail.
    pub fn asymptotic_inverse_square(&self) -> f64 {
        let big_l = self.centrifugal_index();
        let base = big_l * (big_l + 1.0);
        match self.geometry {
            Geometry::Cylinder => {
                let a = self.gamma() * self.r0 * self.r0;
                let s = f64::from(self.w);
                // -W' - W/r cancel; cross term and W^2 survive
                base + self.convention.cross_sign() * 2.0 * s * a + a * a
            }
            _ => base,
        }
    }

    /// Natural energy scale, cm^-2.
    pub fn energy_scale(&self) -> f64 {
        let geometric = if self.r0.is_finite() {
            1.0 / (self.r0 * self.r0)
        } else {
            0.0
        };
        self.beta.abs().max(geometric).max(f64::MIN_POSITIVE)
    }

    fn r_min(&self, r_match: f64) -> f64 {
        R_MIN_FRACTION * self.r0.min(r_match)
    }
}

/// Effective potential in cm^-2.
pub fn effective_potential(p: &RadialProblem, r: f64) -> f64 {
    potential_branch(p, r, r > p.r0)
}

/// Interior (`outside = false`) or exterior formula of the potential.
pub fn potential_branch(p: &RadialProblem, r: f64, outside: bool) -> f64 {
    let big_l = p.centrifugal_index();
    big_l * (big_l + 1.0) / (r * r) + p.coupling_branch(r, outside)
}

/// Value and derivative, with `psi = (psi, dpsi) * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Shot {
    pub psi: f64,
    pub dpsi: f64,
    pub log_scale: f64,
    pub nodes: usize,
}

impl Shot {
    pub fn log_derivative(&self) -> f64 {
        self.dpsi / self.psi
    }

    /// The unscaled value.
    pub fn value(&self) -> f64 {
        self.psi * self.log_scale.exp()
    }

    fn from_end(e: OdeEnd) -> Self {
        Self {
            psi: e.y,
            dpsi: e.dy,
            log_scale: e.log_scale,
            nodes: e.nodes,
        }
    }
}

/// Regular solution `r^(L+1) (1 + c2 r^2 + ...)` integrated out to `r_match`.
pub fn shoot_interior(p: &RadialProblem, epsilon: f64, r_match: f64) -> Result<Shot> {
    let mut samples = Vec::new();
    interior_run(p, epsilon, r_match, &[], &mut samples)
}

fn interior_run(
    p: &RadialProblem,
    epsilon: f64,
    r_match: f64,
    outputs: &[f64],
    samples: &mut Vec<OdeSample>,
) -> Result<Shot> {
    if !(r_match > 0.0 && r_match <= p.r0) {
        return Err(Error::InvalidParameter(format!(
            "r_match = {r_match} must lie in (0, r0]"
        )));
    }
    let big_l = p.centrifugal_index();
    let r_min = p.r_min(r_match);
    let c2 = (p.interior_offset() - epsilon) / (2.0 * (2.0 * big_l + 3.0));
    // divide out r^(L+1) and carry it in the log scale
    let y = 1.0 + c2 * r_min * r_min;
    let dy = (big_l + 1.0) / r_min + c2 * (big_l + 3.0) * r_min;
    let ig = Integrator::new(|r| potential_branch(p, r, false) - epsilon, RTOL);
    let end = ig.run(
        r_min,
        r_match,
        [y, dy],
        (big_l + 1.0) * r_min.ln(),
        0.05 * r_min,
        outputs,
        samples,
    )?;
    Ok(Shot::from_end(end))
}

/// Decay rate `sqrt(-eps)`, or `NoDecaySeed`.
fn decay_rate(epsilon: f64) -> Result<f64> {
    if epsilon < 0.0 {
        Ok((-epsilon).sqrt())
    } else {
        Err(Error::NoDecaySeed { epsilon })
    }
}

/// Default outer boundary for the backward integration.
pub fn default_r_max(p: &RadialProblem, epsilon: f64) -> Result<f64> {
    let kappa = decay_rate(epsilon)?;
    Ok((2.0 * p.r0).max(p.r0 + 40.0 / kappa))
}

/// Decaying solution seeded as `e^(-kappa r)` at `r_max` and integrated back
/// to `r0`.
pub fn shoot_exterior(p: &RadialProblem, epsilon: f64, r_max: f64) -> Result<Shot> {
    let mut samples = Vec::new();
    exterior_run(p, epsilon, r_max, &[], &mut samples)
}

fn exterior_run(
    p: &RadialProblem,
    epsilon: f64,
    r_max: f64,
    outputs: &[f64],
    samples: &mut Vec<OdeSample>,
) -> Result<Shot> {
    let kappa = decay_rate(epsilon)?;
    if !p.r0.is_finite() {
        return Err(Error::InvalidParameter("no exterior region when r0 is infinite".into()));
    }
    if !(r_max > p.r0) {
        return Err(Error::InvalidParameter(format!(
            "r_max = {r_max} must exceed r0 = {}",
            p.r0
        )));
    }
    let ig = Integrator::new(|r| potential_branch(p, r, true) - epsilon, RTOL);
    let h0 = 0.01 * (1.0 / kappa).min(r_max - p.r0);
    let end = ig.run(r_max, p.r0, [1.0, -kappa], -kappa * r_max, h0, outputs, samples)?;
    Ok(Shot::from_end(end))
}

/// Exponent `mu` of the zero-energy exterior solutions `r^(1/2 +- mu)`.
pub fn threshold_exponent(p: &RadialProblem) -> f64 {
    (p.asymptotic_inverse_square() + 0.25).max(0.0).sqrt()
}

/// Whether the decaying zero-energy exterior solution is square integrable.
pub fn threshold_normalizable(p: &RadialProblem) -> bool {
    threshold_exponent(p) > 1.0
}

/// Zero-energy exterior solution `~ r^(1/2 - mu)` brought back to `r0`.
pub fn shoot_exterior_threshold(p: &RadialProblem) -> Result<Shot> {
    let mut samples = Vec::new();
    threshold_run(p, 1e4 * p.r0, &[], &mut samples)
}

fn threshold_run(p: &RadialProblem, r_far: f64, outputs: &[f64], samples: &mut Vec<OdeSample>) -> Result<Shot> {
    if !p.r0.is_finite() {
        return Err(Error::InvalidParameter("no exterior region when r0 is infinite".into()));
    }
    let e = 0.5 - threshold_exponent(p);
    let ig = Integrator::new(|r| potential_branch(p, r, true), RTOL);
    let end = ig.run(
        r_far,
        p.r0,
        [1.0, e / r_far],
        e * r_far.ln(),
        0.01 * r_far,
        outputs,
        samples,
    )?;
    Ok(Shot::from_end(end))
}

/// Interior solution in closed form,
/// `r^(L+1) e^(-omega r^2 / 2) 1F1(a; L + 3/2; omega r^2)` with `omega = |gamma|`.
///
/// Normalised so that it approaches `r^(L+1)` at the origin, the same
/// normalisation used by [`shoot_interior`].
pub fn interior_closed_form(p: &RadialProblem, epsilon: f64, r: f64) -> Result<f64> {
    if !(r > 0.0 && r <= p.r0) {
        return Err(Error::InvalidParameter(format!("r = {r} must lie in (0, r0]")));
    }
    let omega = p.gamma().abs();
    if omega == 0.0 {
        return Err(Error::InvalidParameter("closed form needs a nonzero beta".into()));
    }
    let (a, b) = kummer_parameters(p, epsilon);
    let z = omega * r * r;
    let m = kummer_1f1(a, b, z)?;
    let big_l = p.centrifugal_index();
    Ok(r.powf(big_l + 1.0) * (-0.5 * z).exp() * m)
}

/// Published interior energy shift `beta (3 - 2 (j - 1/2))` for `j = l + 1/2`
/// and `beta (3 + 2 (j - 1/2))` for `j = l - 1/2`, sphere channels only.
/// Compare with `-interior_offset()` under [`PotentialConvention::Printed`]:
/// equal for `j = l + 1/2`, `4 beta` apart for `j = l - 1/2`.
pub fn published_energy_shift(p: &RadialProblem) -> Option<f64> {
    match p.channel {
        Channel::Spherical { l, two_j } => {
            let j_minus_half = f64::from(two_j) / 2.0 - 0.5;
            let sign = if two_j == 2 * l + 1 { -1.0 } else { 1.0 };
            Some(p.beta * (3.0 + sign * 2.0 * j_minus_half))
        }
        Channel::Planar { .. } => None,
    }
}

/// `(a, b)` of the interior Kummer function.
pub fn kummer_parameters(p: &RadialProblem, epsilon: f64) -> (f64, f64) {
    let omega = p.gamma().abs();
    let b = p.centrifugal_index() + 1.5;
    let a = 0.5 * b - (epsilon - p.interior_offset()) / (4.0 * omega);
    (a, b)
}
