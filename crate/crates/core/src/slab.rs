//! Separated ground-state solutions of the charged slab:
//! `J_nu(k r) e^(i nu theta) phi_k(z)` with the spin polarised along `+z`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{ChargeConfiguration, FieldConvention};
use crate::specfun::bessel_j;
use crate::units::{coupling_eta, slab_k_bound, PhysicalConstants};
use crate::zeromode::{slab_zero_mode, PiecewiseRadialFunction, ZeroModeForm};

/// `J_nu(k r)` for integer `nu` of either sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesselProfile {
    pub nu: i32,
    /// cm^-1
    pub k: f64,
}

impl BesselProfile {
    pub fn value(&self, r: f64) -> f64 {
        let j = bessel_j(self.nu.unsigned_abs(), self.k * r.abs());
        if self.nu < 0 && self.nu % 2 != 0 {
            -j
        } else {
            j
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlabSolution {
    pub nu: i32,
    /// cm^-1
    pub k: f64,
    /// cm^-1; `k'^2 = k^2 - eps` and `eps = 0` here.
    pub k_prime: f64,
    pub z_profile: PiecewiseRadialFunction,
    pub radial_profile: BesselProfile,
}

fn slab_parts(cfg: &ChargeConfiguration) -> Result<(f64, f64)> {
    match *cfg {
        ChargeConfiguration::Slab { rho0, thickness } => Ok((rho0, thickness)),
        _ => Err(Error::InvalidParameter("expected a slab configuration".into())),
    }
}

/// Ground-family solution with azimuthal number `nu` and degeneracy
/// parameter `k`. `nu` must be an integer.
pub fn build_slab_solution(
    nu: f64,
    k: f64,
    cfg: &ChargeConfiguration,
    c: &PhysicalConstants,
    form: ZeroModeForm,
    convention: FieldConvention,
) -> Result<SlabSolution> {
    cfg.validate()?;
    if nu.fract() != 0.0 || !nu.is_finite() || nu.abs() > f64::from(i32::MAX) {
        return Err(Error::InvalidParameter(format!("nu must be an integer, got {nu}")));
    }
    let (rho0, thickness) = slab_parts(cfg)?;
    let z_profile = slab_zero_mode(k, rho0, thickness, c, form, convention)?;
    let nu = nu as i32;
    Ok(SlabSolution {
        nu,
        k,
        k_prime: k,
        z_profile,
        radial_profile: BesselProfile { nu, k },
    })
}

/// Largest admissible `k`, `sqrt(4 pi eta rho0)`; independent of `L`.
pub fn k_max(cfg: &ChargeConfiguration, c: &PhysicalConstants) -> Result<f64> {
    let (rho0, _) = slab_parts(cfg)?;
    Ok(slab_k_bound(rho0, c)?.sqrt())
}

/// `n_samples` points of the continuous family `0 <= k < k_max`, starting at
/// `k = 0` and evenly spaced.
pub fn degeneracy_family(cfg: &ChargeConfiguration, c: &PhysicalConstants, n_samples: usize) -> Result<Vec<f64>> {
    let top = k_max(cfg, c)?;
    Ok((0..n_samples).map(|i| top * i as f64 / n_samples as f64).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlabResidual {
    pub interior_max: f64,
    pub exterior_max: f64,
}

/// Residual of `phi'' + (4 pi eta rho0 - k^2 - 16 pi^2 eta^2 rho0^2 z^2) phi`
/// inside and `phi'' - k^2 phi` outside, each relative to
/// `|phi''| + |q phi|`, on 400 points per region.
pub fn slab_residual(sol: &SlabSolution, cfg: &ChargeConfiguration, c: &PhysicalConstants) -> Result<SlabResidual> {
    let (rho0, thickness) = slab_parts(cfg)?;
    let a = 4.0 * PI * coupling_eta(c) * rho0;
    let k2 = sol.k * sol.k;
    let half = thickness / 2.0;
    let f = &sol.z_profile;
    let second = |z: f64| second_derivative(f, z);
    let rel = |num: f64, den: f64| if den == 0.0 { num.abs() } else { num.abs() / den };
    let n = 400;
    let mut interior = 0.0f64;
    for i in 0..n {
        let z = half * (i as f64 + 0.5) / n as f64;
        let q = a - k2 - a * a * z * z;
        let (d2, v) = (second(z), f.value(z));
        interior = interior.max(rel(d2 + q * v, d2.abs() + (q * v).abs()));
    }
    let mut exterior = 0.0f64;
    let span = 5.0 * half.max(if sol.k > 0.0 { 1.0 / sol.k } else { half });
    for i in 0..n {
        let z = half + span * (i as f64 + 0.5) / n as f64;
        let (d2, v) = (second(z), f.value(z));
        exterior = exterior.max(rel(d2 - k2 * v, d2.abs() + (k2 * v).abs()));
    }
    Ok(SlabResidual {
        interior_max: interior,
        exterior_max: exterior,
    })
}

/// Analytic second derivative of a single region piece.
fn second_derivative(f: &PiecewiseRadialFunction, z: f64) -> f64 {
    use crate::zeromode::Piece;
    let x = z.abs();
    let region = f
        .regions
        .iter()
        .find(|r| x >= r.lo && x <= r.hi)
        .unwrap_or(&f.regions[f.regions.len() - 1]);
    let v = region.piece.value(x);
    match region.piece {
        Piece::Gaussian { coeff, .. } => v * (2.0 * coeff + 4.0 * coeff * coeff * x * x),
        Piece::Exponential { rate, .. } => v * rate * rate,
        Piece::InverseExp { coeff, .. } => v * (2.0 * coeff / x.powi(3) + coeff * coeff / x.powi(4)),
        Piece::Power { exponent, .. } => v * exponent * (exponent - 1.0) / (x * x),
    }
}

/// `z,phi` rows with a header.
pub fn z_profile_csv(sol: &SlabSolution, z_max: f64, n: usize) -> String {
    let mut out = String::from("z_cm,phi\n");
    for (z, v) in sol.z_profile.tabulate(z_max, n) {
        out.push_str(&format!("{z:.9e},{v:.12e}\n"));
    }
    out
}

/// `r,J_nu(k r)` rows with a header.
pub fn radial_profile_csv(sol: &SlabSolution, r_max: f64, n: usize) -> String {
    let mut out = String::from("r_cm,R\n");
    for i in 0..n {
        let r = r_max * i as f64 / (n - 1).max(1) as f64;
        out.push_str(&format!("{r:.9e},{:.12e}\n", sol.radial_profile.value(r)));
    }
    out
}
