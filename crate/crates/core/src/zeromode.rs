//! Closed-form supersymmetric ground states.
//!
//! A zero mode is annihilated by the supercharge, which for a radial (or
//! z-dependent) profile reduces to the first-order equation
//! `(d/dr + W(r)) phi = 0`, with `W` the coupling returned by
//! [`first_order_coupling`]. Whether such a mode is normalizable decides
//! whether supersymmetry is broken.
//!
//! Two forms exist for the sphere and the slab:
//! [`ZeroModeForm::Printed`] reproduces the published closed forms verbatim
//! (sphere interior `exp(-beta r^2/2)` with exterior `exp(-beta r0^3/r)`,
//! slab `exp(-k^2 z^2/2)`), while [`ZeroModeForm::Consistent`] returns the
//! exact solution of the first-order equation. The cylinder has a single
//! form: the published one solves its first-order equation exactly.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{radial_field, ChargeConfiguration, FieldConvention};
use crate::quad;
use crate::units::{self, coupling_eta, PhysicalConstants};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroModeForm {
    #[default]
    Printed,
    Consistent,
}

/// Integration measure of `|phi|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// `4 pi r^2 dr`
    Volume3,
    /// `2 pi r dr`
    Plane2,
    /// `dz` over the whole line; the profile is even in `z`.
    Line,
}

impl Measure {
    pub fn dimension(self) -> u32 {
        match self {
            Measure::Volume3 => 3,
            Measure::Plane2 => 2,
            Measure::Line => 1,
        }
    }

    fn prefactor(self) -> f64 {
        match self {
            Measure::Volume3 => 4.0 * PI,
            Measure::Plane2 => 2.0 * PI,
            Measure::Line => 2.0,
        }
    }
}

fn unit_reference() -> f64 {
    1.0
}

/// Analytic building blocks of the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Piece {
    /// `amp * exp(coeff * x^2)`
    Gaussian { amp: f64, coeff: f64 },
    /// `amp * exp(coeff / x)`
    InverseExp { amp: f64, coeff: f64 },
    /// `amp * (x / reference)^exponent`
    Power {
        amp: f64,
        exponent: f64,
        #[serde(default = "unit_reference")]
        reference: f64,
    },
    /// `amp * exp(offset + rate * x)`
    Exponential { amp: f64, offset: f64, rate: f64 },
}

impl Piece {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Piece::Gaussian { amp, coeff } => amp * (coeff * x * x).exp(),
            Piece::InverseExp { amp, coeff } => amp * (coeff / x).exp(),
            Piece::Power {
                amp,
                exponent,
                reference,
            } => amp * (x / reference).powf(exponent),
            Piece::Exponential { amp, offset, rate } => amp * (offset + rate * x).exp(),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let v = self.value(x);
        match *self {
            Piece::Gaussian { coeff, .. } => 2.0 * coeff * x * v,
            Piece::InverseExp { coeff, .. } => -coeff / (x * x) * v,
            Piece::Power { exponent, .. } => exponent / x * v,
            Piece::Exponential { rate, .. } => rate * v,
        }
    }

    /// `ln` of the piece at unit amplitude.
    fn ln_shape(&self, x: f64) -> f64 {
        match *self {
            Piece::Gaussian { coeff, .. } => coeff * x * x,
            Piece::InverseExp { coeff, .. } => coeff / x,
            Piece::Power {
                exponent, reference, ..
            } => exponent * (x / reference).ln(),
            Piece::Exponential { offset, rate, .. } => offset + rate * x,
        }
    }

    fn with_amp(self, new_amp: f64) -> Self {
        match self {
            Piece::Gaussian { coeff, .. } => Piece::Gaussian { amp: new_amp, coeff },
            Piece::InverseExp { coeff, .. } => Piece::InverseExp { amp: new_amp, coeff },
            Piece::Power {
                exponent, reference, ..
            } => Piece::Power {
                amp: new_amp,
                exponent,
                reference,
            },
            Piece::Exponential { offset, rate, .. } => Piece::Exponential {
                amp: new_amp,
                offset,
                rate,
            },
        }
    }

    fn amp(&self) -> f64 {
        match *self {
            Piece::Gaussian { amp, .. }
            | Piece::InverseExp { amp, .. }
            | Piece::Power { amp, .. }
            | Piece::Exponential { amp, .. } => amp,
        }
    }

    /// Large-`x` behaviour of `|piece|^2`.
    fn tail(&self) -> Tail {
        match *self {
            Piece::Gaussian { coeff, .. } if coeff < 0.0 => Tail::Decaying,
            Piece::Gaussian { coeff, .. } if coeff > 0.0 => Tail::Growing,
            Piece::Exponential { rate, .. } if rate < 0.0 => Tail::Decaying,
            Piece::Exponential { rate, .. } if rate > 0.0 => Tail::Growing,
            Piece::Power { exponent, .. } => Tail::Power(exponent),
            _ => Tail::Power(0.0),
        }
    }
}

/// Asymptotic class of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", content = "exponent", rename_all = "snake_case")]
pub enum Tail {
    /// `phi ~ x^p`; a constant tail is `Power(0)`.
    Power(f64),
    /// Faster than any power.
    Decaying,
    Growing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub lo: f64,
    /// `f64::INFINITY` for the outermost region.
    pub hi: f64,
    pub piece: Piece,
}

/// A profile assembled from closed-form pieces on consecutive intervals of
/// the radial (or `|z|`) coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseRadialFunction {
    pub regions: Vec<Region>,
    /// Amplitude ratio inner/outer at each interface.
    pub matching_constants: Vec<f64>,
    pub measure: Measure,
}

impl PiecewiseRadialFunction {
    fn region_at(&self, x: f64) -> &Region {
        let x = x.abs();
        self.regions
            .iter()
            .find(|reg| x <= reg.hi)
            .unwrap_or_else(|| self.regions.last().expect("regions"))
    }

    pub fn value(&self, x: f64) -> f64 {
        self.region_at(x).piece.value(x.abs())
    }

    /// Derivative with respect to `|x|`.
    pub fn derivative(&self, x: f64) -> f64 {
        self.region_at(x).piece.derivative(x.abs())
    }

    pub fn interfaces(&self) -> Vec<f64> {
        self.regions.iter().filter(|r| r.hi.is_finite()).map(|r| r.hi).collect()
    }

    /// Relative value jump at each interface.
    pub fn value_jumps(&self) -> Vec<f64> {
        self.regions
            .windows(2)
            .map(|w| {
                let x = w[0].hi;
                let (a, b) = (w[0].piece.value(x), w[1].piece.value(x));
                relative_gap(a, b)
            })
            .collect()
    }

    /// Relative jump of the first derivative at each interface.
    pub fn derivative_jumps(&self) -> Vec<f64> {
        self.regions
            .windows(2)
            .map(|w| {
                let x = w[0].hi;
                let (a, b) = (w[0].piece.derivative(x), w[1].piece.derivative(x));
                relative_gap(a, b)
            })
            .collect()
    }

    pub fn tail(&self) -> Tail {
        self.regions.last().expect("regions").piece.tail()
    }

    /// `(x, phi(x))` on a uniform grid over `[0, x_max]`.
    pub fn tabulate(&self, x_max: f64, n: usize) -> Vec<(f64, f64)> {
        let n = n.max(2);
        (0..n)
            .map(|i| {
                let x = x_max * i as f64 / (n - 1) as f64;
                (x, self.value(x))
            })
            .collect()
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Joins an inner and an outer shape at `x0`. The inner amplitude is kept and
/// the outer amplitude is solved from value continuity, in logarithms so that
/// steep profiles neither overflow nor underflow; an exponential outer piece
/// absorbs it into its offset.
fn join(inner: Piece, outer: Piece, x0: f64, measure: Measure) -> PiecewiseRadialFunction {
    let inner_amp = inner.amp();
    let log_outer = inner_amp.abs().ln() + inner.ln_shape(x0) - outer.ln_shape(x0);
    let outer = match outer {
        Piece::Exponential { offset, rate, .. } => Piece::Exponential {
            amp: inner_amp.signum(),
            offset: offset + log_outer,
            rate,
        },
        Piece::Power { exponent, .. } => Piece::Power {
            amp: inner_amp * inner.ln_shape(x0).exp(),
            exponent,
            reference: x0,
        },
        other => other.with_amp(inner_amp.signum() * log_outer.exp()),
    };
    let ratio = (inner_amp.abs().ln() - log_outer).exp();
    PiecewiseRadialFunction {
        regions: vec![
            Region {
                lo: 0.0,
                hi: x0,
                piece: inner,
            },
            Region {
                lo: x0,
                hi: f64::INFINITY,
                piece: outer,
            },
        ],
        matching_constants: vec![ratio],
        measure,
    }
}

/// Zero mode of the charged sphere, normalised to `phi(0) = 1`.
pub fn sphere_zero_mode(beta: f64, r0: f64, form: ZeroModeForm) -> Result<PiecewiseRadialFunction> {
    check_positive("r0", r0)?;
    let inner = Piece::Gaussian {
        amp: 1.0,
        coeff: -beta / 2.0,
    };
    let exterior_coeff = match form {
        ZeroModeForm::Printed => -beta * r0.powi(3),
        ZeroModeForm::Consistent => beta * r0.powi(3),
    };
    Ok(join(
        inner,
        Piece::InverseExp {
            amp: 1.0,
            coeff: exterior_coeff,
        },
        r0,
        Measure::Volume3,
    ))
}

/// Zero mode of the charged cylinder, `A exp(beta r^2 / 2)` inside and
/// `B r^(beta r0^2)` outside, normalised to `phi(0) = 1`.
pub fn cylinder_zero_mode(beta: f64, r0: f64) -> Result<PiecewiseRadialFunction> {
    check_positive("r0", r0)?;
    let inner = Piece::Gaussian {
        amp: 1.0,
        coeff: beta / 2.0,
    };
    let outer = Piece::Power {
        amp: 1.0,
        exponent: beta * r0 * r0,
        reference: 1.0,
    };
    Ok(join(inner, outer, r0, Measure::Plane2))
}

/// Ground-state z-profile of the slab for degeneracy parameter `k`.
///
/// The printed form is `exp(-k^2 z^2 / 2)` for `|z| <= L/2` and
/// `exp(-k^2 L^2 / 2 + k (L - |z|))` beyond, which is not continuous at
/// `|z| = L/2`. The consistent form is `exp(-2 pi eta rho0 z^2)` inside,
/// continued with the exterior field of `convention`; it does not depend on
/// `k`.
pub fn slab_zero_mode(
    k: f64,
    rho0: f64,
    thickness: f64,
    c: &PhysicalConstants,
    form: ZeroModeForm,
    convention: FieldConvention,
) -> Result<PiecewiseRadialFunction> {
    check_positive("L", thickness)?;
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter(format!("k must be non-negative, got {k}")));
    }
    let bound = units::slab_k_bound(rho0, c)?;
    if k * k >= bound || k >= bound.sqrt() {
        return Err(Error::InadmissibleK { k2: k * k, bound });
    }
    let half = thickness / 2.0;
    Ok(match form {
        ZeroModeForm::Printed => PiecewiseRadialFunction {
            regions: vec![
                Region {
                    lo: 0.0,
                    hi: half,
                    piece: Piece::Gaussian {
                        amp: 1.0,
                        coeff: -0.5 * k * k,
                    },
                },
                Region {
                    lo: half,
                    hi: f64::INFINITY,
                    piece: Piece::Exponential {
                        amp: 1.0,
                        offset: -0.5 * k * k * thickness * thickness + k * thickness,
                        rate: -k,
                    },
                },
            ],
            matching_constants: vec![1.0],
            measure: Measure::Line,
        },
        ZeroModeForm::Consistent => consistent_slab_profile(coupling_eta(c), rho0, thickness, convention),
    })
}

/// `exp(-2 pi eta rho0 z^2)` inside, `exp(-eta E_> |z|)` outside.
fn consistent_slab_profile(
    eta: f64,
    rho0: f64,
    thickness: f64,
    convention: FieldConvention,
) -> PiecewiseRadialFunction {
    let cfg = ChargeConfiguration::Slab { rho0, thickness };
    let outer_w = eta * radial_field(&cfg, thickness, convention);
    let inner = Piece::Gaussian {
        amp: 1.0,
        coeff: -2.0 * PI * eta * rho0,
    };
    join(
        inner,
        Piece::Exponential {
            amp: 1.0,
            offset: 0.0,
            rate: -outer_w,
        },
        thickness / 2.0,
        Measure::Line,
    )
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

/// Coupling `W` of the first-order zero-mode equation `(d/dr + W) phi = 0`.
///
/// Sphere and slab: `W = eta E_r` (resp. `eta E_z`) from the field module.
/// Cylinder: `W = -beta r` inside and `-beta r0^2 / r` outside, with the
/// cylinder `beta`; this is the coupling whose zero mode is the published
/// cylinder profile.
pub fn first_order_coupling(
    cfg: &ChargeConfiguration,
    c: &PhysicalConstants,
    convention: FieldConvention,
) -> impl Fn(f64) -> f64 {
    let eta = coupling_eta(c);
    let cfg = *cfg;
    let beta_cyl = match cfg {
        ChargeConfiguration::Cylinder { rho, .. } => units::beta_cylinder(rho, c),
        _ => 0.0,
    };
    move |r: f64| match cfg {
        ChargeConfiguration::Cylinder { r0, .. } => {
            if r <= r0 {
                -beta_cyl * r
            } else {
                -beta_cyl * r0 * r0 / r
            }
        }
        _ => eta * radial_field(&cfg, r.abs(), convention),
    }
}

/// Maximum relative residual `|phi' + W phi| / (|phi'| + |W phi|)` over the
/// sample points, with `phi'` from the closed-form pieces.
pub fn zero_mode_residual<W: Fn(f64) -> f64>(f: &PiecewiseRadialFunction, coupling: W, samples: &[f64]) -> f64 {
    samples
        .iter()
        .map(|&x| {
            let x = x.abs();
            let d = f.derivative(x);
            let wphi = coupling(x) * f.value(x);
            let denom = d.abs() + wphi.abs();
            if denom == 0.0 {
                0.0
            } else {
                (d + wphi).abs() / denom
            }
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Finiteness {
    Finite,
    Divergent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormIntegral {
    /// Quadrature of `|phi|^2` with the profile's measure up to `r_max`,
    /// including the angular factor.
    pub value: f64,
    /// Power of the large-`r` integrand `|phi|^2 r^(d-1)`; `-inf` for faster
    /// than any power decay, `+inf` for exponential growth.
    pub tail_exponent: f64,
    pub verdict: Finiteness,
}

/// Norm of a profile: quadrature up to `r_max` plus analytic classification
/// of the tail. Divergence is decided by the tail alone.
///
/// `r_max` is raised to ten times the outermost interface if smaller.
pub fn norm_integral(f: &PiecewiseRadialFunction, r_max: f64) -> NormIntegral {
    let last = f.interfaces().last().copied().unwrap_or(1.0);
    let r_max = r_max.max(10.0 * last);
    let d = f.measure.dimension() as i32;
    let tail_exponent = match f.tail() {
        Tail::Power(p) => 2.0 * p + f64::from(d - 1),
        Tail::Decaying => f64::NEG_INFINITY,
        Tail::Growing => f64::INFINITY,
    };
    let verdict = if tail_exponent < -1.0 {
        Finiteness::Finite
    } else {
        Finiteness::Divergent
    };

    let mut edges = vec![0.0];
    edges.extend(f.interfaces().into_iter().filter(|&b| b < r_max));
    edges.push(r_max);
    let integrand = |x: f64| {
        let v = f.value(x);
        v * v * x.powi(d - 1)
    };
    let mut value = 0.0;
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == 0.0 {
            value += quad::integrate(integrand, a, b, 0.0, 1e-12).0;
            continue;
        }
        // geometric subintervals resolve power-law tails
        let mut lo = a;
        while lo < b {
            let hi = (2.0 * lo).min(b);
            value += quad::integrate(integrand, lo, hi, 0.0, 1e-12).0;
            lo = hi;
        }
    }
    NormIntegral {
        value: value * f.measure.prefactor(),
        tail_exponent,
        verdict,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SusyStatus {
    Unbroken,
    Broken,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum NormValue {
    Finite(f64),
    Divergent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdData {
    pub name: String,
    pub value: f64,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SusyVerdict {
    pub status: SusyStatus,
    pub criterion: String,
    pub norm_value: NormValue,
    pub threshold_data: Vec<ThresholdData>,
}

/// Whether the configuration supports a normalizable zero mode.
///
/// The status follows the analytic criteria (sphere: never; cylinder:
/// `beta r0^2 < -1`; slab: `4 pi eta rho0 > 0`). The norm is computed
/// independently from the consistent closed-form zero mode.
pub fn susy_status(cfg: &ChargeConfiguration, c: &PhysicalConstants) -> Result<SusyVerdict> {
    cfg.validate()?;
    let free = cfg.density() == 0.0;
    let (status, criterion, mode, thresholds) = match *cfg {
        ChargeConfiguration::Sphere { rho0, r0 } => {
            let beta = units::beta_sphere(rho0, c);
            let criterion = if free {
                "free particle: constant zero mode is not normalizable".to_string()
            } else {
                format!(
                    "exterior zero mode tends to a constant (beta r0^2 = {:.6e}); not normalizable",
                    beta * r0 * r0
                )
            };
            (
                SusyStatus::Broken,
                criterion,
                sphere_zero_mode(beta, r0, ZeroModeForm::Consistent)?,
                vec![threshold("beta r0^2", beta * r0 * r0, "1")],
            )
        }
        ChargeConfiguration::Cylinder { rho, r0 } => {
            let beta = units::beta_cylinder(rho, c);
            let x = beta * r0 * r0;
            let unbroken = x < -1.0;
            let criterion = if free {
                "free particle: constant zero mode is not normalizable".to_string()
            } else if unbroken {
                format!("beta r0^2 = {x:.6} < -1 => unbroken")
            } else {
                format!("beta r0^2 = {x:.6} >= -1 => broken")
            };
            (
                if unbroken {
                    SusyStatus::Unbroken
                } else {
                    SusyStatus::Broken
                },
                criterion,
                cylinder_zero_mode(beta, r0)?,
                vec![
                    threshold("beta r0^2", x, "1"),
                    threshold("lambda", units::linear_density(rho, r0), "esu/cm"),
                    threshold("lambda_min", units::lambda_threshold(c), "esu/cm"),
                ],
            )
        }
        ChargeConfiguration::Slab { rho0, thickness } => {
            let bound = 4.0 * PI * coupling_eta(c) * rho0;
            let unbroken = bound > 0.0;
            let criterion = if free {
                "free particle: constant zero mode is not normalizable".to_string()
            } else if unbroken {
                format!(
                    "4 pi eta rho0 = {bound:.6} cm^-2 > 0 => unbroken; ground state infinitely degenerate in k, 0 <= k < {:.6} cm^-1",
                    bound.sqrt()
                )
            } else {
                format!("4 pi eta rho0 = {bound:.6} cm^-2 <= 0 => broken")
            };
            let mode = consistent_slab_profile(coupling_eta(c), rho0, thickness, FieldConvention::Printed);
            let mut t = vec![threshold("4 pi eta rho0", bound, "cm^-2")];
            if unbroken {
                t.push(threshold("k_max", bound.sqrt(), "cm^-1"));
            }
            (
                if unbroken {
                    SusyStatus::Unbroken
                } else {
                    SusyStatus::Broken
                },
                criterion,
                mode,
                t,
            )
        }
    };
    let norm = norm_integral(&mode, 20.0 * cfg.size());
    let norm_value = match norm.verdict {
        Finiteness::Finite => NormValue::Finite(norm.value),
        Finiteness::Divergent => NormValue::Divergent,
    };
    Ok(SusyVerdict {
        status,
        criterion,
        norm_value,
        threshold_data: thresholds,
    })
}

fn threshold(name: &str, value: f64, unit: &str) -> ThresholdData {
    ThresholdData {
        name: name.to_string(),
        value,
        unit: unit.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(r_max: f64, n: usize) -> Vec<f64> {
        (1..=n).map(|i| r_max * i as f64 / (n as f64 + 1.0)).collect()
    }

    #[test]
    fn sphere_free_particle_is_constant() {
        for form in [ZeroModeForm::Printed, ZeroModeForm::Consistent] {
            let f = sphere_zero_mode(0.0, 1.0, form).unwrap();
            for r in [0.0, 0.5, 1.0, 3.0, 100.0] {
                assert_eq!(f.value(r), 1.0);
            }
            assert_eq!(zero_mode_residual(&f, |_| 0.0, &samples(5.0, 50)), 0.0);
        }
    }

    #[test]
    fn sphere_matching_ratio() {
        let f = sphere_zero_mode(1.0, 1.0, ZeroModeForm::Printed).unwrap();
        assert!((f.matching_constants[0] - 0.606_530_659_712_633_4).abs() < 1e-15);
        assert!(f.value_jumps()[0] < 1e-15);
        // Printed pieces: log-derivatives at r0 are -beta r0 and +beta r0, so
        // the derivative only matches in magnitude.
        let (inner, outer) = (f.regions[0].piece.derivative(1.0), f.regions[1].piece.derivative(1.0));
        assert!((inner + outer).abs() < 1e-15);

        let g = sphere_zero_mode(1.0, 1.0, ZeroModeForm::Consistent).unwrap();
        assert!((g.matching_constants[0] - 1.5f64.exp()).abs() < 1e-13);
        assert!(g.value_jumps()[0] < 1e-15);
        assert!(g.derivative_jumps()[0] < 1e-14);
    }

    #[test]
    fn cylinder_examples() {
        let f = cylinder_zero_mode(0.0, 1.0).unwrap();
        assert_eq!(f.value(7.0), 1.0);

        let f = cylinder_zero_mode(-2.0, 1.0).unwrap();
        let b = 1.0 / f.matching_constants[0];
        assert!((b - (-1.0f64).exp()).abs() < 1e-15);
        assert!((f.value(3.0) - b / 9.0).abs() < 1e-15);
        assert!(f.derivative_jumps()[0] < 1e-14);
        let beta: f64 = -2.0;
        assert!((f.regions[0].piece.derivative(1.0) / f.value(1.0) - beta).abs() < 1e-14);
    }

    #[test]
    fn norm_classification() {
        let f = sphere_zero_mode(0.7, 1.0, ZeroModeForm::Printed).unwrap();
        assert_eq!(norm_integral(&f, 10.0).verdict, Finiteness::Divergent);
        let f = cylinder_zero_mode(-2.0, 1.0).unwrap();
        let n = norm_integral(&f, 10.0);
        assert_eq!(n.verdict, Finiteness::Finite);
        assert_eq!(n.tail_exponent, -3.0);
        let f = cylinder_zero_mode(-1.0, 1.0).unwrap();
        assert_eq!(norm_integral(&f, 10.0).verdict, Finiteness::Divergent);
    }

    #[test]
    fn cylinder_norm_against_closed_form() {
        // beta r0^2 = -2, r0 = 1: 2 pi [ (1 - e^-2)/4 + e^-2 (1 - R^-2)/2 ]
        let f = cylinder_zero_mode(-2.0, 1.0).unwrap();
        let r_max = 1.0e4;
        let n = norm_integral(&f, r_max);
        let b2 = (-2.0f64).exp();
        let exterior = b2 * 0.5 * (1.0 - r_max.powi(-2));
        let expected = 2.0 * PI * ((1.0 - b2) / 4.0 + exterior);
        assert!(
            (n.value - expected).abs() < 1e-9 * expected,
            "{} vs {}",
            n.value,
            expected
        );
    }

    #[test]
    fn residuals_of_consistent_forms_vanish() {
        let c = PhysicalConstants::default();
        let rho0 = 2.0e6;
        let beta = units::beta_sphere(rho0, &c);
        let r0 = (1.0 / beta).sqrt();
        let cfg = ChargeConfiguration::Sphere { rho0, r0 };
        let f = sphere_zero_mode(beta, r0, ZeroModeForm::Consistent).unwrap();
        let w = first_order_coupling(&cfg, &c, FieldConvention::Printed);
        let pts: Vec<f64> = samples(5.0 * r0, 400)
            .into_iter()
            .filter(|x| (x - r0).abs() > 1e-3 * r0)
            .collect();
        assert!(zero_mode_residual(&f, &w, &pts) < 1e-8);

        let printed = sphere_zero_mode(beta, r0, ZeroModeForm::Printed).unwrap();
        let inside: Vec<f64> = pts.iter().copied().filter(|&x| x < r0).collect();
        let outside: Vec<f64> = pts.iter().copied().filter(|&x| x > r0).collect();
        assert!(zero_mode_residual(&printed, &w, &inside) < 1e-8);
        assert!(zero_mode_residual(&printed, &w, &outside) > 0.99);
    }

    #[test]
    fn slab_forms() {
        let c = PhysicalConstants::default();
        let f = slab_zero_mode(0.0, 2.0e6, 1.0, &c, ZeroModeForm::Printed, FieldConvention::Printed).unwrap();
        assert_eq!(f.value(0.2), 1.0);
        assert_eq!(f.value(-4.0), 1.0);
        assert_eq!(norm_integral(&f, 10.0).verdict, Finiteness::Divergent);

        let bound = units::slab_k_bound(2.0e6, &c).unwrap();
        assert!(matches!(
            slab_zero_mode(
                bound.sqrt(),
                2.0e6,
                1.0,
                &c,
                ZeroModeForm::Printed,
                FieldConvention::Printed
            ),
            Err(Error::InadmissibleK { .. })
        ));
        assert!((bound.sqrt() - 3.91).abs() < 0.01);

        let f = slab_zero_mode(3.0, 2.0e6, 1.0, &c, ZeroModeForm::Printed, FieldConvention::Printed).unwrap();
        // The printed pieces meet at |z| = L, not at L/2.
        assert!(f.value_jumps()[0] > 1e-3);
        let at_l = Piece::Gaussian { amp: 1.0, coeff: -4.5 }.value(1.0);
        assert!((f.regions[1].piece.value(1.0) - at_l).abs() < 1e-15);
        assert_eq!(f.value(-2.0), f.value(2.0));

        let g = slab_zero_mode(3.0, 2.0e6, 1.0, &c, ZeroModeForm::Consistent, FieldConvention::Printed).unwrap();
        assert!(g.value_jumps()[0] < 1e-15);
        assert_eq!(norm_integral(&g, 10.0).verdict, Finiteness::Finite);
    }

    #[test]
    fn verdicts() {
        let c = PhysicalConstants::default();
        let v = susy_status(&ChargeConfiguration::Sphere { rho0: 2.0e6, r0: 1.0 }, &c).unwrap();
        assert_eq!(v.status, SusyStatus::Broken);
        assert_eq!(v.norm_value, NormValue::Divergent);

        let lmin = units::lambda_threshold(&c);
        let r0 = 0.1;
        let rho = 1.5 * lmin / (PI * r0 * r0);
        let v = susy_status(&ChargeConfiguration::Cylinder { rho, r0 }, &c).unwrap();
        assert_eq!(v.status, SusyStatus::Unbroken);
        assert!(matches!(v.norm_value, NormValue::Finite(_)));

        for cfg in [
            ChargeConfiguration::Sphere { rho0: 0.0, r0: 1.0 },
            ChargeConfiguration::Slab {
                rho0: 0.0,
                thickness: 1.0,
            },
            ChargeConfiguration::Cylinder { rho: 0.0, r0: 1.0 },
        ] {
            let v = susy_status(&cfg, &c).unwrap();
            assert_eq!(v.status, SusyStatus::Broken, "{cfg:?}");
            assert!(v.criterion.contains("free particle"));
            assert_eq!(v.norm_value, NormValue::Divergent);
        }

        let v = susy_status(
            &ChargeConfiguration::Slab {
                rho0: 2.0e6,
                thickness: 1.0,
            },
            &c,
        )
        .unwrap();
        assert_eq!(v.status, SusyStatus::Unbroken);
        assert!(v.criterion.contains("degenerate"));
    }

    #[test]
    fn sphere_tail_is_monotone() {
        let f = sphere_zero_mode(0.8, 1.3, ZeroModeForm::Printed).unwrap();
        let a = 1.0 / f.matching_constants[0];
        let mut prev = 0.0;
        for i in 0..60 {
            let r = 1.3 * 10f64.powf(i as f64 / 10.0);
            let v = f.value(r * 1.0001);
            assert!(v > prev && v < a);
            prev = v;
        }
    }
}
