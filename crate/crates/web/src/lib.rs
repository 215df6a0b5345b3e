//! Browser bindings. Every export takes plain numbers and returns a JSON
//! string; errors surface as JS exceptions.

use ac_susy::oracle::{auto_cells, build_susy_pair, lowest_eigenvalues, susy_algebra_check};
use ac_susy::radial::{effective_potential, Channel, RadialProblem};
use ac_susy::zeromode::{cylinder_zero_mode, slab_zero_mode, sphere_zero_mode, susy_status, ZeroModeForm};
use ac_susy::{ChargeConfiguration, CouplingSet, FieldConvention, PhysicalConstants};
use serde_json::json;
use wasm_bindgen::prelude::*;

const POINTS: usize = 300;

fn configuration(geometry: &str, rho: f64, size: f64) -> Result<ChargeConfiguration, String> {
    let cfg = match geometry {
        "sphere" => ChargeConfiguration::Sphere { rho0: rho, r0: size },
        "cylinder" => ChargeConfiguration::Cylinder { rho, r0: size },
        "slab" => ChargeConfiguration::Slab {
            rho0: rho,
            thickness: size,
        },
        other => return Err(format!("unknown geometry `{other}`")),
    };
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

/// Channel `k`: sphere `l = k` with `j = l + 1/2`, cylinder `nu = k`.
fn problem(cfg: &ChargeConfiguration, k: i32) -> Result<RadialProblem, String> {
    let channel = match cfg {
        ChargeConfiguration::Sphere { .. } => {
            let l = u32::try_from(k).map_err(|_| "l must be non-negative".to_string())?;
            Channel::Spherical { l, two_j: 2 * l + 1 }
        }
        ChargeConfiguration::Cylinder { .. } => Channel::Planar { nu: k },
        ChargeConfiguration::Slab { .. } => return Err("the slab has no radial channel".into()),
    };
    RadialProblem::from_config(cfg, &PhysicalConstants::default(), channel).map_err(|e| e.to_string())
}

pub fn zero_mode_json(geometry: &str, rho: f64, size: f64, consistent: bool) -> Result<String, String> {
    let c = PhysicalConstants::default();
    let cfg = configuration(geometry, rho, size)?;
    let verdict = susy_status(&cfg, &c).map_err(|e| e.to_string())?;
    let form = if consistent {
        ZeroModeForm::Consistent
    } else {
        ZeroModeForm::Printed
    };
    let beta = CouplingSet::for_config(&cfg, &c).beta;
    let mode = match cfg {
        ChargeConfiguration::Sphere { r0, .. } => sphere_zero_mode(beta, r0, form),
        ChargeConfiguration::Cylinder { r0, .. } => cylinder_zero_mode(beta, r0),
        ChargeConfiguration::Slab { rho0, thickness } => {
            slab_zero_mode(0.0, rho0, thickness, &c, form, FieldConvention::Printed)
        }
    };
    let profile = match mode {
        Ok(m) => Some(m.tabulate(4.0 * size, POINTS)),
        Err(_) => None,
    };
    Ok(json!({
        "beta": beta,
        "beta_r0_squared": beta * size * size,
        "status": verdict.status,
        "criterion": verdict.criterion,
        "profile": profile,
    })
    .to_string())
}

pub fn potential_json(geometry: &str, rho: f64, size: f64, channel: i32) -> Result<String, String> {
    let p = problem(&configuration(geometry, rho, size)?, channel)?;
    let r_max = 4.0 * size;
    let points: Vec<(f64, f64)> = (1..=POINTS)
        .map(|i| {
            let r = r_max * i as f64 / POINTS as f64;
            (r, effective_potential(&p, r))
        })
        .collect();
    Ok(json!({ "r0": size, "points": points }).to_string())
}

pub fn grid_json(geometry: &str, rho: f64, size: f64, channel: i32, levels: usize) -> Result<String, String> {
    let p = problem(&configuration(geometry, rho, size)?, channel)?;
    let r_max = 20.0 * size;
    let n = auto_cells(&p, r_max, 400).min(20_000);
    let pair = build_susy_pair(&p, n, r_max).map_err(|e| e.to_string())?;
    let check = susy_algebra_check(&pair);
    let levels = lowest_eigenvalues(&pair.grid, levels.clamp(1, 20));
    Ok(json!({
        "cells": n,
        "r_max": r_max,
        "levels": levels,
        "energy_scale": p.energy_scale(),
        "q_squared": check.q2_norm,
        "nonnegative": check.nonneg_spectrum_flag,
        "lowest_bosonic": check.lowest_bosonic,
        "lowest_fermionic": check.lowest_fermionic,
    })
    .to_string())
}

/// Zero-mode profile on `[0, 4 size]` and the SUSY verdict.
#[wasm_bindgen(js_name = zeroMode)]
pub fn zero_mode(geometry: &str, rho: f64, size: f64, consistent: bool) -> Result<String, JsError> {
    zero_mode_json(geometry, rho, size, consistent).map_err(|e| JsError::new(&e))
}

/// Effective radial potential of one channel on `(0, 4 size]`.
#[wasm_bindgen(js_name = effectivePotential)]
pub fn effective_potential_curve(geometry: &str, rho: f64, size: f64, channel: i32) -> Result<String, JsError> {
    potential_json(geometry, rho, size, channel).map_err(|e| JsError::new(&e))
}

/// Lowest grid eigenvalues and the discrete supercharge check.
#[wasm_bindgen(js_name = gridSpectrum)]
pub fn grid_spectrum(geometry: &str, rho: f64, size: f64, channel: i32, levels: usize) -> Result<String, JsError> {
    grid_json(geometry, rho, size, channel, levels).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> serde_json::Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn zero_mode_verdicts() {
        let v = parse(&zero_mode_json("cylinder", 1e8, 1.0, false).unwrap());
        assert_eq!(v["status"], "Unbroken");
        assert_eq!(v["profile"].as_array().unwrap().len(), POINTS);
        let v = parse(&zero_mode_json("sphere", 2e6, 1.0, true).unwrap());
        assert_eq!(v["status"], "Broken");
        let v = parse(&zero_mode_json("slab", -1e6, 1.0, true).unwrap());
        assert!(v["profile"].is_null());
        assert!(zero_mode_json("torus", 1.0, 1.0, true).is_err());
        assert!(zero_mode_json("sphere", 1.0, -1.0, true).is_err());
    }

    #[test]
    fn potential_and_grid() {
        let v = parse(&potential_json("sphere", 2e6, 1.0, 1).unwrap());
        assert_eq!(v["points"].as_array().unwrap().len(), POINTS);
        assert!(potential_json("slab", 2e6, 1.0, 0).is_err());
        let g = parse(&grid_json("cylinder", 1e8, 1.0, 0, 3).unwrap());
        assert_eq!(g["q_squared"], 0.0);
        assert_eq!(g["nonnegative"], true);
        let lowest = g["levels"][0].as_f64().unwrap();
        assert!(lowest.abs() < 1e-3 * g["energy_scale"].as_f64().unwrap());
    }
}
