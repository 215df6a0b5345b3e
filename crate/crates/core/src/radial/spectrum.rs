use serde::Serialize;

use super::{
    default_r_max, effective_potential, exterior_run, interior_run, threshold_normalizable, threshold_run, OdeSample,
    RadialProblem, Shot,
};
use crate::error::{Error, Result};

/// Below this, a zero-energy mismatch counts as a match.
pub const THRESHOLD_MATCH_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundState {
    /// cm^-2
    pub epsilon: f64,
    pub node_count: usize,
    /// Sine of the angle between the interior and exterior `(psi, r0 psi')`
    /// vectors at `r0`.
    pub match_residual: f64,
    /// `psi'/psi` inside minus outside at `r0`, cm^-1.
    pub log_derivative_mismatch: f64,
    pub zero_mode: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub problem: RadialProblem,
    pub bound_states: Vec<BoundState>,
    /// cm^-2
    pub continuum_threshold: f64,
    pub classification_notes: Vec<String>,
}

impl SpectrumReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `epsilon,nodes,residual` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epsilon_cm^-2,nodes,residual,zero_mode,oracle_epsilon_cm^-2\n");
        for s in &self.bound_states {
            let oracle = s.oracle_epsilon.map(|e| format!("{e:.12e}")).unwrap_or_default();
            out.push_str(&format!(
                "{:.12e},{},{:.3e},{},{}\n",
                s.epsilon, s.node_count, s.match_residual, s.zero_mode, oracle
            ));
        }
        out
    }
}

struct Match {
    f: f64,
    interior: Shot,
    exterior: Shot,
}

fn angle_mismatch(p: &RadialProblem, interior: Shot, exterior: Shot) -> Match {
    let r0 = p.r0;
    let (a, da) = (interior.psi, r0 * interior.dpsi);
    let (b, db) = (exterior.psi, r0 * exterior.dpsi);
    let f = (a * db - da * b) / (a.hypot(da) * b.hypot(db));
    Match { f, interior, exterior }
}

fn mismatch(p: &RadialProblem, epsilon: f64) -> Result<Match> {
    let mut none = Vec::new();
    let interior = interior_run(p, epsilon, p.r0, &[], &mut none)?;
    let exterior = exterior_run(p, epsilon, default_r_max(p, epsilon)?, &[], &mut none)?;
    Ok(angle_mismatch(p, interior, exterior))
}

fn threshold_mismatch(p: &RadialProblem) -> Result<Match> {
    let mut none = Vec::new();
    let interior = interior_run(p, 0.0, p.r0, &[], &mut none)?;
    let exterior = threshold_run(p, 1e4 * p.r0, &[], &mut none)?;
    Ok(angle_mismatch(p, interior, exterior))
}

fn energy_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n_lin = n / 2;
    let n_log = n - n_lin;
    let mut g: Vec<f64> = (0..n_lin)
        .map(|i| lo + (hi - lo) * i as f64 / (n_lin - 1) as f64)
        .collect();
    let top = if hi < 0.0 { -hi } else { 1e-8 * -lo };
    let (la, lb) = ((-lo).ln(), top.ln());
    g.extend((0..n_log).map(|i| -(la + (lb - la) * i as f64 / (n_log - 1) as f64).exp()));
    g.retain(|&e| e < 0.0 && e >= lo && e <= hi);
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

fn evaluate(p: &RadialProblem, grid: &[f64]) -> Result<Vec<f64>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        grid.par_iter().map(|&e| mismatch(p, e).map(|m| m.f)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        grid.iter().map(|&e| mismatch(p, e).map(|m| m.f)).collect()
    }
}

/// Illinois false position on a bracket with a sign change.
fn refine(p: &RadialProblem, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64) -> Result<f64> {
    let mut side = 0i8;
    for _ in 0..200 {
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a.min(b) && c < a.max(b)) {
            c = 0.5 * (a + b);
        }
        let fc = mismatch(p, c)?.f;
        if fc == 0.0 || fc.abs() < 1e-14 {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        } else {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        }
        if (b - a).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

fn bound_state(epsilon: f64, m: &Match, zero_mode: bool) -> BoundState {
    BoundState {
        epsilon,
        node_count: m.interior.nodes + m.exterior.nodes,
        match_residual: m.f.abs(),
        log_derivative_mismatch: m.interior.log_derivative() - m.exterior.log_derivative(),
        zero_mode,
        oracle_epsilon: None,
    }
}

/// Bound states with `epsilon_lo <= eps <= epsilon_hi <= 0`.
///
/// The mismatch is scanned on a grid that is half linear and half
/// logarithmic towards `epsilon_hi`. If `epsilon_hi = 0` the threshold is
/// tested for a normalizable zero-energy solution. `NoBoundStates` when
/// nothing is found.
pub fn find_spectrum(p: &RadialProblem, epsilon_lo: f64, epsilon_hi: f64, n_grid: usize) -> Result<SpectrumReport> {
    p.validate()?;
    if !(epsilon_lo < epsilon_hi && epsilon_hi <= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need epsilon_lo < epsilon_hi <= 0, got [{epsilon_lo}, {epsilon_hi}]"
        )));
    }
    if !p.r0.is_finite() {
        return Err(Error::InvalidParameter("spectrum search needs a finite r0".into()));
    }
    if n_grid < 8 {
        return Err(Error::InvalidParameter(format!("n_grid = {n_grid} is too small")));
    }
    let mut notes = vec!["eps >= 0: scattering states only, not normalizable".to_string()];
    let mut states = Vec::new();

    let mut zero_mode = false;
    if epsilon_hi == 0.0 {
        let m = threshold_mismatch(p)?;
        if m.f.abs() < THRESHOLD_MATCH_TOL {
            if threshold_normalizable(p) {
                zero_mode = true;
                states.push(bound_state(0.0, &m, true));
                notes.push("normalizable zero mode at eps = 0".into());
            } else {
                notes.push("zero-energy solution matches but is not normalizable".into());
            }
        }
    }

    let grid = energy_grid(epsilon_lo, epsilon_hi, n_grid);
    let values = evaluate(p, &grid)?;
    let mut roots = Vec::new();
    for i in 0..grid.len().saturating_sub(1) {
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == 0.0 {
            roots.push(grid[i]);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            roots.push(refine(p, grid[i], fa, grid[i + 1], fb)?);
        }
    }
    if let (Some(&last), Some(&fl)) = (grid.last(), values.last()) {
        if fl == 0.0 {
            roots.push(last);
        } else if epsilon_hi < 0.0 {
            let fh = mismatch(p, epsilon_hi)?.f;
            if fh.signum() != fl.signum() {
                roots.push(refine(p, last, fl, epsilon_hi, fh)?);
            }
        } else if !zero_mode {
            let m0 = threshold_mismatch(p)?;
            if m0.f.signum() != fl.signum() {
                notes.push(format!(
                    "mismatch changes sign between eps = {last:.3e} and threshold; refine the grid"
                ));
            }
        }
    }
    for eps in roots {
        let m = mismatch(p, eps)?;
        if m.f.abs() < 1e-6 {
            states.push(bound_state(eps, &m, false));
        }
    }
    states.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon));
    if states.is_empty() {
        return Err(Error::NoBoundStates);
    }
    Ok(SpectrumReport {
        problem: *p,
        bound_states: states,
        continuum_threshold: 0.0,
        classification_notes: notes,
    })
}

/// Relative residual `max |psi'' - (V - eps) psi| / max |psi''|` of the
/// matched solution on a uniform verification grid, using a fourth-order
/// difference for `psi''` and skipping stencils that straddle `r0`.
pub fn state_residual(p: &RadialProblem, epsilon: f64) -> Result<f64> {
    let r0 = p.r0;
    let r_a = 0.1 * r0;
    let r_b = if epsilon < 0.0 {
        r0 + 20.0 / (-epsilon).sqrt()
    } else {
        10.0 * r0
    };
    let q = |r: f64| effective_potential(p, r) - epsilon;
    let probe = 2000;
    let q_max = (0..=probe)
        .map(|i| q(r_a + (r_b - r_a) * i as f64 / probe as f64).abs())
        .fold(0.0f64, f64::max);
    let h_target = (1e-2 / q_max.sqrt()).min((r_b - r_a) / 2000.0);
    let n = (((r_b - r_a) / h_target).ceil() as usize).clamp(2000, 400_000);
    let h = (r_b - r_a) / n as f64;
    let rs: Vec<f64> = (0..=n).map(|i| r_a + h * i as f64).collect();
    let inner: Vec<f64> = rs.iter().copied().filter(|&r| r <= r0).collect();
    let mut outer: Vec<f64> = rs.iter().copied().filter(|&r| r > r0).collect();
    outer.reverse();

    let mut si: Vec<OdeSample> = Vec::new();
    let mut se: Vec<OdeSample> = Vec::new();
    let int = interior_run(p, epsilon, r0, &inner, &mut si)?;
    let ext = if epsilon < 0.0 {
        exterior_run(p, epsilon, default_r_max(p, epsilon)?.max(r_b * 1.01), &outer, &mut se)?
    } else {
        threshold_run(p, 1e4 * r0, &outer, &mut se)?
    };
    let ratio = int.psi / ext.psi;
    let mut psi: Vec<f64> = si.iter().map(|s| s.y * (s.log_scale - int.log_scale).exp()).collect();
    se.reverse();
    psi.extend(se.iter().map(|s| ratio * s.y * (s.log_scale - ext.log_scale).exp()));
    if psi.len() != rs.len() {
        return Err(Error::InvalidParameter("verification grid mismatch".into()));
    }
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for i in 2..rs.len() - 2 {
        if (rs[i - 2] - r0) * (rs[i + 2] - r0) <= 0.0 {
            continue;
        }
        let d2 = (-psi[i + 2] + 16.0 * psi[i + 1] - 30.0 * psi[i] + 16.0 * psi[i - 1] - psi[i - 2]) / (12.0 * h * h);
        num = num.max((d2 - q(rs[i]) * psi[i]).abs());
        den = den.max(d2.abs());
    }
    Ok(num / den)
}
