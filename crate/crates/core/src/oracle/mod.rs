//! Brute-force cross-checks on a radial grid.
//!
//! The grid is cell centred in the original radial function `phi` with the
//! measure `r^(d-1) dr`: cell `i` has centre `(i - 1/2) h`, faces at `i h`,
//! and the Dirichlet wall on the last face `r_max = n h`, imposed with an
//! odd ghost cell. Symmetrising with the
//! exact cell volumes gives a tridiagonal matrix whose spectrum is that of
//! `psi'' = (V - eps) psi` with the same `V` as the shooting code.

mod tridiag;

pub use tridiag::{eigenvector, gershgorin_scale, lowest_eigenvalues_of, sturm_count};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::radial::{potential_branch, RadialProblem};

/// Diagonal and off-diagonal of a symmetric tridiagonal matrix.
pub type Bands = (Vec<f64>, Vec<f64>);

/// Smallest accepted grid.
pub const MIN_CELLS: usize = 100;
/// Upper bound on `h^2 max |U|`.
pub const COARSENESS_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridHamiltonian {
    pub n: usize,
    /// cm
    pub r_max: f64,
    /// cm
    pub h: f64,
    /// cm^-2
    pub diag: Vec<f64>,
    /// cm^-2
    pub offdiag: Vec<f64>,
    pub channel: RadialProblem,
    /// Cell centres, cm.
    pub centers: Vec<f64>,
    /// `(f_i^d - f_(i-1)^d) / (d h)`.
    pub cell_weights: Vec<f64>,
}

struct Geometry1d {
    h: f64,
    centers: Vec<f64>,
    faces: Vec<f64>,
    cell_w: Vec<f64>,
    face_w: Vec<f64>,
}

fn layout(p: &RadialProblem, n: usize, r_max: f64) -> Result<Geometry1d> {
    if n < MIN_CELLS {
        return Err(Error::InvalidParameter(format!(
            "grid needs at least {MIN_CELLS} cells, got {n}"
        )));
    }
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "r_max must be positive and finite, got {r_max}"
        )));
    }
    let d = p.dimension() as i32;
    let h = r_max / n as f64;
    let centers: Vec<f64> = (1..=n).map(|i| (i as f64 - 0.5) * h).collect();
    let faces: Vec<f64> = (1..=n).map(|i| i as f64 * h).collect();
    let cell_w = (1..=n)
        .map(|i| {
            let (a, b) = ((i - 1) as f64 * h, i as f64 * h);
            (b.powi(d) - a.powi(d)) / (f64::from(d) * h)
        })
        .collect();
    let face_w = faces.iter().map(|f| f.powi(d - 1)).collect();
    Ok(Geometry1d {
        h,
        centers,
        faces,
        cell_w,
        face_w,
    })
}

/// Potential acting on `phi`: `V - (d-1)(d-3) / (4 r^2)`.
fn phi_potential(p: &RadialProblem, r: f64, outside: bool) -> f64 {
    let d = f64::from(p.dimension());
    potential_branch(p, r, outside) - (d - 1.0) * (d - 3.0) / (4.0 * r * r)
}

/// Cell value of the potential; a cell cut by `r0` gets the volume-weighted
/// mean of the two branches.
fn cell_potential(p: &RadialProblem, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    if !(a < p.r0 && p.r0 < b) {
        return phi_potential(p, mid, mid > p.r0);
    }
    let d = p.dimension() as i32;
    let vol = |x: f64, y: f64| y.powi(d) - x.powi(d);
    let (v_in, v_out) = (vol(a, p.r0), vol(p.r0, b));
    let inner = phi_potential(p, 0.5 * (a + p.r0), false);
    let outer = phi_potential(p, 0.5 * (p.r0 + b), true);
    (inner * v_in + outer * v_out) / (v_in + v_out)
}

/// Tridiagonal Hamiltonian on `n` cells out to `r_max`.
///
/// `GridTooCoarse` when `h^2 max |U| > 0.1`, with `U` the non-centrifugal
/// part of the potential.
pub fn build_grid_hamiltonian(p: &RadialProblem, n: usize, r_max: f64) -> Result<GridHamiltonian> {
    p.validate()?;
    let g = layout(p, n, r_max)?;
    let h2 = g.h * g.h;
    let worst = g
        .centers
        .iter()
        .map(|&r| p.coupling_potential(r).abs())
        .fold(0.0f64, f64::max);
    if h2 * worst > COARSENESS_LIMIT {
        return Err(Error::GridTooCoarse { value: h2 * worst });
    }
    let mut diag = Vec::with_capacity(n);
    let mut offdiag = Vec::with_capacity(n - 1);
    for i in 0..n {
        let left = if i == 0 { 0.0 } else { g.face_w[i - 1] };
        let right = if i + 1 == n { 2.0 * g.face_w[i] } else { g.face_w[i] };
        let (a, b) = (g.centers[i] - 0.5 * g.h, g.centers[i] + 0.5 * g.h);
        diag.push((left + right) / (h2 * g.cell_w[i]) + cell_potential(p, a, b));
        if i + 1 < n {
            offdiag.push(-g.face_w[i] / (h2 * (g.cell_w[i] * g.cell_w[i + 1]).sqrt()));
        }
    }
    Ok(GridHamiltonian {
        n,
        r_max,
        h: g.h,
        diag,
        offdiag,
        channel: *p,
        centers: g.centers,
        cell_weights: g.cell_w,
    })
}

impl GridHamiltonian {
    /// Gershgorin bound on the spectral radius, cm^-2.
    pub fn scale(&self) -> f64 {
        gershgorin_scale(&self.diag, &self.offdiag)
    }

    /// Grid function `phi` from a matrix eigenvector.
    pub fn to_phi(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.cell_weights).map(|(v, w)| v / w.sqrt()).collect()
    }
}

/// Cell count that keeps `h^2 max |U|` at a quarter of the coarseness limit,
/// and at least `n_min`. When `r_max / r0` is an integer the count is rounded
/// up to a multiple of it, so `r0` falls on a face of this grid and of the
/// doubled one.
pub fn auto_cells(p: &RadialProblem, r_max: f64, n_min: usize) -> usize {
    let worst = (1..=2000)
        .map(|i| p.coupling_potential(r_max * i as f64 / 2000.0).abs())
        .chain([p.interior_offset().abs() + (p.gamma() * p.r0.min(r_max)).powi(2)])
        .fold(0.0f64, f64::max);
    let n = (r_max * (4.0 * worst / COARSENESS_LIMIT).sqrt()).ceil() as usize;
    let n = n.max(n_min).max(MIN_CELLS);
    let ratio = r_max / p.r0;
    let m = ratio.round();
    if p.r0.is_finite() && m >= 1.0 && (ratio - m).abs() < 1e-9 * ratio {
        let m = m as usize;
        n.div_ceil(m) * m
    } else {
        n
    }
}

/// Lowest `m` eigenvalues in ascending order.
pub fn lowest_eigenvalues(h: &GridHamiltonian, m: usize) -> Vec<f64> {
    lowest_eigenvalues_of(&h.diag, &h.offdiag, m)
}

/// Two grids with `n` and `2n` cells, extrapolated assuming an `h^2` error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extrapolated {
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
    pub extrapolated: Vec<f64>,
}

pub fn richardson(p: &RadialProblem, n: usize, r_max: f64, m: usize) -> Result<Extrapolated> {
    let a = build_grid_hamiltonian(p, n, r_max)?;
    let b = build_grid_hamiltonian(p, 2 * n, r_max)?;
    let (ea, eb) = (lowest_eigenvalues(&a, m), lowest_eigenvalues(&b, m));
    let (ha, hb) = (a.h * a.h, b.h * b.h);
    let extrapolated = ea.iter().zip(&eb).map(|(x, y)| (ha * y - hb * x) / (ha - hb)).collect();
    Ok(Extrapolated {
        coarse: ea,
        fine: eb,
        extrapolated,
    })
}

/// Observed order `ln(e(h1)/e(h2)) / ln(h1/h2)` for a quantity whose exact
/// value is zero.
pub fn observed_order(e1: f64, h1: f64, e2: f64, h2: f64) -> f64 {
    (e1.abs() / e2.abs()).ln() / (h1 / h2).ln()
}

/// Upper bidiagonal matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bidiagonal {
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bidiagonal {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.diag.len())
            .map(|i| self.diag[i] * x[i] + if i + 1 < x.len() { self.upper[i] * x[i + 1] } else { 0.0 })
            .collect()
    }

    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        (0..self.diag.len())
            .map(|i| self.diag[i] * x[i] + if i > 0 { self.upper[i - 1] * x[i - 1] } else { 0.0 })
            .collect()
    }
}

/// Supercharge on the graded grid `cells (+) faces`.
///
/// `q_minus` maps cell values to face values,
/// `(A phi)_f = (phi_(f+1) - phi_f) / h + (W - s/r)_f (phi_(f+1) + phi_f) / 2`,
/// symmetrised with the cell and face weights. `Q = [[0, 0], [A, 0]]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteSusyPair {
    pub q_minus: Bidiagonal,
    pub grid: GridHamiltonian,
}

impl DiscreteSusyPair {
    /// Transpose of `q_minus` as (diag, lower).
    pub fn q_plus(&self) -> (Vec<f64>, Vec<f64>) {
        (self.q_minus.diag.clone(), self.q_minus.upper.clone())
    }

    /// `Q (b, f) = (0, A b)`.
    pub fn apply_q(&self, bosonic: &[f64], _fermionic: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (vec![0.0; bosonic.len()], self.q_minus.apply(bosonic))
    }

    /// `Q^dagger (b, f) = (A^T f, 0)`.
    pub fn apply_q_dagger(&self, _bosonic: &[f64], fermionic: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (self.q_minus.apply_transpose(fermionic), vec![0.0; fermionic.len()])
    }

    /// Bands of `A^T A` (cells) and `A A^T` (faces).
    pub fn sectors(&self) -> (Bands, Bands) {
        let (d, u) = (&self.q_minus.diag, &self.q_minus.upper);
        let n = d.len();
        let mut bd = vec![0.0; n];
        let mut bo = vec![0.0; n - 1];
        let mut fd = vec![0.0; n];
        let mut fo = vec![0.0; n - 1];
        for i in 0..n {
            bd[i] = d[i] * d[i] + if i > 0 { u[i - 1] * u[i - 1] } else { 0.0 };
            fd[i] = d[i] * d[i] + if i + 1 < n { u[i] * u[i] } else { 0.0 };
            if i + 1 < n {
                bo[i] = d[i] * u[i];
                fo[i] = u[i] * d[i + 1];
            }
        }
        ((bd, bo), (fd, fo))
    }
}

pub fn build_susy_pair(p: &RadialProblem, n: usize, r_max: f64) -> Result<DiscreteSusyPair> {
    let grid = build_grid_hamiltonian(p, n, r_max)?;
    let g = layout(p, n, r_max)?;
    let s = f64::from(p.w);
    let mut diag = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n - 1);
    for f in 0..n {
        let r = g.faces[f];
        let big_w = p.superpotential(r).0 - s / r;
        let sf = g.face_w[f].sqrt();
        if f + 1 == n {
            // wall face: half control length, phi = 0 on the face
            diag.push(-sf * std::f64::consts::SQRT_2 / g.h / g.cell_w[f].sqrt());
            continue;
        }
        diag.push(sf * (-1.0 / g.h + 0.5 * big_w) / g.cell_w[f].sqrt());
        {
            upper.push(sf * (1.0 / g.h + 0.5 * big_w) / g.cell_w[f + 1].sqrt());
        }
    }
    Ok(DiscreteSusyPair {
        q_minus: Bidiagonal { diag, upper },
        grid,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SusyCheck {
    /// Largest entry of `Q^2` applied to probe vectors.
    pub q2_norm: f64,
    /// `max |(A^T A - H)_ij| / scale(H)`.
    pub anticommutator_vs_h_residual: f64,
    pub nonneg_spectrum_flag: bool,
    pub lowest_bosonic: Vec<f64>,
    pub lowest_fermionic: Vec<f64>,
    /// Gershgorin scale of `{Q, Q^dagger}`, cm^-2.
    pub scale: f64,
}

/// Nilpotency, comparison of `{Q, Q^dagger}` with the grid Hamiltonian, and
/// positivity of both sectors.
pub fn susy_algebra_check(pair: &DiscreteSusyPair) -> SusyCheck {
    let n = pair.q_minus.diag.len();
    let mut q2 = 0.0f64;
    for k in 0..3 {
        let b: Vec<f64> = (0..n).map(|i| ((i * (k + 3)) as f64 * 0.37).sin()).collect();
        let f: Vec<f64> = (0..n).map(|i| ((i * (k + 5)) as f64 * 0.11).cos()).collect();
        let (b1, f1) = pair.apply_q(&b, &f);
        let (b2, f2) = pair.apply_q(&b1, &f1);
        q2 = b2.iter().chain(&f2).fold(q2, |m, v| m.max(v.abs()));
    }
    let ((bd, bo), (fd, fo)) = pair.sectors();
    let scale = gershgorin_scale(&bd, &bo).max(gershgorin_scale(&fd, &fo));
    let h = &pair.grid;
    let hs = h.scale();
    let mut resid = 0.0f64;
    for i in 0..n {
        resid = resid.max((bd[i] - h.diag[i]).abs());
        if i + 1 < n {
            resid = resid.max((bo[i] - h.offdiag[i]).abs());
        }
    }
    let lowest_bosonic = lowest_eigenvalues_of(&bd, &bo, 3);
    let lowest_fermionic = lowest_eigenvalues_of(&fd, &fo, 3);
    let floor = -1e-9 * scale;
    let nonneg = lowest_bosonic[0] >= floor && lowest_fermionic[0] >= floor;
    SusyCheck {
        q2_norm: q2,
        anticommutator_vs_h_residual: resid / hs,
        nonneg_spectrum_flag: nonneg,
        lowest_bosonic,
        lowest_fermionic,
        scale,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::PotentialConvention;

    #[test]
    fn particle_in_a_ball() {
        let p = RadialProblem::sphere(0, 1, 0.0, 1.0).unwrap();
        let h = build_grid_hamiltonian(&p, 2000, std::f64::consts::PI).unwrap();
        let e = lowest_eigenvalues(&h, 3);
        for (m, v) in e.iter().enumerate() {
            let exact = ((m + 1) as f64).powi(2);
            assert!((v - exact).abs() < 1e-5 * exact.max(1.0) * 4.0, "{m}: {v}");
        }
        assert!((e[0] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn oscillator_ladder() {
        let beta = 2.0;
        let p = RadialProblem::sphere(0, 1, beta, f64::INFINITY).unwrap();
        let ex = richardson(&p, 1500, 8.0, 4).unwrap().extrapolated;
        for w in ex.windows(2) {
            assert!(((w[1] - w[0]) / (4.0 * beta) - 1.0).abs() < 1e-5, "{ex:?}");
        }
        // factorized oscillator: ground state is the zero mode
        assert!(ex[0].abs() < 1e-5 * beta);
    }

    #[test]
    fn matrix_is_symmetric_tridiagonal() {
        let p = RadialProblem::cylinder(1, -2.0, 1.0).unwrap();
        let h = build_grid_hamiltonian(&p, 400, 10.0).unwrap();
        assert_eq!(h.offdiag.len(), h.n - 1);
        assert!((h.h - 10.0 / 400.0).abs() < 1e-15);
        let pair = build_susy_pair(&p, 400, 10.0).unwrap();
        let (d, lower) = pair.q_plus();
        assert_eq!(d, pair.q_minus.diag);
        assert_eq!(lower, pair.q_minus.upper);
    }

    #[test]
    fn too_coarse() {
        let p = RadialProblem::sphere(0, 1, 50.0, 1.0).unwrap();
        assert!(matches!(
            build_grid_hamiltonian(&p, 100, 20.0),
            Err(Error::GridTooCoarse { .. })
        ));
        assert!(matches!(
            build_grid_hamiltonian(&p, 50, 1.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn free_anticommutator_is_kinetic() {
        let p = RadialProblem::cylinder(0, 0.0, 1.0).unwrap();
        let pair = build_susy_pair(&p, 300, 5.0).unwrap();
        let c = susy_algebra_check(&pair);
        assert_eq!(c.q2_norm, 0.0);
        assert!(c.anticommutator_vs_h_residual < 1e-14, "{c:?}");
        assert!(c.nonneg_spectrum_flag);
    }

    #[test]
    fn cylinder_zero_mode_on_the_grid() {
        let (beta, r0) = (-3.0, 1.0);
        let p = RadialProblem::cylinder(0, beta, r0).unwrap();
        let h = build_grid_hamiltonian(&p, 2000, 40.0).unwrap();
        let e = lowest_eigenvalues(&h, 2);
        assert!(e[0].abs() < 1e-3 * beta.abs(), "{e:?}");
        let x = eigenvector(&h.diag, &h.offdiag, e[0]);
        let zm = crate::zeromode::cylinder_zero_mode(beta, r0).unwrap();
        let y: Vec<f64> = h
            .centers
            .iter()
            .zip(&h.cell_weights)
            .map(|(&r, w)| zm.value(r) * w.sqrt())
            .collect();
        let dot: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let nx: f64 = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        let ny: f64 = y.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!((dot / (nx * ny)).abs() > 0.999);
        let c = susy_algebra_check(&build_susy_pair(&p, 2000, 40.0).unwrap());
        assert!(c.nonneg_spectrum_flag);
        assert!(c.lowest_bosonic[0] < 1e-3 * beta.abs());
    }

    #[test]
    fn printed_sphere_states_match_shooting() {
        let p = RadialProblem::sphere(1, 1, 10.0, 1.0)
            .unwrap()
            .with_convention(PotentialConvention::Printed);
        let rep = crate::radial::find_spectrum(&p, -60.0, 0.0, 400).unwrap();
        let k = rep.bound_states.len();
        let ex = richardson(&p, 4000, 12.0, k).unwrap().extrapolated;
        for (s, g) in rep.bound_states.iter().zip(&ex) {
            assert!((s.epsilon - g).abs() < 1e-4 * s.epsilon.abs(), "{} vs {g}", s.epsilon);
        }
    }
}
