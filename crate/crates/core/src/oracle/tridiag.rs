/// Largest Gershgorin row bound of a symmetric tridiagonal matrix.
pub fn gershgorin_scale(diag: &[f64], off: &[f64]) -> f64 {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let l = if i > 0 { off[i - 1].abs() } else { 0.0 };
            let r = if i + 1 < n { off[i].abs() } else { 0.0 };
            diag[i].abs() + l + r
        })
        .fold(0.0, f64::max)
}

/// Number of eigenvalues strictly below `x`.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        if q == 0.0 {
            q = tiny;
        }
        q = diag[i] - x - off[i - 1] * off[i - 1] / q;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest `m` eigenvalues by bisection on the Sturm count.
pub fn lowest_eigenvalues_of(diag: &[f64], off: &[f64], m: usize) -> Vec<f64> {
    let n = diag.len();
    let m = m.min(n);
    let (mut glo, mut ghi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let l = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let r = if i + 1 < n { off[i].abs() } else { 0.0 };
        glo = glo.min(diag[i] - l - r);
        ghi = ghi.max(diag[i] + l + r);
    }
    let tol = 1e-15 * gershgorin_scale(diag, off);
    (0..m)
        .map(|k| {
            let (mut lo, mut hi) = (glo, ghi);
            for _ in 0..200 {
                if hi - lo <= tol {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if sturm_count(diag, off, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Unit eigenvector for an eigenvalue estimate `lambda` by inverse
/// iteration.
pub fn eigenvector(diag: &[f64], off: &[f64], lambda: f64) -> Vec<f64> {
    let n = diag.len();
    let shift = lambda - 1e-10 * gershgorin_scale(diag, off).max(1.0);
    let mut x = vec![1.0; n];
    for _ in 0..4 {
        // Thomas algorithm on (T - shift) y = x
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut b0 = diag[0] - shift;
        c[0] = if n > 1 { off[0] / b0 } else { 0.0 };
        d[0] = x[0] / b0;
        for i in 1..n {
            b0 = diag[i] - shift - off[i - 1] * c[i - 1];
            if b0 == 0.0 {
                b0 = f64::EPSILON;
            }
            c[i] = if i + 1 < n { off[i] / b0 } else { 0.0 };
            d[i] = (x[i] - off[i - 1] * d[i - 1]) / b0;
        }
        let mut y = vec![0.0; n];
        y[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            y[i] = d[i] - c[i] * y[i + 1];
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = y.into_iter().map(|v| v / norm).collect();
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrete_laplacian() {
        // eigenvalues 2 - 2 cos(k pi / (n + 1))
        let n = 50;
        let d = vec![2.0; n];
        let o = vec![-1.0; n - 1];
        let e = lowest_eigenvalues_of(&d, &o, 5);
        for (k, v) in e.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-13);
        }
        assert!(e.windows(2).all(|w| w[0] < w[1]));
        let x = eigenvector(&d, &o, e[0]);
        let s = (std::f64::consts::PI / (n + 1) as f64).sin();
        let exact_first = s * (2.0 / (n + 1) as f64).sqrt();
        assert!((x[0].abs() - exact_first).abs() < 1e-10);
        assert_eq!(sturm_count(&d, &o, 5.0), n);
        assert_eq!(sturm_count(&d, &o, -1.0), 0);
    }
}
