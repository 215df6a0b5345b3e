/// Bessel function of the first kind `J_nu(x)` for integer order and
/// `x >= 0`.
///
/// Ascending series up to `x = 12`; above that, Miller's downward recurrence
/// normalised with `J_0 + 2 sum J_2k = 1`.
pub fn bessel_j(nu: u32, x: f64) -> f64 {
    assert!(x >= 0.0, "bessel_j requires x >= 0, got {x}");
    if x == 0.0 {
        return if nu == 0 { 1.0 } else { 0.0 };
    }
    if x <= 12.0 {
        ascending_series(nu, x)
    } else {
        miller(nu, x)
    }
}

fn ascending_series(nu: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    // leading term (x/2)^nu / nu!
    let mut term = 1.0;
    for k in 1..=nu {
        term *= half / f64::from(k);
        if term == 0.0 {
            return 0.0;
        }
    }
    let mut sum = term;
    let nuf = f64::from(nu);
    for k in 1..200 {
        let kf = f64::from(k);
        term *= q / (kf * (kf + nuf));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && kf > half {
            break;
        }
    }
    sum
}

fn miller(nu: u32, x: f64) -> f64 {
    let n = f64::from(nu).max(x);
    let mut start = (n + (160.0 * n).sqrt()) as u32 + 20;
    start += start % 2;
    let mut above = 0.0f64;
    let mut current = 1e-300f64;
    let mut norm = 0.0f64;
    let mut wanted = 0.0f64;
    for k in (1..=start).rev() {
        let below = 2.0 * f64::from(k) / x * current - above;
        above = current;
        current = below;
        // `current` now holds J_{k-1}
        let order = k - 1;
        if order == nu {
            wanted = current;
        }
        if order > 0 && order % 2 == 0 {
            norm += 2.0 * current;
        }
        if current.abs() > 1e250 {
            let s = 1e-250;
            current *= s;
            above *= s;
            norm *= s;
            wanted *= s;
        }
    }
    norm += current;
    wanted / norm
}
