use super::dd::Dd;
use crate::error::{Error, Result};

/// Largest `|z|` accepted by [`kummer_1f1`].
pub const KUMMER_Z_MAX: f64 = 1.0e4;

const MAX_TERMS: usize = 200_000;
const RESCALE_ABOVE: f64 = 1.0e250;
const RESCALE_EXP: i32 = 800;

/// Kummer's confluent hypergeometric function `1F1(a; b; z)` for real
/// arguments.
///
/// The power series is summed in double-double precision with a term-ratio
/// recurrence. Negative arguments go through Kummer's transformation
/// `1F1(a; b; z) = e^z 1F1(b - a; b; -z)` so the summed series has a positive
/// argument.
pub fn kummer_1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    if b <= 0.0 && b.fract() == 0.0 {
        return Err(Error::PoleB { b });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "1F1 parameters must be finite, got a = {a}, b = {b}"
        )));
    }
    if !z.is_finite() || z.abs() > KUMMER_Z_MAX {
        return Err(Error::RangeExceeded { z });
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let (sa, prefactor, x) = if z < 0.0 { (b - a, z, -z) } else { (a, 0.0, z) };
    let (sum, log2_scale) = series(sa, b, x);
    let value = if log2_scale == 0 {
        if prefactor == 0.0 {
            sum
        } else {
            sum * prefactor.exp()
        }
    } else {
        let ln = sum.abs().ln() + f64::from(log2_scale) * std::f64::consts::LN_2 + prefactor;
        sum.signum() * ln.exp()
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::RangeExceeded { z })
    }
}

/// Sum of the series for `z > 0`, returned as `(mantissa, log2 scale)`.
fn series(a: f64, b: f64, z: f64) -> (f64, i32) {
    let dz = Dd::from_f64(z);
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    let mut log2_scale = 0i32;
    let mut small_run = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let an = Dd::from_f64(a) + Dd::from_f64(nf);
        let bn = Dd::from_f64(b) + Dd::from_f64(nf);
        term = term * an * dz / (bn * Dd::from_f64(nf + 1.0));
        sum = sum + term;
        if term.hi == 0.0 {
            break;
        }
        if sum.hi.abs() > RESCALE_ABOVE {
            let f = 2f64.powi(-RESCALE_EXP);
            sum = sum.scale(f);
            term = term.scale(f);
            log2_scale += RESCALE_EXP;
        }
        let ratio = ((a + nf + 1.0) * z / ((b + nf + 1.0) * (nf + 2.0))).abs();
        if term.hi.abs() < 1e-16 * sum.hi.abs() && ratio < 0.5 {
            small_run += 1;
            if small_run >= 3 {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    (sum.to_f64(), log2_scale)
}
