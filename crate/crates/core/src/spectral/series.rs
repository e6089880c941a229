//! Small-angle expansion of the eigenvalues in powers of `s = m theta`.
//!
//! With `I_x1 = 0`, write `nu = c1 s + c2 s^2 + c3 s^3 + c4 s^4 + O(s^5)` and
//! `r = sqrt(a)`, `a = I_v1^2/4 + I_x2/2`. Matching powers of `s` in
//! `nu^2 - lambda_v nu - lambda_x = 0` gives, for branch `eps = +-1`,
//!
//! ```text
//! c1 = i (I_v1/2 + eps r)
//! c2 = -I_v2/4 - eps B/(2r)
//! c3 = i (-I_v3/12 - eps C/(2r) + eps B^2/(8 r^3))
//! c4 = I_v4/48 + eps D/(2r) - eps B C/(4 r^3) + eps B^3/(16 r^5)
//! ```
//!
//! where `B = I_v1 I_v2/4 + I_x3/6`, `C = I_v1 I_v3/12 + I_x4/24 + I_v2^2/16`
//! and `D = I_v1 I_v4/48 + I_v2 I_v3/24 + I_x5/120`.

use num_complex::Complex64;

use super::ModeIndex;
use crate::error::{Error, Result};
use crate::model::FlockParams;

/// Coefficients `c1..c4` of both branches (`plus` is `eps = +1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesCoefficients {
    pub a: f64,
    pub plus: [Complex64; 4],
    pub minus: [Complex64; 4],
}

pub fn series_coefficients(params: &FlockParams) -> Result<SeriesCoefficients> {
    let mo = params.moments(5)?;
    let scale = params.g_x.abs()
        * params.rho_x_weights().iter().fold(0.0_f64, |acc, w| acc.max(w.abs()));
    if mo.x(1).abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NonzeroFirstMoment { i_x1: mo.x(1) });
    }
    let (iv1, iv2, iv3, iv4) = (mo.v(1), mo.v(2), mo.v(3), mo.v(4));
    let (ix2, ix3, ix4, ix5) = (mo.x(2), mo.x(3), mo.x(4), mo.x(5));

    let a = iv1 * iv1 / 4.0 + ix2 / 2.0;
    if a <= 0.0 {
        return Err(Error::NonpositiveA { a });
    }
    let r = a.sqrt();
    let b = iv1 * iv2 / 4.0 + ix3 / 6.0;
    let c = iv1 * iv3 / 12.0 + ix4 / 24.0 + iv2 * iv2 / 16.0;
    let d = iv1 * iv4 / 48.0 + iv2 * iv3 / 24.0 + ix5 / 120.0;

    let branch = |eps: f64| -> [Complex64; 4] {
        [
            Complex64::new(0.0, iv1 / 2.0 + eps * r),
            Complex64::new(-iv2 / 4.0 - eps * b / (2.0 * r), 0.0),
            Complex64::new(
                0.0,
                -iv3 / 12.0 - eps * c / (2.0 * r) + eps * b * b / (8.0 * r.powi(3)),
            ),
            Complex64::new(
                iv4 / 48.0 + eps * d / (2.0 * r) - eps * b * c / (4.0 * r.powi(3))
                    + eps * b.powi(3) / (16.0 * r.powi(5)),
                0.0,
            ),
        ]
    };
    Ok(SeriesCoefficients { a, plus: branch(1.0), minus: branch(-1.0) })
}

/// Partial sums of the expansion through `s^order` for `(eps = +1, eps = -1)`.
///
/// For `m > 0` the `eps = +1` branch is the one with positive imaginary part,
/// matching [`super::nu_exact`]; for `m < 0` it is its complex conjugate.
pub fn nu_series(params: &FlockParams, mode: ModeIndex, order: usize) -> Result<(Complex64, Complex64)> {
    if order > 4 {
        return Err(Error::InvalidArgument(format!("series order {order} exceeds 4")));
    }
    let coeffs = series_coefficients(params)?;
    let s = mode.phi();
    let sum = |c: &[Complex64; 4]| -> Complex64 {
        c.iter()
            .take(order)
            .enumerate()
            .map(|(k, ck)| ck * s.powi(k as i32 + 1))
            .sum()
    };
    Ok((sum(&coeffs.plus), sum(&coeffs.minus)))
}
