//! Closed-form eigenstructure of the ring system.
//!
//! The Laplacians are circulant, so the Fourier vector `w_m` diagonalizes
//! both of them with eigenvalues `lambda_x(m theta)` and `lambda_v(m theta)`.
//! Each mode then contributes the two roots of
//! `nu^2 - lambda_v nu - lambda_x = 0` to the spectrum of the first-order
//! system.

mod curve;
mod dense;
mod series;

pub use curve::{diameter, directed_hausdorff, eigencurve, hausdorff, Eigencurve};
pub use dense::{dense_spectrum, dense_spectrum_raw, matched_distance, MAX_DENSE_N};
pub use series::{nu_series, series_coefficients, SeriesCoefficients};

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::FlockParams;

/// Below this magnitude an imaginary part counts as zero for branch labeling.
pub const IMAG_ZERO_TOL: f64 = 1e-12;

/// Relative tolerance for detecting `rho[j] == rho[-j]`.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Mode number in the symmetric range `ceil(-(N-1)/2) ..= ceil((N-1)/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeIndex {
    m: i64,
    n: usize,
}

impl ModeIndex {
    pub fn new(m: i64, n: usize) -> Result<Self> {
        if !mode_range(n).contains(&m) {
            return Err(Error::ModeOutOfRange { m, n });
        }
        Ok(Self { m, n })
    }

    /// Reduces any integer mode number into the symmetric range.
    pub fn wrapped(m: i64, n: usize) -> Self {
        let n_i = n as i64;
        let mut r = m.rem_euclid(n_i);
        if r > n_i / 2 {
            r -= n_i;
        }
        Self { m: r, n }
    }

    pub fn m(self) -> i64 {
        self.m
    }

    pub fn n(self) -> usize {
        self.n
    }

    pub fn theta(self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// The angle `m * theta`.
    pub fn phi(self) -> f64 {
        self.m as f64 * self.theta()
    }
}

/// The symmetric mode range for `n` agents.
pub fn mode_range(n: usize) -> std::ops::RangeInclusive<i64> {
    let n = n as i64;
    -((n - 1) / 2)..=n / 2
}

/// Whether `rho[j] == rho[-j]` for every offset, up to [`SYMMETRY_TOL`].
pub fn is_symmetric(params: &FlockParams, weights: &[f64]) -> bool {
    let scale = weights.iter().fold(0.0_f64, |acc, w| acc.max(w.abs()));
    let offsets = params.offsets();
    offsets.iter().zip(weights).all(|(&j, &w)| {
        let mirror = offsets
            .iter()
            .position(|&o| o == -j)
            .map_or(0.0, |i| weights[i]);
        (w - mirror).abs() <= SYMMETRY_TOL * scale
    })
}

/// `g sum_j rho[j] e^{i j phi}`, evaluated as `g sum_j rho[j] (e^{i j phi} - 1)`
/// so that small angles keep full relative accuracy.
fn symbol(offsets: &[i64], weights: &[f64], g: f64, phi: f64, symmetric: bool) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (&j, &w) in offsets.iter().zip(weights) {
        if j == 0 {
            continue;
        }
        let half = 0.5 * j as f64 * phi;
        re += w * (-2.0 * half.sin() * half.sin());
        im += w * (j as f64 * phi).sin();
    }
    if symmetric {
        im = 0.0;
    }
    Complex64::new(g * re, g * im)
}

/// `(lambda_x(phi), lambda_v(phi))` for a continuous angle.
pub fn lambdas_at(params: &FlockParams, phi: f64) -> (Complex64, Complex64) {
    let phi = reduce_angle(phi);
    let lx = symbol(
        params.offsets(),
        params.rho_x_weights(),
        params.g_x,
        phi,
        is_symmetric(params, params.rho_x_weights()),
    );
    let lv = symbol(
        params.offsets(),
        params.rho_v_weights(),
        params.g_v,
        phi,
        is_symmetric(params, params.rho_v_weights()),
    );
    (lx, lv)
}

/// `(lambda_x,m, lambda_v,m)`.
pub fn lambdas(params: &FlockParams, mode: ModeIndex) -> (Complex64, Complex64) {
    lambdas_at(params, mode.phi())
}

/// Maps an angle into `(-pi, pi]`, sending multiples of `2 pi` to exactly 0.
fn reduce_angle(phi: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = phi % two_pi;
    if r > PI {
        r -= two_pi;
    } else if r <= -PI {
        r += two_pi;
    }
    r
}

/// Both roots of `nu^2 - lambda_v nu - lambda_x = 0`, unlabeled. The first
/// is `lambda_v/2 + sqrt(lambda_v^2/4 + lambda_x)` with the principal root;
/// the smaller one is recovered from the product of roots to avoid
/// cancellation.
pub fn quadratic_roots(lambda_x: Complex64, lambda_v: Complex64) -> (Complex64, Complex64) {
    let half = lambda_v * 0.5;
    let disc = (half * half + lambda_x).sqrt();
    let plus = half + disc;
    let minus = half - disc;
    if plus.norm() >= minus.norm() {
        let other = if plus.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { -lambda_x / plus };
        (plus, other)
    } else {
        (-lambda_x / minus, minus)
    }
}

/// Labels a root pair by the sign of the imaginary part: the root with the
/// larger imaginary part is `nu_plus`. Returns `None` when both roots are real
/// and distinct.
pub fn label_by_imag(r1: Complex64, r2: Complex64) -> Option<(Complex64, Complex64)> {
    if r1.im.abs() < IMAG_ZERO_TOL && r2.im.abs() < IMAG_ZERO_TOL {
        let scale = 1.0_f64.max(r1.norm()).max(r2.norm());
        if (r1 - r2).norm() <= IMAG_ZERO_TOL * scale {
            return Some((r1, r2));
        }
        return None;
    }
    if r1.im >= r2.im {
        Some((r1, r2))
    } else {
        Some((r2, r1))
    }
}

/// `(nu_m+, nu_m-)` with `Im(nu_m+) >= Im(nu_m-)`; `(0, 0)` for `m = 0`.
pub fn nu_exact(params: &FlockParams, mode: ModeIndex) -> Result<(Complex64, Complex64)> {
    if mode.m() == 0 {
        return Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
    }
    let (lx, lv) = lambdas(params, mode);
    let (r1, r2) = quadratic_roots(lx, lv);
    label_by_imag(r1, r2).ok_or(Error::DegenerateBranches { m: mode.m() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpectrum {
    pub m: i64,
    pub lambda_x: Complex64,
    pub lambda_v: Complex64,
    pub nu_plus: Complex64,
    pub nu_minus: Complex64,
    /// False when both roots are real and distinct; the pair is then in
    /// principal-root order and the `+`/`-` labels carry no direction.
    pub labeled: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub n: usize,
    pub modes: Vec<ModeSpectrum>,
}

impl Spectrum {
    pub fn compute(params: &FlockParams) -> Result<Self> {
        let p = params.validate()?;
        let n = p.n;
        let modes = mode_range(n)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|m| {
                let mode = ModeIndex { m, n };
                let (lx, lv) = lambdas(&p, mode);
                let (r1, r2) = if m == 0 {
                    (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
                } else {
                    quadratic_roots(lx, lv)
                };
                let (nu_plus, nu_minus, labeled) = match label_by_imag(r1, r2) {
                    Some((a, b)) => (a, b, true),
                    None => (r1, r2, false),
                };
                ModeSpectrum { m, lambda_x: lx, lambda_v: lv, nu_plus, nu_minus, labeled }
            })
            .collect();
        Ok(Self { n, modes })
    }

    pub fn mode(&self, m: i64) -> Option<&ModeSpectrum> {
        let lo = *mode_range(self.n).start();
        self.modes.get((m - lo) as usize)
    }

    /// All `2N` eigenvalues of the first-order system.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.modes.iter().flat_map(|s| [s.nu_plus, s.nu_minus]).collect()
    }
}
