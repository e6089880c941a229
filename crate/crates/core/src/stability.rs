//! Asymptotic-stability verdicts.
//!
//! A ring system is asymptotically stable when zero is an eigenvalue of
//! algebraic multiplicity exactly two (the coherent family
//! `z_k(t) = x_0 + v_0 t`) and every other eigenvalue has strictly negative
//! real part. For nearest-neighbor weights this holds for every `N` exactly
//! when `rho_x[-1] = rho_x[1]`, `g_x rho_x[0] < 0` and `g_v rho_v[0] < 0`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::FlockParams;
use crate::spectral::{lambdas, label_by_imag, quadratic_roots, ModeIndex, Spectrum, SYMMETRY_TOL};

/// Relative width of the band around zero in which a real part is
/// reported as marginal rather than stable or unstable.
pub const MARGIN_TOL: f64 = 1e-10;

/// Default upper limit for the instability witness search.
pub const DEFAULT_WITNESS_N_MAX: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        }
    }
}

/// An eigenvalue with non-negative (or marginal) real part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub n: usize,
    pub m: i64,
    pub branch: Branch,
    pub nu: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub n: usize,
    /// Stable for every `N` by the closed-form gate.
    pub closed_form_stable: bool,
    /// Every nonzero mode has `Re(nu) < -MARGIN_TOL * scale` at this `N`.
    pub spectral_stable: bool,
    /// The largest nonzero-mode real part lies inside the marginal band.
    pub marginal: bool,
    pub max_real_part: f64,
    pub witness: Option<Witness>,
    /// `(m, condition)` pairs, conditions numbered 1 to 4.
    pub rh_failures: Vec<(i64, u8)>,
}

/// Magnitude used to turn [`MARGIN_TOL`] into an absolute band.
pub fn stability_scale(params: &FlockParams) -> f64 {
    let sum_abs = |w: &[f64]| w.iter().map(|r| r.abs()).sum::<f64>();
    1.0 + params.g_x.abs() * sum_abs(params.rho_x_weights())
        + params.g_v.abs() * sum_abs(params.rho_v_weights())
}

/// Closed-form gate: stable for all `N` iff the position weights are
/// symmetric and both center products are negative.
pub fn theorem_gate(params: &FlockParams) -> Result<bool> {
    if !params.is_nearest_neighbor() {
        return Err(Error::NotNearestNeighbor);
    }
    let p = params.validate()?;
    let scale = p.rho_x_weights().iter().fold(0.0_f64, |acc, w| acc.max(w.abs()));
    let symmetric = (p.rho_x(-1) - p.rho_x(1)).abs() <= SYMMETRY_TOL * scale;
    Ok(symmetric && p.g_x * p.rho_x(0) < 0.0 && p.g_v * p.rho_v(0) < 0.0)
}

/// The four Routh–Hurwitz inequalities for `nu^2 - lambda_v nu - lambda_x`
/// at mode `m`:
///
/// 1. `Re(lv) < 0`
/// 2. `2 Re(lx) < |lv|^2`
/// 3. `Re(lx) Re(lv) + Im(lx) Im(lv) > 0`
/// 4. `Re(lx) Re(lv)^2 + Re(lv) Im(lx) Im(lv) + Im(lx)^2 < 0`
pub fn routh_hurwitz(params: &FlockParams, mode: ModeIndex) -> Result<[bool; 4]> {
    if mode.m() == 0 {
        return Err(Error::ZeroMode);
    }
    let (lx, lv) = lambdas(params, mode);
    Ok(routh_hurwitz_conditions(lx, lv))
}

pub fn routh_hurwitz_conditions(lx: Complex64, lv: Complex64) -> [bool; 4] {
    [
        lv.re < 0.0,
        2.0 * lx.re < lv.norm_sqr(),
        lx.re * lv.re + lx.im * lv.im > 0.0,
        lx.re * lv.re * lv.re + lv.re * lx.im * lv.im + lx.im * lx.im < 0.0,
    ]
}

/// Spectral verdict at a single ring size `n`, from the closed-form roots.
pub fn spectral_verdict(params: &FlockParams, n: usize) -> Result<StabilityReport> {
    let p = params.with_n(n).validate()?;
    let closed_form_stable = theorem_gate(&p).unwrap_or(false);
    let spectrum = Spectrum::compute(&p)?;
    let zero = spectrum.mode(0).expect("zero mode present");
    debug_assert!(zero.nu_plus.norm() == 0.0 && zero.nu_minus.norm() == 0.0);

    let band = MARGIN_TOL * stability_scale(&p);
    let mut max_re = f64::NEG_INFINITY;
    let mut arg: Option<Witness> = None;
    let mut rh_failures = Vec::new();
    for s in spectrum.modes.iter().filter(|s| s.m != 0) {
        for (branch, nu) in [(Branch::Plus, s.nu_plus), (Branch::Minus, s.nu_minus)] {
            if nu.re > max_re {
                max_re = nu.re;
                arg = Some(Witness { n, m: s.m, branch, nu });
            }
        }
        let rh = routh_hurwitz_conditions(s.lambda_x, s.lambda_v);
        for (i, ok) in rh.iter().enumerate() {
            if !ok {
                rh_failures.push((s.m, i as u8 + 1));
            }
        }
    }
    let spectral_stable = max_re < -band;
    Ok(StabilityReport {
        n,
        closed_form_stable,
        spectral_stable,
        marginal: max_re.abs() <= band,
        max_real_part: max_re,
        witness: if spectral_stable { None } else { arg },
        rh_failures,
    })
}

/// Ring sizes visited by [`instability_witness`]: doubling from the smallest
/// admissible size, always ending at `n_max`.
pub fn witness_schedule(params: &FlockParams, n_max: usize) -> Vec<usize> {
    let start = (2 * params.reach() as usize + 1).max(4);
    let mut out = Vec::new();
    let mut n = start;
    while n < n_max {
        out.push(n);
        n *= 2;
    }
    if n_max >= start {
        out.push(n_max);
    }
    out
}

/// Searches the doubling schedule up to `n_max` for an eigenvalue with
/// `Re(nu) > MARGIN_TOL * scale`. `Ok(None)` means none was found, which is
/// inconclusive rather than a proof of stability.
pub fn instability_witness(params: &FlockParams, n_max: usize) -> Result<Option<Witness>> {
    if theorem_gate(params).unwrap_or(false) {
        return Err(Error::GateWouldPass);
    }
    let p = params.validate()?;
    let band = MARGIN_TOL * stability_scale(&p);
    for n in witness_schedule(&p, n_max) {
        let found = (1..=(n as i64) / 2)
            .into_par_iter()
            .filter_map(|m| {
                let mode = ModeIndex::wrapped(m, n);
                let (lx, lv) = lambdas(&p, mode);
                let (r1, r2) = quadratic_roots(lx, lv);
                let (plus, minus) = label_by_imag(r1, r2).unwrap_or((r1, r2));
                let (branch, nu) = if plus.re >= minus.re {
                    (Branch::Plus, plus)
                } else {
                    (Branch::Minus, minus)
                };
                (nu.re > band).then_some(Witness { n, m, branch, nu })
            })
            .min_by_key(|w| w.m);
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}
