//! Two-wave approximation `z_k(t) ~ f_-(k - c_- t) + f_+(k - c_+ t)` and its
//! three-term error bound
//!
//! ```text
//! M D K (1/|c_-| + 1/c_+) N^(3 alpha - 1)
//!   + 4M/(p-1) ((N^alpha - 1)^(1-p) - (N^beta - 1)^(1-p)) e^(-C(alpha, beta) t)
//!   + 4M/(p-1) (N^beta - 1)^(1-p) e^(-C(beta, 1) t)
//! ```
//!
//! valid for `t` in `[N/|c_-|, K N/|c_-|] ∩ [N/c_+, K N/c_+]`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::modal::{directed_roots_at, modal_evolve, ModalCoefficients};
use super::signal_velocities;
use crate::error::{Error, Result};
use crate::model::FlockParams;
use crate::spectral::ModeIndex;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveConfig {
    pub alpha: f64,
    pub beta: f64,
    pub k: f64,
    pub p: f64,
}

impl Default for WaveConfig {
    fn default() -> Self {
        Self { alpha: 0.3, beta: 0.7, k: 2.0, p: 2.0 }
    }
}

impl WaveConfig {
    pub fn check(&self) -> Result<()> {
        let WaveConfig { alpha, beta, k, p } = *self;
        if !(0.0 < alpha && alpha < beta && beta < 1.0) {
            return Err(Error::BadExponents(format!("need 0 < alpha < beta < 1, got alpha = {alpha}, beta = {beta}")));
        }
        if !(k > 1.0) {
            return Err(Error::BadExponents(format!("need K > 1, got {k}")));
        }
        if !(p > 1.0) {
            return Err(Error::BadExponents(format!("need p > 1, got {p}")));
        }
        Ok(())
    }

    /// All bound terms vanish as `N` grows only for `alpha < 1/3`.
    pub fn converges(&self) -> bool {
        self.alpha < 1.0 / 3.0
    }
}

/// `N^e`, snapped to the nearest integer when it is one up to rounding, so
/// that cutoffs such as `1024^0.3 = 8` are not shifted by one.
fn power_of(n: usize, e: f64) -> f64 {
    let x = (n as f64).powf(e);
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.max(1.0) {
        r
    } else {
        x
    }
}

/// Minimum of `|Re(nu)|` over both branches and `N^lo <= |m| <= min(N/2, N^hi)`.
/// Infinite when the band holds no modes.
pub fn damping_constant(params: &FlockParams, lo: f64, hi: f64) -> f64 {
    let n = params.n;
    let first = power_of(n, lo).ceil() as i64;
    let last = power_of(n, hi).min(n as f64 / 2.0).floor() as i64;
    (first.max(1)..=last)
        .into_par_iter()
        .map(|m| {
            let (l, r) = directed_roots_at(params, ModeIndex::wrapped(m, n).phi());
            l.re.abs().min(r.re.abs())
        })
        .reduce(|| f64::INFINITY, f64::min)
}

/// Admissible sample window `[N/|c_-|, K N/|c_-|] ∩ [N/c_+, K N/c_+]`.
pub fn time_window(n: usize, c_plus: f64, c_minus: f64, k: f64) -> Result<(f64, f64)> {
    let n = n as f64;
    let lo = (n / c_minus.abs()).max(n / c_plus);
    let hi = (k * n / c_minus.abs()).min(k * n / c_plus);
    if lo > hi {
        return Err(Error::EmptyTimeWindow);
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveApproximation {
    pub n: usize,
    pub config: WaveConfig,
    /// Largest `|m|` with `|m| < N^alpha`.
    pub cutoff: i64,
    pub f_minus: Vec<(i64, Complex64)>,
    pub f_plus: Vec<(i64, Complex64)>,
    pub c_minus: f64,
    pub c_plus: f64,
    /// Smallest `M` with `|a_m|, |b_m| <= M |m|^-p`.
    pub m_bound: f64,
    pub damping_ab: f64,
    pub damping_b1: f64,
}

fn profile(terms: &[(i64, Complex64)], theta: f64, z: f64) -> Complex64 {
    terms
        .iter()
        .map(|&(m, c)| c * Complex64::from_polar(1.0, m as f64 * theta * z))
        .sum()
}

impl WaveApproximation {
    fn theta(&self) -> f64 {
        std::f64::consts::TAU / self.n as f64
    }

    pub fn f_minus_at(&self, z: f64) -> Complex64 {
        profile(&self.f_minus, self.theta(), z)
    }

    pub fn f_plus_at(&self, z: f64) -> Complex64 {
        profile(&self.f_plus, self.theta(), z)
    }

    /// `f_-(k - c_- t) + f_+(k - c_+ t)`; real for conjugate-linked data.
    pub fn eval(&self, k: f64, t: f64) -> f64 {
        (self.f_minus_at(k - self.c_minus * t) + self.f_plus_at(k - self.c_plus * t)).re
    }

    pub fn window(&self) -> Result<(f64, f64)> {
        time_window(self.n, self.c_plus, self.c_minus, self.config.k)
    }

    /// First bound term with `D = 1`.
    pub fn term1_unit(&self) -> f64 {
        let WaveConfig { alpha, k, .. } = self.config;
        self.m_bound * k * (1.0 / self.c_minus.abs() + 1.0 / self.c_plus) * power_of(self.n, 3.0 * alpha - 1.0)
    }

    /// The three bound terms at time `t` for constant `d`.
    pub fn terms(&self, t: f64, d: f64) -> [f64; 3] {
        let WaveConfig { alpha, beta, p, .. } = self.config;
        let tail = |e: f64| (power_of(self.n, e) - 1.0).powf(1.0 - p);
        let scale = 4.0 * self.m_bound / (p - 1.0);
        [
            d * self.term1_unit(),
            scale * (tail(alpha) - tail(beta)) * (-self.damping_ab * t).exp(),
            scale * tail(beta) * (-self.damping_b1 * t).exp(),
        ]
    }
}

pub fn wave_approximation(
    params: &FlockParams,
    coeffs: &ModalCoefficients,
    config: WaveConfig,
) -> Result<WaveApproximation> {
    config.check()?;
    let p = params.validate()?;
    let n = p.n;
    if coeffs.n != n {
        return Err(Error::LengthMismatch { expected: n, got: coeffs.n });
    }
    let sig = signal_velocities(&p.normalize()?)?;
    let m_bound = coeffs
        .modes()
        .map(|(m, a, b)| a.norm().max(b.norm()) * (m.abs() as f64).powf(config.p))
        .fold(0.0, f64::max);
    if m_bound == 0.0 {
        return Err(Error::NoDecayFit);
    }
    let cutoff = power_of(n, config.alpha).ceil() as i64 - 1;
    let low: Vec<_> = coeffs.modes().filter(|(m, _, _)| m.abs() <= cutoff).collect();
    Ok(WaveApproximation {
        n,
        config,
        cutoff,
        f_minus: low.iter().map(|&(m, a, _)| (m, a)).collect(),
        f_plus: low.iter().map(|&(m, _, b)| (m, b)).collect(),
        c_minus: sig.c_minus,
        c_plus: sig.c_plus,
        m_bound,
        damping_ab: damping_constant(&p, config.alpha, config.beta),
        damping_b1: damping_constant(&p, config.beta, 1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSample {
    pub t: f64,
    /// `max_k |z_k(t) - x0 - v0 t - f_-(k - c_- t) - f_+(k - c_+ t)|`.
    pub measured_error: f64,
    /// The same error for the solution restricted to `|m| < N^alpha`.
    pub low_mode_error: f64,
    /// `max_k |z_k(t)|`.
    pub signal_norm: f64,
    pub term1_unit: f64,
    pub term2: f64,
    pub term3: f64,
}

impl WaveSample {
    pub fn bound(&self, d: f64) -> f64 {
        d * self.term1_unit + self.term2 + self.term3
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveReport {
    pub n: usize,
    pub approximation: WaveApproximation,
    pub samples: Vec<WaveSample>,
    /// Smallest `D` for which the first term covers the low-mode error at
    /// every sample.
    pub fitted_d: f64,
}

pub fn verify_wave_theorem(
    params: &FlockParams,
    coeffs: &ModalCoefficients,
    config: WaveConfig,
    t_samples: &[f64],
) -> Result<WaveReport> {
    let approx = wave_approximation(params, coeffs, config)?;
    let (lo, hi) = approx.window()?;
    let slack = 1e-12 * hi;
    if let Some(&t) = t_samples.iter().find(|&&t| !(t >= lo - slack && t <= hi + slack)) {
        return Err(Error::TimeOutsideWindow { t, lo, hi });
    }
    let p = params.validate()?;
    let cutoff = approx.cutoff;
    let low = coeffs.restricted(|m| m.abs() <= cutoff);
    let (x0, v0) = coeffs.coherent;

    let samples = t_samples
        .par_iter()
        .map(|&t| {
            let full = modal_evolve(&p, coeffs, t)?;
            let part = modal_evolve(&p, &low, t)?;
            let mut measured_error = 0.0_f64;
            let mut low_mode_error = 0.0_f64;
            let mut signal_norm = 0.0_f64;
            for k in 0..p.n {
                let f = approx.eval(k as f64, t);
                measured_error = measured_error.max((full.z[k] - x0 - v0 * t - f).abs());
                low_mode_error = low_mode_error.max((part.z[k] - f).abs());
                signal_norm = signal_norm.max(full.z[k].abs());
            }
            let [term1_unit, term2, term3] = approx.terms(t, 1.0);
            Ok(WaveSample { t, measured_error, low_mode_error, signal_norm, term1_unit, term2, term3 })
        })
        .collect::<Result<Vec<_>>>()?;
    let fitted_d = samples
        .iter()
        .filter(|s| s.term1_unit > 0.0)
        .map(|s| s.low_mode_error / s.term1_unit)
        .fold(0.0, f64::max);
    Ok(WaveReport { n: p.n, approximation: approx, samples, fitted_d })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveSweep {
    pub reports: Vec<WaveReport>,
    /// `D` fitted at the first (smallest) ring size and reused for the rest.
    pub frozen_d: f64,
}

impl WaveSweep {
    /// Whether the bound with the frozen `D` covers every measured error.
    pub fn bound_holds(&self) -> bool {
        self.reports
            .iter()
            .flat_map(|r| &r.samples)
            .all(|s| s.measured_error <= s.bound(self.frozen_d))
    }

    /// `E(t*) / max_k |z_k(t*)|` per ring size, where `t*` is the first sample.
    pub fn relative_errors(&self) -> Vec<f64> {
        self.reports
            .iter()
            .map(|r| r.samples[0].measured_error / r.samples[0].signal_norm)
            .collect()
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.relative_errors().windows(2).all(|w| w[1] < w[0])
    }
}

/// `N/|c_-|` (moved into the window if needed) followed by `count` evenly
/// spaced times covering the window.
pub fn sample_times(n: usize, c_plus: f64, c_minus: f64, k: f64, count: usize) -> Result<Vec<f64>> {
    let (lo, hi) = time_window(n, c_plus, c_minus, k)?;
    let t_star = (n as f64 / c_minus.abs()).clamp(lo, hi);
    let mut out = vec![t_star];
    match count {
        0 => {}
        1 => out.push(lo),
        _ => out.extend((0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)),
    }
    Ok(out)
}

/// Runs [`verify_wave_theorem`] for each ring size in `ns` (ascending), with
/// `coeffs_for(n)` supplying the modal data and `count` window samples each.
pub fn wave_sweep(
    params: &FlockParams,
    ns: &[usize],
    config: WaveConfig,
    count: usize,
    coeffs_for: impl Fn(usize) -> Result<ModalCoefficients>,
) -> Result<WaveSweep> {
    if ns.is_empty() {
        return Err(Error::InvalidArgument("empty ring-size sweep".into()));
    }
    let sig = signal_velocities(&params.validate()?.normalize()?)?;
    let mut reports = Vec::with_capacity(ns.len());
    for &n in ns {
        let p = params.with_n(n);
        let times = sample_times(n, sig.c_plus, sig.c_minus, config.k, count)?;
        reports.push(verify_wave_theorem(&p, &coeffs_for(n)?, config, &times)?);
    }
    let frozen_d = reports[0].fitted_d;
    Ok(WaveSweep { reports, frozen_d })
}
