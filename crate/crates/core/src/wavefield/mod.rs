//! Wave propagation: phase, signal and group velocities, exact modal
//! evolution and the two-wave approximation of the ring dynamics.
//!
//! Velocities are measured in agents per unit time. A mode `e^{i m theta k}`
//! with eigenvalue `nu` moves at `-Im(nu) / (m theta)`.

mod modal;
mod wave;

pub use modal::{
    directed_roots_at, modal_decompose, modal_evolve, power_law_coefficients, ModalCoefficients,
    ModalState,
};
pub use wave::{
    damping_constant, sample_times, time_window, verify_wave_theorem, wave_approximation, wave_sweep, WaveApproximation,
    WaveConfig, WaveReport, WaveSample, WaveSweep,
};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::FlockParams;
use crate::spectral::{nu_exact, ModeIndex};
use crate::stability::theorem_gate;

/// Step used for the central differences in [`group_velocity`].
pub const GROUP_VELOCITY_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseVelocity {
    pub m: i64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub re_nu_plus: f64,
    pub re_nu_minus: f64,
}

/// Phase velocities for `m = 1..=N/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVelocities {
    pub n: usize,
    pub modes: Vec<PhaseVelocity>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalVelocities {
    pub c_plus: f64,
    pub c_minus: f64,
    pub a: f64,
}

fn require_gate(params: &FlockParams) -> Result<FlockParams> {
    if !theorem_gate(params)? {
        return Err(Error::UnstableParams);
    }
    Ok(params.validate()?)
}

pub fn phase_velocities(params: &FlockParams) -> Result<PhaseVelocities> {
    let p = require_gate(params)?;
    let n = p.n;
    let modes = (1..=(n as i64) / 2)
        .into_par_iter()
        .map(|m| {
            let mode = ModeIndex::new(m, n)?;
            let (plus, minus) = nu_exact(&p, mode)?;
            let s = mode.phi();
            Ok(PhaseVelocity {
                m,
                c_plus: -minus.im / s,
                c_minus: -plus.im / s,
                re_nu_plus: plus.re,
                re_nu_minus: minus.re,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseVelocities { n, modes })
}

/// Closed-form `m -> 0` limit of the phase velocities,
/// `c_+- = -I_v1/2 +- sqrt(a)` with `a = I_v1^2/4 + I_x2/2`.
pub fn signal_velocities(params: &FlockParams) -> Result<SignalVelocities> {
    let p = require_gate(params)?;
    if !p.is_normalized() {
        return Err(Error::NotNormalized { rho_x0: p.rho_x(0), rho_v0: p.rho_v(0) });
    }
    let mo = p.moments(2)?;
    let iv1 = mo.v(1);
    let a = iv1 * iv1 / 4.0 + mo.x(2) / 2.0;
    if a <= 0.0 {
        return Err(Error::NonpositiveA { a });
    }
    Ok(SignalVelocities { c_plus: -iv1 / 2.0 + a.sqrt(), c_minus: -iv1 / 2.0 - a.sqrt(), a })
}

/// Richardson extrapolation of the `m = 1, 2` phase velocities at ring size
/// `n` towards `m = 0`. The phase velocity is even in `m theta` up to an
/// `O((m theta)^2)` correction, so `(4 c_1 - c_2) / 3` removes the leading error.
pub fn extrapolated_signal_velocities(params: &FlockParams, n: usize) -> Result<(f64, f64)> {
    let p = require_gate(params)?.with_n(n);
    let c = |m: i64| -> Result<(f64, f64)> {
        let mode = ModeIndex::new(m, n)?;
        let (plus, minus) = nu_exact(&p, mode)?;
        Ok((-minus.im / mode.phi(), -plus.im / mode.phi()))
    };
    let (p1, m1) = c(1)?;
    let (p2, m2) = c(2)?;
    Ok(((4.0 * p1 - p2) / 3.0, (4.0 * m1 - m2) / 3.0))
}

/// `d omega / d k` at `k = 0` for the right-moving and left-moving branch,
/// where `omega = -Im(nu)` and `k = m theta`, by central differences at
/// `k = +-GROUP_VELOCITY_STEP`.
pub fn group_velocity(params: &FlockParams) -> Result<(f64, f64)> {
    let p = require_gate(params)?;
    let h = GROUP_VELOCITY_STEP;
    let (left_hi, right_hi) = directed_roots_at(&p, h);
    let (left_lo, right_lo) = directed_roots_at(&p, -h);
    let slope = |hi: Complex64, lo: Complex64| (-hi.im + lo.im) / (2.0 * h);
    Ok((slope(right_hi, right_lo), slope(left_hi, left_lo)))
}

/// Whether `|e^a - e^b| < 2 |a - b|`, with `a == b` counted as a pass.
pub fn exp_diff_lemma_check(a: Complex64, b: Complex64) -> bool {
    if a == b {
        return true;
    }
    (a.exp() - b.exp()).norm() < 2.0 * (a - b).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(n: usize) -> FlockParams {
        FlockParams::nearest_neighbor(n, -2.0, -2.0, [-0.5, 1.0, -0.5], [-0.5, 1.0, -0.5])
    }

    fn asym(n: usize) -> FlockParams {
        FlockParams::nearest_neighbor(n, -1.0, -1.0, [-0.5, 1.0, -0.5], [-1.0, 1.0, 0.0])
    }

    #[test]
    fn symmetric_signal_velocity() {
        let s = signal_velocities(&sym(100)).unwrap();
        assert_eq!((s.c_plus, s.c_minus, s.a), (1.0, -1.0, 1.0));
    }

    #[test]
    fn asymmetric_signal_velocity() {
        let s = signal_velocities(&asym(100)).unwrap();
        assert!((s.c_plus - (0.5 + 0.75f64.sqrt())).abs() < 1e-15);
        assert!((s.c_minus - (0.5 - 0.75f64.sqrt())).abs() < 1e-15);
        let n = 10_000;
        let mode = ModeIndex::new(1, n).unwrap();
        let (plus, minus) = nu_exact(&asym(n), mode).unwrap();
        assert!((-minus.im / mode.theta() - s.c_plus).abs() < 1e-6);
        assert!((-plus.im / mode.theta() - s.c_minus).abs() < 1e-6);
    }

    #[test]
    fn signal_velocity_preconditions() {
        let unnorm = FlockParams::nearest_neighbor(10, -1.0, -1.0, [-1.0, 2.0, -1.0], [-1.0, 2.0, -1.0]);
        assert!(matches!(signal_velocities(&unnorm), Err(Error::NotNormalized { .. })));
        let bad = FlockParams::nearest_neighbor(10, 1.0, -1.0, [-0.5, 1.0, -0.5], [-1.0, 1.0, 0.0]);
        assert_eq!(signal_velocities(&bad), Err(Error::UnstableParams));
        assert_eq!(phase_velocities(&bad), Err(Error::UnstableParams));
        assert_eq!(group_velocity(&bad), Err(Error::UnstableParams));
    }

    #[test]
    fn phase_velocities_approach_signal_velocity() {
        // g_v = -1 keeps the pi mode underdamped, so every mode moves
        let mut p = sym(400);
        p.g_v = -1.0;
        let v = phase_velocities(&p).unwrap();
        assert_eq!(v.modes.len(), 200);
        let first = v.modes[0];
        assert!((first.c_plus - 1.0).abs() < 1e-3 && (first.c_minus + 1.0).abs() < 1e-3);
        for pv in &v.modes {
            assert!(pv.c_plus > 0.0 && pv.c_minus < 0.0, "{pv:?}");
        }
    }

    #[test]
    fn group_matches_signal() {
        let (gp, gm) = group_velocity(&asym(10)).unwrap();
        let s = signal_velocities(&asym(10)).unwrap();
        assert!((gp - s.c_plus).abs() < 1e-5 * (1.0 + s.c_plus.abs()));
        assert!((gm - s.c_minus).abs() < 1e-5 * (1.0 + s.c_minus.abs()));
        let (gp, gm) = group_velocity(&sym(10)).unwrap();
        assert!((gp - 1.0).abs() < 1e-9 && (gm + 1.0).abs() < 1e-9);
    }

    #[test]
    fn extrapolation_agrees_with_closed_form() {
        let (cp, cm) = extrapolated_signal_velocities(&asym(10), 10_000).unwrap();
        let s = signal_velocities(&asym(10)).unwrap();
        assert!((cp - s.c_plus).abs() < 1e-6 * s.c_plus.abs());
        assert!((cm - s.c_minus).abs() < 1e-6 * s.c_minus.abs());
    }

    #[test]
    fn exp_difference_examples() {
        let z = Complex64::new(0.0, 0.0);
        assert!(exp_diff_lemma_check(z, z));
        assert!(exp_diff_lemma_check(Complex64::new(0.05, 0.0), Complex64::new(-0.05, 0.0)));
        // fails far from the origin
        assert!(!exp_diff_lemma_check(Complex64::new(2.0, 0.0), Complex64::new(1.9, 0.0)));
    }
}
