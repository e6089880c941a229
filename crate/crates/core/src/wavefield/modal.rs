use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::model::FlockParams;
use crate::spectral::{label_by_imag, lambdas_at, mode_range, quadratic_roots, ModeIndex};

/// `(left, right)` roots at a nonzero angle `phi`: the left-moving root has
/// an imaginary part with the same sign as `phi`. At `phi = pi` both roots
/// sit on the real axis or form a conjugate pair, and the left root is the
/// one with the larger imaginary part.
pub fn directed_roots_at(params: &FlockParams, phi: f64) -> (Complex64, Complex64) {
    let (lx, lv) = lambdas_at(params, phi);
    let (r1, r2) = quadratic_roots(lx, lv);
    let (hi, lo) = label_by_imag(r1, r2).unwrap_or((r1, r2));
    if phi > 0.0 {
        (hi, lo)
    } else {
        (lo, hi)
    }
}

/// Amplitudes of `z_k(t) = x0 + v0 t + sum_{m != 0} e^{i m theta k}
/// (a_m e^{nu_left t} + b_m e^{nu_right t})`.
///
/// `a` holds the left-moving branch and `b` the right-moving one, indexed
/// by position in the symmetric mode range; the entry for `m = 0` is unused
/// and kept at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalCoefficients {
    pub n: usize,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub coherent: (f64, f64),
}

impl ModalCoefficients {
    pub fn zeros(n: usize) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self { n, a: vec![zero; n], b: vec![zero; n], coherent: (0.0, 0.0) }
    }

    fn index(&self, m: i64) -> usize {
        (m - mode_range(self.n).start()) as usize
    }

    pub fn a(&self, m: i64) -> Complex64 {
        self.a[self.index(m)]
    }

    pub fn b(&self, m: i64) -> Complex64 {
        self.b[self.index(m)]
    }

    pub fn set(&mut self, m: i64, a: Complex64, b: Complex64) {
        let i = self.index(m);
        self.a[i] = a;
        self.b[i] = b;
    }

    /// Copy keeping only the modes selected by `keep`; the coherent part is dropped.
    pub fn restricted(&self, keep: impl Fn(i64) -> bool) -> Self {
        let mut out = Self::zeros(self.n);
        for m in mode_range(self.n).filter(|&m| m != 0 && keep(m)) {
            out.set(m, self.a(m), self.b(m));
        }
        out
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64, Complex64)> + '_ {
        mode_range(self.n)
            .filter(|&m| m != 0)
            .map(move |m| (m, self.a(m), self.b(m)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModalState {
    pub z: Vec<f64>,
    pub zdot: Vec<f64>,
    /// Largest imaginary part discarded when taking the real solution.
    pub imag_residue: f64,
}

fn branch_pairs(params: &FlockParams) -> Vec<(i64, Complex64, Complex64)> {
    let n = params.n;
    mode_range(n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .filter(|&m| m != 0)
        .map(|m| {
            let (l, r) = directed_roots_at(params, ModeIndex::wrapped(m, n).phi());
            (m, l, r)
        })
        .collect()
}

pub fn modal_decompose(params: &FlockParams, z0: &[f64], zdot0: &[f64]) -> Result<ModalCoefficients> {
    let p = params.validate()?;
    let n = p.n;
    for arr in [z0, zdot0] {
        if arr.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: arr.len() });
        }
    }
    let fft = FftPlanner::new().plan_fft_forward(n);
    let forward = |x: &[f64]| -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft.process(&mut buf);
        buf.iter().map(|c| c / n as f64).collect()
    };
    let zh = forward(z0);
    let zdh = forward(zdot0);

    let mut out = ModalCoefficients::zeros(n);
    out.coherent = (zh[0].re, zdh[0].re);
    for (m, l, r) in branch_pairs(&p) {
        if (l - r).norm() < 1e-10 * l.norm().max(1.0) {
            return Err(Error::DegenerateMode { m });
        }
        let k = m.rem_euclid(n as i64) as usize;
        let a = (zdh[k] - r * zh[k]) / (l - r);
        out.set(m, a, zh[k] - a);
    }
    Ok(out)
}

/// Exact solution at time `t` from its modal amplitudes.
pub fn modal_evolve(params: &FlockParams, coeffs: &ModalCoefficients, t: f64) -> Result<ModalState> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("evolution time {t} must be finite and non-negative")));
    }
    let p = params.validate()?;
    let n = p.n;
    if coeffs.n != n {
        return Err(Error::LengthMismatch { expected: n, got: coeffs.n });
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut pos = vec![zero; n];
    let mut vel = vec![zero; n];
    for (m, l, r) in branch_pairs(&p) {
        let (a, b) = (coeffs.a(m), coeffs.b(m));
        if a == zero && b == zero {
            continue;
        }
        let ea = a * (l * t).exp();
        let eb = b * (r * t).exp();
        let k = m.rem_euclid(n as i64) as usize;
        pos[k] = ea + eb;
        vel[k] = l * ea + r * eb;
    }
    let ifft = FftPlanner::new().plan_fft_inverse(n);
    ifft.process(&mut pos);
    ifft.process(&mut vel);

    let (x0, v0) = coeffs.coherent;
    let imag_residue = pos.iter().chain(&vel).map(|c| c.im.abs()).fold(0.0, f64::max);
    Ok(ModalState {
        z: pos.iter().map(|c| x0 + v0 * t + c.re).collect(),
        zdot: vel.iter().map(|c| v0 + c.re).collect(),
        imag_residue,
    })
}

/// Random modal data with `|a_m| = |b_m| = amplitude |m|^-p` and uniformly
/// random phases, conjugate-linked so the solution is real. The phase stream
/// is drawn in order of `|m|`, so rings of different size share their
/// low-mode data for a fixed seed.
pub fn power_law_coefficients(n: usize, p: f64, amplitude: f64, seed: u64) -> ModalCoefficients {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ModalCoefficients::zeros(n);
    let top = n as i64 / 2;
    for m in 1..=top {
        let mag = amplitude * (m as f64).powf(-p);
        let a = Complex64::from_polar(mag, rng.random_range(0.0..std::f64::consts::TAU));
        let b = Complex64::from_polar(mag, rng.random_range(0.0..std::f64::consts::TAU));
        if 2 * m == n as i64 {
            // the pi mode is its own mirror
            out.set(m, Complex64::new(mag, 0.0), Complex64::new(mag, 0.0));
        } else {
            out.set(m, a, b);
            out.set(-m, a.conj(), b.conj());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(n: usize) -> FlockParams {
        FlockParams::nearest_neighbor(n, -2.0, -2.0, [-0.5, 1.0, -0.5], [-0.5, 1.0, -0.5])
    }

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn constant_initial_data_is_coherent() {
        let c = modal_decompose(&sym(15), &[3.5; 15], &[0.0; 15]).unwrap();
        assert_eq!(c.coherent, (3.5, 0.0));
        assert!(c.modes().all(|(_, a, b)| a.norm() < 1e-14 && b.norm() < 1e-14));
    }

    #[test]
    fn single_eigenmode() {
        let n = 25;
        let p = sym(n);
        let theta = std::f64::consts::TAU / n as f64;
        let (nu, _) = crate::spectral::nu_exact(&p, ModeIndex::new(1, n).unwrap()).unwrap();
        let z0: Vec<f64> = (0..n).map(|k| 2.0 * (theta * k as f64).cos()).collect();
        let zd0: Vec<f64> = (0..n)
            .map(|k| (nu * 2.0 * Complex64::from_polar(1.0, theta * k as f64)).re)
            .collect();
        let c = modal_decompose(&p, &z0, &zd0).unwrap();
        for (m, a, b) in c.modes() {
            assert!(b.norm() < 1e-13, "b_{m} = {b}");
            let expect = if m.abs() == 1 { 1.0 } else { 0.0 };
            assert!((a - expect).norm() < 1e-13, "a_{m} = {a}");
        }
    }

    #[test]
    fn round_trip_and_coherent_drift() {
        let n = 33;
        let p = FlockParams::nearest_neighbor(n, -1.0, -1.0, [-0.5, 1.0, -0.5], [-1.0, 1.0, 0.0]);
        let z0: Vec<f64> = (0..n).map(|k| ((k * k) % 7) as f64 - 3.0).collect();
        let zd0: Vec<f64> = (0..n).map(|k| ((3 * k) % 5) as f64 * 0.25).collect();
        let c = modal_decompose(&p, &z0, &zd0).unwrap();
        let s = modal_evolve(&p, &c, 0.0).unwrap();
        assert!(max_diff(&s.z, &z0) < 1e-12 && max_diff(&s.zdot, &zd0) < 1e-12);
        assert!(s.imag_residue < 1e-12);

        let mut coherent = ModalCoefficients::zeros(n);
        coherent.coherent = (1.5, -0.5);
        let s = modal_evolve(&p, &coherent, 5.0).unwrap();
        assert!(s.z.iter().all(|&z| (z + 1.0).abs() < 1e-15));
    }

    #[test]
    fn evolution_rejects_negative_time_and_length_mismatch() {
        let p = sym(8);
        assert!(modal_evolve(&p, &ModalCoefficients::zeros(8), -1.0).is_err());
        assert!(matches!(
            modal_decompose(&p, &[0.0; 7], &[0.0; 8]),
            Err(Error::LengthMismatch { expected: 8, got: 7 })
        ));
    }

    #[test]
    fn double_root_is_degenerate() {
        // the pi mode of this ring has a double root at -2
        let p = sym(10);
        assert!(matches!(
            modal_decompose(&p, &[0.0; 10], &[0.0; 10]),
            Err(Error::DegenerateMode { m: 5 })
        ));
    }

    #[test]
    fn power_law_is_real_and_prefix_stable() {
        let small = power_law_coefficients(64, 2.0, 1.0, 7);
        let big = power_law_coefficients(128, 2.0, 1.0, 7);
        for m in 1..20 {
            assert_eq!(small.a(m), big.a(m));
            assert_eq!(small.a(-m), small.a(m).conj());
            assert!((small.a(m).norm() - (m as f64).powi(-2)).abs() < 1e-15);
        }
        let p = FlockParams::nearest_neighbor(64, -2.0, -1.0, [-0.5, 1.0, -0.5], [-0.5, 1.0, -0.5]);
        let s = modal_evolve(&p, &small, 3.0).unwrap();
        assert!(s.imag_residue < 1e-12);
    }
}
