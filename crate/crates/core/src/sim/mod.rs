//! Time-domain integration of
//! `zdot_k' = g_x sum_j rho_x[j] z_{k+j} + g_v sum_j rho_v[j] zdot_{k+j}`
//! with the classical fourth-order Runge–Kutta scheme.

mod impulse;

pub use impulse::{
    impulse_experiment, positions, steepest_front, wavefront_overlay, ImpulseConfig, OverlayRow, WavefrontReport,
};

use crate::error::{Error, Result};
use crate::model::FlockParams;

/// Number of stored frames aimed for when no stride is given.
pub const DEFAULT_FRAMES: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub params: FlockParams,
    pub dt: f64,
    pub times: Vec<f64>,
    pub z: Vec<Vec<f64>>,
    pub zdot: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Largest step accepted by [`integrate`]: `0.1 / (|g_x rho_x[0]| + |g_v rho_v[0]| + 1)`.
///
/// The center products are the gains of the normalized system, so the limit
/// does not depend on how the weights happen to be scaled.
pub fn max_step(params: &FlockParams) -> f64 {
    0.1 / ((params.g_x * params.rho_x(0)).abs() + (params.g_v * params.rho_v(0)).abs() + 1.0)
}

fn steps_for(t_end: f64, dt: f64) -> usize {
    let k = (t_end / dt).round();
    if (k * dt - t_end).abs() <= 1e-9 * t_end.max(1.0) {
        k as usize
    } else {
        (t_end / dt).ceil() as usize
    }
}

/// Stride that stores roughly [`DEFAULT_FRAMES`] frames over `steps` steps.
pub fn default_stride(steps: usize) -> usize {
    steps.div_ceil(DEFAULT_FRAMES).max(1)
}

/// The right-hand side as a reusable stepper.
pub(crate) struct Rk4 {
    n: usize,
    taps_x: Vec<(i64, f64)>,
    taps_v: Vec<(i64, f64)>,
    k: [(Vec<f64>, Vec<f64>); 4],
    tmp: (Vec<f64>, Vec<f64>),
}

impl Rk4 {
    pub(crate) fn new(params: &FlockParams) -> Self {
        let taps = |w: &[f64], g: f64| -> Vec<(i64, f64)> {
            params
                .offsets()
                .iter()
                .zip(w)
                .filter(|(_, &r)| r != 0.0)
                .map(|(&j, &r)| (j, g * r))
                .collect()
        };
        let n = params.n;
        let buf = || (vec![0.0; n], vec![0.0; n]);
        Self {
            n,
            taps_x: taps(params.rho_x_weights(), params.g_x),
            taps_v: taps(params.rho_v_weights(), params.g_v),
            k: [buf(), buf(), buf(), buf()],
            tmp: buf(),
        }
    }

    fn accel(&self, z: &[f64], zd: &[f64], out: &mut [f64]) {
        let n = self.n as i64;
        for (k, o) in out.iter_mut().enumerate() {
            let k = k as i64;
            let mut acc = 0.0;
            for &(j, w) in &self.taps_x {
                acc += w * z[(k + j).rem_euclid(n) as usize];
            }
            for &(j, w) in &self.taps_v {
                acc += w * zd[(k + j).rem_euclid(n) as usize];
            }
            *o = acc;
        }
    }

    fn eval(&mut self, stage: usize, z: &[f64], zd: &[f64]) {
        let mut acc = std::mem::take(&mut self.k[stage].1);
        self.accel(z, zd, &mut acc);
        self.k[stage].0.copy_from_slice(zd);
        self.k[stage].1 = acc;
    }

    fn shifted(&mut self, z: &[f64], zd: &[f64], stage: usize, h: f64) {
        let (kz, kv) = &self.k[stage];
        for i in 0..self.n {
            self.tmp.0[i] = z[i] + h * kz[i];
            self.tmp.1[i] = zd[i] + h * kv[i];
        }
    }

    pub(crate) fn step(&mut self, z: &mut [f64], zd: &mut [f64], h: f64) {
        self.eval(0, z, zd);
        for (stage, frac) in [(1, 0.5), (2, 0.5), (3, 1.0)] {
            self.shifted(z, zd, stage - 1, frac * h);
            let (tz, tv) = std::mem::take(&mut self.tmp);
            self.eval(stage, &tz, &tv);
            self.tmp = (tz, tv);
        }
        let [(a, av), (b, bv), (c, cv), (d, dv)] = &self.k;
        for i in 0..self.n {
            z[i] += h / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]);
            zd[i] += h / 6.0 * (av[i] + 2.0 * bv[i] + 2.0 * cv[i] + dv[i]);
        }
    }
}

fn check_step(params: &FlockParams, t_end: f64, dt: f64) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("time step {dt} must be positive")));
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!("end time {t_end} must be finite and non-negative")));
    }
    let max = max_step(params);
    if dt > max {
        return Err(Error::StepTooLarge { dt, max });
    }
    Ok(())
}

/// Integrates from `t = 0` to `t_end`, storing every [`default_stride`]-th step.
pub fn integrate(params: &FlockParams, z0: &[f64], zdot0: &[f64], t_end: f64, dt: f64) -> Result<Trajectory> {
    integrate_with_stride(params, z0, zdot0, t_end, dt, None)
}

/// As [`integrate`] with an explicit sampling stride. The final state is
/// always stored. When `t_end` is not a multiple of `dt` the last step is
/// shortened to land on it.
pub fn integrate_with_stride(
    params: &FlockParams,
    z0: &[f64],
    zdot0: &[f64],
    t_end: f64,
    dt: f64,
    stride: Option<usize>,
) -> Result<Trajectory> {
    let p = params.validate()?;
    let n = p.n;
    for arr in [z0, zdot0] {
        if arr.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: arr.len() });
        }
    }
    check_step(&p, t_end, dt)?;
    let steps = steps_for(t_end, dt);
    let stride = stride.unwrap_or_else(|| default_stride(steps)).max(1);

    let mut z = z0.to_vec();
    let mut zd = zdot0.to_vec();
    let mut traj = Trajectory {
        params: p.clone(),
        dt,
        times: vec![0.0],
        z: vec![z.clone()],
        zdot: vec![zd.clone()],
    };
    let mut rk = Rk4::new(&p);
    for i in 1..=steps {
        let t_prev = (i - 1) as f64 * dt;
        let t = if i == steps { t_end } else { i as f64 * dt };
        rk.step(&mut z, &mut zd, t - t_prev);
        if z.iter().chain(&zd).any(|v| !v.is_finite()) {
            return Err(Error::NonfiniteState { t });
        }
        if i % stride == 0 || i == steps {
            traj.times.push(t);
            traj.z.push(z.clone());
            traj.zdot.push(zd.clone());
        }
    }
    Ok(traj)
}
