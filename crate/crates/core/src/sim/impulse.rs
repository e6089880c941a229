use std::ops::Range;

use super::{check_step, default_stride, steps_for, Rk4, Trajectory};
use crate::error::{Error, Result};
use crate::model::FlockParams;
use crate::stability::theorem_gate;
use crate::wavefield::signal_velocities;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpulseConfig {
    pub v_impulse: f64,
    pub t_end: f64,
    pub dt: f64,
    /// Arrival threshold as a fraction of `|v_impulse|`.
    pub threshold_fraction: f64,
    /// Agents skipped next to the source and next to the antipode when fitting.
    pub exclude: usize,
    pub stride: Option<usize>,
}

impl Default for ImpulseConfig {
    fn default() -> Self {
        Self { v_impulse: 1.0, t_end: 120.0, dt: 0.01, threshold_fraction: 0.01, exclude: 5, stride: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavefrontReport {
    /// First time `|zdot_k|` exceeds the threshold, linearly interpolated
    /// between steps; `None` if it never does before `t_end`.
    pub arrival_time: Vec<Option<f64>>,
    pub threshold: f64,
    pub fitted_c_plus: Option<f64>,
    pub fitted_c_minus: Option<f64>,
    pub predicted_c_plus: f64,
    pub predicted_c_minus: f64,
}

impl WavefrontReport {
    /// Agents that never crossed the threshold.
    pub fn missing(&self) -> Vec<usize> {
        self.arrival_time
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_none())
            .map(|(k, _)| k)
            .collect()
    }

    /// Agent index where the two predicted fronts meet, `N c_+ / (c_+ - c_-)`.
    pub fn meeting_point(&self) -> f64 {
        let n = self.arrival_time.len() as f64;
        n * self.predicted_c_plus / (self.predicted_c_plus - self.predicted_c_minus)
    }

    /// `(k, distance from the source, branch)` for every agent but the source:
    /// `+` up to the meeting point, `-` beyond it.
    pub fn branches(&self) -> Vec<(usize, usize, char)> {
        let n = self.arrival_time.len();
        let split = self.meeting_point();
        let forward = (1..n).filter(|&k| k as f64 <= split).map(|k| (k, k, '+'));
        let backward = (1..n).rev().filter(|&k| k as f64 > split).map(move |k| (k, n - k, '-'));
        forward.chain(backward).collect()
    }
}

/// Least-squares slope of `y` against `x`.
fn slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Velocity (agents per time) from arrival times at the given distances.
fn fit_velocity(arrivals: &[Option<f64>], agents: impl Iterator<Item = (usize, usize)>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = agents
        .filter_map(|(k, d)| arrivals[k].map(|t| (d as f64, t)))
        .collect();
    slope(&pts).filter(|s| *s > 0.0).map(|s| 1.0 / s)
}

/// Kicks agent 0 with velocity `v_impulse` from rest and records when the
/// disturbance reaches every other agent.
pub fn impulse_experiment(params: &FlockParams, cfg: &ImpulseConfig) -> Result<(Trajectory, WavefrontReport)> {
    if !theorem_gate(params)? {
        return Err(Error::UnstableParams);
    }
    let p = params.validate()?;
    let sig = signal_velocities(&p.normalize()?)?;
    check_step(&p, cfg.t_end, cfg.dt)?;
    if cfg.v_impulse == 0.0 || !cfg.v_impulse.is_finite() {
        return Err(Error::InvalidArgument("impulse velocity must be finite and nonzero".into()));
    }
    let n = p.n;
    let threshold = cfg.threshold_fraction * cfg.v_impulse.abs();
    let steps = steps_for(cfg.t_end, cfg.dt);
    let stride = cfg.stride.unwrap_or_else(|| default_stride(steps)).max(1);

    let mut z = vec![0.0; n];
    let mut zd = vec![0.0; n];
    zd[0] = cfg.v_impulse;
    let mut arrival: Vec<Option<f64>> = zd.iter().map(|v| (v.abs() > threshold).then_some(0.0)).collect();
    let mut traj = Trajectory {
        params: p.clone(),
        dt: cfg.dt,
        times: vec![0.0],
        z: vec![z.clone()],
        zdot: vec![zd.clone()],
    };
    let mut rk = Rk4::new(&p);
    let mut prev = zd.clone();
    for i in 1..=steps {
        let t_prev = (i - 1) as f64 * cfg.dt;
        let t = if i == steps { cfg.t_end } else { i as f64 * cfg.dt };
        rk.step(&mut z, &mut zd, t - t_prev);
        if z.iter().chain(&zd).any(|v| !v.is_finite()) {
            return Err(Error::NonfiniteState { t });
        }
        for k in 0..n {
            if arrival[k].is_none() && zd[k].abs() > threshold {
                let (a, b) = (prev[k].abs(), zd[k].abs());
                let frac = if b > a { (threshold - a) / (b - a) } else { 1.0 };
                arrival[k] = Some(t_prev + frac.clamp(0.0, 1.0) * (t - t_prev));
            }
        }
        prev.copy_from_slice(&zd);
        if i % stride == 0 || i == steps {
            traj.times.push(t);
            traj.z.push(z.clone());
            traj.zdot.push(zd.clone());
        }
    }

    let ex = cfg.exclude as f64;
    let split = n as f64 * sig.c_plus / (sig.c_plus - sig.c_minus);
    let forward = (1..n)
        .filter(|&k| k as f64 > ex && k as f64 + ex <= split)
        .map(|k| (k, k));
    let backward = (1..n)
        .filter(|&k| (n - k) as f64 > ex && k as f64 >= split + ex)
        .map(|k| (k, n - k));
    let report = WavefrontReport {
        fitted_c_plus: fit_velocity(&arrival, forward),
        fitted_c_minus: fit_velocity(&arrival, backward).map(|c| -c),
        arrival_time: arrival,
        threshold,
        predicted_c_plus: sig.c_plus,
        predicted_c_minus: sig.c_minus,
    };
    Ok((traj, report))
}

/// Physical positions `x_k(t) = z_k(t) + k delta + v_nominal t` per stored frame.
pub fn positions(traj: &Trajectory, delta: f64, v_nominal: f64) -> Result<Vec<Vec<f64>>> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("spacing {delta} must be positive")));
    }
    Ok(traj
        .times
        .iter()
        .zip(&traj.z)
        .map(|(&t, row)| {
            row.iter()
                .enumerate()
                .map(|(k, z)| z + k as f64 * delta + v_nominal * t)
                .collect()
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlayRow {
    pub t: f64,
    /// Position of the real agent index `c_+ t`.
    pub front_plus_x: Option<f64>,
    /// Position of the real agent index `N + c_- t`.
    pub front_minus_x: Option<f64>,
}

/// Position of real agent index `s` in `[0, N]` on one frame, linearly
/// interpolated between neighbors; index `N` is agent 0 one lap ahead.
fn position_at(row: &[f64], t: f64, s: f64, delta: f64, v_nominal: f64) -> Option<f64> {
    let n = row.len();
    if !(0.0..=n as f64).contains(&s) {
        return None;
    }
    let x = |k: usize| row[k % n] + k as f64 * delta + v_nominal * t;
    let k = (s.floor() as usize).min(n - 1);
    let w = s - k as f64;
    Some((1.0 - w) * x(k) + w * x(k + 1))
}

/// Where the two theoretical wavefronts sit in position space over time.
pub fn wavefront_overlay(
    traj: &Trajectory,
    delta: f64,
    v_nominal: f64,
    c_plus: f64,
    c_minus: f64,
) -> Result<Vec<OverlayRow>> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("spacing {delta} must be positive")));
    }
    let n = traj.params.n as f64;
    Ok(traj
        .times
        .iter()
        .zip(&traj.z)
        .map(|(&t, row)| OverlayRow {
            t,
            front_plus_x: position_at(row, t, c_plus * t, delta, v_nominal),
            front_minus_x: position_at(row, t, n + c_minus * t, delta, v_nominal),
        })
        .collect())
}

/// Real agent index (midpoint `k + 1/2`) of the largest jump
/// `|z_{k+1} - z_k|` for `k` in `range`.
pub fn steepest_front(row: &[f64], range: Range<usize>) -> Option<f64> {
    let n = row.len();
    range
        .map(|k| (k, (row[(k + 1) % n] - row[k % n]).abs()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(k, _)| k as f64 + 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig4(n: usize) -> FlockParams {
        FlockParams::nearest_neighbor(n, -2.0, -2.0, [-0.5, 1.0, -0.5], [-0.5, 1.0, -0.5])
    }

    #[test]
    fn slope_fit() {
        assert_eq!(slope(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]), Some(2.0));
        assert_eq!(slope(&[(1.0, 1.0)]), None);
    }

    #[test]
    fn branch_layout() {
        let r = WavefrontReport {
            arrival_time: vec![None; 7],
            threshold: 0.0,
            fitted_c_plus: None,
            fitted_c_minus: None,
            predicted_c_plus: 1.0,
            predicted_c_minus: -1.0,
        };
        let b = r.branches();
        assert_eq!(b.first(), Some(&(1, 1, '+')));
        assert_eq!(b[3], (6, 1, '-'));
        assert_eq!(b.last(), Some(&(4, 3, '-')));
        assert_eq!(r.missing().len(), 7);
    }

    #[test]
    fn short_run_leaves_far_agents_missing() {
        let cfg = ImpulseConfig { t_end: 5.0, ..Default::default() };
        let (_, r) = impulse_experiment(&fig4(60), &cfg).unwrap();
        assert_eq!(r.arrival_time[0], Some(0.0));
        assert!(r.missing().contains(&30));
        assert!(r.arrival_time[1].is_some());
    }

    #[test]
    fn unstable_params_rejected() {
        let p = FlockParams::nearest_neighbor(20, -2.0, -2.0, [-0.4, 1.0, -0.6], [-0.5, 1.0, -0.5]);
        assert_eq!(impulse_experiment(&p, &ImpulseConfig::default()).unwrap_err(), Error::UnstableParams);
    }

    #[test]
    fn straight_fan_for_rest() {
        let p = fig4(5);
        let traj = super::super::integrate(&p, &[0.0; 5], &[0.0; 5], 1.0, 0.01).unwrap();
        let x = positions(&traj, 2.0, 3.0).unwrap();
        let last = x.last().unwrap();
        for (k, xk) in last.iter().enumerate() {
            assert!((xk - (2.0 * k as f64 + 3.0)).abs() < 1e-12);
        }
        assert!(positions(&traj, 0.0, 1.0).is_err());
    }

    #[test]
    fn steepest_front_location() {
        let row = [0.0, 0.0, 0.1, 0.9, 1.0, 1.0];
        assert_eq!(steepest_front(&row, 0..5), Some(2.5));
    }
}
