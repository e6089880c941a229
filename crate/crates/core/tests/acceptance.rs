//! End-to-end acceptance checks, one line of output per criterion.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ringflock::draws::{mixed_params, random_state, stable_params, valid_params};
use ringflock::model::{DenseSystem, FlockParams};
use ringflock::sim::{impulse_experiment, integrate, max_step, ImpulseConfig};
use ringflock::spectral::{
    dense_spectrum, diameter, eigencurve, hausdorff, matched_distance, nu_exact, nu_series, ModeIndex,
    Spectrum,
};
use ringflock::stability::{
    instability_witness, routh_hurwitz_conditions, spectral_verdict, stability_scale, theorem_gate, MARGIN_TOL,
};
use ringflock::wavefield::{
    exp_diff_lemma_check, extrapolated_signal_velocities, group_velocity, modal_decompose, modal_evolve,
    phase_velocities, power_law_coefficients, signal_velocities, wave_sweep, WaveConfig,
};

type Outcome = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn spectral_equivalence() -> Outcome {
    let mut r = rng(1);
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let base = valid_params(&mut r, 4);
        for n in [4, 16, 64] {
            let p = base.with_n(n);
            let closed = Spectrum::compute(&p).map_err(|e| e.to_string())?.eigenvalues();
            let dense = dense_spectrum(&DenseSystem::build(&p).unwrap()).unwrap();
            worst = worst.max(matched_distance(&closed, &dense));
        }
    }
    let msg = format!("max matched distance {worst:.3e} (limit 1e-9)");
    if worst < 1e-9 { Ok(msg) } else { Err(msg) }
}

fn gate_soundness_and_necessity() -> Outcome {
    let mut r = rng(2);
    let (mut stable_checked, mut witnessed) = (0, 0);
    for i in 0..200 {
        let p = mixed_params(&mut r, 8);
        if theorem_gate(&p).unwrap() {
            for n in [8, 64, 512] {
                let v = spectral_verdict(&p, n).unwrap();
                if !v.spectral_stable {
                    return Err(format!("draw {i}: gate passes but N = {n} has max Re {:.3e}", v.max_real_part));
                }
            }
            stable_checked += 1;
        }
        let i_x1 = p.moments(1).unwrap().x(1);
        if i_x1.abs() > 0.1 * p.g_x.abs() {
            match instability_witness(&p, 4096).unwrap() {
                Some(_) => witnessed += 1,
                None => return Err(format!("draw {i}: I_x1 = {i_x1:.3} but no witness up to N = 4096")),
            }
        }
    }
    Ok(format!("{stable_checked} gate-stable draws stable at N = 8, 64, 512; {witnessed} asymmetric draws witnessed"))
}

fn routh_hurwitz_agreement() -> Outcome {
    let mut r = rng(3);
    let (mut agree, mut banded) = (0, 0);
    for i in 0..100 {
        let base = mixed_params(&mut r, 4);
        let band = MARGIN_TOL * stability_scale(&base);
        for n in [4, 5, 8, 16, 33, 64] {
            let p = base.with_n(n);
            let s = Spectrum::compute(&p).unwrap();
            for mode in s.modes.iter().filter(|m| m.m != 0) {
                let re = mode.nu_plus.re.max(mode.nu_minus.re);
                if re.abs() <= band {
                    banded += 1;
                    continue;
                }
                let rh = routh_hurwitz_conditions(mode.lambda_x, mode.lambda_v).iter().all(|&c| c);
                if rh != (re < 0.0) {
                    return Err(format!("draw {i}, N = {n}, m = {}: RH {rh} but max Re {re:.3e}", mode.m));
                }
                agree += 1;
            }
        }
    }
    Ok(format!("{agree} modes agree, {banded} inside the marginal band"))
}

fn series_order() -> Outcome {
    let mut r = rng(4);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for i in 0..20 {
        let base = stable_params(&mut r, 256);
        let err: Vec<f64> = [256, 512, 1024]
            .iter()
            .map(|&n| {
                let p = base.with_n(n);
                let mode = ModeIndex::new(1, n).unwrap();
                let (ep, em) = nu_exact(&p, mode).unwrap();
                let (sp, sm) = nu_series(&p, mode, 4).unwrap();
                (sp - ep).norm().max((sm - em).norm())
            })
            .collect();
        for w in err.windows(2) {
            let ratio = w[0] / w[1];
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            if !(32.0 / 1.5..=32.0 * 1.5).contains(&ratio) {
                return Err(format!("draw {i}: error ratio {ratio:.2} outside [21.3, 48]"));
            }
        }
    }
    Ok(format!("error ratios in [{lo:.2}, {hi:.2}]"))
}

fn hausdorff_convergence() -> Outcome {
    let mut r = rng(5);
    let mut worst_rel = 0.0_f64;
    for i in 0..10 {
        let base = stable_params(&mut r, 100);
        let gamma = eigencurve(&base, 10_000).unwrap().points();
        let diam = diameter(&gamma);
        let d: Vec<f64> = [100, 300, 1000]
            .iter()
            .map(|&n| hausdorff(&Spectrum::compute(&base.with_n(n)).unwrap().eigenvalues(), &gamma).unwrap())
            .collect();
        if !(d[0] > d[1] && d[1] > d[2]) {
            return Err(format!("draw {i}: distances {d:?} not decreasing"));
        }
        let rel = d[2] / diam;
        worst_rel = worst_rel.max(rel);
        if rel >= 0.05 {
            return Err(format!("draw {i}: d_H / diam = {rel:.4} at N = 1000"));
        }
    }
    Ok(format!("monotone for all draws, worst d_H / diam at N = 1000 is {worst_rel:.2e}"))
}

fn velocity_signs() -> Outcome {
    let mut r = rng(6);
    let mut modes = 0;
    for i in 0..100 {
        let p = stable_params(&mut r, 500);
        let pv = phase_velocities(&p).map_err(|e| format!("draw {i}: {e}"))?;
        for v in &pv.modes {
            let (a, b) = nu_exact(&p, ModeIndex::new(v.m, 500).unwrap()).unwrap();
            if !(a.im * b.im < 0.0 && v.c_plus > 0.0 && v.c_minus < 0.0) {
                return Err(format!("draw {i}, m = {}: {v:?}", v.m));
            }
            modes += 1;
        }
    }
    Ok(format!("{modes} modes with opposite-sign branches and c_+ > 0 > c_-"))
}

fn cross_oracle() -> Outcome {
    let mut r = rng(7);
    let p = stable_params(&mut r, 200);
    let (z0, zd0) = random_state(&mut r, 200);
    let coeffs = modal_decompose(&p, &z0, &zd0).unwrap();
    let exact = modal_evolve(&p, &coeffs, 10.0).unwrap();
    let traj = integrate(&p, &z0, &zd0, 10.0, 1e-3).unwrap();
    let rel = sup_diff(traj.z.last().unwrap(), &exact.z) / sup(&exact.z);
    if rel >= 1e-6 {
        return Err(format!("modal vs RK4 relative error {rel:.3e}"));
    }

    let q = stable_params(&mut r, 64);
    let (z0, zd0) = random_state(&mut r, 64);
    let exact = modal_evolve(&q, &modal_decompose(&q, &z0, &zd0).unwrap(), 10.0).unwrap();
    let steps = (10.0 / max_step(&q)).ceil();
    let err = |dt: f64| sup_diff(integrate(&q, &z0, &zd0, 10.0, dt).unwrap().z.last().unwrap(), &exact.z);
    let ratio = err(10.0 / steps) / err(10.0 / (2.0 * steps));
    let msg = format!("relative error {rel:.3e} at N = 200; dt-halving ratio {ratio:.2}");
    if (12.0..=20.0).contains(&ratio) { Ok(msg) } else { Err(msg) }
}

fn signal_velocity_closed_form() -> Outcome {
    for g_x in [-0.5, -2.0, -3.7] {
        let p = FlockParams::nearest_neighbor(50, g_x, -0.8, [-0.5, 1.0, -0.5], [-0.5, 1.0, -0.5]);
        let s = signal_velocities(&p).unwrap();
        let c = (-g_x / 2.0_f64).sqrt();
        if (s.c_plus - c).abs() > 1e-12 || (s.c_minus + c).abs() > 1e-12 {
            return Err(format!("symmetric g_x = {g_x}: {s:?}"));
        }
    }
    let p = FlockParams::nearest_neighbor(50, -1.0, -1.0, [-0.5, 1.0, -0.5], [-1.0, 1.0, 0.0]);
    let s = signal_velocities(&p).unwrap();
    let (ep, em) = extrapolated_signal_velocities(&p, 10_000).unwrap();
    let lim = ((ep - s.c_plus) / s.c_plus).abs().max(((em - s.c_minus) / s.c_minus).abs());
    let (gp, gm) = group_velocity(&p).unwrap();
    let grp = (gp - s.c_plus).abs().max((gm - s.c_minus).abs());
    let msg = format!("c = ({:.6}, {:.6}); limit rel err {lim:.2e}; group err {grp:.2e}", s.c_plus, s.c_minus);
    if lim < 1e-6 && grp < 1e-5 { Ok(msg) } else { Err(msg) }
}

fn traveling_wave() -> Outcome {
    let p = FlockParams::nearest_neighbor(256, -2.0, -2.0, [-0.5, 1.0, -0.5], [-0.5, 1.0, -0.5]);
    let cfg = WaveConfig { alpha: 0.3, beta: 0.7, k: 2.0, p: 2.0 };
    let sweep = wave_sweep(&p, &[256, 512, 1024], cfg, 16, |n| Ok(power_law_coefficients(n, 2.0, 1.0, 9)))
        .map_err(|e| e.to_string())?;
    let rel = sweep.relative_errors();
    let msg = format!(
        "E(t*)/|z| = {:.4e}, {:.4e}, {:.4e}; frozen D = {:.3e}",
        rel[0], rel[1], rel[2], sweep.frozen_d
    );
    if !sweep.strictly_decreasing() {
        return Err(format!("not decreasing: {msg}"));
    }
    if !sweep.bound_holds() {
        return Err(format!("bound violated: {msg}"));
    }
    Ok(msg)
}

fn impulse_and_exp_bound() -> Outcome {
    let p = FlockParams::nearest_neighbor(200, -2.0, -2.0, [-0.5, 1.0, -0.5], [-0.5, 1.0, -0.5]);
    let (_, w) = impulse_experiment(&p, &ImpulseConfig::default()).unwrap();
    let (cp, cm) = (w.fitted_c_plus.unwrap_or(f64::NAN), w.fitted_c_minus.unwrap_or(f64::NAN));
    let slope_ok = (cp - 1.0).abs() <= 0.05 && (cm + 1.0).abs() <= 0.05;

    let mut r = rng(10);
    let mut failures = 0;
    let disc = |r: &mut ChaCha8Rng, complex: bool| -> Complex64 {
        let rad = 0.1 * r.random::<f64>().sqrt();
        let ang = if complex { r.random_range(0.0..std::f64::consts::TAU) } else { 0.0 };
        let sign = if !complex && r.random::<bool>() { -1.0 } else { 1.0 };
        Complex64::from_polar(sign * rad, ang)
    };
    for i in 0..100_000 {
        let complex = i % 2 == 1;
        let (a, b) = (disc(&mut r, complex), disc(&mut r, complex));
        if !exp_diff_lemma_check(a, b) {
            failures += 1;
        }
    }
    let msg = format!("fitted c = ({cp:.4}, {cm:.4}); exp-difference bound failures {failures} / 100000");
    if slope_ok && failures == 0 { Ok(msg) } else { Err(msg) }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("spectral equivalence with dense eigensolver", spectral_equivalence),
        ("stability gate soundness and necessity", gate_soundness_and_necessity),
        ("Routh-Hurwitz agrees with spectral verdict", routh_hurwitz_agreement),
        ("series error ratio under N doubling", series_order),
        ("Hausdorff convergence to the eigencurve", hausdorff_convergence),
        ("opposite-sign and velocity-sign properties", velocity_signs),
        ("modal evolution vs RK4", cross_oracle),
        ("signal velocity closed form", signal_velocity_closed_form),
        ("traveling-wave bound over N sweep", traveling_wave),
        ("impulse wavefronts and exp-difference bound", impulse_and_exp_bound),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        let selected = |f: &String| match f.parse::<usize>() {
            Ok(k) => k == i + 1,
            Err(_) => name.contains(f.as_str()),
        };
        if !filter.is_empty() && !filter.iter().any(selected) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {id:>2} {name}: {msg} [{secs:.1}s]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {msg} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
