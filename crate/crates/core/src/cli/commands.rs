use std::io::Write;

use super::config::RunConfig;
use super::output::{num, write_atomic, Csv};
use super::{EXIT_INCONCLUSIVE, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE};
use crate::error::Error;
use crate::sim::{impulse_experiment, positions, wavefront_overlay};
use crate::spectral::{diameter, eigencurve, hausdorff, Spectrum};
use crate::stability::{instability_witness, spectral_verdict, theorem_gate, Witness};
use crate::wavefield::{group_velocity, phase_velocities, power_law_coefficients, signal_velocities, wave_sweep};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Model(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(Error::UnstableParams) => EXIT_NEGATIVE,
            CliError::Model(Error::DegenerateBranches { .. }) => EXIT_INCONCLUSIVE,
            _ => EXIT_USAGE,
        }
    }
}

type CmdResult = Result<i32, CliError>;

fn print_witness(out: &mut dyn Write, w: &Witness) -> std::io::Result<()> {
    writeln!(out, "witness_n={}", w.n)?;
    writeln!(out, "witness_m={}", w.m)?;
    writeln!(out, "witness_branch={}", w.branch.as_str())?;
    writeln!(out, "witness_re={}", num(w.nu.re))?;
    writeln!(out, "witness_im={}", num(w.nu.im))
}

pub fn stability(cfg: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let p = cfg.params.build()?;
    let report = spectral_verdict(&p, p.n)?;
    let gate = match theorem_gate(&p) {
        Ok(g) => Some(g),
        Err(Error::NotNearestNeighbor) => None,
        Err(e) => return Err(e.into()),
    };
    writeln!(out, "n={}", p.n)?;
    writeln!(out, "closed_form={}", gate.map_or("undefined".to_string(), |g| g.to_string()))?;
    writeln!(out, "spectral={}", report.spectral_stable)?;
    writeln!(out, "marginal={}", report.marginal)?;
    writeln!(out, "max_re={}", num(report.max_real_part))?;
    writeln!(out, "rh_failures={}", report.rh_failures.len())?;
    if gate == Some(true) {
        return Ok(EXIT_OK);
    }
    let witness = if gate == Some(false) {
        instability_witness(&p, cfg.stability.n_max)?
    } else {
        None
    };
    let witness = witness.or(if report.marginal { None } else { report.witness });
    match witness {
        Some(w) => {
            print_witness(out, &w)?;
            Ok(EXIT_NEGATIVE)
        }
        None => {
            writeln!(out, "verdict=inconclusive")?;
            Ok(EXIT_INCONCLUSIVE)
        }
    }
}

pub fn spectrum(cfg: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let p = cfg.params.build()?;
    let spec = Spectrum::compute(&p)?;
    let mut csv = Csv::new(&[
        "m",
        "re_lambda_x",
        "im_lambda_x",
        "re_lambda_v",
        "im_lambda_v",
        "re_nu_plus",
        "im_nu_plus",
        "re_nu_minus",
        "im_nu_minus",
    ]);
    for s in &spec.modes {
        csv.line([
            s.m.to_string(),
            num(s.lambda_x.re),
            num(s.lambda_x.im),
            num(s.lambda_v.re),
            num(s.lambda_v.im),
            num(s.nu_plus.re),
            num(s.nu_plus.im),
            num(s.nu_minus.re),
            num(s.nu_minus.im),
        ]);
    }
    write_atomic(&cfg.output_dir, "spectrum.csv", csv.as_str())?;

    let curve = eigencurve(&p, cfg.spectrum.n_phi)?;
    let mut csv = Csv::new(&["phi", "re_nu_1", "im_nu_1", "re_nu_2", "im_nu_2"]);
    for (phi, (a, b)) in curve.phi.iter().zip(&curve.roots) {
        csv.line([num(*phi), num(a.re), num(a.im), num(b.re), num(b.im)]);
    }
    write_atomic(&cfg.output_dir, "eigencurve.csv", csv.as_str())?;
    writeln!(out, "modes={}", spec.modes.len())?;
    writeln!(out, "curve_points={}", curve.phi.len())?;

    let gamma = curve.points();
    let diam = diameter(&gamma);
    writeln!(out, "curve_diameter={}", num(diam))?;
    for &n in &cfg.spectrum.hausdorff_ns {
        let ev = Spectrum::compute(&p.with_n(n))?.eigenvalues();
        let d = hausdorff(&ev, &gamma)?;
        writeln!(out, "hausdorff n={n} distance={} relative={}", num(d), num(d / diam))?;
    }
    Ok(EXIT_OK)
}

pub fn velocities(cfg: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let p = cfg.params.build()?.normalize()?;
    let pv = match phase_velocities(&p) {
        Err(Error::UnstableParams) => {
            writeln!(out, "verdict=unstable")?;
            return Ok(EXIT_NEGATIVE);
        }
        other => other?,
    };
    let mut csv = Csv::new(&["m", "c_plus", "c_minus", "re_nu_plus", "re_nu_minus"]);
    for v in &pv.modes {
        csv.line([v.m.to_string(), num(v.c_plus), num(v.c_minus), num(v.re_nu_plus), num(v.re_nu_minus)]);
    }
    write_atomic(&cfg.output_dir, "velocities.csv", csv.as_str())?;
    let sig = signal_velocities(&p)?;
    let (gp, gm) = group_velocity(&p)?;
    writeln!(out, "c_plus={:.6} c_minus={:.6}", sig.c_plus, sig.c_minus)?;
    writeln!(out, "a={}", num(sig.a))?;
    writeln!(out, "group_plus={} group_minus={}", num(gp), num(gm))?;
    Ok(EXIT_OK)
}

pub fn simulate(cfg: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let p = cfg.params.build()?;
    let opts = &cfg.simulate;
    let (traj, report) = match impulse_experiment(&p, &opts.impulse()) {
        Err(Error::UnstableParams) => {
            writeln!(out, "verdict=unstable")?;
            return Ok(EXIT_NEGATIVE);
        }
        other => other?,
    };
    let dir = &cfg.output_dir;

    let mut csv = Csv::new(&["t", "k", "z", "zdot"]);
    for (i, &t) in traj.times.iter().enumerate() {
        for k in 0..p.n {
            csv.line([num(t), k.to_string(), num(traj.z[i][k]), num(traj.zdot[i][k])]);
        }
    }
    write_atomic(dir, "trajectory.csv", csv.as_str())?;

    let arrival = |k: usize| report.arrival_time[k].map_or("NaN".to_string(), num);
    let mut csv = Csv::new(&["k", "arrival_time", "branch"]);
    csv.line(["0".into(), arrival(0), "0".into()]);
    for (k, _, branch) in report.branches() {
        csv.line([k.to_string(), arrival(k), branch.to_string()]);
    }
    write_atomic(dir, "wavefront.csv", csv.as_str())?;

    let x = positions(&traj, opts.delta, opts.v_nominal)?;
    let mut csv = Csv::new(&["t", "k", "x", "speed"]);
    for (i, &t) in traj.times.iter().enumerate() {
        for k in 0..p.n {
            csv.line([num(t), k.to_string(), num(x[i][k]), num(opts.v_nominal + traj.zdot[i][k])]);
        }
    }
    csv.block(&["t", "front_plus_x", "front_minus_x"]);
    let opt = |v: Option<f64>| v.map_or("NaN".to_string(), num);
    for row in wavefront_overlay(&traj, opts.delta, opts.v_nominal, report.predicted_c_plus, report.predicted_c_minus)? {
        csv.line([num(row.t), opt(row.front_plus_x), opt(row.front_minus_x)]);
    }
    write_atomic(dir, "orbits.csv", csv.as_str())?;

    writeln!(out, "predicted_c_plus={} predicted_c_minus={}", num(report.predicted_c_plus), num(report.predicted_c_minus))?;
    writeln!(out, "fitted_c_plus={} fitted_c_minus={}", opt(report.fitted_c_plus), opt(report.fitted_c_minus))?;
    let missing = report.missing();
    if !missing.is_empty() {
        let list: Vec<String> = missing.iter().map(|k| k.to_string()).collect();
        writeln!(out, "no_arrival={}", list.join(","))?;
    }
    if report.fitted_c_plus.is_none() || report.fitted_c_minus.is_none() {
        return Ok(EXIT_INCONCLUSIVE);
    }
    Ok(EXIT_OK)
}

pub fn wave_verify(cfg: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let p = cfg.params.build()?;
    let w = &cfg.wave;
    let wc = w.config();
    let sweep = match wave_sweep(&p, &w.ns, wc, w.samples, |n| {
        Ok(power_law_coefficients(n, w.p, w.amplitude, cfg.seed))
    }) {
        Err(Error::UnstableParams) => {
            writeln!(out, "verdict=unstable")?;
            return Ok(EXIT_NEGATIVE);
        }
        other => other?,
    };
    let mut csv = Csv::new(&["n", "t", "measured_error", "bound_term1", "bound_term2", "bound_term3"]);
    for r in &sweep.reports {
        for s in &r.samples {
            csv.line([
                r.n.to_string(),
                num(s.t),
                num(s.measured_error),
                num(sweep.frozen_d * s.term1_unit),
                num(s.term2),
                num(s.term3),
            ]);
        }
    }
    write_atomic(&cfg.output_dir, "wave_verify.csv", csv.as_str())?;

    for (r, rel) in sweep.reports.iter().zip(sweep.relative_errors()) {
        writeln!(out, "n={} relative_error={} fitted_d={}", r.n, num(rel), num(r.fitted_d))?;
    }
    let monotone = sweep.strictly_decreasing();
    let holds = sweep.bound_holds();
    writeln!(out, "frozen_d={}", num(sweep.frozen_d))?;
    writeln!(out, "monotone={monotone}")?;
    writeln!(out, "bound_holds={holds}")?;
    if !wc.converges() {
        writeln!(out, "warning: alpha={} lies outside the alpha < 1/3 convergence guarantee", w.alpha)?;
        return Ok(EXIT_INCONCLUSIVE);
    }
    Ok(if monotone && holds { EXIT_OK } else { EXIT_NEGATIVE })
}
