use num_complex::Complex64;
use proptest::prelude::*;

use ringflock::model::{DenseSystem, FlockParams};
use ringflock::spectral::{
    dense_spectrum, dense_spectrum_raw, diameter, eigencurve, hausdorff, lambdas, matched_distance, mode_range,
    nu_exact, ModeIndex, Spectrum,
};
use ringflock::stability::{routh_hurwitz, spectral_verdict, theorem_gate};

fn weights() -> impl Strategy<Value = (f64, f64)> {
    (-1.0..1.0f64, -1.0..1.0f64)
}

fn params(n: usize) -> impl Strategy<Value = FlockParams> {
    (weights(), weights(), -2.0..2.0f64, -2.0..2.0f64).prop_map(move |(x, v, g_x, g_v)| {
        FlockParams::nearest_neighbor(n, g_x, g_v, [x.0, -(x.0 + x.1), x.1], [v.0, -(v.0 + v.1), v.1])
            .validate()
            .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_matches_dense(p in params(12)) {
        let closed = Spectrum::compute(&p).unwrap().eigenvalues();
        let dense = dense_spectrum(&DenseSystem::build(&p).unwrap()).unwrap();
        prop_assert!(matched_distance(&closed, &dense) < 1e-9);
    }

    #[test]
    fn roots_solve_the_mode_quadratic(p in params(17), m in 1i64..=8) {
        let mode = ModeIndex::new(m, 17).unwrap();
        let (lx, lv) = lambdas(&p, mode);
        let s = Spectrum::compute(&p).unwrap();
        let ms = s.mode(m).unwrap();
        for nu in [ms.nu_plus, ms.nu_minus] {
            let res = (nu * nu - lv * nu - lx).norm();
            prop_assert!(res <= 1e-12 * (1.0 + lx.norm() + lv.norm_sqr()));
        }
        // Vieta
        prop_assert!((ms.nu_plus + ms.nu_minus - lv).norm() < 1e-12 * (1.0 + lv.norm()));
    }

    #[test]
    fn spectrum_closed_under_conjugation(p in params(10)) {
        let ev = Spectrum::compute(&p).unwrap().eigenvalues();
        let conj: Vec<Complex64> = ev.iter().map(|z| z.conj()).collect();
        prop_assert!(matched_distance(&ev, &conj) < 1e-12);
    }

    #[test]
    fn routh_hurwitz_tracks_real_parts(p in params(9), m in 1i64..=4) {
        let mode = ModeIndex::new(m, 9).unwrap();
        let s = Spectrum::compute(&p).unwrap();
        let ms = s.mode(m).unwrap();
        let re = ms.nu_plus.re.max(ms.nu_minus.re);
        prop_assume!(re.abs() > 1e-9);
        let rh = routh_hurwitz(&p, mode).unwrap().iter().all(|&c| c);
        prop_assert_eq!(rh, re < 0.0);
    }
}

#[test]
fn raw_solver_smears_the_coherent_block() {
    let p = FlockParams::nearest_neighbor(40, -2.0, -1.0, [-0.5, 1.0, -0.5], [-0.5, 1.0, -0.5]);
    let d = DenseSystem::build(&p).unwrap();
    let deflated = dense_spectrum(&d).unwrap();
    let raw = dense_spectrum_raw(&d).unwrap();
    let closed = Spectrum::compute(&p).unwrap().eigenvalues();
    assert!(matched_distance(&closed, &deflated) < 1e-12);
    assert!(matched_distance(&closed, &raw) < 1e-6);
}

#[test]
fn gate_stable_rings_are_stable_at_every_size() {
    let p = FlockParams::nearest_neighbor(3, -0.7, -0.3, [-0.5, 1.0, -0.5], [-0.9, 1.0, -0.1]);
    assert!(theorem_gate(&p).unwrap());
    for n in [3, 4, 7, 64, 511, 2048] {
        assert!(spectral_verdict(&p, n).unwrap().spectral_stable, "N = {n}");
    }
}

#[test]
fn spectrum_fills_out_the_eigencurve() {
    let p = FlockParams::nearest_neighbor(100, -1.0, -0.8, [-0.5, 1.0, -0.5], [-0.8, 1.0, -0.2]);
    let curve = eigencurve(&p, 10_000).unwrap();
    let (first, last) = (curve.roots[0], *curve.roots.last().unwrap());
    assert!((first.0 - last.0).norm() + (first.1 - last.1).norm() < 1e-12);
    let gamma = curve.points();
    let diam = diameter(&gamma);
    let d: Vec<f64> = [100, 300, 1000]
        .iter()
        .map(|&n| hausdorff(&Spectrum::compute(&p.with_n(n)).unwrap().eigenvalues(), &gamma).unwrap())
        .collect();
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
    assert!(d[2] < 0.05 * diam);
}

#[test]
fn mode_range_covers_every_residue_once() {
    for n in 3..40usize {
        let mut seen: Vec<i64> = mode_range(n).map(|m| m.rem_euclid(n as i64)).collect();
        seen.sort();
        assert_eq!(seen, (0..n as i64).collect::<Vec<_>>());
    }
}

#[test]
fn nu_exact_zero_mode_and_range_errors() {
    let p = FlockParams::nearest_neighbor(6, -1.0, -1.0, [-0.5, 1.0, -0.5], [-0.5, 1.0, -0.5]);
    assert_eq!(nu_exact(&p, ModeIndex::new(0, 6).unwrap()).unwrap(), (Complex64::default(), Complex64::default()));
    assert!(ModeIndex::new(-3, 6).is_err());
}
