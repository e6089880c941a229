use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{label_by_imag, lambdas_at, quadratic_roots};
use crate::error::{Error, Result};
use crate::model::FlockParams;

/// Root pairs of `nu^2 - lambda_v(phi) nu - lambda_x(phi) = 0` on a uniform
/// grid over `[0, 2 pi]`, both endpoints included. The pair order is tracked
/// by continuity along the grid so each component traces a connected branch.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigencurve {
    pub phi: Vec<f64>,
    pub roots: Vec<(Complex64, Complex64)>,
}

impl Eigencurve {
    pub fn points(&self) -> Vec<Complex64> {
        self.roots.iter().flat_map(|&(a, b)| [a, b]).collect()
    }
}

pub fn eigencurve(params: &FlockParams, n_phi: usize) -> Result<Eigencurve> {
    if n_phi < 16 {
        return Err(Error::InvalidArgument(format!("n_phi = {n_phi} is below 16")));
    }
    let p = params.validate()?;
    let step = 2.0 * PI / (n_phi - 1) as f64;
    let phi: Vec<f64> = (0..n_phi).map(|i| i as f64 * step).collect();
    let raw: Vec<(Complex64, Complex64)> = phi
        .par_iter()
        .map(|&f| {
            let (lx, lv) = lambdas_at(&p, f);
            quadratic_roots(lx, lv)
        })
        .collect();

    let mut roots = Vec::with_capacity(n_phi);
    roots.push(raw[0]);
    for (i, &(r1, r2)) in raw.iter().enumerate().skip(1) {
        let prev = roots[i - 1].0;
        let pair = if i == 1 {
            label_by_imag(r1, r2).unwrap_or((r1, r2))
        } else if (r1 - prev).norm() <= (r2 - prev).norm() {
            (r1, r2)
        } else {
            (r2, r1)
        };
        roots.push(pair);
    }
    Ok(Eigencurve { phi, roots })
}

/// `max_{a in A} min_{b in B} |a - b|`.
pub fn directed_hausdorff(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(a.par_iter()
        .map(|pa| {
            b.iter()
                .map(|pb| (pa - pb).norm_sqr())
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
        .sqrt())
}

/// Symmetric Hausdorff distance between finite subsets of the complex plane.
pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}

/// Largest pairwise distance within a point set.
pub fn diameter(points: &[Complex64]) -> f64 {
    points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            points[i + 1..]
                .iter()
                .map(|q| (p - q).norm_sqr())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
        .sqrt()
}
