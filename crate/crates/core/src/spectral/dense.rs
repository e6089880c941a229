//! Dense nonsymmetric eigensolve of the full `2N x 2N` system, used as an
//! independent check on the closed form.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::DenseSystem;

pub const MAX_DENSE_N: usize = 2048;

/// All `2N` eigenvalues of `M`.
///
/// The coherent subspace `span{(1, 0), (0, 1)}` is invariant and carries a
/// 2x2 Jordan block at 0. A backward-stable eigensolver only resolves such a
/// block to `O(sqrt(eps))`, so it is split off first with an exact orthogonal
/// similarity: a Householder reflector `H` with `H e_1 = 1/sqrt(N)` maps
/// `M` to `diag(H, H)^T M diag(H, H)`, whose first column in each block is
/// zero because the Laplacian rows sum to zero. The remaining
/// `(2N - 2)`-dimensional block is handed to the general solver and the
/// double zero is reported exactly.
pub fn dense_spectrum(sys: &DenseSystem) -> Result<Vec<Complex64>> {
    let n = sys.n;
    if n > MAX_DENSE_N {
        return Err(Error::TooLarge { n, max: MAX_DENSE_N });
    }
    let (g_x, g_v) = (sys.g_x, sys.g_v);
    let ax = reflect(&sys.l_x);
    let av = reflect(&sys.l_v);
    let k = n - 1;
    let mut reduced = DMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        reduced[(i, k + i)] = 1.0;
        for j in 0..k {
            reduced[(k + i, j)] = g_x * ax[(i + 1, j + 1)];
            reduced[(k + i, k + j)] = g_v * av[(i + 1, j + 1)];
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); 2];
    out.extend(reduced.complex_eigenvalues().iter().copied());
    Ok(out)
}

/// Eigenvalues of `M` straight from the general solver, without splitting
/// off the coherent block.
pub fn dense_spectrum_raw(sys: &DenseSystem) -> Result<Vec<Complex64>> {
    if sys.n > MAX_DENSE_N {
        return Err(Error::TooLarge { n: sys.n, max: MAX_DENSE_N });
    }
    Ok(sys.m.clone().complex_eigenvalues().iter().copied().collect())
}

/// `H L H` for the Householder reflector swapping `e_1` and `1/sqrt(N)`.
fn reflect(l: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let u = 1.0 / (n as f64).sqrt();
    let mut v = DVector::from_element(n, -u);
    v[0] += 1.0;
    let beta = 2.0 / v.norm_squared();
    // (I - beta v v^T) L (I - beta v v^T) via two rank-one updates
    let vt_l = v.transpose() * l;
    let left = l - (&v * vt_l) * beta;
    let left_v = &left * &v;
    left - (left_v * v.transpose()) * beta
}

/// Smallest achievable maximum distance over perfect matchings between two
/// equally sized multisets (bottleneck assignment). Returns infinity when the
/// sizes differ.
pub fn matched_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    if a.is_empty() {
        return 0.0;
    }
    let n = a.len();
    let dist: Vec<f64> = a
        .iter()
        .flat_map(|p| b.iter().map(move |q| (p - q).norm()))
        .collect();
    let mut levels = dist.clone();
    levels.sort_by(f64::total_cmp);
    levels.dedup();

    let (mut lo, mut hi) = (0, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if has_perfect_matching(n, &dist, levels[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    levels[lo]
}

fn has_perfect_matching(n: usize, dist: &[f64], threshold: f64) -> bool {
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| dist[i * n + j] <= threshold).collect())
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, &adj, &mut owner, &mut seen) {
            return false;
        }
    }
    true
}

fn augment(i: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &j in &adj[i] {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        let free = match owner[j] {
            None => true,
            Some(other) => augment(other, adj, owner, seen),
        };
        if free {
            owner[j] = Some(i);
            return true;
        }
    }
    false
}
