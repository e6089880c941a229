//! Flock parameters, their validation and normalization, weight moments, and
//! the dense first-order system matrix.
//!
//! The dynamics are
//!
//! ```text
//! z''_k = g_x * sum_j rho_x[j] z_{k+j} + g_v * sum_j rho_v[j] z'_{k+j}
//! ```
//!
//! on a ring of `n` agents, with `sum_j rho_x[j] = sum_j rho_v[j] = 0`.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// The offset set `{-1, 0, 1}`.
pub const NEAREST_NEIGHBOR: [i64; 3] = [-1, 0, 1];

/// Largest `|sum_j rho[j]|` that is treated as rounding and re-closed.
pub const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FlockParams {
    pub n: usize,
    pub g_x: f64,
    pub g_v: f64,
    offsets: Vec<i64>,
    rho_x: Vec<f64>,
    rho_v: Vec<f64>,
}

impl FlockParams {
    /// Nearest-neighbor parameters; weights are given as `[rho(-1), rho(0), rho(+1)]`.
    pub fn nearest_neighbor(n: usize, g_x: f64, g_v: f64, rho_x: [f64; 3], rho_v: [f64; 3]) -> Self {
        Self {
            n,
            g_x,
            g_v,
            offsets: NEAREST_NEIGHBOR.to_vec(),
            rho_x: rho_x.to_vec(),
            rho_v: rho_v.to_vec(),
        }
    }

    /// General offset set. Offsets are sorted on construction and must be
    /// distinct and contain 0.
    pub fn with_offsets(
        n: usize,
        g_x: f64,
        g_v: f64,
        offsets: &[i64],
        rho_x: &[f64],
        rho_v: &[f64],
    ) -> Result<Self> {
        if rho_x.len() != offsets.len() {
            return Err(Error::LengthMismatch { expected: offsets.len(), got: rho_x.len() });
        }
        if rho_v.len() != offsets.len() {
            return Err(Error::LengthMismatch { expected: offsets.len(), got: rho_v.len() });
        }
        let mut entries: Vec<(i64, f64, f64)> = offsets
            .iter()
            .zip(rho_x.iter().zip(rho_v))
            .map(|(&j, (&x, &v))| (j, x, v))
            .collect();
        entries.sort_by_key(|e| e.0);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument("offsets must be distinct".into()));
        }
        if !entries.iter().any(|e| e.0 == 0) {
            return Err(Error::InvalidArgument("offsets must contain 0".into()));
        }
        Ok(Self {
            n,
            g_x,
            g_v,
            offsets: entries.iter().map(|e| e.0).collect(),
            rho_x: entries.iter().map(|e| e.1).collect(),
            rho_v: entries.iter().map(|e| e.2).collect(),
        })
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn rho_x_weights(&self) -> &[f64] {
        &self.rho_x
    }

    pub fn rho_v_weights(&self) -> &[f64] {
        &self.rho_v
    }

    /// Position weight at offset `j`, zero outside the offset set.
    pub fn rho_x(&self, j: i64) -> f64 {
        lookup(&self.offsets, &self.rho_x, j)
    }

    pub fn rho_v(&self, j: i64) -> f64 {
        lookup(&self.offsets, &self.rho_v, j)
    }

    pub fn is_nearest_neighbor(&self) -> bool {
        self.offsets == NEAREST_NEIGHBOR
    }

    /// Same parameters on a ring of `n` agents.
    pub fn with_n(&self, n: usize) -> Self {
        Self { n, ..self.clone() }
    }

    /// Largest `|j|` in the offset set.
    pub fn reach(&self) -> i64 {
        self.offsets.iter().map(|j| j.abs()).max().unwrap_or(0)
    }

    /// Checks every invariant and returns a copy whose row sums are exactly
    /// zero (near-zero sums are folded into the center weight).
    pub fn validate(&self) -> std::result::Result<FlockParams, ValidationError> {
        let mut violations = Vec::new();
        let min_n = (2 * self.reach() + 1).max(3) as usize;
        if self.n < min_n {
            violations.push(Violation::BadAgentCount { n: self.n, min: min_n });
        }
        for (field, value) in [("g_x", self.g_x), ("g_v", self.g_v)] {
            if !value.is_finite() {
                violations.push(Violation::NonFinite { field });
            }
        }
        let mut out = self.clone();
        let center = self.offsets.iter().position(|&j| j == 0).expect("offset 0 present");
        for (field, weights) in [("rho_x", &mut out.rho_x), ("rho_v", &mut out.rho_v)] {
            if weights.iter().any(|w| !w.is_finite()) {
                violations.push(Violation::NonFinite { field });
                continue;
            }
            let sum: f64 = weights.iter().sum();
            if sum.abs() > ROW_SUM_TOL {
                violations.push(Violation::RowSumViolation { field, sum });
                continue;
            }
            let off_center: f64 = weights
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != center)
                .map(|(_, w)| w)
                .sum();
            weights[center] = -off_center;
        }
        if violations.is_empty() {
            Ok(out)
        } else {
            Err(ValidationError { violations })
        }
    }

    /// Rescales so that `rho_x[0] = rho_v[0] = 1`, keeping every product
    /// `g * rho[j]` fixed.
    pub fn normalize(&self) -> Result<FlockParams> {
        let cx = self.rho_x(0);
        let cv = self.rho_v(0);
        if cx == 0.0 {
            return Err(Error::ZeroCenterWeight("rho_x"));
        }
        if cv == 0.0 {
            return Err(Error::ZeroCenterWeight("rho_v"));
        }
        let center = self.offsets.iter().position(|&j| j == 0).expect("offset 0 present");
        let rescale = |w: &[f64], c: f64| -> Vec<f64> {
            w.iter()
                .enumerate()
                .map(|(i, &r)| if i == center { 1.0 } else { r / c })
                .collect()
        };
        Ok(Self {
            n: self.n,
            g_x: self.g_x * cx,
            g_v: self.g_v * cv,
            offsets: self.offsets.clone(),
            rho_x: rescale(&self.rho_x, cx),
            rho_v: rescale(&self.rho_v, cv),
        })
    }

    /// Whether both center weights equal 1 up to [`ROW_SUM_TOL`].
    pub fn is_normalized(&self) -> bool {
        (self.rho_x(0) - 1.0).abs() <= ROW_SUM_TOL && (self.rho_v(0) - 1.0).abs() <= ROW_SUM_TOL
    }

    /// Weight moments `I_x[l] = g_x sum_j rho_x[j] j^l` (and likewise for
    /// velocity) for `l = 1..=lmax`.
    pub fn moments(&self, lmax: usize) -> Result<Moments> {
        if lmax == 0 {
            return Err(Error::InvalidArgument("lmax must be at least 1".into()));
        }
        let moment = |g: f64, w: &[f64], l: usize| -> f64 {
            g * self
                .offsets
                .iter()
                .zip(w)
                .map(|(&j, &r)| r * (j as f64).powi(l as i32))
                .sum::<f64>()
        };
        Ok(Moments {
            i_x: (1..=lmax).map(|l| moment(self.g_x, &self.rho_x, l)).collect(),
            i_v: (1..=lmax).map(|l| moment(self.g_v, &self.rho_v, l)).collect(),
        })
    }
}

fn lookup(offsets: &[i64], weights: &[f64], j: i64) -> f64 {
    offsets
        .iter()
        .position(|&o| o == j)
        .map_or(0.0, |i| weights[i])
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    RowSumViolation { field: &'static str, sum: f64 },
    BadAgentCount { n: usize, min: usize },
    NonFinite { field: &'static str },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RowSumViolation { field, sum } => {
                write!(f, "{field} weights sum to {sum:e}, expected 0")
            }
            Violation::BadAgentCount { n, min } => write!(f, "agent count {n} is below {min}"),
            Violation::NonFinite { field } => write!(f, "{field} is not finite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationError {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid parameters: ")?;
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationError {}

/// Moments of `g_x rho_x` and `g_v rho_v`, 1-indexed by order.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    i_x: Vec<f64>,
    i_v: Vec<f64>,
}

impl Moments {
    pub fn lmax(&self) -> usize {
        self.i_x.len()
    }

    pub fn x(&self, l: usize) -> f64 {
        self.i_x[l - 1]
    }

    pub fn v(&self, l: usize) -> f64 {
        self.i_v[l - 1]
    }
}

/// The `2N x 2N` matrix `[[0, I], [g_x L_x, g_v L_v]]` and its circulant blocks.
#[derive(Debug, Clone)]
pub struct DenseSystem {
    pub n: usize,
    pub g_x: f64,
    pub g_v: f64,
    pub l_x: DMatrix<f64>,
    pub l_v: DMatrix<f64>,
    pub m: DMatrix<f64>,
}

impl DenseSystem {
    pub fn build(params: &FlockParams) -> Result<Self> {
        let p = params.validate()?;
        let n = p.n;
        let mut l_x = DMatrix::zeros(n, n);
        let mut l_v = DMatrix::zeros(n, n);
        for k in 0..n {
            for (i, &j) in p.offsets.iter().enumerate() {
                let col = (k as i64 + j).rem_euclid(n as i64) as usize;
                l_x[(k, col)] += p.rho_x[i];
                l_v[(k, col)] += p.rho_v[i];
            }
        }
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            m[(k, n + k)] = 1.0;
            for c in 0..n {
                m[(n + k, c)] = p.g_x * l_x[(k, c)];
                m[(n + k, n + c)] = p.g_v * l_v[(k, c)];
            }
        }
        Ok(Self { n, g_x: p.g_x, g_v: p.g_v, l_x, l_v, m })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(n: usize) -> FlockParams {
        FlockParams::nearest_neighbor(n, -2.0, -2.0, [-0.5, 1.0, -0.5], [-0.5, 1.0, -0.5])
    }

    #[test]
    fn validate_accepts_closed_sums() {
        assert!(sym(10).validate().is_ok());
    }

    #[test]
    fn validate_rejects_open_row_sum() {
        let p = FlockParams::nearest_neighbor(10, -1.0, -1.0, [-0.5, 1.0, -0.4], [-0.5, 1.0, -0.5]);
        let err = p.validate().unwrap_err();
        assert_eq!(err.violations.len(), 1);
        match err.violations[0] {
            Violation::RowSumViolation { field, sum } => {
                assert_eq!(field, "rho_x");
                assert!((sum - 0.1).abs() < 1e-12);
            }
            ref v => panic!("unexpected violation {v:?}"),
        }
    }

    #[test]
    fn validate_rejects_two_agents() {
        let err = sym(2).validate().unwrap_err();
        assert_eq!(err.violations, vec![Violation::BadAgentCount { n: 2, min: 3 }]);
    }

    #[test]
    fn validate_reports_every_violation() {
        let p = FlockParams::nearest_neighbor(1, -1.0, f64::NAN, [-0.5, 1.0, -0.4], [0.0, 1.0, 0.0]);
        let err = p.validate().unwrap_err();
        assert_eq!(err.violations.len(), 4);
    }

    #[test]
    fn validate_recloses_tiny_sums() {
        let p = FlockParams::nearest_neighbor(5, -1.0, -1.0, [-0.1, 0.3 + 5e-13, -0.2], [-0.5, 1.0, -0.5]);
        let q = p.validate().unwrap();
        assert_eq!(q.rho_x(0), 0.1 + 0.2);
        assert_eq!(q.rho_x(-1) + q.rho_x(1), -q.rho_x(0));
    }

    #[test]
    fn normalize_examples() {
        let p = FlockParams::nearest_neighbor(8, -1.0, 3.0, [-1.0, 2.0, -1.0], [-2.0, -1.0, 3.0]);
        let q = p.normalize().unwrap();
        assert_eq!(q.g_x, -2.0);
        assert_eq!([q.rho_x(-1), q.rho_x(0), q.rho_x(1)], [-0.5, 1.0, -0.5]);
        assert_eq!(q.g_v, -3.0);
        assert_eq!([q.rho_v(-1), q.rho_v(0), q.rho_v(1)], [2.0, 1.0, -3.0]);
        assert_eq!(sym(8).normalize().unwrap(), sym(8));
    }

    #[test]
    fn normalize_rejects_zero_center() {
        let p = FlockParams::nearest_neighbor(8, -1.0, -1.0, [-1.0, 0.0, 1.0], [-0.5, 1.0, -0.5]);
        assert_eq!(p.normalize(), Err(Error::ZeroCenterWeight("rho_x")));
    }

    #[test]
    fn moment_examples() {
        let p = FlockParams::nearest_neighbor(8, -2.0, -1.0, [-0.5, 1.0, -0.5], [-1.0, 1.0, 0.0]);
        let m = p.moments(5).unwrap();
        assert_eq!(m.x(1), 0.0);
        assert_eq!(m.x(2), 2.0);
        assert_eq!(m.v(1), -1.0);
        for l in [1, 3, 5] {
            assert_eq!(m.x(l), 0.0);
        }
        assert!(p.moments(0).is_err());
    }

    #[test]
    fn dense_three_agents() {
        let d = DenseSystem::build(&sym(3)).unwrap();
        for k in 0..3 {
            for c in 0..3 {
                let expected = if c == k { -2.0 } else { 1.0 };
                assert_eq!(-2.0 * d.l_x[(k, c)], expected);
            }
        }
    }

    #[test]
    fn dense_rows_sum_to_zero_and_coherent_state_is_fixed() {
        let p = FlockParams::nearest_neighbor(7, 1.3, -0.4, [0.2, 0.5, -0.7], [-0.9, 0.1, 0.8]);
        let d = DenseSystem::build(&p).unwrap();
        for k in 0..7 {
            assert!(d.l_x.row(k).sum().abs() < 1e-15);
            assert!(d.l_v.row(k).sum().abs() < 1e-15);
        }
        let mut w = nalgebra::DVector::zeros(14);
        w.rows_mut(0, 7).fill(1.0);
        assert!((&d.m * w).amax() < 1e-15);
    }

    #[test]
    fn wider_offsets_need_more_agents() {
        let p = FlockParams::with_offsets(4, -1.0, -1.0, &[2, 0, -2, 1, -1], &[0.1, -0.4, 0.1, 0.1, 0.1], &[0.0, -0.2, 0.0, 0.1, 0.1])
            .unwrap();
        assert_eq!(p.offsets(), &[-2, -1, 0, 1, 2]);
        assert_eq!(
            p.validate().unwrap_err().violations,
            vec![Violation::BadAgentCount { n: 4, min: 5 }]
        );
        assert!(p.with_n(5).validate().is_ok());
    }
}
