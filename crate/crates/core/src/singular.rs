//! Singular space of a quadratic form and the averaged real part along the
//! flow of the imaginary part.
//!
//! For `Re q >= 0` the singular space is
//! `S = ∩_k ker[Re F (Im F)^k] ∩ R^{2d}`, `k = 0..2d-1`. It is trivial exactly
//! when the time average of `Re q` along `exp(t H_{Im q})` is positive
//! definite.

use ndarray::{Array1, Axis};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{self, QuadratureOptions};
use crate::linalg::{self, RMat};
use crate::symplectic::{HamiltonMap, QuadraticForm};

/// Relative singular-value threshold used to decide kernel membership.
pub const DEFAULT_KERNEL_TOL: f64 = 1e-10;
/// Relative threshold above which an averaged form counts as positive.
pub const POSITIVITY_TOL: f64 = 1e-9;

/// A real subspace of `R^{2d}` with an orthonormal basis.
#[derive(Debug, Clone, Serialize)]
pub struct RealSubspace {
    ambient: usize,
    basis: Vec<Vec<f64>>,
    tolerance: f64,
}

impl RealSubspace {
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Distance from `v` to the subspace, relative to `|v|`.
    pub fn relative_distance(&self, v: &[f64]) -> f64 {
        let v = Array1::from(v.to_vec());
        let nv = v.dot(&v).sqrt();
        if nv == 0.0 {
            return 0.0;
        }
        let mut r = v.clone();
        for b in &self.basis {
            let b = Array1::from(b.clone());
            let c = b.dot(&v);
            r = r - &b * c;
        }
        r.dot(&r).sqrt() / nv
    }
}

/// Normalised stacked matrix `[Re F; Re F·Im F; ...; Re F·(Im F)^{2d-1}] / |F|^{k+1}`.
fn krylov_stack(f: &HamiltonMap) -> (RMat, f64) {
    let n = 2 * f.dim();
    let scale = f.norm();
    let mut stack = RMat::zeros((n * n, n));
    if scale == 0.0 {
        return (stack, 0.0);
    }
    let re = f.re() / scale;
    let im = f.im() / scale;
    let mut block = re.clone();
    for k in 0..n {
        stack
            .slice_mut(ndarray::s![k * n..(k + 1) * n, ..])
            .assign(&block);
        block = block.dot(&im);
    }
    (stack, scale)
}

/// Real kernel of the stacked Krylov matrix, by singular-value thresholding
/// relative to the largest singular value.
pub fn singular_space(f: &HamiltonMap, tolerance: f64) -> Result<RealSubspace> {
    let n = 2 * f.dim();
    let (stack, scale) = krylov_stack(f);
    if scale == 0.0 {
        let basis = (0..n)
            .map(|k| (0..n).map(|j| if j == k { 1.0 } else { 0.0 }).collect())
            .collect();
        return Ok(RealSubspace {
            ambient: n,
            basis,
            tolerance,
        });
    }
    let (s, vt) = linalg::svd_right(&stack)?;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let rank = s.iter().filter(|&&x| x > tolerance * smax).count();
    let basis = vt
        .axis_iter(Axis(0))
        .skip(rank)
        .map(|row| row.to_vec())
        .collect();
    Ok(RealSubspace {
        ambient: n,
        basis,
        tolerance,
    })
}

/// `<Re q>_{Im q, T}` as a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct AveragedForm {
    pub t: f64,
    pub matrix: RMat,
}

impl AveragedForm {
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(linalg::sym_eigvals(&self.matrix)?[0])
    }
}

/// Generator of the flow of `H_{Im q}`, i.e. `2 Im F`.
pub(crate) fn imag_flow_generator(q: &QuadraticForm) -> RMat {
    q.hamilton_map().im() * 2.0
}

pub fn averaged_real_part(
    q: &QuadraticForm,
    t: f64,
    opts: QuadratureOptions,
) -> Result<AveragedForm> {
    let k = imag_flow_generator(q);
    let matrix = flow::integrate_flow(&k, &q.re_matrix(), t, |_| 1.0 / t, opts)?;
    Ok(AveragedForm { t, matrix })
}

#[derive(Debug, Clone, Serialize)]
pub struct PositivityReport {
    pub s_dim: usize,
    pub min_eigenvalue: f64,
    /// `POSITIVITY_TOL * |A|`.
    pub threshold: f64,
    pub consistent: bool,
}

/// Checks that `S = {0}` holds exactly when the averaged real part is
/// positive definite.
pub fn positivity_equivalence_check(q: &QuadraticForm, t: f64) -> Result<PositivityReport> {
    let re_min = linalg::sym_eigvals(&q.re_matrix())?[0];
    if re_min < -POSITIVITY_TOL * q.norm() {
        return Err(Error::PreconditionViolated(format!(
            "Re q is not positive semidefinite (min eigenvalue {re_min:.3e})"
        )));
    }
    let s = singular_space(&q.hamilton_map(), DEFAULT_KERNEL_TOL)?;
    let avg = averaged_real_part(q, t, QuadratureOptions::default())?;
    let min_eigenvalue = avg.min_eigenvalue()?;
    let threshold = POSITIVITY_TOL * q.norm();
    let positive = min_eigenvalue > threshold;
    Ok(PositivityReport {
        s_dim: s.dim(),
        min_eigenvalue,
        threshold,
        consistent: (s.dim() == 0) == positive,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VanishingOrder {
    pub k: usize,
    /// `Re q((Im F)^k X) / (k!)^2`, the coefficient of `t^{2k}` in
    /// `Re q(exp(t Im F) X)`.
    pub coefficient: f64,
}

/// Order of vanishing at `t = 0` of `t ↦ Re q(exp(t Im F) X)`.
pub fn flow_vanishing_order(q: &QuadraticForm, x: &[f64]) -> Result<VanishingOrder> {
    let n = 2 * q.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let f = q.hamilton_map();
    let (re_f, im_f) = (f.re(), f.im());
    let re_a = q.re_matrix();
    let fnorm = f.norm();
    let mut y = Array1::from(x.to_vec());
    let xnorm = y.dot(&y).sqrt();
    if xnorm == 0.0 {
        return Err(Error::InvalidInput("X must be nonzero".into()));
    }
    let mut factorial = 1.0;
    for k in 0..n {
        if k > 0 {
            factorial *= k as f64;
        }
        let r = re_f.dot(&y);
        if r.dot(&r).sqrt() > DEFAULT_KERNEL_TOL * fnorm.powi(k as i32 + 1) * xnorm {
            let coefficient = y.dot(&re_a.dot(&y)) / (factorial * factorial);
            return Ok(VanishingOrder { k, coefficient });
        }
        y = im_f.dot(&y);
    }
    Err(Error::InSingularSpace)
}

/// Matrices of the forms `H_{Im q}^k Re q`, `k = 0..=kmax`.
pub fn iterated_flow_derivatives(q: &QuadraticForm, kmax: usize) -> Vec<RMat> {
    let k = imag_flow_generator(q);
    let mut out = Vec::with_capacity(kmax + 1);
    let mut m = q.re_matrix();
    for _ in 0..=kmax {
        let next = k.t().dot(&m) + m.dot(&k);
        out.push(m);
        m = next;
    }
    out
}
