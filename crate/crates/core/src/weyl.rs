//! Weyl quantization of quadratic symbols on a truncated Hermite basis.
//!
//! On `e_k`, the tensor Hermite functions scaled to `h`, each `x_j` and
//! `hD_j` moves the degree by one:
//!
//! ```text
//! x_j e_k  = sqrt(h/2) ( sqrt(k_j) e_{k-1_j} + sqrt(k_j+1) e_{k+1_j} )
//! hD_j e_k = i sqrt(h/2) ( sqrt(k_j+1) e_{k+1_j} - sqrt(k_j) e_{k-1_j} )
//! ```
//!
//! so `q^w = Σ A_ij X_i X_j` has bandwidth two in total degree. The matrix
//! stored here is the compression `P q^w P` onto degrees `|k| <= N`, computed
//! through intermediate states of degree `N + 1`.

use std::collections::HashMap;

use ndarray::Array1;
use ndarray_linalg::{Factorize, Solve};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};
use crate::symplectic::QuadraticForm;

/// Basis size up to which `σ_min` comes from a full SVD.
pub const SVD_SWITCHOVER: usize = 2000;

/// Relative size of `σ_min` below which `z` is treated as an eigenvalue.
pub const INFINITY_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct HermiteTruncation {
    d: usize,
    n_max: u32,
    h: f64,
    basis: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

fn compositions(d: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() + 1 == d {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first);
        compositions(d, total - first, prefix, out);
        prefix.pop();
    }
}

impl HermiteTruncation {
    pub fn new(d: usize, n_max: u32, h: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Domain(format!("h must be positive, got {h}")));
        }
        let mut basis = Vec::new();
        for total in 0..=n_max {
            compositions(d, total, &mut Vec::with_capacity(d), &mut basis);
        }
        let index = basis.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        Ok(Self {
            d,
            n_max,
            h,
            basis,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn size(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn index_of(&self, k: &[u32]) -> Option<usize> {
        self.index.get(k).copied()
    }

    /// `h (N + d)`, the level below which truncated eigenvalues are trusted.
    pub fn energy_cutoff(&self) -> f64 {
        self.h * (self.n_max as f64 + self.d as f64)
    }

    pub fn with_n(&self, n_max: u32) -> Result<Self> {
        Self::new(self.d, n_max, self.h)
    }
}

/// `X_j e_k` at `h = 1` for the phase-space coordinate `j` (positions first).
fn ladder(d: usize, k: &[u32], j: usize) -> Vec<(Vec<u32>, C64)> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (axis, momentum) = if j < d { (j, false) } else { (j - d, true) };
    let kj = k[axis] as f64;
    let mut out = Vec::with_capacity(2);
    if k[axis] > 0 {
        let mut down = k.to_vec();
        down[axis] -= 1;
        let c = if momentum { C64::new(0.0, -s * kj.sqrt()) } else { C64::new(s * kj.sqrt(), 0.0) };
        out.push((down, c));
    }
    let mut up = k.to_vec();
    up[axis] += 1;
    let c = if momentum {
        C64::new(0.0, s * (kj + 1.0).sqrt())
    } else {
        C64::new(s * (kj + 1.0).sqrt(), 0.0)
    };
    out.push((up, c));
    out
}

#[derive(Debug, Clone)]
pub struct TruncatedWeylOperator {
    pub trunc: HermiteTruncation,
    pub m: CMat,
}

impl TruncatedWeylOperator {
    pub fn size(&self) -> usize {
        self.m.nrows()
    }

    pub fn norm(&self) -> f64 {
        linalg::fro_c(&self.m)
    }

    pub fn hermitian_defect(&self) -> f64 {
        linalg::fro_c(&(&self.m - &self.m.t().mapv(|z| z.conj())))
    }
}

pub fn quantize_quadratic(q: &QuadraticForm, trunc: &HermiteTruncation) -> Result<TruncatedWeylOperator> {
    let d = trunc.dim();
    if q.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: q.dim(),
        });
    }
    let a = q.matrix();
    let n = trunc.size();
    let mut m = CMat::zeros((n, n));
    let pairs: Vec<(usize, usize, C64)> = (0..2 * d)
        .flat_map(|i| (0..2 * d).map(move |j| (i, j)))
        .filter_map(|(i, j)| {
            let c = a[[i, j]];
            (c != C64::new(0.0, 0.0)).then_some((i, j, c))
        })
        .collect();
    for (col, k) in trunc.basis.iter().enumerate() {
        let first: Vec<Vec<(Vec<u32>, C64)>> = (0..2 * d).map(|j| ladder(d, k, j)).collect();
        for &(i, j, aij) in &pairs {
            for (mid, c1) in &first[j] {
                for (end, c2) in ladder(d, mid, i) {
                    if let Some(row) = trunc.index_of(&end) {
                        m[[row, col]] += aij * c1 * c2 * trunc.h;
                    }
                }
            }
        }
    }
    Ok(TruncatedWeylOperator {
        trunc: trunc.clone(),
        m,
    })
}

/// The `count` eigenvalues of smallest modulus, ascending in modulus.
pub fn spectrum_truncated(op: &TruncatedWeylOperator, count: usize) -> Result<Vec<C64>> {
    if count > op.size() {
        return Err(Error::InvalidInput(format!(
            "requested {count} eigenvalues from a basis of size {}",
            op.size()
        )));
    }
    let mut ev = linalg::eigvals(&op.m)?;
    ev.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.im.total_cmp(&b.im)));
    ev.truncate(count);
    Ok(ev)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum ResolventNorm {
    Finite(f64),
    Infinite,
}

impl ResolventNorm {
    pub fn value(&self) -> f64 {
        match self {
            ResolventNorm::Finite(v) => *v,
            ResolventNorm::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ResolventNorm::Finite(_))
    }

    pub fn log10(&self) -> f64 {
        self.value().log10()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ResolventOptions {
    /// Full SVD below this basis size, inverse iteration from it on.
    pub svd_switchover: usize,
}

impl Default for ResolventOptions {
    fn default() -> Self {
        Self {
            svd_switchover: SVD_SWITCHOVER,
        }
    }
}

fn shifted(m: &CMat, z: C64) -> CMat {
    let mut s = m.clone();
    for i in 0..s.nrows() {
        s[[i, i]] -= z;
    }
    s
}

/// `σ_max(A^{-1})` by power iteration on `A^{-H} A^{-1}` with one LU
/// factorisation; `None` when `A` is exactly singular.
fn inverse_norm_by_iteration(a: &CMat) -> Result<Option<f64>> {
    let n = a.nrows();
    let lu = match a.factorize() {
        Ok(lu) => lu,
        Err(_) => return Ok(None),
    };
    // A deterministic start with components in every direction.
    let mut v: Array1<C64> = (0..n)
        .map(|i| C64::new(1.0 + (i as f64 * 0.618).fract(), (i as f64 * 0.414).fract()))
        .collect();
    let nv = linalg::vec_norm_c(v.as_slice().expect("contiguous"));
    v.mapv_inplace(|z| z / nv);
    let mut est = 0.0f64;
    for _ in 0..500 {
        let w = lu.solve(&v).map_err(linalg::linalg_err)?;
        let u = lu.solve_h(&w).map_err(linalg::linalg_err)?;
        let nu = linalg::vec_norm_c(u.as_slice().expect("contiguous"));
        if !nu.is_finite() {
            return Ok(None);
        }
        let next = nu.sqrt();
        v = u.mapv(|z| z / nu);
        if (next - est).abs() <= 1e-12 * next {
            return Ok(Some(next));
        }
        est = next;
    }
    Err(Error::NonConvergence("inverse iteration for the smallest singular value stalled".into()))
}

pub fn resolvent_norm(op: &TruncatedWeylOperator, z: C64) -> Result<ResolventNorm> {
    resolvent_norm_with(op, z, ResolventOptions::default())
}

/// `1 / σ_min(M - z)`.
pub fn resolvent_norm_with(op: &TruncatedWeylOperator, z: C64, opts: ResolventOptions) -> Result<ResolventNorm> {
    let a = shifted(&op.m, z);
    let scale = op.norm().max(f64::MIN_POSITIVE);
    let smin = if op.size() < opts.svd_switchover {
        linalg::singular_values_c(&a)?
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    } else {
        match inverse_norm_by_iteration(&a)? {
            Some(inv) => 1.0 / inv,
            None => 0.0,
        }
    };
    Ok(if smin < INFINITY_THRESHOLD * scale {
        ResolventNorm::Infinite
    } else {
        ResolventNorm::Finite(1.0 / smin)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub re: f64,
    pub im: f64,
    /// `+inf` on the spectrum.
    pub log10norm: f64,
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `log10 |(M - z)^{-1}|` on an `nx × ny` grid, row-major with the imaginary
/// part as the slow index. Rows are evaluated in parallel.
pub fn pseudospectrum_grid(
    op: &TruncatedWeylOperator,
    window: Window,
    nx: usize,
    ny: usize,
    opts: ResolventOptions,
) -> Result<Vec<GridPoint>> {
    let xs = axis(window.re_min, window.re_max, nx);
    let ys = axis(window.im_min, window.im_max, ny);
    let rows: Vec<Result<Vec<GridPoint>>> = ys
        .par_iter()
        .map(|&y| {
            xs.iter()
                .map(|&x| {
                    let r = resolvent_norm_with(op, C64::new(x, y), opts)?;
                    Ok(GridPoint {
                        re: x,
                        im: y,
                        log10norm: r.log10(),
                    })
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for row in rows {
        out.extend(row?);
    }
    Ok(out)
}

/// Largest relative deviation between the lowest quarter of the truncated
/// spectrum at `h` and `(h / h2)` times the one at `h2`.
pub fn scaling_check(q: &QuadraticForm, n_max: u32, h: f64, h2: f64) -> Result<f64> {
    scaling_check_fraction(q, n_max, h, h2, 0.25)
}

pub fn scaling_check_fraction(q: &QuadraticForm, n_max: u32, h: f64, h2: f64, fraction: f64) -> Result<f64> {
    if !(h > 0.0 && h2 > 0.0) {
        return Err(Error::Domain("h and h2 must be positive".into()));
    }
    let t1 = HermiteTruncation::new(q.dim(), n_max, h)?;
    let t2 = HermiteTruncation::new(q.dim(), n_max, h2)?;
    let count = ((t1.size() as f64 * fraction).ceil() as usize).max(1);
    let s1 = spectrum_truncated(&quantize_quadratic(q, &t1)?, count)?;
    let s2: Vec<C64> = spectrum_truncated(&quantize_quadratic(q, &t2)?, count)?
        .into_iter()
        .map(|z| z * (h / h2))
        .collect();
    let scale = s1.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    Ok(linalg::multiset_distance(&s1, &s2) / scale)
}
