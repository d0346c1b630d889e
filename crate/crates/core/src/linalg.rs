//! Dense linear algebra helpers shared by the symbol modules.
//!
//! Everything here works on `ndarray` matrices. Decompositions go through
//! LAPACK (`ndarray-linalg`); the matrix exponential and the Gauss–Legendre
//! rule are implemented locally.

use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use ndarray_linalg::{Eig, Eigh, Inverse, Solve, SVD, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = Array2<C64>;
pub type RMat = Array2<f64>;

pub const I: C64 = C64::new(0.0, 1.0);

/// The standard symplectic matrix `[[0, -I], [I, 0]]` on `R^{2d}`.
pub fn symplectic_j(d: usize) -> RMat {
    let mut j = RMat::zeros((2 * d, 2 * d));
    for k in 0..d {
        j[[k, d + k]] = -1.0;
        j[[d + k, k]] = 1.0;
    }
    j
}

pub fn to_complex(m: &RMat) -> CMat {
    m.mapv(|x| C64::new(x, 0.0))
}

pub fn re(m: &CMat) -> RMat {
    m.mapv(|z| z.re)
}

pub fn im(m: &CMat) -> RMat {
    m.mapv(|z| z.im)
}

pub fn fro(m: &RMat) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn fro_c(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm_c(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `(M + Mᵀ)/2`, no conjugation.
pub fn symmetrize_c(m: &CMat) -> CMat {
    (m + &m.t()).mapv(|z| z * 0.5)
}

pub fn symmetrize(m: &RMat) -> RMat {
    (m + &m.t()) * 0.5
}

pub fn eye_c(n: usize) -> CMat {
    CMat::eye(n)
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn sym_eigvals(m: &RMat) -> Result<Array1<f64>> {
    let (w, _) = symmetrize(m).eigh(UPLO::Lower).map_err(linalg_err)?;
    Ok(w)
}

/// Eigen-decomposition of a real symmetric matrix, ascending.
pub fn sym_eig(m: &RMat) -> Result<(Array1<f64>, RMat)> {
    symmetrize(m).eigh(UPLO::Lower).map_err(linalg_err)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn herm_eigvals(m: &CMat) -> Result<Array1<f64>> {
    let h = (m + &m.t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
    let (w, _) = h.eigh(UPLO::Lower).map_err(linalg_err)?;
    Ok(w)
}

pub fn eigvals(m: &CMat) -> Result<Vec<C64>> {
    let (w, _) = m.eig().map_err(linalg_err)?;
    Ok(w.to_vec())
}

pub fn eig(m: &CMat) -> Result<(Vec<C64>, CMat)> {
    let (w, v) = m.eig().map_err(linalg_err)?;
    Ok((w.to_vec(), v))
}

pub fn singular_values_c(m: &CMat) -> Result<Array1<f64>> {
    let (_, s, _) = m.svd(false, false).map_err(linalg_err)?;
    Ok(s)
}

/// Singular values and right singular vectors (rows of `Vᵀ`) of a real matrix.
pub fn svd_right(m: &RMat) -> Result<(Array1<f64>, RMat)> {
    let (_, s, vt) = m.svd(false, true).map_err(linalg_err)?;
    Ok((s, vt.expect("requested right singular vectors")))
}

pub fn inv_c(m: &CMat) -> Result<CMat> {
    m.inv().map_err(linalg_err)
}

pub fn inv(m: &RMat) -> Result<RMat> {
    m.inv().map_err(linalg_err)
}

pub fn solve(m: &RMat, rhs: &RMat) -> Result<RMat> {
    let mut out = RMat::zeros(rhs.raw_dim());
    for (k, col) in rhs.axis_iter(Axis(1)).enumerate() {
        let x = m.solve(&col.to_owned()).map_err(linalg_err)?;
        out.column_mut(k).assign(&x);
    }
    Ok(out)
}

pub(crate) fn linalg_err(e: ndarray_linalg::error::LinalgError) -> Error {
    Error::Linalg(e.to_string())
}

fn norm1(m: &RMat) -> f64 {
    m.axis_iter(Axis(1))
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with the degree-13 Padé
/// approximant.
pub fn expm(a: &RMat) -> Result<RMat> {
    let n = a.nrows();
    let nrm = norm1(a);
    let squarings = if nrm > THETA13 {
        (nrm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a / 2f64.powi(squarings);
    let id = RMat::eye(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let b = &PADE13;
    let u_inner = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let u = a.dot(&(a6.dot(&u_inner) + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1]));
    let v_inner = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = a6.dot(&v_inner) + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    let mut r = solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..squarings {
        r = r.dot(&r);
    }
    Ok(r)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Largest deviation after greedily pairing two multisets of complex numbers.
/// Returns `f64::INFINITY` when the lengths differ.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("lengths match");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

pub fn block(m: ArrayView2<C64>, r: usize, c: usize, d: usize) -> CMat {
    // Built element-wise: `to_owned` on a 1x1 slice can keep zero strides,
    // which LAPACK rejects.
    CMat::from_shape_fn((d, d), |(i, j)| m[[r * d + i, c * d + j]])
}

pub fn from_blocks(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> CMat {
    let n = a.nrows();
    let mut m = CMat::zeros((2 * n, 2 * n));
    m.slice_mut(s![..n, ..n]).assign(a);
    m.slice_mut(s![..n, n..]).assign(b);
    m.slice_mut(s![n.., ..n]).assign(c);
    m.slice_mut(s![n.., n..]).assign(d);
    m
}
