//! The quadratic averaging weight `G_q`, the deformed symbol `q̂` on the
//! IR-manifold `Λ_δ = {X + iδ H_G X}` and the canonical map `κ_q` that
//! straightens `Λ_δ` back to real phase space.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{self, QuadratureOptions};
use crate::linalg::{self, CMat, RMat, C64};
use crate::singular::{self, imag_flow_generator};
use crate::symplectic::QuadraticForm;

/// Antiderivative of `δ_0 - 1_{[-1, 0]}` with compact support: `-(t + 1)` on
/// `[-1, 0)` and zero elsewhere.
pub fn kernel_j(t: f64) -> f64 {
    if (-1.0..0.0).contains(&t) {
        -(t + 1.0)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticWeight {
    pub t: f64,
    /// `G_q(X) = <X, G X>`.
    pub g: RMat,
    /// `H_G = -2 J G`.
    pub h_g: RMat,
}

impl QuadraticWeight {
    pub fn dim(&self) -> usize {
        self.g.nrows() / 2
    }

    /// Builds a weight directly from its matrix.
    pub fn from_matrix(t: f64, g: RMat) -> Result<Self> {
        let n = g.nrows();
        if n == 0 || !n.is_multiple_of(2) || g.ncols() != n {
            return Err(Error::InvalidInput("weight matrix must be square of even size".into()));
        }
        let g = linalg::symmetrize(&g);
        let h_g = linalg::symplectic_j(n / 2).dot(&g) * -2.0;
        Ok(Self { t, g, h_g })
    }

    /// Largest `|σ(H_G X, Y) + σ(X, H_G Y)|` over basis pairs.
    pub fn skew_defect(&self) -> f64 {
        let j = linalg::symplectic_j(self.dim());
        let m = self.h_g.t().dot(&j) + j.dot(&self.h_g);
        m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }
}

/// `G = ∫_0^T (1 - t/T) M(t)ᵀ Re A M(t) dt` with `M(t) = exp(2t Im F)`.
pub fn weight_gq(q: &QuadraticForm, t: f64) -> Result<QuadraticWeight> {
    let k = imag_flow_generator(q);
    let g = flow::integrate_flow(
        &k,
        &q.re_matrix(),
        t,
        |s| -kernel_j(-s / t),
        QuadratureOptions::default(),
    )?;
    QuadraticWeight::from_matrix(t, g)
}

/// Relative Frobenius residual of `H_{Im q} G_q = <Re q>_T - Re q`, scaled
/// by `|Re A|` (absolute when `Re A = 0`).
pub fn averaging_identity_defect(q: &QuadraticForm, t: f64) -> Result<f64> {
    let k = imag_flow_generator(q);
    let w = weight_gq(q, t)?;
    let avg = singular::averaged_real_part(q, t, QuadratureOptions::default())?;
    let re_a = q.re_matrix();
    let lhs = k.t().dot(&w.g) + w.g.dot(&k);
    let rhs = &avg.matrix - &re_a;
    let scale = linalg::fro(&re_a);
    let defect = linalg::fro(&(lhs - rhs));
    Ok(if scale > 0.0 { defect / scale } else { defect })
}

fn deformation(w: &QuadraticWeight, delta: f64) -> CMat {
    let n = w.g.nrows();
    let mut m = w.h_g.mapv(|x| C64::new(0.0, delta * x));
    for i in 0..n {
        m[[i, i]] += 1.0;
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeformedSymbol {
    pub delta: f64,
    /// `q̂(X) = <X, B X>`.
    pub b: CMat,
}

impl DeformedSymbol {
    pub fn form(&self) -> QuadraticForm {
        QuadraticForm::from_matrix(self.b.nrows() / 2, self.b.clone()).expect("square even matrix")
    }
}

/// `q̂(X) = q(X + iδ H_G X)`.
pub fn deformed_symbol(q: &QuadraticForm, w: &QuadraticWeight, delta: f64) -> Result<DeformedSymbol> {
    if !(delta >= 0.0) {
        return Err(Error::Domain(format!("delta must be nonnegative, got {delta}")));
    }
    if w.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            got: w.dim(),
        });
    }
    let k = deformation(w, delta);
    let b = linalg::symmetrize_c(&k.t().dot(q.matrix()).dot(&k));
    Ok(DeformedSymbol { delta, b })
}

/// Minimum of `Re q̂` on the unit sphere.
pub fn ellipticity_margin(sym: &DeformedSymbol) -> Result<f64> {
    Ok(linalg::sym_eigvals(&linalg::re(&sym.b))?[0])
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalMap {
    pub delta: f64,
    /// `κ = (I + iδH_G) S`.
    pub matrix: CMat,
    /// `S = (I + δ²H_G²)^{-1/2}`, real.
    pub normalizer: RMat,
}

impl CanonicalMap {
    /// `|κᵀ J κ - J|` (Frobenius).
    pub fn symplectic_defect(&self) -> f64 {
        let j = linalg::to_complex(&linalg::symplectic_j(self.matrix.nrows() / 2));
        linalg::fro_c(&(self.matrix.t().dot(&j).dot(&self.matrix) - j))
    }

    /// `q ∘ κ`.
    pub fn pullback(&self, q: &QuadraticForm) -> Result<QuadraticForm> {
        q.compose(&self.matrix)
    }
}

/// `1 / sqrt(ρ(H_G²))`, infinite when `H_G²` is nilpotent.
pub fn delta_max(w: &QuadraticWeight) -> Result<f64> {
    let h2 = linalg::to_complex(&w.h_g.dot(&w.h_g));
    let rho = linalg::eigvals(&h2)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    Ok(if rho > 0.0 { rho.sqrt().recip() } else { f64::INFINITY })
}

/// Residual of `S T S = I`, relative to `|T|`.
fn inv_sqrt_residual(t: &RMat, s: &RMat) -> f64 {
    let n = t.nrows();
    linalg::fro(&(s.dot(t).dot(s) - RMat::eye(n))) / linalg::fro(t).max(1.0)
}

/// `T^{-1/2}` through an eigendecomposition, falling back to a Denman–Beavers
/// iteration when the eigenvectors are ill conditioned.
fn inv_sqrt(t: &RMat) -> Result<RMat> {
    let n = t.nrows();
    let (vals, vecs) = linalg::eig(&linalg::to_complex(t))?;
    if let Ok(vinv) = linalg::inv_c(&vecs) {
        let mut scaled = vecs.clone();
        for (j, lam) in vals.iter().enumerate() {
            let f = lam.sqrt().inv();
            scaled.column_mut(j).mapv_inplace(|z| z * f);
        }
        let s_c = scaled.dot(&vinv);
        let s = linalg::re(&s_c);
        let imag = linalg::fro(&linalg::im(&s_c));
        if imag <= 1e-10 * linalg::fro(&s) && inv_sqrt_residual(t, &s) <= 1e-12 {
            return Ok(s);
        }
    }
    let mut y = t.clone();
    let mut z = RMat::eye(n);
    for _ in 0..100 {
        let y_next = (&y + &linalg::inv(&z)?) * 0.5;
        let z_next = (&z + &linalg::inv(&y)?) * 0.5;
        let step = linalg::fro(&(&z_next - &z));
        y = y_next;
        z = z_next;
        if step <= 1e-15 * linalg::fro(&z) {
            break;
        }
    }
    if inv_sqrt_residual(t, &z) > 1e-10 {
        return Err(Error::NonConvergence("inverse square root did not converge".into()));
    }
    Ok(z)
}

/// `κ_q = (I + iδH_G)(I + δ²H_G²)^{-1/2}`.
pub fn canonical_normalizer(w: &QuadraticWeight, delta: f64) -> Result<CanonicalMap> {
    if !(delta >= 0.0) {
        return Err(Error::Domain(format!("delta must be nonnegative, got {delta}")));
    }
    let dmax = delta_max(w)?;
    if delta >= dmax {
        return Err(Error::DeltaTooLarge {
            delta,
            delta_max: dmax,
        });
    }
    let n = w.g.nrows();
    let t = RMat::eye(n) + w.h_g.dot(&w.h_g) * (delta * delta);
    let normalizer = inv_sqrt(&t)?;
    let matrix = deformation(w, delta).dot(&linalg::to_complex(&normalizer));
    Ok(CanonicalMap {
        delta,
        matrix,
        normalizer,
    })
}

/// Summary used by the CLI.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeformationReport {
    pub ellipticity_margin: f64,
    pub symplectic_defect: f64,
    pub averaging_defect: f64,
    pub delta_max: f64,
}

pub fn deformation_report(q: &QuadraticForm, t: f64, delta: f64) -> Result<DeformationReport> {
    let w = weight_gq(q, t)?;
    let sym = deformed_symbol(q, &w, delta)?;
    let kappa = canonical_normalizer(&w, delta)?;
    Ok(DeformationReport {
        ellipticity_margin: ellipticity_margin(&sym)?,
        symplectic_defect: kappa.symplectic_defect(),
        averaging_defect: averaging_identity_defect(q, t)?,
        delta_max: delta_max(&w)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;
    use ndarray::array;

    #[test]
    fn kernel_values() {
        assert_eq!(kernel_j(-0.5), -0.5);
        assert_eq!(kernel_j(1.0), 0.0);
        assert_eq!(kernel_j(-2.0), 0.0);
        assert_eq!(kernel_j(-1.0), 0.0);
    }

    #[test]
    fn weight_without_imaginary_part() {
        let q = models::harmonic();
        let w = weight_gq(&q, 1.3).unwrap();
        assert!(linalg::fro(&(&w.g - &(q.re_matrix() * 0.65))) < 1e-13);
        assert!(w.skew_defect() < 1e-14);
        assert!(averaging_identity_defect(&q, 1.3).unwrap() < 1e-14);
    }

    #[test]
    fn kfp_averaging_identity() {
        let q = models::kfp(1.0);
        assert!(averaging_identity_defect(&q, 1.0).unwrap() < 1e-8);
        let w = weight_gq(&q, 1.0).unwrap();
        assert!(w.skew_defect() < 1e-13);
    }

    #[test]
    fn zero_delta_is_identity() {
        let q = models::kfp(1.0);
        let w = weight_gq(&q, 1.0).unwrap();
        let sym = deformed_symbol(&q, &w, 0.0).unwrap();
        assert_eq!(&sym.b, q.matrix());
        let k = canonical_normalizer(&w, 0.0).unwrap();
        assert!(linalg::fro_c(&(k.matrix - linalg::eye_c(4))) < 1e-15);
    }

    #[test]
    fn first_order_expansion_has_slope_two() {
        let q = models::kfp(1.0);
        let w = weight_gq(&q, 1.0).unwrap();
        let avg = singular::averaged_real_part(&q, 1.0, QuadratureOptions::default()).unwrap();
        let deltas = [1e-2, 1e-3, 1e-4];
        let errs: Vec<f64> = deltas
            .iter()
            .map(|&d| {
                let b = linalg::re(&deformed_symbol(&q, &w, d).unwrap().b);
                let lin = q.re_matrix() * (1.0 - d) + &avg.matrix * d;
                linalg::fro(&(b - lin))
            })
            .collect();
        let slope = |i: usize| (errs[i].ln() - errs[i + 1].ln()) / (deltas[i].ln() - deltas[i + 1].ln());
        assert!((slope(0) - 2.0).abs() < 0.05 && (slope(1) - 2.0).abs() < 0.05);
    }

    #[test]
    fn ellipticity_margins() {
        let h = models::harmonic();
        let w = weight_gq(&h, 1.0).unwrap();
        let m = ellipticity_margin(&deformed_symbol(&h, &w, 0.0).unwrap()).unwrap();
        assert!((m - 1.0).abs() < 1e-15);

        let q = models::kfp(1.0);
        let w = weight_gq(&q, 1.0).unwrap();
        let m0 = ellipticity_margin(&deformed_symbol(&q, &w, 0.0).unwrap()).unwrap();
        assert!(m0.abs() < 1e-14);
        let margins: Vec<f64> = [0.01, 0.02, 0.05, 0.1, 0.2]
            .iter()
            .map(|&d| ellipticity_margin(&deformed_symbol(&q, &w, d).unwrap()).unwrap())
            .collect();
        assert!(margins.iter().all(|&m| m > 0.0), "{margins:?}");
        // Linear for small delta: doubling delta roughly doubles the margin.
        assert!((margins[1] / margins[0] - 2.0).abs() < 0.1);
    }

    #[test]
    fn harmonic_weight_closed_form() {
        for delta in [0.1, 0.3, 0.45] {
            let w = QuadraticWeight::from_matrix(1.0, RMat::eye(2)).unwrap();
            let k = canonical_normalizer(&w, delta).unwrap();
            let j = linalg::to_complex(&linalg::symplectic_j(1));
            let scale = (1.0 - 4.0 * delta * delta).sqrt().recip();
            let want = (linalg::eye_c(2) - j.mapv(|z| z * C64::new(0.0, 2.0 * delta)))
                .mapv(|z| z * scale);
            assert!(linalg::fro_c(&(&k.matrix - &want)) < 1e-13);
            assert!(k.symplectic_defect() < 1e-13);
        }
        let w = QuadraticWeight::from_matrix(1.0, RMat::eye(2)).unwrap();
        assert!((delta_max(&w).unwrap() - 0.5).abs() < 1e-14);
        assert!(matches!(
            canonical_normalizer(&w, 0.5),
            Err(Error::DeltaTooLarge { .. })
        ));
    }

    #[test]
    fn kfp_normalizer_preserves_spectrum() {
        let q = models::kfp(1.0);
        let w = weight_gq(&q, 1.0).unwrap();
        assert!(delta_max(&w).unwrap() > 0.05);
        let k = canonical_normalizer(&w, 0.05).unwrap();
        assert!(k.symplectic_defect() < 1e-10);
        let pulled = k.pullback(&q).unwrap();
        let a = linalg::eigvals(q.hamilton_map().matrix()).unwrap();
        let b = linalg::eigvals(pulled.hamilton_map().matrix()).unwrap();
        assert!(linalg::multiset_distance(&a, &b) < 1e-8);
    }

    #[test]
    fn nilpotent_weight_has_no_delta_bound() {
        // G = x^2 gives H_G nilpotent, so T = I and delta_max is infinite.
        let w = QuadraticWeight::from_matrix(1.0, array![[1.0, 0.0], [0.0, 0.0]]).unwrap();
        assert!(delta_max(&w).unwrap().is_infinite());
        let k = canonical_normalizer(&w, 3.0).unwrap();
        assert!(linalg::fro(&(&k.normalizer - &RMat::eye(2))) < 1e-12);
        assert!(k.symplectic_defect() < 1e-12);
    }

    #[test]
    fn denman_beavers_handles_defective_input() {
        let t = array![[1.0, 1.0], [0.0, 1.0]];
        let s = inv_sqrt(&t).unwrap();
        assert!(inv_sqrt_residual(&t, &s) < 1e-12);
    }
}
