//! Quadratic FBI phases `φ(x, y) = ½<x, Ax> + <x, By> + ½<y, Cy>` on
//! `C^d × C^d`, the weight `Φ(x) = sup_y -Im φ(x, y)` they induce, and the
//! correspondence between phases and complex canonical maps with an
//! invertible upper-right block.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RMat, C64};

/// Tolerance on the three block conditions for canonicity.
pub const CANONICITY_TOL: f64 = 1e-9;

fn is_singular(b: &CMat) -> Result<bool> {
    let s = linalg::singular_values_c(b)?;
    let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(smin <= 1e-12 * linalg::fro_c(b))
}

fn asym(m: &CMat) -> f64 {
    linalg::fro_c(&(m - &m.t()))
}

fn check_square(m: &CMat, d: usize, name: &str) -> Result<()> {
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::InvalidPhase(format!("{name} must be {d}x{d}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FbiPhase {
    /// `φ''_xx`.
    pub axx: CMat,
    /// `φ''_xy`.
    pub bxy: CMat,
    /// `φ''_yy`.
    pub cyy: CMat,
}

impl FbiPhase {
    pub fn new(axx: CMat, bxy: CMat, cyy: CMat) -> Result<Self> {
        let d = axx.nrows();
        if d == 0 {
            return Err(Error::InvalidPhase("empty blocks".into()));
        }
        check_square(&axx, d, "phi_xx")?;
        check_square(&bxy, d, "phi_xy")?;
        check_square(&cyy, d, "phi_yy")?;
        for (m, name) in [(&axx, "phi_xx"), (&cyy, "phi_yy")] {
            if asym(m) > 1e-12 * linalg::fro_c(m).max(1.0) {
                return Err(Error::InvalidPhase(format!("{name} is not symmetric")));
            }
        }
        let min_im = linalg::sym_eigvals(&linalg::im(&cyy))?[0];
        if !(min_im > 0.0) {
            return Err(Error::InvalidPhase(format!(
                "Im phi_yy is not positive definite (min eigenvalue {min_im:.3e})"
            )));
        }
        if is_singular(&bxy)? {
            return Err(Error::InvalidPhase("phi_xy is singular".into()));
        }
        Ok(Self {
            axx: linalg::symmetrize_c(&axx),
            bxy,
            cyy: linalg::symmetrize_c(&cyy),
        })
    }

    /// `φ_0(x, y) = (i/2)(x - y)²` in each coordinate.
    pub fn standard(d: usize) -> Self {
        let i = linalg::eye_c(d).mapv(|z| z * linalg::I);
        Self {
            axx: i.clone(),
            bxy: -&i,
            cyy: i,
        }
    }

    pub fn dim(&self) -> usize {
        self.axx.nrows()
    }

    pub fn value(&self, x: &[C64], y: &[C64]) -> C64 {
        let x = ndarray::Array1::from(x.to_vec());
        let y = ndarray::Array1::from(y.to_vec());
        x.dot(&self.axx.dot(&x)) * 0.5 + x.dot(&self.bxy.dot(&y)) + y.dot(&self.cyy.dot(&y)) * 0.5
    }

    /// The maximiser `y_0(x) = -(Im C)^{-1} Im(Bᵗ x)` of `y ↦ -Im φ(x, y)`.
    pub fn critical_point(&self, x: &[C64]) -> Result<Vec<f64>> {
        let x = ndarray::Array1::from(x.to_vec());
        let v = self.bxy.t().dot(&x).mapv(|z| z.im);
        let rhs = v.insert_axis(ndarray::Axis(1));
        let y = linalg::solve(&linalg::im(&self.cyy), &rhs)?;
        Ok(y.column(0).iter().map(|t| -t).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiWeight {
    /// `Φ(x) = <z, P z>` with `z = (Re x, Im x)`.
    pub p: RMat,
    /// `∂̄_x ∂_x Φ`, entry `(j, k)` is `∂²Φ / ∂x̄_j ∂x_k`.
    pub levi: CMat,
}

impl PhiWeight {
    pub fn dim(&self) -> usize {
        self.levi.nrows()
    }

    fn stack(x: &[C64]) -> ndarray::Array1<f64> {
        x.iter().map(|z| z.re).chain(x.iter().map(|z| z.im)).collect()
    }

    pub fn value(&self, x: &[C64]) -> f64 {
        let z = Self::stack(x);
        z.dot(&self.p.dot(&z))
    }

    /// `∂_x Φ = ½(∂_{Re x} - i ∂_{Im x}) Φ`.
    pub fn holomorphic_gradient(&self, x: &[C64]) -> Vec<C64> {
        let d = self.dim();
        let g = self.p.dot(&Self::stack(x)) * 2.0;
        (0..d).map(|k| C64::new(g[k], -g[d + k]) * 0.5).collect()
    }

    /// Real part of the Levi matrix.
    pub fn levi_real(&self) -> RMat {
        linalg::re(&self.levi)
    }

    pub fn levi_eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(linalg::herm_eigvals(&self.levi)?.to_vec())
    }
}

/// `Φ(x) = -½ Im<x, Ax> + ½ <Im(Bᵗx), (Im C)^{-1} Im(Bᵗx)>`.
pub fn phi_weight(phase: &FbiPhase) -> Result<PhiWeight> {
    let d = phase.dim();
    let im_c = linalg::im(&phase.cyy);
    if !(linalg::sym_eigvals(&im_c)?[0] > 0.0) {
        return Err(Error::InvalidPhase("Im phi_yy is not positive definite".into()));
    }
    let w = linalg::inv(&im_c)?;
    let (ar, ai) = (linalg::re(&phase.axx), linalg::im(&phase.axx));
    let (br, bi) = (linalg::re(&phase.bxy), linalg::im(&phase.bxy));

    // Im(Bᵗ x) = L (Re x, Im x).
    let mut l = RMat::zeros((d, 2 * d));
    l.slice_mut(ndarray::s![.., ..d]).assign(&bi.t());
    l.slice_mut(ndarray::s![.., d..]).assign(&br.t());

    let mut p = l.t().dot(&w).dot(&l) * 0.5;
    for j in 0..d {
        for k in 0..d {
            p[[j, k]] -= 0.5 * ai[[j, k]];
            p[[j, d + k]] -= 0.5 * ar[[j, k]];
            p[[d + j, k]] -= 0.5 * ar[[j, k]];
            p[[d + j, d + k]] += 0.5 * ai[[j, k]];
        }
    }
    let p = linalg::symmetrize(&p);

    let mut levi = CMat::zeros((d, d));
    for j in 0..d {
        for k in 0..d {
            levi[[j, k]] = C64::new(
                p[[j, k]] + p[[d + j, d + k]],
                p[[d + j, k]] - p[[j, d + k]],
            ) * 0.5;
        }
    }
    Ok(PhiWeight { p, levi })
}

/// `κ = [[A, B], [C, D]]` acting on `(y, η) ↦ (Ay + Bη, Cy + Dη)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCanonicalMap {
    pub a: CMat,
    pub b: CMat,
    pub c: CMat,
    pub d: CMat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CanonicityConditions {
    /// `|DB^{-1} - (DB^{-1})ᵗ|`.
    pub c1: f64,
    /// `|B^{-1}A - (B^{-1}A)ᵗ|`.
    pub c2: f64,
    /// `|-(B^{-1})ᵗ - (C - DB^{-1}A)|`.
    pub c3: f64,
}

impl CanonicityConditions {
    pub fn max(&self) -> f64 {
        self.c1.max(self.c2).max(self.c3)
    }

    pub fn hold(&self) -> bool {
        self.max() <= CANONICITY_TOL
    }
}

impl BlockCanonicalMap {
    pub fn new(a: CMat, b: CMat, c: CMat, d: CMat) -> Result<Self> {
        let n = a.nrows();
        if n == 0 {
            return Err(Error::InvalidInput("empty blocks".into()));
        }
        for m in [&a, &b, &c, &d] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: m.nrows().max(m.ncols()),
                });
            }
        }
        Ok(Self { a, b, c, d })
    }

    pub fn from_matrix(m: &CMat) -> Result<Self> {
        let n = m.nrows();
        if n == 0 || !n.is_multiple_of(2) || m.ncols() != n {
            return Err(Error::InvalidInput("map must be square of even size".into()));
        }
        let d = n / 2;
        let v = m.view();
        Self::new(
            linalg::block(v, 0, 0, d),
            linalg::block(v, 0, 1, d),
            linalg::block(v, 1, 0, d),
            linalg::block(v, 1, 1, d),
        )
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> CMat {
        linalg::from_blocks(&self.a, &self.b, &self.c, &self.d)
    }

    /// `|κᵀ J κ - J|` (Frobenius).
    pub fn symplectic_defect(&self) -> f64 {
        let k = self.matrix();
        let j = linalg::to_complex(&linalg::symplectic_j(self.dim()));
        linalg::fro_c(&(k.t().dot(&j).dot(&k) - j))
    }

    pub fn apply(&self, y: &[C64], eta: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let y = ndarray::Array1::from(y.to_vec());
        let eta = ndarray::Array1::from(eta.to_vec());
        let x = self.a.dot(&y) + self.b.dot(&eta);
        let xi = self.c.dot(&y) + self.d.dot(&eta);
        (x.to_vec(), xi.to_vec())
    }

    pub fn compose(&self, other: &BlockCanonicalMap) -> Result<BlockCanonicalMap> {
        Self::from_matrix(&self.matrix().dot(&other.matrix()))
    }
}

pub fn canonicity_conditions(map: &BlockCanonicalMap) -> Result<CanonicityConditions> {
    if is_singular(&map.b)? {
        return Err(Error::NoPhase);
    }
    let binv = linalg::inv_c(&map.b)?;
    let dbinv = map.d.dot(&binv);
    let binva = binv.dot(&map.a);
    let c3 = -&binv.t() - (&map.c - &dbinv.dot(&map.a));
    Ok(CanonicityConditions {
        c1: asym(&dbinv),
        c2: asym(&binva),
        c3: linalg::fro_c(&c3),
    })
}

/// `B = -(φ''_xyᵗ)^{-1}`, `A = B φ''_yy`, `D = φ''_xx B`, `C = φ''_xy + D B^{-1} A`.
pub fn kappa_of_phase(phase: &FbiPhase) -> Result<BlockCanonicalMap> {
    if is_singular(&phase.bxy)? {
        return Err(Error::InvalidPhase("phi_xy is singular".into()));
    }
    let b = -linalg::inv_c(&phase.bxy.t().to_owned())?;
    let a = b.dot(&phase.cyy);
    let d = phase.axx.dot(&b);
    let c = &phase.bxy + &phase.axx.dot(&a);
    BlockCanonicalMap::new(a, b, c, d)
}

/// `φ''_xy = -(B^{-1})ᵗ`, `φ''_yy = B^{-1}A`, `φ''_xx = DB^{-1}`.
pub fn phase_of_kappa(map: &BlockCanonicalMap) -> Result<FbiPhase> {
    let cond = canonicity_conditions(map)?;
    if !cond.hold() {
        return Err(Error::NotCanonical {
            c1: cond.c1,
            c2: cond.c2,
            c3: cond.c3,
        });
    }
    let binv = linalg::inv_c(&map.b)?;
    let axx = linalg::symmetrize_c(&map.d.dot(&binv));
    let cyy = linalg::symmetrize_c(&binv.dot(&map.a));
    let bxy = -binv.t().to_owned();
    let min_im = linalg::sym_eigvals(&linalg::im(&cyy))?[0];
    if !(min_im > 0.0) {
        return Err(Error::NotFbiPhase(min_im));
    }
    FbiPhase::new(axx, bxy, cyy)
}

/// A complex matrix in JSON as rows of `[re, im]` pairs.
pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

pub fn matrix_from_spec(m: &MatrixSpec) -> Result<CMat> {
    let n = m.len();
    if n == 0 || m.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInput("matrix must be square and non-empty".into()));
    }
    Ok(CMat::from_shape_fn((n, n), |(i, j)| C64::new(m[i][j][0], m[i][j][1])))
}

pub fn matrix_to_spec(m: &CMat) -> MatrixSpec {
    m.rows()
        .into_iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSpec {
    pub phi_xx: MatrixSpec,
    pub phi_xy: MatrixSpec,
    pub phi_yy: MatrixSpec,
}

impl PhaseSpec {
    pub fn to_phase(&self) -> Result<FbiPhase> {
        FbiPhase::new(
            matrix_from_spec(&self.phi_xx)?,
            matrix_from_spec(&self.phi_xy)?,
            matrix_from_spec(&self.phi_yy)?,
        )
    }

    pub fn from_phase(p: &FbiPhase) -> Self {
        Self {
            phi_xx: matrix_to_spec(&p.axx),
            phi_xy: matrix_to_spec(&p.bxy),
            phi_yy: matrix_to_spec(&p.cyy),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KappaSpec {
    pub a: MatrixSpec,
    pub b: MatrixSpec,
    pub c: MatrixSpec,
    pub d: MatrixSpec,
}

impl KappaSpec {
    pub fn to_map(&self) -> Result<BlockCanonicalMap> {
        BlockCanonicalMap::new(
            matrix_from_spec(&self.a)?,
            matrix_from_spec(&self.b)?,
            matrix_from_spec(&self.c)?,
            matrix_from_spec(&self.d)?,
        )
    }

    pub fn from_map(k: &BlockCanonicalMap) -> Self {
        Self {
            a: matrix_to_spec(&k.a),
            b: matrix_to_spec(&k.b),
            c: matrix_to_spec(&k.c),
            d: matrix_to_spec(&k.d),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rand_c(rng: &mut ChaCha8Rng, d: usize) -> CMat {
        CMat::from_shape_fn((d, d), |_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn random_phase(rng: &mut ChaCha8Rng, d: usize) -> FbiPhase {
        let a = linalg::symmetrize_c(&rand_c(rng, d));
        let b = rand_c(rng, d) + linalg::eye_c(d).mapv(|z| z * 2.0);
        let r = RMat::from_shape_fn((d, d), |_| rng.random_range(-1.0..1.0));
        let im_c = r.t().dot(&r) + RMat::eye(d) * 0.5;
        let re_c = linalg::symmetrize(&RMat::from_shape_fn((d, d), |_| rng.random_range(-1.0..1.0)));
        let cyy = CMat::from_shape_fn((d, d), |(i, j)| c(re_c[[i, j]], im_c[[i, j]]));
        FbiPhase::new(a, b, cyy).unwrap()
    }

    fn rand_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<C64> {
        (0..d).map(|_| c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect()
    }

    #[test]
    fn standard_phase_weight() {
        let p = FbiPhase::standard(1);
        let w = phi_weight(&p).unwrap();
        for x in [c(0.3, -1.2), c(-2.0, 0.5), c(0.0, 0.0)] {
            assert!((w.value(&[x]) - 0.5 * x.im * x.im).abs() < 1e-15);
            let y0 = p.critical_point(&[x]).unwrap();
            assert!((y0[0] - x.re).abs() < 1e-15);
        }
        assert!((w.levi[[0, 0]] - c(0.25, 0.0)).norm() < 1e-15);
        let w3 = phi_weight(&FbiPhase::standard(3)).unwrap();
        assert!(linalg::fro_c(&(&w3.levi - &linalg::eye_c(3).mapv(|z| z * 0.25))) < 1e-15);
    }

    #[test]
    fn rejects_invalid_phases() {
        let i = array![[c(0.0, 1.0)]];
        let bad_c = array![[c(1.0, -0.5)]];
        assert!(matches!(
            FbiPhase::new(i.clone(), -&i, bad_c),
            Err(Error::InvalidPhase(_))
        ));
        let zero = array![[c(0.0, 0.0)]];
        assert!(matches!(FbiPhase::new(i.clone(), zero, i), Err(Error::InvalidPhase(_))));
    }

    #[test]
    fn standard_kappa() {
        let k = kappa_of_phase(&FbiPhase::standard(2)).unwrap();
        let i2 = linalg::eye_c(2);
        assert!(linalg::fro_c(&(&k.a - &i2)) < 1e-15);
        assert!(linalg::fro_c(&(&k.b + &i2.mapv(|z| z * linalg::I))) < 1e-15);
        assert!(linalg::fro_c(&k.c) < 1e-15);
        assert!(linalg::fro_c(&(&k.d - &i2)) < 1e-15);
        let cond = canonicity_conditions(&k).unwrap();
        assert_eq!(cond.max(), 0.0);

        let p = phase_of_kappa(&k).unwrap();
        assert_eq!(p, FbiPhase::standard(2));
    }

    #[test]
    fn identity_map_has_no_phase() {
        let i = linalg::eye_c(1);
        let z = CMat::zeros((1, 1));
        let k = BlockCanonicalMap::new(i.clone(), z.clone(), z, i).unwrap();
        assert!(matches!(phase_of_kappa(&k), Err(Error::NoPhase)));
        assert!(matches!(canonicity_conditions(&k), Err(Error::NoPhase)));
    }

    #[test]
    fn scaling_is_not_canonical() {
        let k = BlockCanonicalMap::new(
            array![[c(2.0, 0.0)]],
            array![[c(0.0, -1.0)]],
            array![[c(0.0, 0.0)]],
            array![[c(1.0, 0.0)]],
        )
        .unwrap();
        assert!(k.symplectic_defect() > 0.1);
        assert!(canonicity_conditions(&k).unwrap().max() > 0.1);
        assert!(matches!(phase_of_kappa(&k), Err(Error::NotCanonical { .. })));
    }

    #[test]
    fn canonical_map_with_bad_positivity() {
        // (y, eta) -> (y + i eta, eta) is canonical but Im phi_yy = -1.
        let i = linalg::eye_c(1);
        let k = BlockCanonicalMap::new(i.clone(), i.mapv(|z| z * linalg::I), CMat::zeros((1, 1)), i)
            .unwrap();
        assert!(k.symplectic_defect() < 1e-15);
        assert!(matches!(phase_of_kappa(&k), Err(Error::NotFbiPhase(_))));
    }

    #[test]
    fn random_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let p = random_phase(&mut rng, 2);
            let k = kappa_of_phase(&p).unwrap();
            assert!(k.symplectic_defect() < 1e-10);
            let back = phase_of_kappa(&k).unwrap();
            for (u, v) in [(&p.axx, &back.axx), (&p.bxy, &back.bxy), (&p.cyy, &back.cyy)] {
                assert!(linalg::fro_c(&(u - v)) < 1e-10);
            }
        }
    }

    #[test]
    fn weight_is_the_critical_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let p = random_phase(&mut rng, 2);
            let w = phi_weight(&p).unwrap();
            let x = rand_point(&mut rng, 2);
            let y0: Vec<C64> = p.critical_point(&x).unwrap().iter().map(|&t| c(t, 0.0)).collect();
            let phi = w.value(&x);
            assert!((phi + p.value(&x, &y0).im).abs() < 1e-12 * (1.0 + phi.abs()));
            let y: Vec<C64> = y0.iter().map(|z| z + rng.random_range(0.1..1.0)).collect();
            assert!(-p.value(&x, &y).im < phi);
        }
    }

    #[test]
    fn levi_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let p = random_phase(&mut rng, 3);
            let w = phi_weight(&p).unwrap();
            let winv = linalg::to_complex(&linalg::inv(&linalg::im(&p.cyy)).unwrap());
            let want = p.bxy.mapv(|z| z.conj()).dot(&winv).dot(&p.bxy.t()).mapv(|z| z * 0.25);
            assert!(linalg::fro_c(&(&w.levi - &want)) < 1e-12);
            let (br, bi) = (linalg::re(&p.bxy), linalg::im(&p.bxy));
            let wr = linalg::inv(&linalg::im(&p.cyy)).unwrap();
            let real = (bi.dot(&wr).dot(&bi.t()) + br.dot(&wr).dot(&br.t())) * 0.25;
            assert!(linalg::fro(&(w.levi_real() - real)) < 1e-12);
            assert!(w.levi_eigenvalues().unwrap()[0] > 0.0);
        }
    }

    #[test]
    fn kappa_maps_real_space_onto_lambda_phi() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let p = random_phase(&mut rng, 2);
            let w = phi_weight(&p).unwrap();
            let k = kappa_of_phase(&p).unwrap();
            let y: Vec<C64> = (0..2).map(|_| c(rng.random_range(-1.0..1.0), 0.0)).collect();
            let eta: Vec<C64> = (0..2).map(|_| c(rng.random_range(-1.0..1.0), 0.0)).collect();
            let (x, xi) = k.apply(&y, &eta);
            let grad = w.holomorphic_gradient(&x);
            for (a, g) in xi.iter().zip(&grad) {
                assert!((a - g * 2.0 / linalg::I).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn spec_round_trip() {
        let p = FbiPhase::standard(2);
        let s = PhaseSpec::from_phase(&p);
        assert_eq!(s.to_phase().unwrap(), p);
        let k = kappa_of_phase(&p).unwrap();
        assert_eq!(KappaSpec::from_map(&k).to_map().unwrap(), k);
    }
}
