//! Spectral lattice of an averaging-elliptic quadratic operator and the
//! geometry of the admissible spectral region around it.
//!
//! With `lambda_j` the eigenvalues of `F` in the upper half plane and
//! `mu_j = lambda_j / i`, the spectrum of `q^w(x, hD_x)` is the set of
//! `h mu(k) = h Σ (1 + 2 k_j) mu_j` over `k ∈ N_0^d`, with multiplicity.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::symplectic::HamiltonMap;

/// Relative tolerance used to merge coincident lattice values.
pub const MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeSpectrum {
    lambdas: Vec<C64>,
    mus: Vec<C64>,
}

impl LatticeSpectrum {
    /// From the stable eigenvalues of `F` (all with positive imaginary part).
    pub fn from_lambdas(lambdas: Vec<C64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::InvalidInput("empty eigenvalue list".into()));
        }
        if let Some(l) = lambdas.iter().find(|l| !(l.im > 0.0)) {
            return Err(Error::DegenerateSpectrum(format!(
                "eigenvalue {l} is not in the upper half plane"
            )));
        }
        let mus = lambdas.iter().map(|l| l / linalg::I).collect();
        Ok(Self { lambdas, mus })
    }

    pub fn from_mus(mus: Vec<C64>) -> Result<Self> {
        Self::from_lambdas(mus.iter().map(|m| m * linalg::I).collect())
    }

    pub fn dim(&self) -> usize {
        self.mus.len()
    }

    pub fn lambdas(&self) -> &[C64] {
        &self.lambdas
    }

    pub fn mus(&self) -> &[C64] {
        &self.mus
    }

    /// `mu(k) = Σ (1 + 2 k_j) mu_j`.
    pub fn mu_of(&self, k: &[u64]) -> C64 {
        self.mus
            .iter()
            .zip(k)
            .map(|(m, &kj)| m * (1.0 + 2.0 * kj as f64))
            .sum()
    }

    pub fn min_re_mu(&self) -> f64 {
        self.mus.iter().map(|m| m.re).fold(f64::INFINITY, f64::min)
    }

    pub fn sum_re_mu(&self) -> f64 {
        self.mus.iter().map(|m| m.re).sum()
    }

    pub fn sum_abs_mu(&self) -> f64 {
        self.mus.iter().map(|m| m.norm()).sum()
    }

    /// Calls `visit` for every `k` with `Σ 2 k_j Re mu_j <= budget`.
    fn for_each_k<V: FnMut(&[u64])>(&self, budget: f64, visit: &mut V) {
        fn rec<V: FnMut(&[u64])>(
            re: &[f64],
            j: usize,
            budget: f64,
            k: &mut Vec<u64>,
            visit: &mut V,
        ) {
            if j == re.len() {
                visit(k);
                return;
            }
            let step = 2.0 * re[j];
            let mut kj = 0u64;
            loop {
                let used = step * kj as f64;
                if used > budget * (1.0 + 1e-12) + 1e-300 {
                    break;
                }
                k.push(kj);
                rec(re, j + 1, budget - used, k, visit);
                k.pop();
                kj += 1;
            }
        }
        if budget < 0.0 {
            return;
        }
        let re: Vec<f64> = self.mus.iter().map(|m| m.re).collect();
        let mut k = Vec::with_capacity(re.len());
        rec(&re, 0, budget, &mut k, visit);
    }
}

/// The `d` eigenvalues of `F` with positive imaginary part.
pub fn stable_eigenvalues(f: &HamiltonMap) -> Result<LatticeSpectrum> {
    let eig = linalg::eigvals(f.matrix())?;
    let scale = f.norm();
    if let Some(l) = eig.iter().find(|l| l.im.abs() <= 1e-10 * scale) {
        return Err(Error::DegenerateSpectrum(format!(
            "Hamilton map has a (near-)real eigenvalue {l}"
        )));
    }
    let mut stable: Vec<C64> = eig.into_iter().filter(|l| l.im > 0.0).collect();
    if stable.len() != f.dim() {
        return Err(Error::DegenerateSpectrum(format!(
            "expected {} eigenvalues in the upper half plane, found {}",
            f.dim(),
            stable.len()
        )));
    }
    stable.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let spec = LatticeSpectrum::from_lambdas(stable)?;
    if spec.min_re_mu() <= 0.0 {
        return Err(Error::DegenerateSpectrum("Re mu_j must be positive".into()));
    }
    Ok(spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticePoint {
    pub value: C64,
    pub multiplicity: usize,
}

/// Merges values that agree to `MERGE_TOL` (relative), summing multiplicities.
fn merge(mut values: Vec<C64>) -> Vec<LatticePoint> {
    values.sort_by(|a, b| a.re.total_cmp(&b.re));
    let mut out: Vec<LatticePoint> = Vec::new();
    for v in values {
        let eps = MERGE_TOL * v.norm().max(f64::MIN_POSITIVE);
        let mut hit = None;
        for (idx, p) in out.iter().enumerate().rev() {
            if p.value.re < v.re - eps {
                break;
            }
            if (p.value - v).norm() <= eps {
                hit = Some(idx);
                break;
            }
        }
        match hit {
            Some(idx) => out[idx].multiplicity += 1,
            None => out.push(LatticePoint {
                value: v,
                multiplicity: 1,
            }),
        }
    }
    out.sort_by(|a, b| {
        a.value
            .norm()
            .total_cmp(&b.value.norm())
            .then(a.value.im.total_cmp(&b.value.im))
    });
    out
}

/// All lattice values `h mu(k)` with `|h mu(k)| <= radius`.
pub fn lattice_points(spec: &LatticeSpectrum, h: f64, radius: f64) -> Vec<LatticePoint> {
    if !(radius >= 0.0) || !(h > 0.0) {
        return Vec::new();
    }
    let budget = radius / h - spec.sum_re_mu();
    let limit = radius * (1.0 + 1e-12);
    let mut values = Vec::new();
    spec.for_each_k(budget, &mut |k| {
        let z = spec.mu_of(k) * h;
        if z.norm() <= limit {
            values.push(z);
        }
    });
    merge(values)
}

/// Distance from `z` to the spectrum of `q^w(x, hD_x)`.
pub fn dist_to_spectrum(spec: &LatticeSpectrum, h: f64, z: C64) -> f64 {
    // |z - h mu(0)| bounds the answer, so nothing beyond this radius matters.
    let radius = 2.0 * z.norm() + h * spec.sum_abs_mu();
    lattice_points(spec, h, radius)
        .iter()
        .map(|p| (p.value - z).norm())
        .fold(f64::INFINITY, f64::min)
}

/// `#{k : |rho - Re mu(k)| <= r}` at `h = 1`.
pub fn strip_count(spec: &LatticeSpectrum, rho: f64, r: f64) -> u64 {
    let budget = rho + r - spec.sum_re_mu();
    let mut n = 0u64;
    spec.for_each_k(budget, &mut |k| {
        if (rho - spec.mu_of(k).re).abs() <= r {
            n += 1;
        }
    });
    n
}

/// Volume of `T(R) = {x ∈ R^d_+ : Σ 2 x_j Re mu_j <= R}`.
pub fn simplex_volume(spec: &LatticeSpectrum, radius: f64) -> f64 {
    if radius <= 0.0 {
        return 0.0;
    }
    let d = spec.dim() as i32;
    let fact: f64 = (1..=spec.dim()).map(|k| k as f64).product();
    let prod: f64 = spec.mus.iter().map(|m| 1.0 / m.re).product();
    prod / (2f64.powi(d) * fact) * radius.powi(d)
}

/// The admissible spectral region `{inner <= |z| <= h F, dist(z, Spec) >= h e^{-F/C1}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionSpec {
    pub h: f64,
    pub c0: Option<f64>,
    pub c1: f64,
    pub f_of_h: f64,
    pub inner_radius: Option<f64>,
}

impl RegionSpec {
    /// `F(h) = (1/C0) (log log 1/h)^{1/d}`.
    pub fn from_constants(h: f64, c0: f64, c1: f64, d: usize) -> Result<Self> {
        if !(c0 > 0.0) || !(c1 > 0.0) {
            return Err(Error::Domain("C0 and C1 must be positive".into()));
        }
        let s = schedules(h, 1.0, c0, 1.0, d)?;
        Self::with_extent(h, s.f_big, c1).map(|r| Self { c0: Some(c0), ..r })
    }

    /// Region with a prescribed value of `F(h)`.
    pub fn with_extent(h: f64, f_of_h: f64, c1: f64) -> Result<Self> {
        if !(h > 0.0 && h <= 1.0) {
            return Err(Error::Domain(format!("h must lie in (0, 1], got {h}")));
        }
        if !(f_of_h > 0.0) || !(c1 > 0.0) {
            return Err(Error::Domain("F(h) and C1 must be positive".into()));
        }
        Ok(Self {
            h,
            c0: None,
            c1,
            f_of_h,
            inner_radius: None,
        })
    }

    pub fn with_inner_radius(mut self, r: f64) -> Self {
        self.inner_radius = Some(r);
        self
    }

    pub fn outer_radius(&self) -> f64 {
        self.h * self.f_of_h
    }

    pub fn inner(&self) -> f64 {
        self.inner_radius.unwrap_or(0.0)
    }

    pub fn exclusion_radius(&self) -> f64 {
        self.h * (-self.f_of_h / self.c1).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "admissible")]
    Admissible,
    #[serde(rename = "outer bound")]
    OuterBound,
    #[serde(rename = "inner bound")]
    InnerBound,
    #[serde(rename = "exclusion disc")]
    ExclusionDisc,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Admissible => "admissible",
            Verdict::OuterBound => "outer bound",
            Verdict::InnerBound => "inner bound",
            Verdict::ExclusionDisc => "exclusion disc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Admissibility {
    pub verdict: Verdict,
    pub dist: f64,
}

impl Admissibility {
    pub fn admissible(&self) -> bool {
        self.verdict == Verdict::Admissible
    }
}

pub fn admissible(region: &RegionSpec, spec: &LatticeSpectrum, z: C64) -> Admissibility {
    let dist = dist_to_spectrum(spec, region.h, z);
    let r = z.norm();
    let verdict = if r > region.outer_radius() {
        Verdict::OuterBound
    } else if r < region.inner() {
        Verdict::InnerBound
    } else if dist < region.exclusion_radius() {
        Verdict::ExclusionDisc
    } else {
        Verdict::Admissible
    };
    Admissibility { verdict, dist }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AreaMethod {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "monte-carlo")]
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AreaFraction {
    pub fraction: f64,
    /// Distinct lattice values with `|z| <= h F(h)`.
    pub points_in_range: usize,
    pub method: AreaMethod,
}

/// Area of the intersection of two discs.
pub fn lens_area(dist: f64, r1: f64, r2: f64) -> f64 {
    if r1 <= 0.0 || r2 <= 0.0 || dist >= r1 + r2 {
        return 0.0;
    }
    if dist <= (r1 - r2).abs() {
        let r = r1.min(r2);
        return PI * r * r;
    }
    let a1 = ((dist * dist + r1 * r1 - r2 * r2) / (2.0 * dist * r1)).clamp(-1.0, 1.0).acos();
    let a2 = ((dist * dist + r2 * r2 - r1 * r1) / (2.0 * dist * r2)).clamp(-1.0, 1.0).acos();
    let k = (-dist + r1 + r2) * (dist + r1 - r2) * (dist - r1 + r2) * (dist + r1 + r2);
    r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * k.max(0.0).sqrt()
}

pub const MC_SAMPLES: usize = 1_000_000;

/// Fraction of the annulus `{inner <= |z| <= h F}` covered by exclusion discs.
pub fn excluded_area_fraction(region: &RegionSpec, spec: &LatticeSpectrum) -> AreaFraction {
    let (r_in, r_out) = (region.inner(), region.outer_radius());
    let rho = region.exclusion_radius();
    let points_in_range = lattice_points(spec, region.h, r_out).len();
    if r_out <= r_in {
        return AreaFraction {
            fraction: 0.0,
            points_in_range,
            method: AreaMethod::Exact,
        };
    }
    let centers: Vec<C64> = lattice_points(spec, region.h, r_out + rho)
        .into_iter()
        .map(|p| p.value)
        .filter(|c| c.norm() + rho > r_in)
        .collect();
    let annulus = PI * (r_out * r_out - r_in * r_in);

    let mut min_gap = f64::INFINITY;
    for (i, a) in centers.iter().enumerate() {
        for b in &centers[i + 1..] {
            min_gap = min_gap.min((a - b).norm());
        }
    }
    if 2.0 * rho < min_gap {
        let covered: f64 = centers
            .iter()
            .map(|c| lens_area(c.norm(), rho, r_out) - lens_area(c.norm(), rho, r_in))
            .sum();
        return AreaFraction {
            fraction: covered / annulus,
            points_in_range,
            method: AreaMethod::Exact,
        };
    }
    AreaFraction {
        fraction: monte_carlo_fraction(&centers, rho, r_in, r_out, MC_SAMPLES, 0),
        points_in_range,
        method: AreaMethod::MonteCarlo,
    }
}

pub(crate) fn monte_carlo_fraction(
    centers: &[C64],
    rho: f64,
    r_in: f64,
    r_out: f64,
    samples: usize,
    seed: u64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a2, b2) = (r_in * r_in, r_out * r_out);
    let rho2 = rho * rho;
    let mut hits = 0usize;
    for _ in 0..samples {
        let r = rng.random_range(a2..=b2).sqrt();
        let th = rng.random_range(0.0..2.0 * PI);
        let z = C64::from_polar(r, th);
        if centers.iter().any(|c| (z - c).norm_sqr() <= rho2) {
            hits += 1;
        }
    }
    hits as f64 / samples as f64
}

/// Parameter schedules tied to the semiclassical parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Schedules {
    /// `eps = h log(1/h) / C`.
    pub epsilon: f64,
    /// `h / eps`.
    pub h_tilde: f64,
    /// `F(h) = (1/C0) (log log 1/h)^{1/d}`.
    pub f_big: f64,
    /// `f(h) = (1/M) (log 1/h)^{1/d}`.
    pub f_small: f64,
    /// `r(h) = exp(-f(h)/C0)`.
    pub r_of_h: f64,
}

pub fn schedules(h: f64, c: f64, c0: f64, m: f64, d: usize) -> Result<Schedules> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("h must be positive, got {h}")));
    }
    schedules_from_log(-h.ln(), c, c0, m, d)
}

/// Same as [`schedules`], parametrised by `L = log(1/h)` so that extremely
/// small `h` stays representable.
pub fn schedules_from_log(log_inv_h: f64, c: f64, c0: f64, m: f64, d: usize) -> Result<Schedules> {
    if !(log_inv_h > 1.0) {
        return Err(Error::Domain(format!(
            "log log(1/h) must be positive (need h < 1/e), log(1/h) = {log_inv_h}"
        )));
    }
    if !(c > 0.0 && c0 > 0.0 && m > 0.0) || d == 0 {
        return Err(Error::Domain("C, C0, M and d must be positive".into()));
    }
    let inv_d = 1.0 / d as f64;
    let h = (-log_inv_h).exp();
    let f_small = log_inv_h.powf(inv_d) / m;
    Ok(Schedules {
        epsilon: h * log_inv_h / c,
        h_tilde: c / log_inv_h,
        f_big: log_inv_h.ln().powf(inv_d) / c0,
        f_small,
        r_of_h: (-f_small / c0).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn fig1() -> LatticeSpectrum {
        LatticeSpectrum::from_lambdas(vec![
            C64::from_polar(1.0, PI / 3.0),
            C64::from_polar(1.0, 2.0 * PI / 3.0),
        ])
        .unwrap()
    }

    fn unit_pair() -> LatticeSpectrum {
        LatticeSpectrum::from_mus(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn stable_eigenvalue_examples() {
        let s = stable_eigenvalues(&models::harmonic().hamilton_map()).unwrap();
        assert!((s.lambdas()[0] - c(0.0, 1.0)).norm() < 1e-14);
        assert!((s.mus()[0] - c(1.0, 0.0)).norm() < 1e-14);

        let s = stable_eigenvalues(&models::fig1_model().hamilton_map()).unwrap();
        let want = [C64::from_polar(1.0, PI / 3.0), C64::from_polar(1.0, 2.0 * PI / 3.0)];
        assert!(linalg::multiset_distance(s.lambdas(), &want) < 1e-13);
        let want_mu = [C64::from_polar(1.0, -PI / 6.0), C64::from_polar(1.0, PI / 6.0)];
        assert!(linalg::multiset_distance(s.mus(), &want_mu) < 1e-13);

        let s = stable_eigenvalues(&models::kfp(1.0).hamilton_map()).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.lambdas().iter().all(|l| l.im > 0.0));
        assert!(s.mus().iter().all(|m| m.re > 0.0));
    }

    #[test]
    fn stable_eigenvalues_rejects_real_spectrum() {
        // q = i(x^2 + xi^2): F is i times a rotation, so its eigenvalues are real.
        let q = crate::symplectic::QuadraticForm::from_real_parts(
            1,
            &linalg::RMat::zeros((2, 2)),
            &linalg::RMat::eye(2),
        )
        .unwrap();
        assert!(matches!(
            stable_eigenvalues(&q.hamilton_map()),
            Err(Error::DegenerateSpectrum(_))
        ));
        let s = stable_eigenvalues(&models::vw_family(0.5, 0.0, 0.0).hamilton_map());
        assert!(matches!(s, Err(Error::DegenerateSpectrum(_))));
    }

    #[test]
    fn harmonic_lattice_points() {
        let s = LatticeSpectrum::from_mus(vec![c(1.0, 0.0)]).unwrap();
        let pts = lattice_points(&s, 0.1, 1.0);
        let vals: Vec<f64> = pts.iter().map(|p| p.value.re).collect();
        assert_eq!(pts.len(), 5);
        for (v, w) in vals.iter().zip([0.1, 0.3, 0.5, 0.7, 0.9]) {
            assert!((v - w).abs() < 1e-15);
        }
        assert!(pts.iter().all(|p| p.multiplicity == 1));
    }

    #[test]
    fn multiplicities_for_rationally_dependent_mus() {
        let pts = lattice_points(&unit_pair(), 1.0, 6.0);
        let got: Vec<(f64, usize)> = pts.iter().map(|p| (p.value.re, p.multiplicity)).collect();
        assert_eq!(got, vec![(2.0, 1), (4.0, 2), (6.0, 3)]);
    }

    #[test]
    fn fig1_lattice_lies_in_sector() {
        for p in lattice_points(&fig1(), 0.05, 3.0) {
            assert!(p.value.arg().abs() <= PI / 6.0 + 1e-12);
        }
    }

    #[test]
    fn distance_examples() {
        let s = LatticeSpectrum::from_mus(vec![c(1.0, 0.0)]).unwrap();
        assert!(dist_to_spectrum(&s, 0.1, c(0.3, 0.0)) < 1e-15);
        assert!((dist_to_spectrum(&s, 0.1, c(0.4, 0.0)) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn strip_count_examples() {
        assert_eq!(strip_count(&unit_pair(), 10.0, 0.5), 5);
        let s = LatticeSpectrum::from_mus(vec![c(1.0, 0.0)]).unwrap();
        assert_eq!(strip_count(&s, 0.0, 0.5), 0);
    }

    #[test]
    fn simplex_volume_examples() {
        assert!((simplex_volume(&unit_pair(), 4.0) - 2.0).abs() < 1e-15);
        assert_eq!(simplex_volume(&unit_pair(), 0.0), 0.0);
    }

    #[test]
    fn admissibility_reasons() {
        let s = fig1();
        let region = RegionSpec::with_extent(0.01, 10.0, 10.0)
            .unwrap()
            .with_inner_radius(0.03);
        let on_lattice = lattice_points(&s, 0.01, 0.08)[2].value;
        assert_eq!(admissible(&region, &s, on_lattice).verdict, Verdict::ExclusionDisc);
        let far = c(2.0 * region.outer_radius(), 0.0);
        assert_eq!(admissible(&region, &s, far).verdict, Verdict::OuterBound);
        assert_eq!(admissible(&region, &s, c(0.0, 0.01)).verdict, Verdict::InnerBound);
        assert_eq!(admissible(&region, &s, c(0.0, 0.06)).verdict, Verdict::Admissible);
    }

    #[test]
    fn lens_area_limits() {
        assert_eq!(lens_area(5.0, 1.0, 1.0), 0.0);
        assert!((lens_area(0.5, 1.0, 3.0) - PI).abs() < 1e-15);
        // Half-overlap of equal unit discs at distance 1.
        let want = 2.0 * PI / 3.0 - 3f64.sqrt() / 2.0;
        assert!((lens_area(1.0, 1.0, 1.0) - want).abs() < 1e-14);
    }

    #[test]
    fn area_fraction_with_no_points_is_zero() {
        // Annulus {3h <= |z| <= 3.1h} around a lattice starting at |mu(0)| = 10.
        let s = LatticeSpectrum::from_mus(vec![c(10.0, 0.0)]).unwrap();
        let region = RegionSpec::with_extent(0.1, 3.1, 10.0).unwrap().with_inner_radius(0.3);
        let a = excluded_area_fraction(&region, &s);
        assert_eq!(a.fraction, 0.0);
        assert_eq!(a.points_in_range, 0);
    }

    #[test]
    fn area_fraction_exact_matches_monte_carlo() {
        let s = fig1();
        let region = RegionSpec::with_extent(1.0, 6.5, 10.0).unwrap().with_inner_radius(3.0);
        let a = excluded_area_fraction(&region, &s);
        assert_eq!(a.method, AreaMethod::Exact);
        let centers: Vec<C64> = lattice_points(&s, 1.0, 8.0).iter().map(|p| p.value).collect();
        let mc = monte_carlo_fraction(&centers, region.exclusion_radius(), 3.0, 6.5, 200_000, 3);
        assert!((a.fraction - mc).abs() < 3e-3, "{} vs {mc}", a.fraction);
    }

    #[test]
    fn overlapping_discs_use_monte_carlo() {
        let s = LatticeSpectrum::from_mus(vec![c(0.5, 0.0)]).unwrap();
        let region = RegionSpec::with_extent(1.0, 6.0, 1e6).unwrap();
        let a = excluded_area_fraction(&region, &s);
        assert_eq!(a.method, AreaMethod::MonteCarlo);
        assert!(a.fraction > 0.0 && a.fraction <= 1.0);
    }

    #[test]
    fn schedule_examples() {
        let s = schedules(f64::exp(-10.0), 5.0, 1.0, 1.0, 1).unwrap();
        assert!((s.epsilon - 2.0 * f64::exp(-10.0)).abs() < 1e-18);
        assert!((s.h_tilde - 0.5).abs() < 1e-15);

        let s = schedules_from_log(16f64.exp(), 1.0, 2.0, 1.0, 2).unwrap();
        assert!((s.f_big - 2.0).abs() < 1e-12);

        let s = schedules(f64::exp(-16.0), 1.0, 3.0, 2.0, 2).unwrap();
        assert!((s.f_small - 2.0).abs() < 1e-14);
        assert!((s.r_of_h - (-2.0f64 / 3.0).exp()).abs() < 1e-14);

        assert!(matches!(schedules(0.5, 1.0, 1.0, 1.0, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn region_from_constants() {
        let r = RegionSpec::from_constants(f64::exp(-f64::exp(4.0)), 2.0, 10.0, 2).unwrap();
        assert!((r.f_of_h - 1.0).abs() < 1e-12);
        assert!(r.exclusion_radius() < r.h);
        assert!(RegionSpec::from_constants(0.9, 1.0, 1.0, 1).is_err());
    }
}
