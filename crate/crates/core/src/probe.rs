//! Desk-scale probe of the resolvent bound `|(q^w - z)^{-1}| = O(h^{-1-ρ})`
//! on the admissible region: sample admissible `z` for a ladder of `h`,
//! compute truncated resolvent norms with a convergence rule on the Hermite
//! degree, and fit the growth exponent in `1/h`.
//!
//! Only the quadratic operator itself is probed; general symbols with a
//! quadratic part are out of reach of the Hermite truncation.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{self, LatticeSpectrum, RegionSpec};
use crate::linalg::C64;
use crate::symplectic::QuadraticForm;
use crate::weyl::{self, HermiteTruncation, ResolventOptions};

/// How `F(h)` is chosen for each `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extent {
    /// `F(h) = (1/C0)(log log 1/h)^{1/d}`.
    Constants { c0: f64 },
    /// A fixed `F`, as in a single panel of the region picture.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct ProbeConfig {
    pub extent: Extent,
    pub c1: f64,
    /// Inner radius in units of `h`.
    pub inner: f64,
    /// Samples are drawn with `|arg z| <= max_arg`.
    pub max_arg: f64,
    pub samples_per_h: usize,
    pub seed: u64,
    pub n_start: u32,
    pub n_step: u32,
    pub n_cap: u32,
    /// Largest relative change of the norms between consecutive degrees.
    pub n_tol: f64,
    pub resolvent: ResolventOptions,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            extent: Extent::Fixed(6.5),
            c1: 10.0,
            inner: 3.0,
            max_arg: FRAC_PI_2,
            samples_per_h: 20,
            seed: 0,
            n_start: 20,
            n_step: 10,
            n_cap: 120,
            n_tol: 1e-3,
            resolvent: ResolventOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProbeSample {
    pub h: f64,
    pub z: C64,
    pub norm: f64,
    pub admissible: bool,
    pub n_used: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeResult {
    pub samples: Vec<ProbeSample>,
    /// Slope of `log norm` against `log(1/h)`.
    pub fit_exponent: f64,
    pub fit_intercept: f64,
}

pub fn region_for(cfg: &ProbeConfig, h: f64, d: usize) -> Result<RegionSpec> {
    let r = match cfg.extent {
        Extent::Constants { c0 } => RegionSpec::from_constants(h, c0, cfg.c1, d)?,
        Extent::Fixed(f) => RegionSpec::with_extent(h, f, cfg.c1)?,
    };
    Ok(r.with_inner_radius(cfg.inner * h))
}

/// Draws `count` admissible points by rejection from the sector-annulus.
/// The stream depends on the seed alone, so the draws in units of `h`
/// coincide across `h` whenever the region scales with `h`.
pub fn sample_admissible(
    region: &RegionSpec,
    spec: &LatticeSpectrum,
    count: usize,
    max_arg: f64,
    seed: u64,
) -> Result<Vec<C64>> {
    let (r_in, r_out) = (region.inner(), region.outer_radius());
    if r_out <= r_in {
        return Err(Error::Domain(format!(
            "empty region: inner radius {r_in:.3e} >= outer radius {r_out:.3e}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let max_tries = 100_000 * count.max(1);
    for _ in 0..max_tries {
        if out.len() == count {
            break;
        }
        let u: f64 = rng.random_range(0.0..=1.0);
        let r = (r_in * r_in + u * (r_out * r_out - r_in * r_in)).sqrt();
        let th = rng.random_range(-max_arg..=max_arg);
        let z = C64::from_polar(r, th);
        if lattice::admissible(region, spec, z).admissible() {
            out.push(z);
        }
    }
    if out.len() < count {
        return Err(Error::Domain("could not sample enough admissible points".into()));
    }
    Ok(out)
}

/// Raises the Hermite degree in steps until the norms at all `zs` settle.
pub fn converged_norms(
    q: &QuadraticForm,
    h: f64,
    zs: &[C64],
    cfg: &ProbeConfig,
) -> Result<(u32, Vec<f64>)> {
    let norms_at = |n: u32| -> Result<Vec<f64>> {
        let t = HermiteTruncation::new(q.dim(), n, h)?;
        let op = weyl::quantize_quadratic(q, &t)?;
        zs.par_iter()
            .map(|&z| Ok(weyl::resolvent_norm_with(&op, z, cfg.resolvent)?.value()))
            .collect()
    };
    let mut n = cfg.n_start;
    let mut prev = norms_at(n)?;
    while n + cfg.n_step <= cfg.n_cap {
        n += cfg.n_step;
        let next = norms_at(n)?;
        let change = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| ((a - b) / b).abs())
            .fold(0.0, f64::max);
        if change <= cfg.n_tol {
            return Ok((n, next));
        }
        prev = next;
    }
    Err(Error::NonConvergence(format!(
        "resolvent norms still moving at Hermite degree {n}"
    )))
}

/// Ordinary least squares `y = a + b x`; returns `(b, a)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let n = x.len() as f64;
    if x.len() < 2 || x.len() != y.len() {
        return Err(Error::InvalidInput("need at least two points to fit".into()));
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("fit needs at least two distinct abscissae".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

pub fn probe_theorem(q: &QuadraticForm, hs: &[f64], cfg: &ProbeConfig) -> Result<ProbeResult> {
    let spec = lattice::stable_eigenvalues(&q.hamilton_map())?;
    let mut samples = Vec::new();
    for &h in hs {
        let region = region_for(cfg, h, q.dim())?;
        let zs = sample_admissible(&region, &spec, cfg.samples_per_h, cfg.max_arg, cfg.seed)?;
        let (n_used, norms) = converged_norms(q, h, &zs, cfg)?;
        for (z, norm) in zs.into_iter().zip(norms) {
            samples.push(ProbeSample {
                h,
                z,
                norm,
                admissible: lattice::admissible(&region, &spec, z).admissible(),
                n_used,
            });
        }
    }
    if let Some(s) = samples.iter().find(|s| !s.norm.is_finite()) {
        return Err(Error::NonConvergence(format!(
            "infinite resolvent norm at admissible z = {} (h = {})",
            s.z, s.h
        )));
    }
    let x: Vec<f64> = samples.iter().map(|s| (1.0 / s.h).ln()).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.norm.ln()).collect();
    let (fit_exponent, fit_intercept) = fit_line(&x, &y)?;
    Ok(ProbeResult {
        samples,
        fit_exponent,
        fit_intercept,
    })
}
