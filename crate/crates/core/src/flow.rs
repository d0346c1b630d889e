//! Time integrals of a real quadratic form transported by a linear flow,
//! `∫_0^T w(t) M(t)^T R M(t) dt` with `M(t) = exp(t K)`.

use crate::error::{Error, Result};
use crate::linalg::{self, RMat};

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    /// Gauss–Legendre nodes on the first pass.
    pub initial_nodes: usize,
    /// Successive refinements must agree to this relative Frobenius tolerance.
    pub rel_tol: f64,
    /// Node-count doublings allowed before giving up.
    pub max_doublings: u32,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            initial_nodes: 32,
            rel_tol: 1e-10,
            max_doublings: 6,
        }
    }
}

fn gauss_pass<W: Fn(f64) -> f64>(
    generator: &RMat,
    form: &RMat,
    t_end: f64,
    weight: &W,
    nodes: usize,
) -> Result<RMat> {
    let (x, w) = linalg::gauss_legendre(nodes);
    let half = 0.5 * t_end;
    let mut acc = RMat::zeros(form.raw_dim());
    for (xi, wi) in x.iter().zip(&w) {
        let t = half * (xi + 1.0);
        let m = linalg::expm(&(generator * t))?;
        acc = acc + m.t().dot(form).dot(&m) * (wi * half * weight(t));
    }
    Ok(linalg::symmetrize(&acc))
}

/// Integrates with node doubling until two passes agree.
pub fn integrate_flow<W: Fn(f64) -> f64>(
    generator: &RMat,
    form: &RMat,
    t_end: f64,
    weight: W,
    opts: QuadratureOptions,
) -> Result<RMat> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::Domain(format!("averaging time must be positive, got {t_end}")));
    }
    let mut nodes = opts.initial_nodes.max(2);
    let mut prev = gauss_pass(generator, form, t_end, &weight, nodes)?;
    for _ in 0..opts.max_doublings {
        nodes *= 2;
        let next = gauss_pass(generator, form, t_end, &weight, nodes)?;
        let scale = linalg::fro(&next).max(f64::MIN_POSITIVE);
        if linalg::fro(&(&next - &prev)) <= opts.rel_tol * scale {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NonConvergence(format!(
        "flow quadrature did not settle after {nodes} nodes"
    )))
}
