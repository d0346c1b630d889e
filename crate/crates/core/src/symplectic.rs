//! Quadratic forms on phase space and their Hamilton maps.
//!
//! Phase-space coordinates are ordered `(x_1..x_d, xi_1..xi_d)` everywhere in
//! the crate. A form is stored through its symmetric coefficient matrix `A`,
//! `q(X) = <X, A X>` with the bilinear (unconjugated) pairing, and its Hamilton
//! map is the unique `F` with `J F = A`.

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RMat, C64};

/// A point `(x, xi)` of complexified phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint(Array1<C64>);

impl PhasePoint {
    pub fn new(coords: Vec<C64>) -> Result<Self> {
        if coords.is_empty() || !coords.len().is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "phase point needs an even, positive number of coordinates, got {}",
                coords.len()
            )));
        }
        Ok(Self(Array1::from(coords)))
    }

    pub fn real(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len() / 2
    }

    pub fn coords(&self) -> &Array1<C64> {
        &self.0
    }
}

impl From<Array1<C64>> for PhasePoint {
    fn from(v: Array1<C64>) -> Self {
        assert!(!v.is_empty() && v.len().is_multiple_of(2), "phase point length must be 2d");
        Self(v)
    }
}

/// One monomial `c x^alpha xi^beta` with `|alpha| + |beta| = 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    pub coeff: C64,
}

impl Term {
    pub fn new(alpha: Vec<u32>, beta: Vec<u32>, coeff: C64) -> Self {
        Self { alpha, beta, coeff }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    dim: usize,
    a: CMat,
}

impl QuadraticForm {
    /// Builds a form from a coefficient matrix; the matrix is symmetrized.
    pub fn from_matrix(dim: usize, a: CMat) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if a.nrows() != 2 * dim || a.ncols() != 2 * dim {
            return Err(Error::DimensionMismatch {
                expected: 2 * dim,
                got: a.nrows().max(a.ncols()),
            });
        }
        Ok(Self {
            dim,
            a: linalg::symmetrize_c(&a),
        })
    }

    pub fn from_real_parts(dim: usize, re: &RMat, im: &RMat) -> Result<Self> {
        let a = ndarray::Zip::from(re)
            .and(im)
            .map_collect(|&r, &i| C64::new(r, i));
        Self::from_matrix(dim, a)
    }

    /// Assembles `A` from monomials. Cross terms are split evenly between the
    /// two symmetric entries.
    pub fn from_terms(dim: usize, terms: &[Term]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        let mut a = CMat::zeros((2 * dim, 2 * dim));
        for t in terms {
            for idx in [&t.alpha, &t.beta] {
                if idx.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: idx.len(),
                    });
                }
            }
            let degree: u32 = t.alpha.iter().chain(&t.beta).sum();
            if degree != 2 {
                return Err(Error::InvalidDegree(degree));
            }
            let mut slots = Vec::with_capacity(2);
            for (block, idx) in [(0, &t.alpha), (dim, &t.beta)] {
                for (j, &p) in idx.iter().enumerate() {
                    for _ in 0..p {
                        slots.push(block + j);
                    }
                }
            }
            let (i, j) = (slots[0], slots[1]);
            if i == j {
                a[[i, i]] += t.coeff;
            } else {
                a[[i, j]] += t.coeff * 0.5;
                a[[j, i]] += t.coeff * 0.5;
            }
        }
        Ok(Self { dim, a })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMat {
        &self.a
    }

    pub fn re_matrix(&self) -> RMat {
        linalg::re(&self.a)
    }

    pub fn im_matrix(&self) -> RMat {
        linalg::im(&self.a)
    }

    pub fn real_part(&self) -> QuadraticForm {
        Self {
            dim: self.dim,
            a: linalg::to_complex(&self.re_matrix()),
        }
    }

    pub fn imag_part(&self) -> QuadraticForm {
        Self {
            dim: self.dim,
            a: linalg::to_complex(&self.im_matrix()),
        }
    }

    pub fn norm(&self) -> f64 {
        linalg::fro_c(&self.a)
    }

    /// `a*self + b*other`.
    pub fn combine(&self, a: C64, other: &QuadraticForm, b: C64) -> Result<QuadraticForm> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(Self {
            dim: self.dim,
            a: self.a.mapv(|z| z * a) + other.a.mapv(|z| z * b),
        })
    }

    /// The pulled-back form `q(K X)`.
    pub fn compose(&self, k: &CMat) -> Result<QuadraticForm> {
        if k.nrows() != 2 * self.dim || k.ncols() != 2 * self.dim {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.dim,
                got: k.nrows(),
            });
        }
        Self::from_matrix(self.dim, k.t().dot(&self.a).dot(k))
    }

    pub fn evaluate(&self, x: &PhasePoint) -> Result<C64> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        let v = x.coords();
        Ok(v.dot(&self.a.dot(v)))
    }

    pub fn hamilton_map(&self) -> HamiltonMap {
        let j = linalg::to_complex(&linalg::symplectic_j(self.dim));
        HamiltonMap {
            dim: self.dim,
            f: -j.dot(&self.a),
        }
    }
}

/// The Hamilton map `F = -J A` of a quadratic form; `H_q = 2F`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonMap {
    dim: usize,
    f: CMat,
}

impl HamiltonMap {
    pub fn from_matrix(dim: usize, f: CMat) -> Result<Self> {
        if f.nrows() != 2 * dim || f.ncols() != 2 * dim {
            return Err(Error::DimensionMismatch {
                expected: 2 * dim,
                got: f.nrows(),
            });
        }
        Ok(Self { dim, f })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMat {
        &self.f
    }

    pub fn re(&self) -> RMat {
        linalg::re(&self.f)
    }

    pub fn im(&self) -> RMat {
        linalg::im(&self.f)
    }

    pub fn norm(&self) -> f64 {
        linalg::fro_c(&self.f)
    }

    /// Linearization of the Hamilton vector field, `H_q = 2F`.
    pub fn hamilton_field(&self) -> CMat {
        self.f.mapv(|z| z * 2.0)
    }

    /// Recovers the coefficient matrix `A = J F`.
    pub fn form_matrix(&self) -> CMat {
        linalg::to_complex(&linalg::symplectic_j(self.dim)).dot(&self.f)
    }

    /// `max |sigma(e_i, F e_j) + sigma(F e_i, e_j)|` over basis pairs.
    pub fn skew_defect(&self) -> f64 {
        let j = linalg::to_complex(&linalg::symplectic_j(self.dim));
        // sigma(X, F Y) = X^T J F Y and sigma(F X, Y) = X^T F^T J Y.
        let m = j.dot(&self.f) + self.f.t().dot(&j);
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `sigma((x, xi), (y, eta)) = <xi, y> - <x, eta>`.
pub fn symplectic_product(x: &PhasePoint, y: &PhasePoint) -> Result<C64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    let d = x.dim();
    let (a, b) = (x.coords(), y.coords());
    let mut s = C64::new(0.0, 0.0);
    for k in 0..d {
        s += a[d + k] * b[k] - a[k] * b[d + k];
    }
    Ok(s)
}

/// On-disk symbol description.
///
/// ```json
/// { "dim": 1, "terms": [ {"alpha": [2], "beta": [0], "re": 1.0, "im": 0.0} ] }
/// ```
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    pub dim: usize,
    pub terms: Vec<TermSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl SymbolSpec {
    pub fn to_form(&self) -> Result<QuadraticForm> {
        let terms: Vec<Term> = self
            .terms
            .iter()
            .map(|t| Term::new(t.alpha.clone(), t.beta.clone(), C64::new(t.re, t.im)))
            .collect();
        QuadraticForm::from_terms(self.dim, &terms)
    }

    /// Writes a form back as monomials (upper triangle of `A`).
    pub fn from_form(q: &QuadraticForm) -> Self {
        let d = q.dim();
        let a = q.matrix();
        let mut terms = Vec::new();
        for i in 0..2 * d {
            for j in i..2 * d {
                let c = if i == j { a[[i, i]] } else { a[[i, j]] * 2.0 };
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                let mut alpha = vec![0u32; d];
                let mut beta = vec![0u32; d];
                for k in [i, j] {
                    if k < d {
                        alpha[k] += 1;
                    } else {
                        beta[k - d] += 1;
                    }
                }
                terms.push(TermSpec {
                    alpha,
                    beta,
                    re: c.re,
                    im: c.im,
                });
            }
        }
        Self { dim: d, terms }
    }
}
