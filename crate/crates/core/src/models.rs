//! Reference quadratic symbols used throughout the tests and the CLI.

use std::f64::consts::PI;

use crate::linalg::C64;
use crate::symplectic::{QuadraticForm, Term};

fn t(alpha: &[u32], beta: &[u32], re: f64, im: f64) -> Term {
    Term::new(alpha.to_vec(), beta.to_vec(), C64::new(re, im))
}

/// `x^2 + xi^2`.
pub fn harmonic() -> QuadraticForm {
    QuadraticForm::from_terms(1, &[t(&[2], &[0], 1.0, 0.0), t(&[0], &[2], 1.0, 0.0)])
        .expect("valid symbol")
}

/// Kramers–Fokker–Planck model `(y^2 + eta^2)/2 + i (y xi - a x eta)` on
/// `(x, y, xi, eta)`.
pub fn kfp(a: f64) -> QuadraticForm {
    QuadraticForm::from_terms(
        2,
        &[
            t(&[0, 2], &[0, 0], 0.5, 0.0),
            t(&[0, 0], &[0, 2], 0.5, 0.0),
            t(&[0, 1], &[1, 0], 0.0, 1.0),
            t(&[1, 0], &[0, 1], 0.0, -a),
        ],
    )
    .expect("valid symbol")
}

/// Non-normal oscillator `xi^2 + (1 + i alpha) x^2`.
pub fn davies(alpha: f64) -> QuadraticForm {
    QuadraticForm::from_terms(1, &[t(&[0], &[2], 1.0, 0.0), t(&[2], &[0], 1.0, alpha)])
        .expect("valid symbol")
}

/// `xi_1^2 + xi_2^2 + x_1^2 + i(alpha x_1^2 + 2 beta x_1 x_2 + gamma x_2^2)`.
pub fn vw_family(alpha: f64, beta: f64, gamma: f64) -> QuadraticForm {
    QuadraticForm::from_terms(
        2,
        &[
            t(&[0, 0], &[2, 0], 1.0, 0.0),
            t(&[0, 0], &[0, 2], 1.0, 0.0),
            t(&[2, 0], &[0, 0], 1.0, alpha),
            t(&[1, 1], &[0, 0], 0.0, 2.0 * beta),
            t(&[0, 2], &[0, 0], 0.0, gamma),
        ],
    )
    .expect("valid symbol")
}

/// Decoupled elliptic model whose Hamilton map has spectrum
/// `{±e^{iπ/3}, ±e^{2iπ/3}}`: `mu_1 (x_1^2 + xi_1^2) + mu_2 (x_2^2 + xi_2^2)`
/// with `mu_{1,2} = e^{∓iπ/6}`.
pub fn fig1_model() -> QuadraticForm {
    let m1 = C64::from_polar(1.0, -PI / 6.0);
    let m2 = C64::from_polar(1.0, PI / 6.0);
    QuadraticForm::from_terms(
        2,
        &[
            t(&[2, 0], &[0, 0], m1.re, m1.im),
            t(&[0, 0], &[2, 0], m1.re, m1.im),
            t(&[0, 2], &[0, 0], m2.re, m2.im),
            t(&[0, 0], &[0, 2], m2.re, m2.im),
        ],
    )
    .expect("valid symbol")
}
