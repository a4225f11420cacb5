//! Linearisation of the unforced Setler field.

use libm::{cos, sin};
use num_complex::Complex64;

use crate::state::SphericalState;

pub type Matrix3 = [[f64; 3]; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianReport {
    pub matrix: Matrix3,
    pub eigenvalues: [Complex64; 3],
}

/// Exact Jacobian of `(λ sinα cosδ, λ cosα sinδ, λ (sinδ cosα)²)` at `s`.
pub fn jacobian_matrix(s: SphericalState, lambda: f64) -> Matrix3 {
    let (sa, ca) = (sin(s.alpha()), cos(s.alpha()));
    let (sd, cd) = (sin(s.delta()), cos(s.delta()));
    [
        [lambda * ca * cd, -lambda * sa * sd, 0.0],
        [-lambda * sa * sd, lambda * ca * cd, 0.0],
        [-2.0 * lambda * sd * sd * ca * sa, 2.0 * lambda * ca * ca * sd * cd, 0.0],
    ]
}

pub fn jacobian_autonomous(s: SphericalState, lambda: f64) -> JacobianReport {
    let matrix = jacobian_matrix(s, lambda);
    JacobianReport {
        matrix,
        eigenvalues: eigenvalues_3x3(&matrix),
    }
}

fn eig_2x2(a: f64, b: f64, c: f64, d: f64) -> [Complex64; 2] {
    let half_tr = 0.5 * (a + d);
    let disc = Complex64::new(0.25 * (a - d) * (a - d) + b * c, 0.0).sqrt();
    [half_tr + disc, half_tr - disc]
}

/// Coefficients `(c2, c1, c0)` of `μ³ − c2 μ² + c1 μ − c0 = det(μI − A)`.
pub fn characteristic_coefficients(m: &Matrix3) -> (f64, f64, f64) {
    let tr = m[0][0] + m[1][1] + m[2][2];
    let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2] - m[1][2] * m[2][1];
    (tr, minors, det3(m))
}

fn det3(m: &Matrix3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn char_poly(m: &Matrix3, mu: Complex64) -> (Complex64, Complex64) {
    let (c2, c1, c0) = characteristic_coefficients(m);
    let p = ((mu - c2) * mu + c1) * mu - c0;
    let dp = (mu * 3.0 - c2 * 2.0) * mu + c1;
    (p, dp)
}

/// `|det(μI − A)|`, which vanishes at an exact eigenvalue.
pub fn characteristic_residual(m: &Matrix3, mu: Complex64) -> f64 {
    char_poly(m, mu).0.norm()
}

/// Eigenvalues of a real 3×3 matrix.
///
/// When the last column is zero (as for the Setler Jacobian) the spectrum
/// is that of the leading 2×2 block plus `m[2][2]`, which is exact.
/// Otherwise the characteristic cubic is solved by Cardano's formula and
/// each root is polished with Newton steps.
pub fn eigenvalues_3x3(m: &Matrix3) -> [Complex64; 3] {
    if m[0][2] == 0.0 && m[1][2] == 0.0 {
        let [a, b] = eig_2x2(m[0][0], m[0][1], m[1][0], m[1][1]);
        return [a, b, Complex64::new(m[2][2], 0.0)];
    }
    let (c2, c1, c0) = characteristic_coefficients(m);
    // μ = t + c2/3 gives t³ + p t + q = 0
    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = -(2.0 * c2 * c2 * c2 / 27.0) + c2 * c1 / 3.0 - c0;
    let disc = Complex64::new(q * q / 4.0 + p * p * p / 27.0, 0.0).sqrt();
    let (plus, minus) = (-q / 2.0 + disc, -q / 2.0 - disc);
    let u = if plus.norm() >= minus.norm() { plus } else { minus }.cbrt();
    let omega = Complex64::new(-0.5, 0.5 * libm::sqrt(3.0));
    let mut roots = [Complex64::new(0.0, 0.0); 3];
    let mut uk = u;
    for root in roots.iter_mut() {
        let t = if uk.norm() == 0.0 { uk } else { uk - p / (uk * 3.0) };
        *root = t + shift;
        uk *= omega;
    }
    for root in roots.iter_mut() {
        for _ in 0..4 {
            let (f, df) = char_poly(m, *root);
            if df.norm() == 0.0 || f.norm() == 0.0 {
                break;
            }
            let next = *root - f / df;
            if !(next.re.is_finite() && next.im.is_finite()) {
                break;
            }
            if characteristic_residual(m, next) < characteristic_residual(m, *root) {
                *root = next;
            } else {
                break;
            }
        }
    }
    roots
}
