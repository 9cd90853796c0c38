//! Gauss–Jacobi rules on (−1, 1) by the Golub–Welsch eigenvalue method.

use crate::error::{AdqError, Result};
use crate::specfun::gamma::beta;
use crate::specfun::jacobi::{jacobi_deriv, jacobi_poly};
use crate::specfun::series::NeumaierSum;
use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

/// Nodes and weights for ∫ (1−v)^α (1+v)^β f(v) dv.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialQuadrature {
    pub alpha: f64,
    pub beta: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl RadialQuadrature {
    /// Σ w_i f(v_i) with compensated accumulation.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let mut acc = NeumaierSum::default();
        for (&v, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(v));
        }
        acc.total()
    }

    /// ∫ (1−v)^α (1+v)^β dv.
    pub fn mass(&self) -> f64 {
        jacobi_mass(self.alpha, self.beta)
    }
}

pub fn jacobi_mass(alpha: f64, beta_: f64) -> f64 {
    2f64.powf(alpha + beta_ + 1.0) * beta(alpha + 1.0, beta_ + 1.0).unwrap_or(f64::NAN)
}

/// Gauss–Jacobi rule of the given order for the weight (1−v)^α (1+v)^β.
pub fn gauss_jacobi(order: usize, alpha: f64, beta_: f64) -> Result<RadialQuadrature> {
    if order == 0 {
        return Err(AdqError::Domain("quadrature order must be positive".into()));
    }
    if !(alpha > -1.0 && beta_ > -1.0) {
        return Err(AdqError::Domain(format!(
            "Gauss-Jacobi exponents must exceed -1, got ({alpha}, {beta_})"
        )));
    }
    let (a, b) = (alpha, beta_);
    let ab = a + b;
    let mut jm = DMatrix::<f64>::zeros(order, order);
    for i in 0..order {
        let n = i as f64;
        let diag = if i == 0 {
            (b - a) / (ab + 2.0)
        } else {
            let s = 2.0 * n + ab;
            (b * b - a * a) / (s * (s + 2.0))
        };
        jm[(i, i)] = diag;
        if i + 1 < order {
            let m = n + 1.0;
            let s = 2.0 * m + ab;
            let b2 = if i == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * m * (m + a) * (m + b) * (m + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            let off = b2.sqrt();
            jm[(i, i + 1)] = off;
            jm[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::try_new(jm, f64::EPSILON, 10_000).ok_or_else(|| {
        AdqError::Numeric(format!(
            "Golub-Welsch eigen-solve did not converge (order {order}, alpha {a}, beta {b})"
        ))
    })?;
    let mu0 = jacobi_mass(a, b);
    let mut pairs: Vec<(f64, f64)> = (0..order)
        .map(|j| {
            let v0 = eig.eigenvectors[(0, j)];
            (eig.eigenvalues[j], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    // Newton-polish the nodes and take weights from the derivative formula
    // w_i = C / ((1−x_i²) P_n′(x_i)²), which keeps small weights accurate
    let ln_c = ln_gamma(order as f64 + a + 1.0) + ln_gamma(order as f64 + b + 1.0)
        - ln_gamma(order as f64 + a + b + 1.0)
        - ln_gamma(order as f64 + 1.0)
        + (a + b + 1.0) * std::f64::consts::LN_2;
    for p in pairs.iter_mut() {
        let mut x = p.0;
        for _ in 0..3 {
            let f = jacobi_poly(order, a, b, x);
            let d = jacobi_deriv(order, a, b, x);
            if d == 0.0 || !d.is_finite() {
                break;
            }
            let step = f / d;
            let nx = x - step;
            if !(nx > -1.0 && nx < 1.0) || step.abs() > 1e-6 {
                break;
            }
            x = nx;
        }
        let d = jacobi_deriv(order, a, b, x);
        let ln_w = ln_c - ((1.0 - x) * (1.0 + x)).ln() - 2.0 * d.abs().ln();
        let w = ln_w.exp();
        if w.is_finite() && w > 0.0 && (w - p.1).abs() <= 1e-6 * p.1.max(1e-300) + 1e-12 * mu0 {
            *p = (x, w);
        }
    }
    let nodes: Vec<f64> = pairs
        .iter()
        .map(|p| p.0.clamp(-1.0 + 1e-300, 1.0 - 1e-300))
        .collect();
    let weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) || !mu0.is_finite() {
        return Err(AdqError::Numeric(format!(
            "non-positive Gauss-Jacobi weight (order {order}, alpha {a}, beta {b})"
        )));
    }
    Ok(RadialQuadrature {
        alpha,
        beta: beta_,
        nodes,
        weights,
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::binomial;

    /// Exact moment of v^k via v = (1+v) − 1 expanded binomially, plus the
    /// scale Σ|terms| for a relative tolerance.
    fn moment(k: usize, a: f64, b: f64) -> (f64, f64) {
        let mut s = 0.0;
        let mut scale = 0.0;
        for j in 0..=k {
            let sign = if (k - j).is_multiple_of(2) { 1.0 } else { -1.0 };
            let t = binomial(k as f64, j) * jacobi_mass(a, b + j as f64);
            s += sign * t;
            scale += t;
        }
        (s, scale)
    }

    #[test]
    fn midpoint_rule() {
        let q = gauss_jacobi(1, 0.0, 0.0).unwrap();
        assert!(q.nodes[0].abs() < 1e-15);
        assert!((q.weights[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn monomials_exact() {
        for &(a, b) in &[
            (0.0, 0.0),
            (0.0, 2.0),
            (1.0, 2.0),
            (0.5, -0.5),
            (2.0, 0.5),
            (12.0, 1.0),
        ] {
            for order in 1..=12 {
                let q = gauss_jacobi(order, a, b).unwrap();
                assert!(q.nodes.windows(2).all(|w| w[0] < w[1]));
                assert!(q.nodes.iter().all(|v| v.abs() < 1.0));
                for k in 0..2 * order {
                    let (m, scale) = moment(k, a, b);
                    let qv = q.integrate(|v| v.powi(k as i32));
                    assert!(
                        (qv - m).abs() <= 1e-12 * scale,
                        "a={a} b={b} order={order} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn hand_antiderivative() {
        // ∫ v^5 (1−v)(1+v)^2 dv = ∫ (v^5 + v^6 − v^7 − v^8) dv = 2/7 − 2/9
        let q = gauss_jacobi(3, 1.0, 2.0).unwrap();
        let exact = 2.0 / 7.0 - 2.0 / 9.0;
        assert!((q.integrate(|v| v.powi(5)) - exact).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(gauss_jacobi(4, -1.0, 0.0).is_err());
        assert!(gauss_jacobi(0, 0.0, 0.0).is_err());
    }

    #[test]
    fn large_order_and_exponent() {
        let q = gauss_jacobi(200, 150.0, 2.0).unwrap();
        let rel = (q.integrate(|_| 1.0) - q.mass()).abs() / q.mass();
        assert!(rel < 1e-12, "{rel}");
    }
}
