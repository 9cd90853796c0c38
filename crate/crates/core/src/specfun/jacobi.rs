//! Jacobi polynomials P_n^{(α,β)}(x) by three-term recurrence.

use crate::error::{AdqError, Result};
use crate::specfun::gamma::gamma_ratio;

/// Degree-`n` Jacobi polynomial at `x`.
pub fn jacobi_poly(n: usize, alpha: f64, beta: f64, x: f64) -> f64 {
    let mut out = 0.0;
    JacobiSeq::new(alpha, beta, x)
        .take(n + 1)
        .for_each(|p| out = p);
    out
}

/// `P_0 .. P_n` at one point.
pub fn jacobi_all(n: usize, alpha: f64, beta: f64, x: f64) -> Vec<f64> {
    JacobiSeq::new(alpha, beta, x).take(n + 1).collect()
}

/// Derivative d/dx P_n^{(α,β)}(x).
pub fn jacobi_deriv(n: usize, alpha: f64, beta: f64, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    0.5 * (n as f64 + alpha + beta + 1.0) * jacobi_poly(n - 1, alpha + 1.0, beta + 1.0, x)
}

/// Streams P_0, P_1, ... at a fixed point. Falls back to the explicit series for the
/// parameter combinations where the recurrence divides by zero.
#[derive(Debug, Clone)]
pub struct JacobiSeq {
    alpha: f64,
    beta: f64,
    x: f64,
    n: usize,
    prev: f64,
    cur: f64,
}

impl JacobiSeq {
    pub fn new(alpha: f64, beta: f64, x: f64) -> Self {
        JacobiSeq {
            alpha,
            beta,
            x,
            n: 0,
            prev: 0.0,
            cur: 1.0,
        }
    }
}

impl Iterator for JacobiSeq {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let (a, b, x) = (self.alpha, self.beta, self.x);
        let n = self.n;
        let val = match n {
            0 => 1.0,
            1 => (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0),
            _ => {
                let nf = n as f64;
                let s = 2.0 * nf + a + b;
                let c1 = 2.0 * nf * (nf + a + b) * (s - 2.0);
                if c1 == 0.0 {
                    jacobi_series(n, a, b, x)
                } else {
                    let c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
                    let c3 = 2.0 * (nf + a - 1.0) * (nf + b - 1.0) * s;
                    (c2 * self.cur - c3 * self.prev) / c1
                }
            }
        };
        self.prev = self.cur;
        self.cur = val;
        self.n += 1;
        Some(val)
    }
}

/// Explicit terminating series in (x−1)/2; pole-free in α, β.
fn jacobi_series(n: usize, a: f64, b: f64, x: f64) -> f64 {
    let y = 0.5 * (x - 1.0);
    let nf = n as f64;
    let mut sum = 0.0;
    for k in 0..=n {
        // (a+k+1)_{n−k}/(n−k)! · (n+a+b+1)_k/k!
        let mut t = 1.0;
        for j in 0..k {
            t *= (nf + a + b + 1.0 + j as f64) / (j as f64 + 1.0);
        }
        for j in 0..(n - k) {
            t *= (a + k as f64 + 1.0 + j as f64) / (j as f64 + 1.0);
        }
        sum += t * y.powi(k as i32);
    }
    sum
}

/// P_n^{(−a,β)}(x) for integer 0 ≤ a ≤ n through the reduction
/// P_n^{(−a,β)}(x) = Γ(n+β+1)(n−a)! / (Γ(n+β+1−a) n!) · ((x−1)/2)^a · P_{n−a}^{(a,β)}(x).
pub fn jacobi_negative_upper(n: usize, a: usize, beta: f64, x: f64) -> Result<f64> {
    if a > n {
        return Err(AdqError::Domain(format!(
            "negative upper parameter a={a} exceeds degree n={n}"
        )));
    }
    let nf = n as f64;
    let c = gamma_ratio(
        &[nf + beta + 1.0, (n - a) as f64 + 1.0],
        &[nf + beta + 1.0 - a as f64, nf + 1.0],
    )?;
    Ok(c * (0.5 * (x - 1.0)).powi(a as i32) * jacobi_poly(n - a, a as f64, beta, x))
}
