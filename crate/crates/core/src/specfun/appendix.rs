//! Numerical certification of the Jacobi, hypergeometric and beta-function integrals.

use crate::error::Result;
use crate::report::{rel_dev, Check};
use crate::specfun::gamma::gamma_ratio;
use crate::specfun::hypergeom::{hyp2f1_terminating, hyp3f2_terminating};
use crate::specfun::jacobi::{jacobi_all, jacobi_poly};
use crate::specfun::quadrature::gauss_jacobi;
use statrs::function::gamma::ln_gamma;

/// Γ(α+n+1)Γ(β+n+1) / (n! Γ(α+β+n+1)).
fn norm_ratio(alpha: f64, beta: f64, n: usize) -> Result<f64> {
    let nf = n as f64;
    gamma_ratio(
        &[alpha + nf + 1.0, beta + nf + 1.0],
        &[nf + 1.0, alpha + beta + nf + 1.0],
    )
}

/// Largest relative error of the orthogonality relation, off-diagonal entries
/// measured against the diagonal norm.
pub fn jacobi_orthogonality(alpha: f64, beta: f64, nmax: usize) -> Result<f64> {
    let q = gauss_jacobi(nmax + 2, alpha, beta)?;
    let table: Vec<Vec<f64>> = q
        .nodes
        .iter()
        .map(|&v| jacobi_all(nmax, alpha, beta, v))
        .collect();
    let mut worst = 0.0f64;
    for m in 0..=nmax {
        let hm = 2f64.powf(alpha + beta + 1.0) / (alpha + beta + 2.0 * m as f64 + 1.0)
            * norm_ratio(alpha, beta, m)?;
        for n in 0..=m {
            let s: f64 = q
                .weights
                .iter()
                .zip(&table)
                .map(|(w, p)| w * p[m] * p[n])
                .sum();
            let e = if m == n { rel_dev(s, hm) } else { s.abs() / hm };
            worst = worst.max(e);
        }
    }
    Ok(worst)
}

pub fn jac12_deviation(alpha: f64, beta: f64, n: usize) -> Result<f64> {
    let q = gauss_jacobi(n + 2, alpha, beta - 1.0)?;
    let lhs = q.integrate(|v| jacobi_poly(n, alpha, beta, v).powi(2));
    let rhs = 2f64.powf(alpha + beta) / beta * norm_ratio(alpha, beta, n)?;
    Ok(rel_dev(lhs, rhs))
}

pub fn jac22_closed(alpha: f64, beta: f64, n: usize) -> Result<f64> {
    let nf = n as f64;
    Ok(
        2f64.powf(alpha + beta - 1.0) / (beta * (beta + 1.0) * (beta - 1.0))
            * norm_ratio(alpha, beta, n)?
            * ((beta + 1.0) * (alpha + beta) + 2.0 * (alpha + beta + nf + 1.0) * nf),
    )
}

pub fn jac22_deviation(alpha: f64, beta: f64, n: usize) -> Result<f64> {
    let q = gauss_jacobi(n + 2, alpha, beta - 2.0)?;
    let lhs = q.integrate(|v| jacobi_poly(n, alpha, beta, v).powi(2));
    Ok(rel_dev(lhs, jac22_closed(alpha, beta, n)?))
}

/// ∫ (1−x)^ρ (1+x)^σ P_n^{(μ,ν)}(x) dx through the ₃F₂ closed form.
pub fn jacobi_moment_closed(rho: f64, sigma: f64, mu: f64, nu: f64, n: usize) -> Result<f64> {
    let nf = n as f64;
    let pre = 2f64.powf(rho + sigma + 1.0)
        * gamma_ratio(
            &[rho + 1.0, sigma + 1.0, nf + 1.0 + mu],
            &[nf + 1.0, rho + sigma + 2.0, mu + 1.0],
        )?;
    Ok(pre
        * hyp3f2_terminating(
            n,
            mu + nu + nf + 1.0,
            rho + 1.0,
            mu + 1.0,
            rho + sigma + 2.0,
        )?)
}

/// Absolute deviation scaled by the integral of |P|.
pub fn jacobi_moment_deviation(rho: f64, sigma: f64, mu: f64, nu: f64, n: usize) -> Result<f64> {
    let q = gauss_jacobi(n + 2, rho, sigma)?;
    let lhs = q.integrate(|x| jacobi_poly(n, mu, nu, x));
    let scale = q
        .integrate(|x| jacobi_poly(n, mu, nu, x).abs())
        .max(q.mass() * 1e-3);
    Ok((lhs - jacobi_moment_closed(rho, sigma, mu, nu, n)?).abs() / scale)
}

/// 2(2η−1) ∫_0^1 (1−u)^{2η−2} (1+u)^{−2η} ₂F₁(−n, n+2η; 1; 4u/(1+u)²) du.
pub fn hyper_integral(eta: f64, n: usize, order: usize) -> Result<f64> {
    // u = (1+x)/2 absorbs (1−u)^{2η−2} into the rule
    let q = gauss_jacobi(order, 2.0 * eta - 2.0, 0.0)?;
    let scale = 2f64.powf(-(2.0 * eta - 2.0)) * 0.5;
    let mut err = None;
    let s = q.integrate(|x| {
        let u = 0.5 * (1.0 + x);
        let y = 4.0 * u / (1.0 + u).powi(2);
        match hyp2f1_terminating(n, n as f64 + 2.0 * eta, 1.0, y) {
            Ok(f) => (1.0 + u).powf(-2.0 * eta) * f,
            Err(e) => {
                err = Some(e);
                0.0
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(2.0 * (2.0 * eta - 1.0) * scale * s)
}

fn beta_exact(x: f64, y: f64) -> f64 {
    (ln_gamma(x) + ln_gamma(y) - ln_gamma(x + y)).exp()
}

/// ∫ over (a, b) of (t−a)^p (b−t)^q with each endpoint singularity carried by its own rule.
fn split_singular_integral(a: f64, b: f64, p: f64, q: f64, order: usize) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    // left piece: t = mid − (half/2)(1−v)... map [a, mid] with v ∈ (−1,1), t = a + (half/2)(1+v)
    let left_rule = gauss_jacobi(order, 0.0, p)?;
    let hl = 0.5 * half;
    let left = left_rule.integrate(|v| {
        let t = a + hl * (1.0 + v);
        (b - t).powf(q)
    }) * hl.powf(p + 1.0);
    let right_rule = gauss_jacobi(order, q, 0.0)?;
    let right = right_rule.integrate(|v| {
        let t = mid + hl * (1.0 + v);
        (t - a).powf(p)
    }) * hl.powf(q + 1.0);
    Ok(left + right)
}

/// Largest relative deviation of the two integral forms of B(x, y) from the Γ-ratio.
pub fn beta_forms_deviation(x: f64, y: f64) -> Result<f64> {
    let exact = beta_exact(x, y);
    let first = split_singular_integral(0.0, 1.0, x - 1.0, y - 1.0, 48)?;
    let second = 2f64.powf(1.0 - x - y) * split_singular_integral(-1.0, 1.0, y - 1.0, x - 1.0, 48)?;
    Ok(rel_dev(first, exact).max(rel_dev(second, exact)))
}

/// All appendix identities as report checks.
pub fn appendix_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let mut push = |name: String, reference: &str, r: Result<f64>, tol: f64| {
        out.push(match r {
            Ok(m) => Check::deviation(name, reference, m, tol),
            Err(e) => Check::errored(name, reference, e.to_string()),
        });
    };

    let ortho_ref = "int (1-v)^a (1+v)^b P_m P_n dv = delta_mn 2^(a+b+1)/(a+b+2n+1) G(a+n+1)G(b+n+1)/(n! G(a+b+n+1))";
    for &(a, b) in &[(0.0, 1.0), (1.0, 2.0), (2.0, 0.5)] {
        push(
            format!("appendix.jacobi_orthogonality.a{a}.b{b}"),
            ortho_ref,
            jacobi_orthogonality(a, b, 10),
            1e-10,
        );
    }

    let j12_ref = "int (1-v)^a (1+v)^(b-1) P_n^2 dv = 2^(a+b)/b G(a+n+1)G(b+n+1)/(n! G(a+b+n+1))";
    let j22_ref = "int (1-v)^a (1+v)^(b-2) P_n^2 dv = 2^(a+b-1)/(b(b+1)(b-1)) G(a+n+1)G(b+n+1)/(n! G(a+b+n+1)) [(b+1)(a+b)+2(a+b+n+1)n]";
    for &a in &[0.0, 1.0, 2.0] {
        for &b in &[0.5, 1.0, 1.5, 3.0] {
            let worst12 =
                (0..=8).try_fold(0.0f64, |m, n| jac12_deviation(a, b, n).map(|d| m.max(d)));
            if b != 1.5 {
                push(format!("appendix.jac12.a{a}.b{b}"), j12_ref, worst12, 1e-9);
            }
            if b > 1.0 {
                let worst22 =
                    (0..=8).try_fold(0.0f64, |m, n| jac22_deviation(a, b, n).map(|d| m.max(d)));
                push(format!("appendix.jac22.a{a}.b{b}"), j22_ref, worst22, 1e-9);
            }
        }
    }

    let ji_ref = "int (1-x)^r (1+x)^s P_n^(mu,nu) dx = 2^(r+s+1) G(r+1)G(s+1)G(n+1+mu)/(n! G(r+s+2)G(mu+1)) 3F2(-n,mu+nu+n+1,r+1;mu+1,r+s+2;1)";
    for &rho in &[0.5, 1.0, 2.0] {
        for &sigma in &[0.5, 1.0, 2.0] {
            let mut worst: Result<f64> = Ok(0.0);
            for &mu in &[0.0, 1.0, 2.0] {
                for &nu in &[0.0, 1.0, 2.0] {
                    for n in 0..=6 {
                        worst = worst.and_then(|w| {
                            jacobi_moment_deviation(rho, sigma, mu, nu, n).map(|d| w.max(d))
                        });
                    }
                }
            }
            push(
                format!("appendix.jacobi_moment.r{rho}.s{sigma}"),
                ji_ref,
                worst,
                1e-9,
            );
        }
    }

    let hyper_ref =
        "2(2eta-1) int_0^1 (1-u)^(2eta-2) (1+u)^(-2eta) 2F1(-n,n+2eta;1;4u/(1+u)^2) du = (-1)^n";
    for &eta in &[1.5, 2.0, 3.0] {
        let worst = (0..=10).try_fold(0.0f64, |m, n| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            hyper_integral(eta, n, 64).map(|v| m.max((v - sign).abs()))
        });
        push(format!("appendix.hyper.eta{eta}"), hyper_ref, worst, 1e-8);
    }

    let beta_ref = "B(x,y) = G(x)G(y)/G(x+y) = int_0^1 t^(x-1)(1-t)^(y-1) dt = 2^(1-x-y) int_-1^1 (1-t)^(x-1)(1+t)^(y-1) dt";
    let grid = [0.5, 1.5, 3.0];
    let mut worst: Result<f64> = Ok(0.0);
    for &x in &grid {
        for &y in &grid {
            worst = worst.and_then(|w| beta_forms_deviation(x, y).map(|d| w.max(d)));
        }
    }
    push("appendix.beta_forms".into(), beta_ref, worst, 1e-10);
    out
}
