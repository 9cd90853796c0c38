//! Terminating hypergeometric sums with first numerator parameter −n.

use crate::error::{AdqError, Result};

fn check_denominator(q: f64, n: usize, name: &str) -> Result<()> {
    // (q)_k for k ≤ n vanishes iff q = −j with 0 ≤ j ≤ n−1
    if q <= 0.0 && q == q.round() && ((-q) as usize) < n {
        return Err(AdqError::Domain(format!(
            "{name} = {q} is a pole inside the terminating sum of length {}",
            n + 1
        )));
    }
    Ok(())
}

/// ₂F₁(−n, b; c; x) summed over its n+1 terms.
pub fn hyp2f1_terminating(n: usize, b: f64, c: f64, x: f64) -> Result<f64> {
    check_denominator(c, n, "c")?;
    let nf = n as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..n {
        let kf = k as f64;
        term *= (-nf + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * x;
        sum += term;
    }
    Ok(sum)
}

/// ₃F₂(−n, p2, p3; q1, q2; 1) summed over its n+1 terms.
pub fn hyp3f2_terminating(n: usize, p2: f64, p3: f64, q1: f64, q2: f64) -> Result<f64> {
    check_denominator(q1, n, "q1")?;
    check_denominator(q2, n, "q2")?;
    let nf = n as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..n {
        let kf = k as f64;
        term *= (-nf + kf) * (p2 + kf) * (p3 + kf) / ((q1 + kf) * (q2 + kf) * (kf + 1.0));
        sum += term;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::jacobi::jacobi_poly;

    #[test]
    fn small_cases() {
        assert_eq!(hyp2f1_terminating(0, 3.0, 2.0, 0.7).unwrap(), 1.0);
        assert!(hyp2f1_terminating(1, 5.0, 1.0, 0.2).unwrap().abs() < 1e-15);
        assert_eq!(hyp3f2_terminating(0, 1.0, 2.0, 3.0, 4.0).unwrap(), 1.0);
        let (p2, p3, q1, q2) = (4.5, 2.0, 1.5, 3.5);
        let v = hyp3f2_terminating(1, p2, p3, q1, q2).unwrap();
        assert!((v - (1.0 - p2 * p3 / (q1 * q2))).abs() < 1e-15);
    }

    #[test]
    fn poles_rejected() {
        assert!(hyp2f1_terminating(3, 1.0, -1.0, 0.5).is_err());
        // c = −3 is only reached at k = 4 > n = 3
        assert!(hyp2f1_terminating(3, 1.0, -3.0, 0.5).is_ok());
        assert!(hyp3f2_terminating(2, 1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn diagonal_matrix_element_identity() {
        // ₂F₁(−n, n+2η; 1; u) = P_n^{(0,2η−1)}(1−2u); the alternating sum loses
        // digits in proportion to Σ|terms|
        for &eta in &[1.5, 2.0, 3.0] {
            for n in 0..=20 {
                for &u in &[0.04, 0.1, 0.25, 0.6] {
                    let f = hyp2f1_terminating(n, n as f64 + 2.0 * eta, 1.0, u).unwrap();
                    let p = jacobi_poly(n, 0.0, 2.0 * eta - 1.0, 1.0 - 2.0 * u);
                    let scale = hyp2f1_terminating(n, n as f64 + 2.0 * eta, 1.0, -u)
                        .unwrap()
                        .abs();
                    assert!(
                        (f - p).abs() <= 1e-14 * scale.max(1.0),
                        "eta={eta} n={n} u={u}"
                    );
                }
            }
        }
    }
}
