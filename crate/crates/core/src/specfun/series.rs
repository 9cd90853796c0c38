//! Compensated summation, Levin sequence transforms and Abel summation.

use crate::error::{AdqError, Result};
use serde::Serialize;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut s = NeumaierSum::default();
    xs.into_iter().for_each(|x| s.add(x));
    s.total()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevinKind {
    /// remainder estimate (n+1)·a_n; suited to logarithmic convergence
    U,
    /// remainder estimate a_n; suited to alternating series
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesEstimate {
    pub value: f64,
    pub error: f64,
    pub terms: usize,
}

/// Levin transform T_k^{(0)} of the partial sums of `terms`, choosing the order
/// with the smallest difference between consecutive orders.
pub fn levin(terms: &[f64], kind: LevinKind) -> Result<SeriesEstimate> {
    let lead = terms.iter().take_while(|&&a| a == 0.0).count();
    let a = &terms[lead..];
    if a.len() < 3 {
        return Ok(SeriesEstimate {
            value: compensated_sum(a.iter().copied()),
            error: 0.0,
            terms: terms.len(),
        });
    }
    let mut partial = Vec::with_capacity(a.len());
    let mut acc = NeumaierSum::default();
    for &x in a {
        acc.add(x);
        partial.push(acc.total());
    }
    let omega: Vec<f64> = a
        .iter()
        .enumerate()
        .map(|(m, &x)| match kind {
            LevinKind::U => (m as f64 + 1.0) * x,
            LevinKind::T => x,
        })
        .collect();
    if omega.iter().any(|&w| w == 0.0 || !w.is_finite()) {
        // interior zeros break the remainder model; the partial sum is the best we have
        let last = *partial.last().unwrap();
        return Ok(SeriesEstimate {
            value: last,
            error: (last - partial[partial.len() - 2]).abs(),
            terms: terms.len(),
        });
    }
    let kmax = (a.len() - 1).min(24);
    let transform = |k: usize| -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        let mut binom = 1.0;
        let kf = k as f64;
        for j in 0..=k {
            let ratio = ((j as f64 + 1.0) / (kf + 1.0)).powi(k as i32 - 1);
            let c = if j % 2 == 0 { binom } else { -binom } * ratio / omega[j];
            num += c * partial[j];
            den += c;
            binom *= (kf - j as f64) / (j as f64 + 1.0);
        }
        num / den
    };
    let vals: Vec<f64> = (1..=kmax).map(transform).collect();
    let mut best = (vals[vals.len() - 1], f64::INFINITY);
    for k in 2..vals.len() {
        let err = (vals[k] - vals[k - 1])
            .abs()
            .max((vals[k - 1] - vals[k - 2]).abs() * 0.5);
        if vals[k].is_finite() && err < best.1 {
            best = (vals[k], err);
        }
    }
    Ok(SeriesEstimate {
        value: best.0,
        error: best.1,
        terms: terms.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbelOptions {
    pub ladder: Vec<f64>,
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for AbelOptions {
    fn default() -> Self {
        AbelOptions {
            ladder: vec![0.9, 0.99, 0.999, 0.9999],
            tol: 1e-14,
            max_terms: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbelSum {
    pub value: f64,
    pub error: f64,
    /// (t, Σ a_n t^n, error at that t)
    pub ladder: Vec<(f64, f64, f64)>,
}

/// Abel sum lim_{t→1⁻} Σ a_n t^n by evaluating the power series on a ladder of t
/// and extrapolating polynomially in 1−t.
pub fn abel_sum<I: Iterator<Item = f64>>(terms: I, opts: &AbelOptions) -> Result<AbelSum> {
    if opts.ladder.len() < 2 || opts.ladder.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
        return Err(AdqError::Invalid(
            "Abel ladder needs at least two t in (0,1)".into(),
        ));
    }
    let mut terms = terms;
    let mut cache: Vec<f64> = Vec::new();
    let mut exhausted = false;
    let mut fetch = |n: usize, cache: &mut Vec<f64>| -> Option<f64> {
        while cache.len() <= n && !exhausted {
            match terms.next() {
                Some(x) => cache.push(x),
                None => exhausted = true,
            }
        }
        cache.get(n).copied()
    };

    let mut ladder = Vec::with_capacity(opts.ladder.len());
    for &t in &opts.ladder {
        let mut acc = NeumaierSum::default();
        let mut tn = 1.0;
        let mut quiet = 0usize;
        let mut converged = false;
        let mut n = 0usize;
        let mut scale = 0.0f64;
        while n < opts.max_terms {
            let Some(a) = fetch(n, &mut cache) else {
                converged = true;
                break;
            };
            let x = a * tn;
            acc.add(x);
            scale = scale.max(acc.total().abs()).max(x.abs());
            if x.abs() <= opts.tol * scale.max(1.0) {
                quiet += 1;
                if quiet >= 32 {
                    converged = true;
                    break;
                }
            } else {
                quiet = 0;
            }
            tn *= t;
            n += 1;
        }
        let (val, err) = if converged {
            (
                acc.total(),
                64.0 * f64::EPSILON * scale.max(1.0) * (n as f64).sqrt(),
            )
        } else {
            let m = opts.max_terms.min(60);
            let scaled: Vec<f64> = (0..m)
                .filter_map(|k| fetch(k, &mut cache).map(|a| a * t.powi(k as i32)))
                .collect();
            let est = levin(&scaled, LevinKind::T)?;
            (est.value, est.error)
        };
        ladder.push((t, val, err));
    }

    let hs: Vec<f64> = ladder.iter().map(|l| 1.0 - l.0).collect();
    let fs: Vec<f64> = ladder.iter().map(|l| l.1).collect();
    let extrap = neville_at_zero(&hs, &fs);
    let point_err = ladder.iter().map(|l| l.2).fold(0.0, f64::max);
    let diffs: Vec<f64> = extrap.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let value = *extrap.last().unwrap();
    let noise = 1e3 * f64::EPSILON * fs.iter().fold(1.0f64, |m, f| m.max(f.abs())) + point_err;
    let last = *diffs.last().unwrap();
    if diffs.len() >= 2 {
        let prev = diffs[diffs.len() - 2];
        if last > prev && last > 10.0 * noise {
            return Err(AdqError::AbelUnreliable(format!(
                "extrapolation residuals {diffs:?} are not decreasing"
            )));
        }
    }
    let error = (last + point_err).max(64.0 * f64::EPSILON * value.abs().max(1.0));
    Ok(AbelSum {
        value,
        error,
        ladder,
    })
}

/// Extrapolants to h = 0 using the first 1, 2, ... points (Neville's scheme).
fn neville_at_zero(h: &[f64], f: &[f64]) -> Vec<f64> {
    let m = h.len();
    let mut p = f.to_vec();
    let mut diag = vec![p[0]];
    // p[i] after stage s holds the interpolant through points i-s..=i evaluated at 0
    for s in 1..m {
        for i in (s..m).rev() {
            p[i] = (h[i] * p[i - 1] - h[i - s] * p[i]) / (h[i] - h[i - s]);
        }
        diag.push(p[s]);
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_beats_naive() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(xs), 2.0);
    }

    #[test]
    fn levin_u_log_series() {
        // Σ 1/k² = π²/6
        let terms: Vec<f64> = (1..40).map(|k| 1.0 / (k as f64).powi(2)).collect();
        let e = levin(&terms, LevinKind::U).unwrap();
        let exact = std::f64::consts::PI.powi(2) / 6.0;
        assert!((e.value - exact).abs() < 1e-10, "{e:?}");
        assert!((e.value - exact).abs() <= 10.0 * e.error + 1e-13);
    }

    #[test]
    fn levin_t_divergent_alternating() {
        // Σ (−1)^k (k+1) = 1/4 in the Abel sense
        let terms: Vec<f64> = (0..30)
            .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } * (k as f64 + 1.0))
            .collect();
        let e = levin(&terms, LevinKind::T).unwrap();
        assert!((e.value - 0.25).abs() < 1e-10, "{e:?}");
    }

    #[test]
    fn abel_examples() {
        let o = AbelOptions::default();
        let alt = abel_sum(
            (0..).map(|n: u64| if n.is_multiple_of(2) { 1.0 } else { -1.0 }),
            &o,
        )
        .unwrap();
        assert!((alt.value - 0.5).abs() < 1e-9, "{alt:?}");
        let lin = abel_sum(
            (0..).map(|n: u64| 2.0 * n as f64 * if n.is_multiple_of(2) { 1.0 } else { -1.0 }),
            &o,
        )
        .unwrap();
        assert!((lin.value + 0.5).abs() < 1e-8, "{lin:?}");
        let geo = abel_sum((0..).map(|n: i32| 0.5f64.powi(n)), &o).unwrap();
        assert!((geo.value - 2.0).abs() <= geo.error, "{geo:?}");
    }

    #[test]
    fn abel_levin_fallback_when_capped() {
        let o = AbelOptions {
            max_terms: 200,
            ..AbelOptions::default()
        };
        let lin = abel_sum(
            (0..).map(|n: u64| 2.0 * n as f64 * if n.is_multiple_of(2) { 1.0 } else { -1.0 }),
            &o,
        )
        .unwrap();
        assert!((lin.value + 0.5).abs() < 1e-8, "{lin:?}");
    }

    #[test]
    fn abel_rejects_bad_ladder() {
        let o = AbelOptions {
            ladder: vec![0.5, 1.2],
            ..AbelOptions::default()
        };
        assert!(abel_sum(std::iter::repeat(1.0), &o).is_err());
    }

    #[test]
    fn abel_flags_unreliable() {
        // a_n = (−1)^n n! has an Abel function with no useful expansion at t = 1 on this ladder
        let o = AbelOptions {
            max_terms: 40,
            ..AbelOptions::default()
        };
        let mut f = 1.0f64;
        let terms = (0..).map(move |n: u32| {
            if n > 0 {
                f *= n as f64;
            }
            if n.is_multiple_of(2) {
                f
            } else {
                -f
            }
        });
        let r = abel_sum(terms.map(|x| x * x), &o);
        assert!(r.is_err() || r.unwrap().error > 1e-3);
    }
}
