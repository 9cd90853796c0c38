//! Isotropic weights w(u), u = |z|², on the disk.

use crate::error::{AdqError, Result};
use crate::specfun::jacobi::jacobi_poly;
use crate::specfun::quadrature::gauss_jacobi;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightKind {
    /// (s−1)/π (1−u)^s
    Power { s: f64 },
    /// (−1)^m (η+m)/π (1−u)^{η+1} P_m^{(0,2η−1)}(1−2u)
    BasisProjector { m: usize },
    /// (2η−1)/(4π) (1−u)^{1/2}, taken with the quantizer 2P
    Half,
    /// monotone cubic interpolation of (u, w) samples, zero past the last sample
    Custom { table: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub kind: WeightKind,
    pub eta: f64,
    /// divides custom tables so that they integrate to one
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(skip)]
    slopes: Vec<f64>,
}

fn one() -> f64 {
    1.0
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            WeightKind::Power { s } if *s == self.eta + 1.0 => write!(f, "perelomov"),
            WeightKind::Power { s } => write!(f, "power:{s}"),
            WeightKind::BasisProjector { m } => write!(f, "basis:{m}"),
            WeightKind::Half => write!(f, "half"),
            WeightKind::Custom { table } => write!(f, "custom[{} samples]", table.len()),
        }
    }
}

impl WeightSpec {
    pub fn power(eta: f64, s: f64) -> Result<WeightSpec> {
        if !(s > 1.0 && s.is_finite()) {
            return Err(AdqError::Domain(format!(
                "power weight needs s > 1, got {s}"
            )));
        }
        Self::build(WeightKind::Power { s }, eta)
    }

    pub fn perelomov(eta: f64) -> Result<WeightSpec> {
        Self::power(eta, eta + 1.0)
    }

    pub fn basis_projector(eta: f64, m: usize) -> Result<WeightSpec> {
        Self::build(WeightKind::BasisProjector { m }, eta)
    }

    pub fn half(eta: f64) -> Result<WeightSpec> {
        Self::build(WeightKind::Half, eta)
    }

    /// Tabulated weight; the table is sorted, validated and renormalized.
    pub fn custom(eta: f64, mut table: Vec<(f64, f64)>) -> Result<WeightSpec> {
        table.sort_by(|a, b| a.0.total_cmp(&b.0));
        if table.len() < 2 {
            return Err(AdqError::Invalid(
                "custom weight needs at least two samples".into(),
            ));
        }
        if table.iter().any(|p| !(p.0.is_finite() && p.1.is_finite())) {
            return Err(AdqError::Invalid(
                "custom weight has non-finite samples".into(),
            ));
        }
        if table[0].0 != 0.0 || table.last().unwrap().0 >= 1.0 {
            return Err(AdqError::Invalid(
                "custom weight samples must start at u = 0 and stay below u = 1".into(),
            ));
        }
        if table.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(AdqError::Invalid(
                "custom weight has repeated u samples".into(),
            ));
        }
        let mut w = Self::build(WeightKind::Custom { table }, eta)?;
        let norm = w.normalization()?;
        if !(norm.abs() > 1e-300) {
            return Err(AdqError::Invalid("custom weight integrates to zero".into()));
        }
        if (norm - 1.0).abs() > 1e-8 {
            log::info!("custom weight renormalized by 1/{norm:.6e}");
        }
        w.scale = norm;
        Ok(w)
    }

    pub fn custom_from_csv(eta: f64, path: &Path) -> Result<WeightSpec> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| AdqError::Invalid(format!("{}: {e}", path.display())))?;
        let mut table = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| AdqError::Invalid(format!("{}: {e}", path.display())))?;
            if rec.len() < 2 {
                return Err(AdqError::Invalid(format!(
                    "{}: expected two columns u,w",
                    path.display()
                )));
            }
            match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
                (Ok(u), Ok(w)) => table.push((u, w)),
                // header line
                _ if table.is_empty() => continue,
                _ => {
                    return Err(AdqError::Invalid(format!(
                        "{}: bad row {:?}",
                        path.display(),
                        rec
                    )))
                }
            }
        }
        Self::custom(eta, table)
    }

    /// `power:s`, `perelomov`, `basis:m`, `half` or `custom:path`.
    pub fn parse(desc: &str, eta: f64) -> Result<WeightSpec> {
        let (kind, arg) = match desc.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (desc.trim(), None),
        };
        let need =
            || arg.ok_or_else(|| AdqError::Invalid(format!("weight `{desc}` needs a parameter")));
        match kind {
            "power" => {
                let s = need()?
                    .parse::<f64>()
                    .map_err(|e| AdqError::Invalid(format!("weight `{desc}`: {e}")))?;
                Self::power(eta, s)
            }
            "perelomov" => Self::perelomov(eta),
            "basis" | "basis_projector" => {
                let m = need()?
                    .parse::<usize>()
                    .map_err(|e| AdqError::Invalid(format!("weight `{desc}`: {e}")))?;
                Self::basis_projector(eta, m)
            }
            "half" => Self::half(eta),
            "custom" => Self::custom_from_csv(eta, Path::new(need()?)),
            _ => Err(AdqError::Invalid(format!("unknown weight kind `{kind}`"))),
        }
    }

    fn build(kind: WeightKind, eta: f64) -> Result<WeightSpec> {
        if !(eta > 0.5 && eta.is_finite()) {
            return Err(AdqError::Domain(format!("eta must exceed 1/2, got {eta}")));
        }
        let slopes = match &kind {
            WeightKind::Custom { table } => pchip_slopes(table),
            _ => Vec::new(),
        };
        Ok(WeightSpec {
            kind,
            eta,
            scale: 1.0,
            slopes,
        })
    }

    /// Restores interpolation state after deserialization.
    pub fn rehydrate(mut self) -> Result<WeightSpec> {
        if let WeightKind::Custom { table } = &self.kind {
            self.slopes = pchip_slopes(table);
        }
        Ok(self)
    }

    pub fn is_half(&self) -> bool {
        matches!(self.kind, WeightKind::Half)
    }

    pub fn is_perelomov(&self) -> bool {
        matches!(self.kind, WeightKind::Power { s } if s == self.eta + 1.0)
    }

    /// p with w(u) = (1−u)^p × (smooth) near u = 1; custom tables vanish past their support.
    pub fn boundary_order(&self) -> f64 {
        match &self.kind {
            WeightKind::Power { s } => *s,
            WeightKind::BasisProjector { .. } => self.eta + 1.0,
            WeightKind::Half => 0.5,
            WeightKind::Custom { .. } => f64::INFINITY,
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        let eta = self.eta;
        match &self.kind {
            WeightKind::Power { s } => (s - 1.0) / PI * (1.0 - u).powf(*s),
            WeightKind::BasisProjector { m } => {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sign * (eta + *m as f64) / PI
                    * (1.0 - u).powf(eta + 1.0)
                    * jacobi_poly(*m, 0.0, 2.0 * eta - 1.0, 1.0 - 2.0 * u)
            }
            WeightKind::Half => (2.0 * eta - 1.0) / (4.0 * PI) * (1.0 - u).sqrt(),
            WeightKind::Custom { table } => pchip_eval(table, &self.slopes, u) / self.scale,
        }
    }

    /// w(u)/(1−u)^p for the closed-form kinds, evaluated without the boundary factor.
    pub(crate) fn smooth_part(&self, u: f64) -> f64 {
        let eta = self.eta;
        match &self.kind {
            WeightKind::Power { s } => (s - 1.0) / PI,
            WeightKind::BasisProjector { m } => {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sign * (eta + *m as f64) / PI * jacobi_poly(*m, 0.0, 2.0 * eta - 1.0, 1.0 - 2.0 * u)
            }
            WeightKind::Half => (2.0 * eta - 1.0) / (4.0 * PI),
            WeightKind::Custom { .. } => self.eval(u),
        }
    }

    /// ∫_𝒟 w(|z|²) d²z/(1−|z|²)².
    pub fn normalization(&self) -> Result<f64> {
        match &self.kind {
            WeightKind::Custom { table } => {
                let raw = integrate_custom(table, 16, |u| self.eval(u) / (1.0 - u).powi(2))?;
                Ok(PI * raw)
            }
            _ => {
                // π ∫_0^1 w/(1−u)² du = π/2 · 2^{2−p} ∫ smooth · (1+v)^{p−2} dv
                let p = self.boundary_order();
                if p - 2.0 <= -1.0 {
                    return Err(AdqError::WeightEta(format!(
                        "weight {self} is not integrable against the invariant measure"
                    )));
                }
                let deg = match &self.kind {
                    WeightKind::BasisProjector { m } => *m,
                    _ => 0,
                };
                let q = gauss_jacobi(deg / 2 + 4, 0.0, p - 2.0)?;
                let s = q.integrate(|v| self.smooth_part(0.5 * (1.0 - v)));
                Ok(PI * 0.5 * 2f64.powf(2.0 - p) * s)
            }
        }
    }
}

/// Σ over the table's intervals of Gauss–Legendre sums of `f`.
pub(crate) fn integrate_custom<F: Fn(f64) -> f64>(
    table: &[(f64, f64)],
    order: usize,
    f: F,
) -> Result<f64> {
    let q = gauss_jacobi(order, 0.0, 0.0)?;
    let mut acc = crate::specfun::series::NeumaierSum::default();
    for w in table.windows(2) {
        let (a, b) = (w[0].0, w[1].0);
        let h = 0.5 * (b - a);
        for (&x, &wt) in q.nodes.iter().zip(&q.weights) {
            acc.add(h * wt * f(a + h * (1.0 + x)));
        }
    }
    Ok(acc.total())
}

/// Fritsch–Carlson monotone slopes.
fn pchip_slopes(t: &[(f64, f64)]) -> Vec<f64> {
    let n = t.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let h: Vec<f64> = t.windows(2).map(|w| w[1].0 - w[0].0).collect();
    let delta: Vec<f64> = t
        .windows(2)
        .zip(&h)
        .map(|(w, h)| (w[1].1 - w[0].1) / h)
        .collect();
    let mut d = vec![0.0; n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return d;
    }
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s * d0 <= 0.0 {
            0.0
        } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    d[0] = end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn pchip_eval(t: &[(f64, f64)], d: &[f64], u: f64) -> f64 {
    let last = t.len() - 1;
    if u < t[0].0 || u > t[last].0 {
        return 0.0;
    }
    let k = match t.binary_search_by(|p| p.0.total_cmp(&u)) {
        Ok(i) => return t[i].1,
        Err(i) => i - 1,
    };
    let (x0, y0) = t[k];
    let (x1, y1) = t[k + 1];
    let h = x1 - x0;
    let s = (u - x0) / h;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    h00 * y0 + h10 * h * d[k] + h01 * y1 + h11 * h * d[k + 1]
}
