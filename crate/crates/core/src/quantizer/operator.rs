//! The diagonal quantizer M^{w;η} and its displacements M(p(z)) = U(p(z)) M U(p(z))†.

use super::weight::{WeightKind, WeightSpec};
use crate::error::{AdqError, Result};
use crate::geometry::DiskPoint;
use crate::repn::{FockOperator, RadialTable};
use crate::specfun::gamma::{gamma_ratio, ln_pochhammer_signed};
use crate::specfun::jacobi::jacobi_all;
use crate::specfun::quadrature::gauss_jacobi;
use crate::specfun::series::{
    abel_sum, compensated_sum, levin, AbelOptions, LevinKind, SeriesEstimate,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Cap on the k-series of a displaced profile with the given row count.
pub fn profile_terms(rows: usize) -> usize {
    (64 * rows).max(16384)
}

/// Diagonal quantizer with its first N entries as an operator and 4N entries stored.
#[derive(Debug, Clone)]
pub struct QuantizerOperator {
    weight: WeightSpec,
    diag: Vec<f64>,
    base: FockOperator,
}

#[derive(Serialize)]
struct QuantizerRepr<'a> {
    eta: f64,
    #[serde(rename = "N")]
    n: usize,
    weight: String,
    weight_spec: &'a WeightSpec,
    diagonal: &'a [f64],
}

impl Serialize for QuantizerOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QuantizerRepr {
            eta: self.eta(),
            n: self.dim(),
            weight: self.weight.to_string(),
            weight_spec: &self.weight,
            diagonal: &self.diag[..self.dim()],
        }
        .serialize(s)
    }
}

/// How the k-series Σ_k M_kk (·) is summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesMode {
    Direct,
    Abel,
    Auto,
}

/// Displaced quantizer at one radius: M(p(z))_{nn′} = e^{i(n′−n)φ} d_{nn′}.
#[derive(Debug, Clone)]
pub struct Profile {
    pub d: DMatrix<f64>,
    /// bound on the neglected part of the k-sum
    pub tail: f64,
}

/// Closed form 2(s−1)Γ(η+s−1)Γ(η−s+n+1)/(Γ(η+s+n)Γ(η−s+1)) = 2(s−1)(η−s+1)_n/(η+s−1)_{n+1}.
pub fn m_power_closed(eta: f64, s: f64, n: usize) -> Result<f64> {
    if s == eta + 1.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let num = match ln_pochhammer_signed(eta - s + 1.0, n)? {
        None => return Ok(0.0),
        Some(x) => x,
    };
    let den = ln_pochhammer_signed(eta + s - 1.0, n + 1)?
        .ok_or_else(|| AdqError::Domain(format!("eta + s - 1 = {} hits a pole", eta + s - 1.0)))?;
    Ok(2.0 * (s - 1.0) * num.1 * den.1 * (num.0 - den.0).exp())
}

/// The (−1)^n Γ(s−η)/Γ(s−η−n) arrangement of the same entries.
pub fn m_power_reflected(eta: f64, s: f64, n: usize) -> Result<f64> {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign
        * 2.0
        * (s - 1.0)
        * gamma_ratio(
            &[eta + s - 1.0, s - eta],
            &[eta + s + n as f64, s - eta - n as f64],
        )?)
}

/// Stored length of the diagonal for truncation N.
pub fn stored_len(n: usize) -> usize {
    4 * n
}

/// M_nn = (−1)^n 2^{2−η} π ∫ w((1−v)/2) (1+v)^{η−2} P_n^{(0,2η−1)}(v) dv for n < 4N.
pub fn m_diagonal(
    eta: f64,
    w: &WeightSpec,
    n: usize,
    quad_order: usize,
) -> Result<QuantizerOperator> {
    if (w.eta - eta).abs() > 0.0 {
        return Err(AdqError::Invalid(format!(
            "weight built for eta {} used at eta {eta}",
            w.eta
        )));
    }
    if n < 2 {
        return Err(AdqError::Shape(format!(
            "truncation N must be at least 2, got {n}"
        )));
    }
    let k_max = stored_len(n);
    let diag = match &w.kind {
        WeightKind::Half => (0..k_max)
            .map(|k| if k % 2 == 0 { 2.0 } else { -2.0 })
            .collect(),
        WeightKind::Custom { table } => custom_diagonal(eta, w, table, k_max)?,
        _ => weight_diagonal(eta, w, k_max, quad_order)?,
    };
    if let WeightKind::Custom { .. } = w.kind {
        let peak = diag.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let last = diag[k_max - 1].abs();
        if last > 1e-10 * peak {
            log::warn!("custom quantizer diagonal truncated at {k_max} with |M| = {last:.3e} still present");
        }
    }
    QuantizerOperator::from_parts(w.clone(), diag)
}

/// Quadrature of the diagonal integral for a closed-form weight.
pub fn weight_diagonal(
    eta: f64,
    w: &WeightSpec,
    k_max: usize,
    quad_order: usize,
) -> Result<Vec<f64>> {
    let p = w.boundary_order();
    let beta = eta - 2.0 + p;
    if !(beta > -1.0) {
        return Err(AdqError::WeightEta(format!(
            "(1+v)^(eta-2) w((1-v)/2) is not integrable at v = -1 for weight {w}, eta {eta}"
        )));
    }
    let deg_w = match &w.kind {
        WeightKind::BasisProjector { m } => *m,
        _ => 0,
    };
    let order = quad_order.max(k_max.div_ceil(2) + deg_w + 4);
    let q = gauss_jacobi(order, 0.0, beta)?;
    let mut acc = vec![crate::specfun::series::NeumaierSum::default(); k_max];
    for (&v, &wt) in q.nodes.iter().zip(&q.weights) {
        let sm = w.smooth_part(0.5 * (1.0 - v));
        for (k, pk) in jacobi_all(k_max - 1, 0.0, 2.0 * eta - 1.0, v)
            .into_iter()
            .enumerate()
        {
            acc[k].add(wt * sm * pk);
        }
    }
    let c = 2f64.powf(2.0 - eta - p) * PI;
    Ok(acc
        .into_iter()
        .enumerate()
        .map(|(k, a)| {
            if k % 2 == 0 {
                c * a.total()
            } else {
                -c * a.total()
            }
        })
        .collect())
}

/// M_kk = (−1)^k 2π ∫_0^1 w(u)(1−u)^{η−2} P_k^{(0,2η−1)}(1−2u) du over the table's support.
fn custom_diagonal(
    eta: f64,
    w: &WeightSpec,
    table: &[(f64, f64)],
    k_max: usize,
) -> Result<Vec<f64>> {
    let order = k_max.div_ceil(2) + 4;
    let q = gauss_jacobi(order, 0.0, 0.0)?;
    let mut acc = vec![crate::specfun::series::NeumaierSum::default(); k_max];
    for seg in table.windows(2) {
        let (a, b) = (seg[0].0, seg[1].0);
        let h = 0.5 * (b - a);
        for (&x, &wt) in q.nodes.iter().zip(&q.weights) {
            let u = a + h * (1.0 + x);
            let f = h * wt * w.eval(u) * (1.0 - u).powf(eta - 2.0);
            for (k, pk) in jacobi_all(k_max - 1, 0.0, 2.0 * eta - 1.0, 1.0 - 2.0 * u)
                .into_iter()
                .enumerate()
            {
                acc[k].add(f * pk);
            }
        }
    }
    Ok(acc
        .into_iter()
        .enumerate()
        .map(|(k, a)| {
            if k % 2 == 0 {
                2.0 * PI * a.total()
            } else {
                -2.0 * PI * a.total()
            }
        })
        .collect())
}

impl QuantizerOperator {
    pub(crate) fn from_parts(weight: WeightSpec, diag: Vec<f64>) -> Result<QuantizerOperator> {
        let n = diag.len() / 4;
        let base = FockOperator::from_diagonal(weight.eta, &diag[..n])?;
        Ok(QuantizerOperator { weight, diag, base })
    }

    /// Quantizer with the default quadrature order.
    pub fn new(w: &WeightSpec, n: usize) -> Result<QuantizerOperator> {
        m_diagonal(w.eta, w, n, n + w.eta.ceil() as usize + 5)
    }

    pub fn eta(&self) -> f64 {
        self.weight.eta
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn weight(&self) -> &WeightSpec {
        &self.weight
    }

    pub fn base(&self) -> &FockOperator {
        &self.base
    }

    /// First N diagonal entries.
    pub fn diagonal(&self) -> &[f64] {
        &self.diag[..self.dim()]
    }

    /// All stored entries (4N).
    pub fn stored(&self) -> &[f64] {
        &self.diag
    }

    /// True when every entry is known in closed form.
    pub fn has_closed_form(&self) -> bool {
        !matches!(self.weight.kind, WeightKind::Custom { .. })
    }

    /// M_kk for any k: closed form where available, stored quadrature otherwise (0 past storage).
    pub fn entry(&self, k: usize) -> f64 {
        let eta = self.eta();
        match &self.weight.kind {
            WeightKind::Power { s } => m_power_closed(eta, *s, k).unwrap_or(f64::NAN),
            WeightKind::BasisProjector { m } => {
                if k == *m {
                    1.0
                } else {
                    0.0
                }
            }
            WeightKind::Half => {
                if k.is_multiple_of(2) {
                    2.0
                } else {
                    -2.0
                }
            }
            WeightKind::Custom { .. } => self.diag.get(k).copied().unwrap_or(0.0),
        }
    }

    /// Indices of the nonzero entries when there are finitely many.
    pub fn finite_support(&self) -> Option<Vec<usize>> {
        let eta = self.eta();
        match &self.weight.kind {
            WeightKind::BasisProjector { m } => Some(vec![*m]),
            WeightKind::Power { s } => {
                let p = s - eta;
                if p >= 1.0 && p == p.round() {
                    Some((0..p as usize).collect())
                } else {
                    None
                }
            }
            WeightKind::Half => None,
            WeightKind::Custom { .. } => Some(
                (0..self.diag.len())
                    .filter(|&k| self.diag[k] != 0.0)
                    .collect(),
            ),
        }
    }

    /// True when the displaced profile mixes boundary exponents 2η and 2s−1 that do not
    /// differ by a positive integer; such integrands get the graded radial rule.
    pub fn mixed_boundary(&self) -> bool {
        match &self.weight.kind {
            WeightKind::Power { s } if self.finite_support().is_none() => {
                let d = (2.0 * self.eta() - (2.0 * s - 1.0)).abs();
                !(d >= 1.0 && (d - d.round()).abs() < 1e-12)
            }
            _ => false,
        }
    }

    /// q with M(p(z))_{nn′} ~ (1−|z|²)^q at the boundary.
    pub fn boundary_order(&self) -> f64 {
        let two_eta = 2.0 * self.eta();
        match &self.weight.kind {
            WeightKind::Power { s } if self.finite_support().is_none() => {
                two_eta.min(2.0 * s - 1.0)
            }
            _ => two_eta,
        }
    }

    /// d_{nn′}(r) for n, n′ < rows; the k-sum runs until unitarity bounds its remainder.
    pub fn profile(&self, table: &RadialTable, r: f64, rows: usize) -> Profile {
        let mut d = DMatrix::<f64>::zeros(rows, rows);
        if self.weight.is_half() {
            // U P U† = U(p(z))² P = U(p(2z/(1+|z|²))) P
            let rr = 2.0 * r / (1.0 + r * r);
            let defect = ((1.0 - r) * (1.0 + r) / (1.0 + r * r)).powi(2);
            for n in 0..rows {
                for np in 0..rows {
                    let sign = if np % 2 == 0 { 2.0 } else { -2.0 };
                    d[(n, np)] = sign * table.element_defect(n, np, rr, defect);
                }
            }
            return Profile { d, tail: 0.0 };
        }
        if let Some(support) = self.finite_support() {
            let mut col = vec![0.0; rows];
            for k in support {
                let mk = self.entry(k);
                for (n, c) in col.iter_mut().enumerate() {
                    *c = table.element(n, k, r);
                }
                rank_one_update(&mut d, &col, mk);
            }
            return Profile { d, tail: 0.0 };
        }
        let cap = profile_terms(rows).max(self.diag.len());
        let mut mass = vec![0.0; rows];
        let mut col = vec![0.0; rows];
        let mut k = 0;
        let mut tail = f64::INFINITY;
        while k < cap {
            let end = (k + 32).min(cap);
            for kk in k..end {
                let mk = self.entry(kk);
                for n in 0..rows {
                    let e = table.element(n, kk, r);
                    col[n] = e;
                    mass[n] += e * e;
                }
                if mk != 0.0 {
                    rank_one_update(&mut d, &col, mk);
                }
            }
            k = end;
            if k >= rows {
                let left = mass.iter().fold(0.0f64, |a, &m| a.max((1.0 - m).max(0.0)));
                let sup = self.entry(k).abs().max(self.entry(k + 1).abs());
                tail = left * sup;
                if tail < 1e-15 {
                    break;
                }
            }
        }
        Profile { d, tail }
    }

    /// M(p(z)) on the first N basis vectors.
    pub fn displaced(&self, z: DiskPoint) -> Result<FockOperator> {
        self.displaced_dim(z, self.dim())
    }

    pub fn displaced_dim(&self, z: DiskPoint, rows: usize) -> Result<FockOperator> {
        let table = RadialTable::new(self.eta(), profile_terms(rows) + 2)?;
        let prof = self.profile(&table, z.z().norm(), rows);
        if prof.tail > 1e-10 {
            log::warn!(
                "displaced quantizer k-series remainder bound {:.2e}",
                prof.tail
            );
        }
        let phi = z.z().arg();
        let mut m = DMatrix::<Complex64>::zeros(rows, rows);
        for n in 0..rows {
            for np in 0..rows {
                m[(n, np)] = Complex64::from_polar(prof.d[(n, np)], (np as f64 - n as f64) * phi);
            }
        }
        FockOperator::new(self.eta(), m)
    }

    /// Σ_k c(k) M_kk summed in the requested sense.
    pub fn series<C: Fn(usize) -> f64>(
        &self,
        coeff: C,
        mode: SeriesMode,
    ) -> Result<SeriesEstimate> {
        if let Some(support) = self.finite_support() {
            if !matches!(self.weight.kind, WeightKind::Custom { .. }) || mode != SeriesMode::Abel {
                let v = compensated_sum(support.iter().map(|&k| coeff(k) * self.entry(k)));
                return Ok(SeriesEstimate {
                    value: v,
                    error: 0.0,
                    terms: support.len(),
                });
            }
        }
        let term = |k: usize| coeff(k) * self.entry(k);
        let direct = || -> Result<SeriesEstimate> {
            // algebraic decay rate from far terms; summable needs rate > 1
            let (a, b) = (term(1000).abs(), term(2000).abs());
            if a > 0.0 && b > 0.0 {
                let rate = (a / b).log2();
                if rate < 1.05 {
                    return Err(AdqError::SeriesDivergence(format!(
                        "terms decay like k^-{rate:.3} for weight {}",
                        self.weight
                    )));
                }
            } else if a > 0.0 || b > 0.0 {
                // parity-supported or sign-changing tail; fall through to Levin
            }
            let terms: Vec<f64> = (0..400).map(term).collect();
            let lv = levin(&terms, LevinKind::U)?;
            let plain = compensated_sum((0..200_000).map(term));
            if (lv.value - plain).abs() > 1e-4 * plain.abs().max(1.0) {
                return Err(AdqError::SeriesDivergence(format!(
                    "Levin value {} disagrees with partial sum {plain}",
                    lv.value
                )));
            }
            Ok(lv)
        };
        let abel = || -> Result<SeriesEstimate> {
            let a = abel_sum((0..).map(term), &AbelOptions::default())?;
            Ok(SeriesEstimate {
                value: a.value,
                error: a.error,
                terms: 0,
            })
        };
        match mode {
            SeriesMode::Direct => direct(),
            SeriesMode::Abel => abel(),
            SeriesMode::Auto => {
                if self.weight.is_half() {
                    return abel().map_err(|e| AdqError::SeriesUndefined(e.to_string()));
                }
                match direct() {
                    Ok(v) if v.error <= 1e-8 * v.value.abs().max(1.0) => Ok(v),
                    first => abel().map_err(|e| {
                        let d = match first {
                            Ok(v) => format!("direct error estimate {:.2e}", v.error),
                            Err(de) => de.to_string(),
                        };
                        AdqError::SeriesUndefined(format!("{d}; Abel: {e}"))
                    }),
                }
            }
        }
    }

    /// Σ_k M_kk over the whole diagonal.
    pub fn trace_full(&self, mode: SeriesMode) -> Result<SeriesEstimate> {
        self.series(|_| 1.0, mode)
    }
}

fn rank_one_update(d: &mut DMatrix<f64>, col: &[f64], w: f64) {
    let n = col.len();
    for j in 0..n {
        let cj = w * col[j];
        if cj == 0.0 {
            continue;
        }
        for i in 0..n {
            d[(i, j)] += col[i] * cj;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repn::u_matrix_p;

    #[test]
    fn perelomov_is_ground_projector() {
        let q = QuantizerOperator::new(&WeightSpec::perelomov(2.0).unwrap(), 10).unwrap();
        assert!((q.diagonal()[0] - 1.0).abs() < 1e-13);
        for k in 1..q.stored().len() {
            assert!(q.stored()[k].abs() < 1e-12, "k={k} {}", q.stored()[k]);
        }
        assert_eq!(q.entry(0), 1.0);
        assert_eq!(q.entry(7), 0.0);
        assert_eq!(q.finite_support(), Some(vec![0]));
    }

    #[test]
    fn power_two_frozen_values() {
        // η=2, s=2: 4/((n+1)(n+2)(n+3))
        assert!((m_power_closed(2.0, 2.0, 0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((m_power_closed(2.0, 2.0, 1).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((m_power_closed(2.0, 2.0, 2).unwrap() - 1.0 / 15.0).abs() < 1e-15);
        assert_eq!(m_power_closed(2.0, 3.0, 0).unwrap(), 1.0);
        assert_eq!(m_power_closed(2.0, 3.0, 4).unwrap(), 0.0);
        let q = QuantizerOperator::new(&WeightSpec::power(2.0, 2.0).unwrap(), 10).unwrap();
        for n in 0..10 {
            let want = 4.0 / ((n + 1) * (n + 2) * (n + 3)) as f64;
            assert!((q.diagonal()[n] - want).abs() < 1e-13 * want.max(1e-3));
        }
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for &eta in &[1.5, 2.0, 3.0] {
            for &s in &[1.3, 2.0, 2.7, eta + 1.0, eta + 1.5, 6.0] {
                let q = QuantizerOperator::new(&WeightSpec::power(eta, s).unwrap(), 21).unwrap();
                for n in 0..=20 {
                    let c = m_power_closed(eta, s, n).unwrap();
                    let got = q.diagonal()[n];
                    assert!(
                        (got - c).abs() <= 1e-9 * c.abs() + 1e-14,
                        "eta={eta} s={s} n={n} {got} {c}"
                    );
                }
            }
        }
    }

    #[test]
    fn reflected_form_agrees_off_integers() {
        for &eta in &[1.5, 2.0, 3.0] {
            for &s in &[1.3, 2.2, 3.7, 4.9] {
                for n in 0..=20 {
                    let a = m_power_closed(eta, s, n).unwrap();
                    let b = m_power_reflected(eta, s, n).unwrap();
                    assert!(
                        (a - b).abs() <= 1e-12 * a.abs().max(1e-300),
                        "eta={eta} s={s} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn positivity_boundary() {
        for &eta in &[1.5, 2.0, 3.0] {
            for i in 11..(10.0 * (eta + 3.0)) as usize {
                let s = i as f64 / 10.0;
                let nonneg = (0..=30).all(|n| m_power_closed(eta, s, n).unwrap() >= 0.0);
                assert_eq!(nonneg, s <= eta + 1.0, "eta={eta} s={s}");
            }
        }
        // alternating signs past the boundary
        let v: Vec<f64> = (0..4)
            .map(|n| m_power_closed(2.0, 4.5, n).unwrap())
            .collect();
        // (−3/2)_n: 1, −3/2, 3/4, 3/8
        assert!(v[0] > 0.0 && v[1] < 0.0 && v[2] > 0.0 && v[3] > 0.0);
    }

    #[test]
    fn basis_projector() {
        for m in 0..4 {
            let q =
                QuantizerOperator::new(&WeightSpec::basis_projector(2.0, m).unwrap(), 8).unwrap();
            for k in 0..q.stored().len() {
                let want = if k == m { 1.0 } else { 0.0 };
                assert!(
                    (q.stored()[k] - want).abs() < 1e-11,
                    "m={m} k={k} {}",
                    q.stored()[k]
                );
            }
        }
    }

    #[test]
    fn half_weight_inside_the_integral_gives_identity() {
        // the printed half weight fed to the diagonal integral yields M = I
        let w = WeightSpec::half(2.0).unwrap();
        let d = weight_diagonal(2.0, &w, 12, 20).unwrap();
        for v in d {
            assert!((v - 1.0).abs() < 1e-12);
        }
        let q = QuantizerOperator::new(&w, 6).unwrap();
        assert_eq!(q.diagonal(), &[2.0, -2.0, 2.0, -2.0, 2.0, -2.0]);
    }

    #[test]
    fn unit_trace() {
        for w in [
            WeightSpec::power(2.0, 2.0).unwrap(),
            WeightSpec::power(1.5, 2.2).unwrap(),
            WeightSpec::perelomov(3.0).unwrap(),
            WeightSpec::basis_projector(2.0, 2).unwrap(),
        ] {
            let q = QuantizerOperator::new(&w, 10).unwrap();
            let t = q.trace_full(SeriesMode::Auto).unwrap();
            assert!((t.value - 1.0).abs() < 1e-8, "{w}: {t:?}");
        }
        let q = QuantizerOperator::new(&WeightSpec::half(2.0).unwrap(), 10).unwrap();
        let t = q.trace_full(SeriesMode::Auto).unwrap();
        assert!((t.value - 1.0).abs() < 1e-6, "{t:?}");
    }

    #[test]
    fn s_series_values() {
        let q = QuantizerOperator::new(&WeightSpec::power(2.0, 2.0).unwrap(), 10).unwrap();
        let s = q.series(|k| k as f64, SeriesMode::Direct).unwrap();
        // 4k/((k+1)(k+2)(k+3)) = −2/(k+1) + 8/(k+2) − 6/(k+3) telescopes to 1
        assert!((s.value - 1.0).abs() < 1e-9, "{s:?}");
        let q = QuantizerOperator::new(&WeightSpec::half(2.0).unwrap(), 10).unwrap();
        let s = q.series(|k| k as f64, SeriesMode::Auto).unwrap();
        assert!((s.value + 0.5).abs() < 1e-6, "{s:?}");
        assert!(q.series(|k| k as f64, SeriesMode::Direct).is_err());
        let q = QuantizerOperator::new(&WeightSpec::power(2.0, 1.4).unwrap(), 10).unwrap();
        assert!(matches!(
            q.series(|k| k as f64, SeriesMode::Auto),
            Err(AdqError::SeriesUndefined(_))
        ));
    }

    #[test]
    fn displaced_equals_truncated_conjugation() {
        let q = QuantizerOperator::new(&WeightSpec::power(2.0, 2.5).unwrap(), 12).unwrap();
        let z = DiskPoint::from_re_im(0.2, -0.1).unwrap();
        let a = q.displaced(z).unwrap();
        let big = 120;
        let u = u_matrix_p(2.0, z, big).unwrap();
        let mut diag = vec![0.0; big];
        for (k, d) in diag.iter_mut().enumerate() {
            *d = q.entry(k);
        }
        let m = FockOperator::from_diagonal(2.0, &diag).unwrap();
        let b = u
            .mul(&m)
            .unwrap()
            .mul(&u.adjoint())
            .unwrap()
            .resized(12)
            .unwrap();
        assert!(a.max_abs_diff(&b, 12).unwrap() < 1e-12);
        let h = a.sub(&a.adjoint()).unwrap();
        assert!(h.max_abs(12) < 1e-14);
    }

    #[test]
    fn displaced_perelomov_is_coherent_projector() {
        let q = QuantizerOperator::new(&WeightSpec::perelomov(2.0).unwrap(), 15).unwrap();
        let z = DiskPoint::from_re_im(0.3, 0.4).unwrap();
        let a = q.displaced(z.conj()).unwrap();
        let cs = crate::repn::coherent_state(2.0, z, 15);
        for i in 0..15 {
            for j in 0..15 {
                assert!((a.get(i, j) - cs[i] * cs[j].conj()).norm() < 1e-12);
            }
        }
        let origin = q.displaced(DiskPoint::origin()).unwrap();
        assert!(origin.max_abs_diff(q.base(), 15).unwrap() < 1e-12);
    }

    #[test]
    fn displaced_half_matches_conjugation() {
        let q = QuantizerOperator::new(&WeightSpec::half(1.5).unwrap(), 8).unwrap();
        let z = DiskPoint::from_re_im(0.15, 0.1).unwrap();
        let a = q.displaced(z).unwrap();
        let big = 200;
        let u = u_matrix_p(1.5, z, big).unwrap();
        let p = crate::repn::parity(1.5, big)
            .unwrap()
            .scale(Complex64::new(2.0, 0.0));
        let b = u
            .mul(&p)
            .unwrap()
            .mul(&u.adjoint())
            .unwrap()
            .resized(8)
            .unwrap();
        assert!(a.max_abs_diff(&b, 8).unwrap() < 1e-10);
    }

    #[test]
    fn eta_mismatch_rejected() {
        let w = WeightSpec::power(2.0, 2.0).unwrap();
        assert!(m_diagonal(3.0, &w, 10, 20).is_err());
        assert!(m_diagonal(2.0, &w, 1, 20).is_err());
    }
}
