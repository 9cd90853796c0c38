//! Lower symbols and phase-space portraits for an analysis/reconstruction pair (w₁, w₂).
//!
//! The portrait of a classical f is the lower symbol of its quantization,
//! f̌(z) = (2η−1)/π ∫ f(p(z)·t) tr(M₁(p(t)) M₂) dμ(t).

use crate::error::{AdqError, Result};
use crate::geometry::{observables, DiskPoint, GroupElement};
use crate::quantizer::{
    gamma_constant, profile_terms, DiskGrid, Field, GridSpec, QuantizerOperator, SeriesMode,
    WeightKind, WeightSpec,
};
use crate::repn::{FockOperator, Generator, RadialTable};
use crate::specfun::jacobi::JacobiSeq;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;
use std::io::Write;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortraitConfig {
    pub eta: f64,
    /// analysis weight
    pub w1: WeightSpec,
    /// reconstruction weight
    pub w2: WeightSpec,
    pub n: usize,
    pub grid: GridSpec,
}

impl PortraitConfig {
    pub fn new(w1: WeightSpec, w2: WeightSpec, n: usize, grid: GridSpec) -> Result<PortraitConfig> {
        if (w1.eta - w2.eta).abs() > 1e-14 {
            return Err(AdqError::Invalid(format!(
                "analysis weight at eta {} and reconstruction weight at eta {}",
                w1.eta, w2.eta
            )));
        }
        if n < 2 {
            return Err(AdqError::Invalid(format!("truncation {n} too small")));
        }
        Ok(PortraitConfig {
            eta: w1.eta,
            w1,
            w2,
            n,
            grid,
        })
    }

    pub fn perelomov(eta: f64, n: usize, grid: GridSpec) -> Result<PortraitConfig> {
        PortraitConfig::new(
            WeightSpec::perelomov(eta)?,
            WeightSpec::perelomov(eta)?,
            n,
            grid,
        )
    }

    pub fn quantizers(&self) -> Result<(QuantizerOperator, QuantizerOperator)> {
        Ok((
            QuantizerOperator::new(&self.w1, self.n)?,
            QuantizerOperator::new(&self.w2, self.n)?,
        ))
    }
}

/// Ǎ(z) = tr(A M₂(p(z))) on A's truncation.
pub fn lower_symbol(a: &FockOperator, q2: &QuantizerOperator, z: DiskPoint) -> Result<Complex64> {
    if (a.eta() - q2.eta()).abs() > 1e-14 {
        return Err(AdqError::Shape(format!(
            "operator at eta {} and quantizer at eta {}",
            a.eta(),
            q2.eta()
        )));
    }
    let m = q2.displaced_dim(z, a.dim())?;
    Ok(a.mul(&m)?.trace())
}

fn entry_sup(q: &QuantizerOperator, k: usize) -> f64 {
    q.entry(k).abs().max(q.entry(k + 1).abs())
}

/// Σ_j M_j R_{sj}(r)² with its remainder bound.
fn row_sum(q: &QuantizerOperator, table: &RadialTable, s: usize, r: f64, cap: usize) -> (f64, f64) {
    let mut acc = crate::specfun::series::NeumaierSum::default();
    let mut mass = 0.0;
    let mut j = 0;
    let mut tail = f64::INFINITY;
    while j < cap {
        let end = (j + 32).min(cap);
        for jj in j..end {
            let e = table.element(s, jj, r);
            mass += e * e;
            let m = q.entry(jj);
            if m != 0.0 {
                acc.add(m * e * e);
            }
        }
        j = end;
        if j > s {
            tail = (1.0 - mass).max(0.0) * entry_sup(q, j);
            if tail < 1e-16 {
                break;
            }
        }
    }
    (acc.total(), tail)
}

/// Power-weight diagonal as moments, M_kk = Σ_i ν_i t_iᵏ, from
/// (a)_k/(a+c)_k = ∫ tᵏ t^{a−1}(1−t)^{c−1} dt / B(a, c) with a = η−s+1, c = 2s−1.
fn power_moments(eta: f64, s: f64, order: usize) -> Result<Option<Vec<(f64, f64)>>> {
    let (a, c) = (eta - s + 1.0, 2.0 * s - 1.0);
    if a <= 0.0 {
        return Ok(None);
    }
    let q = crate::specfun::quadrature::gauss_jacobi(order, c - 1.0, a - 1.0)?;
    let ln_beta = ln_gamma(a) + ln_gamma(c) - ln_gamma(a + c);
    let pre = 2.0 * (s - 1.0) / (eta + s - 1.0) * ((1.0 - a - c) * 2f64.ln() - ln_beta).exp();
    Ok(Some(
        q.nodes
            .iter()
            .zip(&q.weights)
            .map(|(&v, &w)| (0.5 * (1.0 + v), pre * w))
            .collect(),
    ))
}

/// (t₁t₂)^{−η} tr(U(p) t₁^{K₀} U(p)† t₂^{K₀}) for |p's point|² = u: a discrete-series
/// character χ = μ^{2η}/(1−μ²) of the semigroup element with trace μ + 1/μ.
fn semigroup_character(eta: f64, u: f64, t1: f64, t2: f64) -> f64 {
    let sigma = (t1 * t2).sqrt();
    let rho = (t1 / t2).sqrt();
    let tm2 = ((1.0 - sigma).powi(2) / sigma - u * (1.0 - rho).powi(2) / rho) / (1.0 - u);
    let theta = 2.0 * (0.25 * tm2.max(0.0)).sqrt().asinh();
    (eta * (-2.0 * theta - t1.ln() - t2.ln())).exp() / -(-2.0 * theta).exp_m1()
}

enum Route {
    /// the first quantizer has finite support
    Finite {
        swap: bool,
    },
    /// the first quantizer is the half weight, the second has infinite support
    Half {
        swap: bool,
    },
    Moments(Vec<(f64, f64)>, Vec<(f64, f64)>),
    Direct,
}

struct KernelEval<'a> {
    q1: &'a QuantizerOperator,
    q2: &'a QuantizerOperator,
    table: RadialTable,
    route: Route,
}

impl<'a> KernelEval<'a> {
    fn new(q1: &'a QuantizerOperator, q2: &'a QuantizerOperator) -> Result<KernelEval<'a>> {
        let eta = q1.eta();
        if (eta - q2.eta()).abs() > 1e-14 {
            return Err(AdqError::Invalid("quantizers at different eta".into()));
        }
        let (h1, h2) = (q1.weight().is_half(), q2.weight().is_half());
        let route = if q1.finite_support().is_some() {
            Route::Finite { swap: false }
        } else if q2.finite_support().is_some() {
            Route::Finite { swap: true }
        } else if h1 && h2 {
            return Err(AdqError::WeightEta(
                "tr(M(p(t)) M) for two half weights is 4 tr U(p(t')), not integrable at t = 0"
                    .into(),
            ));
        } else if h1 || h2 {
            Route::Half { swap: h2 }
        } else {
            let moments = |q: &QuantizerOperator| match q.weight().kind {
                WeightKind::Power { s } => power_moments(eta, s, 96),
                _ => Ok(None),
            };
            match (moments(q1)?, moments(q2)?) {
                (Some(a), Some(b)) => Route::Moments(a, b),
                _ => Route::Direct,
            }
        };
        Ok(KernelEval {
            q1,
            q2,
            table: RadialTable::new(eta, profile_terms(1) + 2)?,
            route,
        })
    }

    /// Kernel value at |t| = r with a remainder bound.
    fn at(&self, r: f64) -> (f64, f64) {
        let eta = self.q1.eta();
        match &self.route {
            Route::Finite { swap } => {
                let (a, b) = if *swap {
                    (self.q2, self.q1)
                } else {
                    (self.q1, self.q2)
                };
                let mut acc = crate::specfun::series::NeumaierSum::default();
                let mut tail = 0.0;
                for s in a.finite_support().unwrap_or_default() {
                    let ms = a.entry(s);
                    let (v, t) = row_sum(b, &self.table, s, r, profile_terms(1));
                    acc.add(ms * v);
                    tail += ms.abs() * t;
                }
                (acc.total(), tail)
            }
            Route::Half { swap } => {
                // diagonal of 2U(p(t′))P, t′ = 2t/(1+|t|²)
                let other = if *swap { self.q1 } else { self.q2 };
                let defect = ((1.0 - r) * (1.0 + r) / (1.0 + r * r)).powi(2);
                let x = 2.0 * defect - 1.0;
                let pre = 2.0 * defect.powf(eta);
                let mut acc = crate::specfun::series::NeumaierSum::default();
                let cap = 1usize << 20;
                let mut tail = f64::INFINITY;
                for (k, p) in JacobiSeq::new(0.0, 2.0 * eta - 1.0, x)
                    .take(cap)
                    .enumerate()
                {
                    let m = other.entry(k);
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    acc.add(sign * m * pre * p);
                    if k % 64 == 63 {
                        tail = entry_sup(other, k + 1) * (k + 1) as f64;
                        if tail < 1e-15 {
                            break;
                        }
                    }
                }
                (acc.total(), tail)
            }
            Route::Moments(a, b) => {
                let u = r * r;
                let mut acc = crate::specfun::series::NeumaierSum::default();
                for &(t1, n1) in a {
                    for &(t2, n2) in b {
                        acc.add(n1 * n2 * semigroup_character(eta, u, t1, t2));
                    }
                }
                (acc.total(), 0.0)
            }
            Route::Direct => {
                let u = r * r;
                let rows = ((60.0 / (1.0 - u)).ceil() as usize + 64).min(256);
                let mut acc = crate::specfun::series::NeumaierSum::default();
                let mut tail = 0.0;
                for n in 0..rows {
                    let m2 = self.q2.entry(n);
                    if m2 == 0.0 {
                        continue;
                    }
                    let (v, t) = row_sum(self.q1, &self.table, n, r, 2048);
                    acc.add(m2 * v);
                    tail += m2.abs() * t;
                }
                tail += entry_sup(self.q2, rows) * entry_sup(self.q1, 0).max(1.0);
                (acc.total(), tail)
            }
        }
    }
}

/// tr(M₁(p(t)) M₂); depends on |t| only.
pub fn transition_kernel(
    q1: &QuantizerOperator,
    q2: &QuantizerOperator,
    t: DiskPoint,
) -> Result<f64> {
    let (v, tail) = KernelEval::new(q1, q2)?.at(t.z().norm());
    if tail > 1e-10 {
        log::warn!(
            "transition kernel remainder bound {tail:.2e} at |t| = {}",
            t.z().norm()
        );
    }
    Ok(v)
}

/// Kernel sampled on a disk grid, ready for portraits of fields of a given boundary order.
pub struct Portrait {
    eta: f64,
    field_order: f64,
    grid: DiskGrid,
    kernel: Vec<f64>,
    tail: f64,
}

impl Portrait {
    pub fn new(
        q1: &QuantizerOperator,
        q2: &QuantizerOperator,
        field_order: f64,
        spec: GridSpec,
    ) -> Result<Portrait> {
        let eta = q1.eta();
        let eval = KernelEval::new(q1, q2)?;
        let order = q1.boundary_order().min(q2.boundary_order());
        let grid = DiskGrid::invariant_for(
            spec,
            order + field_order,
            q1.mixed_boundary() || q2.mixed_boundary(),
        )?;
        let vals: Vec<(f64, f64)> = grid.r.par_iter().map(|&r| eval.at(r)).collect();
        let tail = (2.0 * eta - 1.0)
            * 2.0
            * vals
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let w = 1.0 - grid.u[i];
                    grid.ring_weights[i] * v.1.min(w.powf(order)) * w.powf(field_order)
                })
                .sum::<f64>();
        if tail > 1e-8 {
            log::warn!("kernel remainder may reach {tail:.2e} in portrait values");
        }
        Ok(Portrait {
            eta,
            field_order,
            grid,
            kernel: vals.into_iter().map(|v| v.0).collect(),
            tail,
        })
    }

    pub fn from_config(cfg: &PortraitConfig, field_order: f64) -> Result<Portrait> {
        let (q1, q2) = cfg.quantizers()?;
        Portrait::new(&q1, &q2, field_order, cfg.grid)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn grid(&self) -> &DiskGrid {
        &self.grid
    }

    pub fn kernel_values(&self) -> &[f64] {
        &self.kernel
    }

    /// Estimated kernel remainder carried into portrait values.
    pub fn tail_estimate(&self) -> f64 {
        self.tail
    }

    /// (2η−1)/π ∫ tr(M₁(p(t))M₂) dμ(t)
    pub fn normalization(&self) -> f64 {
        let mut acc = crate::specfun::series::NeumaierSum::default();
        for (w, k) in self.grid.ring_weights.iter().zip(&self.kernel) {
            acc.add(w * k);
        }
        (2.0 * self.eta - 1.0) / PI * 2.0 * PI * acc.total()
    }

    /// f̌(z).
    pub fn value(&self, f: &Field, z: DiskPoint) -> Result<Complex64> {
        if f.order() < self.field_order - 1e-12 {
            return Err(AdqError::Invalid(format!(
                "field {} of boundary order {} on a kernel grid prepared for order {}",
                f.name(),
                f.order(),
                self.field_order
            )));
        }
        let g = GroupElement::p(z);
        let dphi = self.grid.dphi();
        let mut re = crate::specfun::series::NeumaierSum::default();
        let mut im = crate::specfun::series::NeumaierSum::default();
        for i in 0..self.grid.rings() {
            let mut ring = Complex64::new(0.0, 0.0);
            for j in 0..self.grid.angular_points {
                ring += f.eval(g.act(self.grid.point(i, j)));
            }
            let t = ring * (self.grid.ring_weights[i] * self.kernel[i] * dphi);
            re.add(t.re);
            im.add(t.im);
        }
        let v = Complex64::new(re.total(), im.total()) * ((2.0 * self.eta - 1.0) / PI);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(AdqError::Numeric(format!(
                "portrait of {} is not finite at {}",
                f.name(),
                z.z()
            )));
        }
        Ok(v)
    }

    /// max over the samples of |f̌∘g⁻¹ − (f∘g⁻¹)ˇ|.
    pub fn covariance_deviation(
        &self,
        f: &Field,
        g: &GroupElement,
        samples: &[DiskPoint],
    ) -> Result<f64> {
        let moved = f.transformed(g);
        let gi = g.inverse();
        let mut worst = 0.0f64;
        for &z in samples {
            let a = self.value(&moved, z)?;
            let b = self.value(f, gi.act(z))?;
            worst = worst.max((a - b).norm());
        }
        Ok(worst)
    }
}

pub fn portrait(f: &Field, cfg: &PortraitConfig, z: DiskPoint) -> Result<Complex64> {
    Portrait::from_config(cfg, f.order())?.value(f, z)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaEstimate {
    pub kappa: f64,
    /// (z, ǩ₀(z)/k₀(z)) at the stability samples
    pub samples: Vec<(f64, f64, f64)>,
    pub spread: f64,
}

/// Stability samples for κ besides z = 0.
pub const KAPPA_SAMPLES: [(f64, f64); 3] = [(0.3, 0.0), (0.2, 0.4), (0.0, -0.5)];

/// κ = ǩ₀(0), checked against ǩ₀(z)/k₀(z) at three more points.
pub fn kappa_constant(cfg: &PortraitConfig) -> Result<KappaEstimate> {
    let engine = Portrait::from_config(cfg, -1.0)?;
    kappa_from(&engine)
}

pub fn kappa_from(engine: &Portrait) -> Result<KappaEstimate> {
    let k0 = Field::observable(Generator::K0);
    let kappa = engine.value(&k0, DiskPoint::origin())?.re;
    let mut samples = Vec::new();
    let mut spread = 0.0f64;
    for &(x, y) in &KAPPA_SAMPLES {
        let z = DiskPoint::from_re_im(x, y)?;
        let ratio = engine.value(&k0, z)?.re / observables(z).k0;
        spread = spread.max((ratio - kappa).abs() / kappa.abs().max(1e-300));
        samples.push((x, y, ratio));
    }
    if !(spread <= 1e-5) {
        return Err(AdqError::KappaNotConstant(format!(
            "ratios {:?} against {kappa} (relative spread {spread:.2e})",
            samples.iter().map(|s| s.2).collect::<Vec<_>>()
        )));
    }
    Ok(KappaEstimate {
        kappa,
        samples,
        spread,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub w1: String,
    pub w2: String,
    pub gamma: Option<f64>,
    pub kappa: Option<f64>,
    pub gamma_kappa_minus_one: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Tabulates γ(w₁)·κ(w₁,w₂) − 1 over weight pairs; a zero marks a pair whose
/// portraits reproduce the basic observables exactly.
pub fn wigner_sweep(
    w1s: &[WeightSpec],
    w2s: &[WeightSpec],
    n: usize,
    spec: GridSpec,
) -> Vec<SweepRow> {
    let mut rows = Vec::new();
    for w1 in w1s {
        for w2 in w2s {
            let mut row = SweepRow {
                w1: w1.to_string(),
                w2: w2.to_string(),
                gamma: None,
                kappa: None,
                gamma_kappa_minus_one: None,
                note: None,
            };
            let mut notes = Vec::new();
            match QuantizerOperator::new(w1, n).and_then(|q| gamma_constant(&q, SeriesMode::Auto)) {
                Ok(g) => row.gamma = Some(g),
                Err(e) => notes.push(format!("gamma: {e}")),
            }
            match PortraitConfig::new(w1.clone(), w2.clone(), n, spec)
                .and_then(|c| kappa_constant(&c))
            {
                Ok(k) => row.kappa = Some(k.kappa),
                Err(e) => notes.push(format!("kappa: {e}")),
            }
            if let (Some(g), Some(k)) = (row.gamma, row.kappa) {
                row.gamma_kappa_minus_one = Some(g * k - 1.0);
                log::info!(
                    "{} / {}: gamma*kappa - 1 = {:.6e}",
                    row.w1,
                    row.w2,
                    g * k - 1.0
                );
            }
            if !notes.is_empty() {
                row.note = Some(notes.join("; "));
            }
            rows.push(row);
        }
    }
    rows
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PortraitSample {
    pub re_z: f64,
    pub im_z: f64,
    pub re: f64,
    pub im: f64,
}

/// f̌ on the polar grid radii × {2πj/angles}.
pub fn portrait_grid(
    engine: &Portrait,
    f: &Field,
    radii: &[f64],
    angles: usize,
) -> Result<Vec<PortraitSample>> {
    let points: Vec<DiskPoint> = radii
        .iter()
        .flat_map(|&r| {
            (0..angles.max(1)).map(move |j| (r, 2.0 * PI * j as f64 / angles.max(1) as f64))
        })
        .map(|(r, phi)| DiskPoint::from_polar(r, phi))
        .collect::<Result<_>>()?;
    points
        .par_iter()
        .map(|&z| {
            let v = engine.value(f, z)?;
            Ok(PortraitSample {
                re_z: z.z().re,
                im_z: z.z().im,
                re: v.re,
                im: v.im,
            })
        })
        .collect()
}

pub fn write_csv<W: Write>(samples: &[PortraitSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| AdqError::Io(e.to_string());
    w.write_record(["re_z", "im_z", "re_value", "im_value"])
        .map_err(io)?;
    for s in samples {
        w.write_record([s.re_z, s.im_z, s.re, s.im].map(|x| format!("{x:.16e}")))
            .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_json(samples: &[PortraitSample]) -> Result<String> {
    serde_json::to_string_pretty(samples).map_err(|e| AdqError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repn::generators;

    fn pp(eta: f64) -> (QuantizerOperator, QuantizerOperator) {
        let w = WeightSpec::perelomov(eta).unwrap();
        (
            QuantizerOperator::new(&w, 8).unwrap(),
            QuantizerOperator::new(&w, 8).unwrap(),
        )
    }

    #[test]
    fn lower_symbols() {
        let eta = 2.0;
        let (_, q2) = pp(eta);
        let z = DiskPoint::from_re_im(0.3, -0.4).unwrap();
        let id = FockOperator::identity(eta, 40).unwrap();
        assert!((lower_symbol(&id, &q2, z).unwrap() - 1.0).norm() < 1e-12);
        let k0 = generators(eta, 40).unwrap().k0;
        let at0 = lower_symbol(&k0, &q2, DiskPoint::origin()).unwrap();
        assert!((at0 - eta).norm() < 1e-14);
        // ⟨z̄|K0|z̄⟩ summed directly over the coherent-state components
        let u = z.abs2();
        let mut want = 0.0;
        let mut c = (1.0 - u).powf(2.0 * eta);
        for n in 0..200 {
            want += (eta + n as f64) * c;
            c *= u * (2.0 * eta + n as f64) / (n as f64 + 1.0);
        }
        let got = lower_symbol(&k0, &q2, z).unwrap();
        assert!(
            (got.re - want).abs() < 1e-10 && got.im.abs() < 1e-10,
            "{got} {want}"
        );
        assert!((want - eta * observables(z).k0).abs() < 1e-12);
    }

    #[test]
    fn kernel_values() {
        let eta = 2.0;
        let (q1, q2) = pp(eta);
        for &r in &[0.0, 0.3, 0.8] {
            let t = DiskPoint::from_polar(r, 1.0).unwrap();
            let k = transition_kernel(&q1, &q2, t).unwrap();
            assert!((k - (1.0 - r * r).powf(2.0 * eta)).abs() < 1e-14);
        }
        let a = QuantizerOperator::new(&WeightSpec::basis_projector(2.0, 1).unwrap(), 8).unwrap();
        let b = QuantizerOperator::new(&WeightSpec::power(2.0, 2.5).unwrap(), 8).unwrap();
        let k0 = transition_kernel(&b, &b, DiskPoint::origin()).unwrap();
        let direct: f64 = (0..20000).map(|k| b.entry(k).powi(2)).sum();
        assert!((k0 - direct).abs() < 1e-12 && k0 <= 1.0, "{k0} {direct}");
        // symmetry against an independent matrix trace
        let t = DiskPoint::from_re_im(0.25, 0.1).unwrap();
        let lhs = transition_kernel(&a, &b, t).unwrap();
        let m1 = a.displaced_dim(t, 120).unwrap();
        let m2 =
            FockOperator::from_diagonal(2.0, &(0..120).map(|k| b.entry(k)).collect::<Vec<_>>())
                .unwrap();
        let tr = m1.mul(&m2).unwrap().trace();
        assert!((lhs - tr.re).abs() < 1e-10, "{lhs} {tr}");
        let m2t = b.displaced_dim(t.neg(), 120).unwrap();
        let m1b =
            FockOperator::from_diagonal(2.0, &(0..120).map(|k| a.entry(k)).collect::<Vec<_>>())
                .unwrap();
        let tr2 = m1b.mul(&m2t).unwrap().trace();
        assert!((tr.re - tr2.re).abs() < 1e-10);
    }

    #[test]
    fn moment_routes() {
        let eta = 2.0;
        let b = QuantizerOperator::new(&WeightSpec::power(eta, 2.5).unwrap(), 8).unwrap();
        let c = QuantizerOperator::new(&WeightSpec::power(eta, 1.7).unwrap(), 8).unwrap();
        let m = power_moments(eta, 2.5, 96).unwrap().unwrap();
        for k in 0..12 {
            let v: f64 = m.iter().map(|(t, w)| w * t.powi(k as i32)).sum();
            assert!((v - b.entry(k)).abs() < 1e-12, "k={k}");
        }
        let ev = KernelEval::new(&b, &c).unwrap();
        assert!(matches!(ev.route, Route::Moments(..)));
        let direct = KernelEval {
            q1: &b,
            q2: &c,
            table: RadialTable::new(eta, 4000).unwrap(),
            route: Route::Direct,
        };
        for &r in &[0.0, 0.3, 0.6] {
            let (x, _) = ev.at(r);
            let (y, t) = direct.at(r);
            assert!((x - y).abs() < 1e-9 + t, "r={r} {x} {y} {t}");
        }
        // half against power: single alternating sum vs the double sum
        let h = QuantizerOperator::new(&WeightSpec::half(eta).unwrap(), 8).unwrap();
        let ev = KernelEval::new(&h, &b).unwrap();
        let direct = KernelEval {
            q1: &h,
            q2: &b,
            table: RadialTable::new(eta, 4000).unwrap(),
            route: Route::Direct,
        };
        for &r in &[0.2, 0.5] {
            let (x, _) = ev.at(r);
            let (y, _) = direct.at(r);
            assert!((x - y).abs() < 1e-8, "r={r} {x} {y}");
        }
        assert!(matches!(
            KernelEval::new(&h, &h),
            Err(AdqError::WeightEta(_))
        ));
    }

    #[test]
    fn normalizations() {
        let (q1, q2) = pp(2.0);
        let e = Portrait::new(&q1, &q2, 0.0, GridSpec::new(32, 16)).unwrap();
        assert!((e.normalization() - 1.0).abs() < 1e-13);
        let s2 = QuantizerOperator::new(&WeightSpec::power(2.0, 2.0).unwrap(), 8).unwrap();
        let e = Portrait::new(&s2, &s2, 0.0, GridSpec::new(64, 16)).unwrap();
        assert!(
            (e.normalization() - 1.0).abs() < 1e-6,
            "{}",
            e.normalization()
        );
        let h = QuantizerOperator::new(&WeightSpec::half(2.0).unwrap(), 8).unwrap();
        let e = Portrait::new(&h, &q2, 0.0, GridSpec::new(32, 16)).unwrap();
        assert!((e.normalization() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kappa_perelomov() {
        for &eta in &[1.5, 2.0, 3.0] {
            let cfg = PortraitConfig::perelomov(eta, 8, GridSpec::new(48, 64)).unwrap();
            let k = kappa_constant(&cfg).unwrap();
            assert!(
                (k.kappa - eta / (eta - 1.0)).abs() < 1e-10,
                "eta={eta} {}",
                k.kappa
            );
        }
        let cfg = PortraitConfig::perelomov(1.0, 8, GridSpec::new(48, 64)).unwrap();
        assert!(matches!(kappa_constant(&cfg), Err(AdqError::WeightEta(_))));
    }

    #[test]
    fn portrait_of_kplus_shares_kappa() {
        let eta = 2.0;
        let (q1, q2) = pp(eta);
        let e = Portrait::new(&q1, &q2, -1.0, GridSpec::new(48, 64)).unwrap();
        let z = DiskPoint::from_re_im(0.4, -0.2).unwrap();
        let got = e.value(&Field::observable(Generator::Kplus), z).unwrap();
        let want = observables(z).kplus * (eta / (eta - 1.0));
        assert!((got - want).norm() < 1e-9 * want.norm(), "{got} {want}");
        let one = e.value(&Field::constant(1.0), z).unwrap();
        assert!((one - 1.0).norm() < 1e-12);
    }

    #[test]
    fn portrait_symmetry_and_reality() {
        let (q1, q2) = pp(2.0);
        let e = Portrait::new(&q1, &q2, -1.0, GridSpec::new(48, 64)).unwrap();
        let k2 = Field::observable(Generator::K2);
        for &x in &[0.1, 0.35, 0.6] {
            let a = e
                .value(&k2, DiskPoint::from_re_im(x, 0.0).unwrap())
                .unwrap();
            let b = e
                .value(&k2, DiskPoint::from_re_im(-x, 0.0).unwrap())
                .unwrap();
            assert!(a.im.abs() < 1e-10 && (a + b).norm() < 1e-10);
        }
    }

    #[test]
    fn portrait_covariance() {
        let (q1, q2) = pp(2.0);
        let e = Portrait::new(&q1, &q2, 0.0, GridSpec::new(64, 256)).unwrap();
        let bump = Field::new("bump", 0.0, |z| {
            let w = z.z() - Complex64::new(0.2, -0.1);
            Complex64::new((-(w.norm_sqr()) / 0.08).exp(), 0.0)
        });
        let samples = [
            DiskPoint::from_re_im(0.1, 0.2).unwrap(),
            DiskPoint::from_re_im(-0.3, 0.0).unwrap(),
        ];
        let h = GroupElement::h(0.9);
        assert!(e.covariance_deviation(&bump, &h, &samples).unwrap() < 1e-12);
        let p = GroupElement::p(DiskPoint::from_re_im(0.2, 0.25).unwrap());
        assert!(e.covariance_deviation(&bump, &p, &samples).unwrap() < 1e-6);
    }

    #[test]
    fn sweep_rows() {
        let eta = 2.0;
        let w1s = [
            WeightSpec::perelomov(eta).unwrap(),
            WeightSpec::half(eta).unwrap(),
        ];
        let w2s = [WeightSpec::perelomov(eta).unwrap()];
        let rows = wigner_sweep(&w1s, &w2s, 8, GridSpec::new(48, 64));
        assert_eq!(rows.len(), 2);
        let r = &rows[0];
        assert!((r.gamma_kappa_minus_one.unwrap() - 1.0).abs() < 1e-8);
        assert!(rows[1].kappa.is_some());
    }

    #[test]
    fn csv_and_json() {
        let (q1, q2) = pp(2.0);
        let e = Portrait::new(&q1, &q2, 0.0, GridSpec::new(16, 16)).unwrap();
        let s = portrait_grid(&e, &Field::constant(1.0), &[0.0, 0.5], 4).unwrap();
        assert_eq!(s.len(), 8);
        let mut buf = Vec::new();
        write_csv(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("re_z,im_z,re_value,im_value\n"));
        assert_eq!(text.lines().count(), 9);
        let v: serde_json::Value = serde_json::from_str(&to_json(&s).unwrap()).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 8);
    }
}
