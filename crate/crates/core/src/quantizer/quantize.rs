//! The quantization map f ↦ A_f = (2η−1)/π ∫ f(z) M(p(z)) dμ(z) and its constants.

use super::grid::{DiskGrid, GridSpec};
use super::operator::{profile_terms, QuantizerOperator, SeriesMode};
use crate::error::{AdqError, Result};
use crate::geometry::{observables, DiskPoint, GroupElement};
use crate::repn::{generators, u_matrix, FockOperator, Generator, RadialTable};
use crate::specfun::appendix::hyper_integral;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

type FieldFn = dyn Fn(DiskPoint) -> Complex64 + Send + Sync;
type RadialFnInner = dyn Fn(f64) -> f64 + Send + Sync;

/// A function on the disk with its boundary order q: f ~ (1−|z|²)^q as |z| → 1.
#[derive(Clone)]
pub struct Field {
    name: String,
    order: f64,
    f: Arc<FieldFn>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({}, order {})", self.name, self.order)
    }
}

impl Field {
    pub fn new<F>(name: impl Into<String>, order: f64, f: F) -> Field
    where
        F: Fn(DiskPoint) -> Complex64 + Send + Sync + 'static,
    {
        Field {
            name: name.into(),
            order,
            f: Arc::new(f),
        }
    }

    pub fn constant(c: f64) -> Field {
        Field::new(format!("{c}"), 0.0, move |_| Complex64::new(c, 0.0))
    }

    /// The classical observable k_a.
    pub fn observable(a: Generator) -> Field {
        let name = match a {
            Generator::K0 => "k0",
            Generator::K1 => "k1",
            Generator::K2 => "k2",
            Generator::Kplus => "kplus",
            Generator::Kminus => "kminus",
        };
        Field::new(name, -1.0, move |z| {
            let o = observables(z);
            match a {
                Generator::K0 => Complex64::new(o.k0, 0.0),
                Generator::K1 => Complex64::new(o.k1, 0.0),
                Generator::K2 => Complex64::new(o.k2, 0.0),
                Generator::Kplus => o.kplus,
                Generator::Kminus => o.kminus,
            }
        })
    }

    pub fn radial(l: &RadialFn) -> Field {
        let inner = l.l.clone();
        Field::new(l.name.clone(), l.order, move |z| {
            Complex64::new(inner(z.abs2()), 0.0)
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn eval(&self, z: DiskPoint) -> Complex64 {
        (self.f)(z)
    }

    /// z ↦ f(g⁻¹·z).
    pub fn transformed(&self, g: &GroupElement) -> Field {
        let inner = self.f.clone();
        let gi = g.inverse();
        Field::new(format!("{}∘g⁻¹", self.name), self.order, move |z| {
            inner(gi.act(z))
        })
    }

    /// z ↦ f(g·z).
    pub fn pulled_back(&self, g: &GroupElement) -> Field {
        let inner = self.f.clone();
        let g = *g;
        Field::new(format!("{}∘g", self.name), self.order, move |z| {
            inner(g.act(z))
        })
    }

    pub fn conj(&self) -> Field {
        let inner = self.f.clone();
        Field::new(format!("conj({})", self.name), self.order, move |z| {
            inner(z).conj()
        })
    }

    pub fn scaled(&self, c: Complex64) -> Field {
        let inner = self.f.clone();
        Field::new(format!("{c}·{}", self.name), self.order, move |z| {
            c * inner(z)
        })
    }

    pub fn plus(&self, other: &Field) -> Field {
        let (a, b) = (self.f.clone(), other.f.clone());
        Field::new(
            format!("{}+{}", self.name, other.name),
            self.order.min(other.order),
            move |z| a(z) + b(z),
        )
    }
}

/// An isotropic function l(u), u = |z|², with boundary order q.
#[derive(Clone)]
pub struct RadialFn {
    name: String,
    order: f64,
    l: Arc<RadialFnInner>,
}

impl fmt::Debug for RadialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadialFn({}, order {})", self.name, self.order)
    }
}

impl RadialFn {
    pub fn new<F>(name: impl Into<String>, order: f64, l: F) -> RadialFn
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        RadialFn {
            name: name.into(),
            order,
            l: Arc::new(l),
        }
    }

    pub fn one() -> RadialFn {
        RadialFn::new("1", 0.0, |_| 1.0)
    }

    /// 1/(1−u)
    pub fn inverse_defect() -> RadialFn {
        RadialFn::new("1/(1-u)", -1.0, |u| 1.0 / (1.0 - u))
    }

    /// k₀ = (1+u)/(1−u)
    pub fn k0() -> RadialFn {
        RadialFn::new("k0", -1.0, |u| (1.0 + u) / (1.0 - u))
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn eval(&self, u: f64) -> f64 {
        (self.l)(u)
    }
}

/// Precomputed displaced-quantizer profiles on a grid, reusable across fields of
/// a given boundary order.
pub struct Quantization {
    eta: f64,
    n: usize,
    field_order: f64,
    grid: DiskGrid,
    profiles: Vec<DMatrix<f64>>,
    tail: f64,
}

impl Quantization {
    pub fn new(
        q: &QuantizerOperator,
        n: usize,
        field_order: f64,
        spec: GridSpec,
    ) -> Result<Quantization> {
        let eta = q.eta();
        let spec = spec.for_bandwidth(n);
        let grid =
            DiskGrid::invariant_for(spec, q.boundary_order() + field_order, q.mixed_boundary())?;
        let table = RadialTable::new(eta, profile_terms(n) + 2)?;
        let profiles: Vec<_> = grid
            .r
            .par_iter()
            .map(|&r| q.profile(&table, r, n))
            .collect();
        // per-ring remainder bound, capped by the boundary envelope of the exact profile,
        // integrated against the field envelope
        let order = q.boundary_order();
        let tail = (2.0 * eta - 1.0)
            * 2.0
            * profiles
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let v = 1.0 - grid.u[i];
                    grid.ring_weights[i] * p.tail.min(v.powf(order)) * v.powf(field_order)
                })
                .sum::<f64>();
        if tail > 1e-8 {
            log::warn!("k-series remainder may reach {tail:.2e} in the quantized entries");
        }
        Ok(Quantization {
            eta,
            n,
            field_order,
            grid,
            profiles: profiles.into_iter().map(|p| p.d).collect(),
            tail,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> &DiskGrid {
        &self.grid
    }

    /// Estimated k-series remainder carried into the entries of A_f.
    pub fn tail_estimate(&self) -> f64 {
        self.tail
    }

    /// A_f on the first N basis vectors.
    pub fn apply(&self, f: &Field) -> Result<FockOperator> {
        if f.order() < self.field_order - 1e-12 {
            return Err(AdqError::Invalid(format!(
                "field {} of boundary order {} on a grid prepared for order {}",
                f.name(),
                f.order(),
                self.field_order
            )));
        }
        let n = self.n;
        let g = &self.grid;
        let parts: Vec<DMatrix<Complex64>> = (0..g.rings())
            .into_par_iter()
            .map(|i| {
                let samples: Vec<Complex64> = (0..g.angular_points)
                    .map(|j| f.eval(g.point(i, j)))
                    .collect();
                let modes = g.ring_modes(&samples, n);
                let d = &self.profiles[i];
                let w = g.ring_weights[i];
                let mut c = DMatrix::<Complex64>::zeros(n, n);
                for a in 0..n {
                    for b in 0..n {
                        // mode index b − a shifted by N−1
                        c[(a, b)] = modes[b + n - 1 - a] * (w * d[(a, b)]);
                    }
                }
                c
            })
            .collect();
        let mut acc = DMatrix::<Complex64>::zeros(n, n);
        for p in parts {
            acc += p;
        }
        acc *= Complex64::new((2.0 * self.eta - 1.0) / PI, 0.0);
        if acc.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(AdqError::Numeric(format!(
                "quantization of {} produced non-finite entries",
                f.name()
            )));
        }
        FockOperator::new(self.eta, acc)
    }

    /// max over the leading block of |U(g) A_f U(g)† − A_{f∘g⁻¹}|; the engine's N
    /// must leave room for the spread of U(g).
    pub fn covariance_deviation(&self, f: &Field, g: &GroupElement, block: usize) -> Result<f64> {
        let a = self.apply(f)?;
        let b = self.apply(&f.transformed(g))?;
        let u = u_matrix(self.eta, g, self.n)?;
        let lhs = u.mul(&a)?.mul(&u.adjoint())?;
        lhs.max_abs_diff(&b, block)
    }
}

/// Engine size so that a block survives conjugation by U(p(z)) with |z| ≤ r.
pub fn covariance_dim(block: usize, r: f64) -> usize {
    let spread = (1.0 + r) / (1.0 - r);
    ((block as f64 * spread).ceil() as usize + 30).min(400)
}

pub fn quantize(
    q: &QuantizerOperator,
    f: &Field,
    n: usize,
    spec: GridSpec,
) -> Result<FockOperator> {
    Quantization::new(q, n, f.order(), spec)?.apply(f)
}

/// A_f together with the change observed when the grid is doubled.
pub fn quantize_with_estimate(
    q: &QuantizerOperator,
    f: &Field,
    n: usize,
    spec: GridSpec,
) -> Result<(FockOperator, f64)> {
    let a = quantize(q, f, n, spec)?;
    let b = quantize(q, f, n, spec.doubled())?;
    let est = a.max_abs_diff(&b, n)?;
    let scale = b.max_abs(n).max(1.0);
    if est > 1e-8 * scale {
        log::warn!(
            "quantization of {} changes by {est:.2e} when the grid is doubled; refine the grid",
            f.name()
        );
    }
    Ok((b, est))
}

fn isotropic_prefactor(eta: f64, k: usize, n: usize) -> f64 {
    let (lo, hi) = (k.min(n), k.max(n));
    let d = hi - lo;
    let l = crate::specfun::gamma::ln_factorial(lo) - crate::specfun::gamma::ln_factorial(hi)
        + statrs::function::gamma::ln_gamma(2.0 * eta + hi as f64)
        - statrs::function::gamma::ln_gamma(2.0 * eta + lo as f64);
    PI * 2f64.powf(1.0 - 2.0 * eta - d as f64) * l.exp()
}

/// 𝓘^η_{k,n,n}(l) = π 2^{1−2η+n<−n>} (n<!Γ(2η+n>)/(n>!Γ(2η+n<)))
/// ∫ l((1−v)/2)(1−v)^{d}(1+v)^{2η−2} (P_{n<}^{(d,2η−1)}(v))² dv, on the rule (d, 2η−2+q).
pub fn isotropic_integral(
    eta: f64,
    k: usize,
    n: usize,
    l: &RadialFn,
    extra_order: usize,
) -> Result<f64> {
    let (lo, hi) = (k.min(n), k.max(n));
    let d = (hi - lo) as f64;
    let beta = 2.0 * eta - 2.0 + l.order();
    if !(beta > -1.0) {
        return Err(AdqError::WeightEta(format!(
            "isotropic integral of {} diverges at |z| = 1 for eta {eta}",
            l.name
        )));
    }
    let q = crate::specfun::quadrature::gauss_jacobi(lo + 2 + extra_order, d, beta)?;
    let s = q.integrate(|v| {
        let u = 0.5 * (1.0 - v);
        let p = crate::specfun::jacobi::jacobi_poly(lo, d, 2.0 * eta - 1.0, v);
        l.eval(u) * (1.0 + v).powf(-l.order()) * p * p
    });
    Ok(isotropic_prefactor(eta, k, n) * s)
}

/// π/(2η−1)
pub fn ikn1_closed(eta: f64) -> f64 {
    PI / (2.0 * eta - 1.0)
}

/// π/(2η−1) · [(k+η)(η+n) + η(η−1)] / (2η(η−1)).
pub fn ikn2_closed(eta: f64, k: usize, n: usize) -> Result<f64> {
    if eta <= 1.0 {
        return Err(AdqError::Domain(format!(
            "closed form has a pole at eta = 1; got eta = {eta}"
        )));
    }
    let (k, n) = (k as f64, n as f64);
    Ok(
        PI / (2.0 * eta - 1.0) * ((k + eta) * (eta + n) + eta * (eta - 1.0))
            / (2.0 * eta * (eta - 1.0)),
    )
}

/// Diagonal A_l for isotropic l, with a tail indicator for the k-series.
pub fn quantize_isotropic(
    q: &QuantizerOperator,
    l: &RadialFn,
    n: usize,
    radial_order: usize,
) -> Result<(FockOperator, f64)> {
    let eta = q.eta();
    let c = (2.0 * eta - 1.0) / PI;
    if q.weight().is_half() {
        // M(p(z)) = 2 U(p(2z/(1+|z|²))) P, diagonal entries 2(−1)^n R_nn
        let grid = DiskGrid::invariant(GridSpec::new(radial_order, 8), 2.0 * eta + l.order())?;
        let table = RadialTable::new(eta, n + 2)?;
        let diag: Vec<f64> = (0..n)
            .map(|m| {
                let sign = if m % 2 == 0 { 2.0 } else { -2.0 };
                c * grid.integrate_radial(|u| {
                    let r = u.sqrt();
                    let defect = ((1.0 - u) / (1.0 + u)).powi(2);
                    l.eval(u) * sign * table.element_defect(m, m, 2.0 * r / (1.0 + u), defect)
                })
            })
            .collect();
        return Ok((FockOperator::from_diagonal(eta, &diag)?, 0.0));
    }
    let ks: Vec<usize> = match q.finite_support() {
        Some(s) => s,
        None => (0..q.stored().len()).collect(),
    };
    let k_top = ks.iter().copied().max().unwrap_or(0);
    let grid = DiskGrid::invariant(
        GridSpec::new(radial_order.max((k_top + n) / 2 + 8), 8),
        2.0 * eta + l.order(),
    )?;
    let table = RadialTable::new(eta, k_top + n + 2)?;
    let lu: Vec<f64> = grid.u.iter().map(|&u| l.eval(u)).collect();
    let mut diag = vec![0.0; n];
    let mut indicator = 0.0f64;
    for (m, slot) in diag.iter_mut().enumerate() {
        let terms: Vec<f64> = ks
            .par_iter()
            .map(|&k| {
                let mk = q.entry(k);
                if mk == 0.0 {
                    return 0.0;
                }
                let mut acc = crate::specfun::series::NeumaierSum::default();
                for i in 0..grid.rings() {
                    let e = table.element(m, k, grid.r[i]);
                    acc.add(grid.ring_weights[i] * lu[i] * e * e);
                }
                mk * 2.0 * PI * acc.total()
            })
            .collect();
        if q.finite_support().is_none() {
            let len = terms.len();
            let head = terms[..len / 4].iter().fold(0.0f64, |a, t| a.max(t.abs()));
            let last = terms[3 * len / 4..]
                .iter()
                .fold(0.0f64, |a, t| a.max(t.abs()));
            if last > 0.5 * head {
                return Err(AdqError::SeriesDivergence(format!(
                    "terms M_kk I_k,{m},{m} do not decay for weight {}",
                    q.weight()
                )));
            }
            indicator = indicator.max(terms[len / 2..].iter().map(|t| t.abs()).sum::<f64>());
        }
        *slot = c * crate::specfun::series::compensated_sum(terms);
    }
    if indicator > 1e-8 {
        log::warn!("isotropic k-series tail indicator {indicator:.2e}");
    }
    Ok((FockOperator::from_diagonal(eta, &diag)?, indicator))
}

/// max-norm deviation of (2η−1)/π ∫ M(p(z)) dμ from I on the leading block.
pub fn resolution_identity_deviation(
    q: &QuantizerOperator,
    n: usize,
    spec: GridSpec,
    block: usize,
) -> Result<f64> {
    let a = quantize(q, &Field::constant(1.0), n, spec)?;
    a.max_abs_diff(&FockOperator::identity(q.eta(), n)?, block)
}

/// ∫ ⟨e₀|M(p(z))|e₀⟩ dμ.
pub fn c_w_constant(q: &QuantizerOperator, spec: GridSpec) -> Result<f64> {
    let grid = DiskGrid::invariant_for(spec, q.boundary_order(), q.mixed_boundary())?;
    let table = RadialTable::new(q.eta(), profile_terms(1) + 2)?;
    let d00: Vec<f64> = grid
        .r
        .par_iter()
        .map(|&r| q.profile(&table, r, 1).d[(0, 0)])
        .collect();
    let mut acc = crate::specfun::series::NeumaierSum::default();
    for (i, v) in d00.iter().enumerate() {
        acc.add(grid.ring_weights[i] * v);
    }
    Ok(2.0 * PI * acc.total())
}

/// 𝒮 = Σ k M_kk.
pub fn s_series(
    q: &QuantizerOperator,
    mode: SeriesMode,
) -> Result<crate::specfun::series::SeriesEstimate> {
    q.series(|k| k as f64, mode)
}

/// γ = (1 + 𝒮/η)/(η−1).
pub fn gamma_constant(q: &QuantizerOperator, mode: SeriesMode) -> Result<f64> {
    let eta = q.eta();
    if eta <= 1.0 {
        return Err(AdqError::Domain(format!("gamma needs eta > 1, got {eta}")));
    }
    let s = s_series(q, mode)?;
    Ok((1.0 + s.value / eta) / (eta - 1.0))
}

/// (A_{k₀})₀₀/η by quadrature, independent of the 𝒮 series.
pub fn gamma_by_quadrature(q: &QuantizerOperator, spec: GridSpec) -> Result<f64> {
    let eta = q.eta();
    let grid = DiskGrid::invariant_for(spec, q.boundary_order() - 1.0, q.mixed_boundary())?;
    let table = RadialTable::new(eta, profile_terms(1) + 2)?;
    let d00: Vec<f64> = grid
        .r
        .par_iter()
        .map(|&r| q.profile(&table, r, 1).d[(0, 0)])
        .collect();
    let mut acc = crate::specfun::series::NeumaierSum::default();
    for (i, v) in d00.iter().enumerate() {
        let u = grid.u[i];
        acc.add(grid.ring_weights[i] * v * (1.0 + u) / (1.0 - u));
    }
    Ok((2.0 * eta - 1.0) / PI * 2.0 * PI * acc.total() / eta)
}

/// The operator that k_a quantizes to, up to γ: z labels the coherent state
/// U(p(z))e₀ ∝ Σ z̄ⁿ eₙ, so k₊ ∝ z̄ pairs with the lowering K₋ and k₁ with −K₁.
pub fn quantized_partner(a: Generator) -> (Generator, f64) {
    match a {
        Generator::K0 => (Generator::K0, 1.0),
        Generator::K1 => (Generator::K1, -1.0),
        Generator::K2 => (Generator::K2, 1.0),
        Generator::Kplus => (Generator::Kminus, 1.0),
        Generator::Kminus => (Generator::Kplus, 1.0),
    }
}

/// Entrywise max |A_{k_a} − γ·partner(K_a)| on the leading block over all five observables.
pub fn generator_quantization_deviation(
    q: &QuantizerOperator,
    gamma: f64,
    n: usize,
    spec: GridSpec,
    block: usize,
) -> Result<f64> {
    let engine = Quantization::new(q, n, -1.0, spec)?;
    let gens = generators(q.eta(), n)?;
    let mut worst = 0.0f64;
    for a in [
        Generator::K0,
        Generator::K1,
        Generator::K2,
        Generator::Kplus,
        Generator::Kminus,
    ] {
        let af = engine.apply(&Field::observable(a))?;
        let (b, sign) = quantized_partner(a);
        let want = gens.get(b).scale(Complex64::new(sign * gamma, 0.0));
        worst = worst.max(af.max_abs_diff(&want, block)?);
    }
    Ok(worst)
}

/// max-norm deviation of (2η−1)/π ∫ U(p(z)) d²z/(1−|z|²)^{3/2} from 2P on the leading block.
pub fn parity_integral_check(eta: f64, n: usize, spec: GridSpec, block: usize) -> Result<f64> {
    let spec = spec.for_bandwidth(n);
    // U_{nn′} ~ (1−u)^η against (1−u)^{−3/2}
    let grid = DiskGrid::new(spec, super::grid::boundary_exponent(eta, 1.5)?, 1.5)?;
    let table = RadialTable::new(eta, n + 2)?;
    let ones = vec![Complex64::new(1.0, 0.0); grid.angular_points];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..grid.rings() {
        let modes = grid.ring_modes(&ones, n);
        let w = grid.ring_weights[i];
        for a in 0..n {
            for b in 0..n {
                m[(a, b)] += modes[b + n - 1 - a] * (w * table.element(a, b, grid.r[i]));
            }
        }
    }
    m *= Complex64::new((2.0 * eta - 1.0) / PI, 0.0);
    let got = FockOperator::new(eta, m)?;
    let want = crate::repn::parity(eta, n)?.scale(Complex64::new(2.0, 0.0));
    got.max_abs_diff(&want, block)
}

/// max_n |(−1)^n (A₁)_nn − hyper(n)| with A₁ from the half-weight quantizer and
/// hyper(n) = 2(2η−1)∫(1−u)^{2η−2}(1+u)^{−2η}₂F₁(−n,n+2η;1;4u/(1+u)²)du.
pub fn hyper_consistency(eta: f64, n_max: usize, radial_order: usize) -> Result<f64> {
    let q = QuantizerOperator::new(&super::weight::WeightSpec::half(eta)?, (n_max + 1).max(2))?;
    let (a, _) = quantize_isotropic(&q, &RadialFn::one(), n_max + 1, radial_order)?;
    let mut worst = 0.0f64;
    for n in 0..=n_max {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let h = hyper_integral(eta, n, radial_order)?;
        worst = worst.max((sign * a.get(n, n).re - h).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantizer::weight::WeightSpec;
    use proptest::prelude::*;

    fn spec() -> GridSpec {
        GridSpec::new(48, 128)
    }

    #[test]
    fn ikn_closed_forms() {
        for &eta in &[1.5, 2.0, 2.5] {
            for k in 0..=8 {
                for n in 0..=8 {
                    let one = isotropic_integral(eta, k, n, &RadialFn::one(), 4).unwrap();
                    assert!(
                        (one - ikn1_closed(eta)).abs() <= 1e-12 * ikn1_closed(eta),
                        "eta={eta} k={k} n={n}"
                    );
                    let two =
                        isotropic_integral(eta, k, n, &RadialFn::inverse_defect(), 4).unwrap();
                    let want = ikn2_closed(eta, k, n).unwrap();
                    assert!(
                        (two - want).abs() <= 1e-11 * want,
                        "eta={eta} k={k} n={n} {two} {want}"
                    );
                }
            }
        }
        assert!(ikn2_closed(1.0, 0, 0).is_err());
    }

    #[test]
    fn perelomov_resolution_and_k0() {
        let q = QuantizerOperator::new(&WeightSpec::perelomov(2.0).unwrap(), 24).unwrap();
        assert!(resolution_identity_deviation(&q, 24, spec(), 20).unwrap() < 1e-8);
        let a = quantize(&q, &Field::observable(Generator::K0), 24, spec()).unwrap();
        let k0 = generators(2.0, 24).unwrap().k0;
        assert!(a.max_abs_diff(&k0, 20).unwrap() < 1e-7);
        let (iso, _) = quantize_isotropic(&q, &RadialFn::k0(), 12, 32).unwrap();
        assert!(iso.max_abs_diff(&k0.resized(12).unwrap(), 12).unwrap() < 1e-10);
        let (one, _) = quantize_isotropic(&q, &RadialFn::one(), 12, 32).unwrap();
        assert!(
            one.max_abs_diff(&FockOperator::identity(2.0, 12).unwrap(), 12)
                .unwrap()
                < 1e-12
        );
    }

    #[test]
    fn power_two_resolution() {
        let q = QuantizerOperator::new(&WeightSpec::power(2.0, 2.0).unwrap(), 30).unwrap();
        let d = resolution_identity_deviation(&q, 30, GridSpec::new(64, 128), 22).unwrap();
        assert!(d < 1e-6, "{d}");
    }

    #[test]
    fn c_w_values() {
        for w in [
            WeightSpec::perelomov(2.0).unwrap(),
            WeightSpec::power(2.0, 2.0).unwrap(),
            WeightSpec::basis_projector(2.0, 2).unwrap(),
            WeightSpec::half(2.0).unwrap(),
        ] {
            let q = QuantizerOperator::new(&w, 8).unwrap();
            let c = c_w_constant(&q, GridSpec::new(48, 8)).unwrap();
            let tol = if q.finite_support().is_some() || w.is_half() {
                1e-12
            } else {
                1e-7
            };
            assert!((c - PI / 3.0).abs() < tol * PI / 3.0, "{w}: {c}");
        }
    }

    #[test]
    fn gamma_values_and_cross_check() {
        for &eta in &[1.5, 2.0, 3.0] {
            let cases = [
                (WeightSpec::perelomov(eta).unwrap(), 1.0 / (eta - 1.0)),
                (
                    WeightSpec::half(eta).unwrap(),
                    (2.0 * eta - 1.0) / (2.0 * eta * (eta - 1.0)),
                ),
                (
                    WeightSpec::basis_projector(eta, 2).unwrap(),
                    (eta + 2.0) / (eta * (eta - 1.0)),
                ),
            ];
            for (w, want) in cases {
                let q = QuantizerOperator::new(&w, 8).unwrap();
                let g = gamma_constant(&q, SeriesMode::Auto).unwrap();
                assert!((g - want).abs() < 1e-6, "{w} eta={eta} {g} {want}");
                let gq = gamma_by_quadrature(&q, GridSpec::new(64, 8)).unwrap();
                assert!((gq - want).abs() < 1e-8, "{w} eta={eta} quad {gq} {want}");
            }
        }
        let q = QuantizerOperator::new(&WeightSpec::power(0.75, 2.0).unwrap(), 8).unwrap();
        assert!(matches!(
            gamma_constant(&q, SeriesMode::Auto),
            Err(AdqError::Domain(_))
        ));
    }

    #[test]
    fn power_two_generators() {
        let q = QuantizerOperator::new(&WeightSpec::power(2.0, 2.0).unwrap(), 16).unwrap();
        let g = gamma_constant(&q, SeriesMode::Auto).unwrap();
        assert!((g - 1.5).abs() < 1e-9);
        let engine = Quantization::new(&q, 16, -1.0, GridSpec::new(64, 64)).unwrap();
        let d = generator_quantization_deviation(&q, g, 16, GridSpec::new(64, 64), 10).unwrap();
        // slowly decaying M_kk: the truncated k-series sets the accuracy
        assert!(
            d < 1e-4 && d <= 2.0 * engine.tail_estimate() + 1e-9,
            "{d} {}",
            engine.tail_estimate()
        );
    }

    #[test]
    fn half_generators() {
        let q = QuantizerOperator::new(&WeightSpec::half(2.0).unwrap(), 12).unwrap();
        let d = generator_quantization_deviation(&q, 0.75, 12, GridSpec::new(64, 64), 8).unwrap();
        assert!(d < 1e-7, "{d}");
        assert!(resolution_identity_deviation(&q, 12, GridSpec::new(64, 64), 8).unwrap() < 1e-9);
    }

    #[test]
    fn self_adjointness_relation() {
        let q = QuantizerOperator::new(&WeightSpec::power(2.0, 2.5).unwrap(), 10).unwrap();
        let f = Field::new("bump", 0.0, |z| {
            let w = z.z() - Complex64::new(0.2, 0.1);
            Complex64::new(0.3, 1.0) * (-(w.norm_sqr()) / 0.1).exp() * z.z()
        });
        let engine = Quantization::new(&q, 10, 0.0, spec()).unwrap();
        let a = engine.apply(&f).unwrap();
        let b = engine.apply(&f.conj()).unwrap();
        assert!(a.adjoint().max_abs_diff(&b, 10).unwrap() < 1e-10);
    }

    #[test]
    fn parity_integral() {
        assert!(parity_integral_check(2.0, 20, GridSpec::new(32, 64), 8).unwrap() < 1e-12);
        assert!(parity_integral_check(1.5, 12, GridSpec::new(32, 64), 12).unwrap() < 1e-12);
    }

    #[test]
    fn hyper_routes_agree() {
        for &eta in &[1.5, 2.0, 3.0] {
            assert!(hyper_consistency(eta, 10, 64).unwrap() < 1e-8);
        }
    }

    #[test]
    fn weight_eta_incompatible() {
        // k₀ against a quantizer whose displacements decay too slowly
        let q = QuantizerOperator::new(&WeightSpec::power(2.0, 1.2).unwrap(), 6).unwrap();
        assert!(matches!(
            quantize(&q, &Field::observable(Generator::K0), 6, spec()),
            Err(AdqError::WeightEta(_))
        ));
    }

    #[test]
    fn h_covariance_exact() {
        let q = QuantizerOperator::new(&WeightSpec::basis_projector(2.0, 1).unwrap(), 12).unwrap();
        let engine = Quantization::new(&q, 12, -1.0, spec()).unwrap();
        let f = Field::observable(Generator::Kplus).plus(&Field::new("z2", 0.0, |z| z.z() * z.z()));
        let d = engine
            .covariance_deviation(&f, &GroupElement::h(0.7), 12)
            .unwrap();
        assert!(d < 1e-10, "{d}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(6))]

        #[test]
        fn p_covariance(x in -0.3f64..0.3, y in -0.3f64..0.3, cx in -0.4f64..0.4, s in 0.05f64..0.3) {
            let q = QuantizerOperator::new(&WeightSpec::perelomov(2.0).unwrap(), 8).unwrap();
            let block = 6;
            let n = covariance_dim(block, 0.43);
            let engine = Quantization::new(&q, n, -1.0, GridSpec::new(64, 256)).unwrap();
            let g = GroupElement::p(DiskPoint::from_re_im(x, y).unwrap());
            let bump = Field::new("bump", 0.0, move |z| {
                let w = z.z() - Complex64::new(cx, 0.0);
                Complex64::new((-(w.norm_sqr()) / (s * s)).exp(), 0.0)
            });
            let f = Field::observable(Generator::K0).plus(&bump);
            let d = engine.covariance_deviation(&f, &g, block).unwrap();
            prop_assert!(d < 1e-6, "{}", d);
        }
    }
}
