//! Truncated matrices of the discrete-series representation U^η on the basis e_n ∝ z^n.

use crate::error::{AdqError, Result};
use crate::geometry::{DiskPoint, GroupElement};
use crate::specfun::gamma::{ln_factorial, ln_gamma_signed};
use crate::specfun::jacobi::{jacobi_poly, JacobiSeq};
use crate::specfun::series::{abel_sum, AbelOptions, AbelSum};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Dense N×N operator on the first N basis vectors, tagged with η.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    eta: f64,
    mat: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct FockOperatorRepr {
    eta: f64,
    dim: usize,
    /// row-major (re, im) pairs
    entries: Vec<[f64; 2]>,
}

impl Serialize for FockOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let c = self.mat[(i, j)];
                entries.push([c.re, c.im]);
            }
        }
        FockOperatorRepr {
            eta: self.eta,
            dim: n,
            entries,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FockOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FockOperatorRepr::deserialize(d)?;
        if r.entries.len() != r.dim * r.dim {
            return Err(serde::de::Error::custom("entries length is not dim^2"));
        }
        let mat = CMatrix::from_row_iterator(
            r.dim,
            r.dim,
            r.entries.iter().map(|p| Complex64::new(p[0], p[1])),
        );
        FockOperator::new(r.eta, mat).map_err(serde::de::Error::custom)
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.5 && eta.is_finite()) {
        return Err(AdqError::Domain(format!("eta must exceed 1/2, got {eta}")));
    }
    Ok(())
}

impl FockOperator {
    pub fn new(eta: f64, mat: CMatrix) -> Result<FockOperator> {
        check_eta(eta)?;
        if mat.nrows() != mat.ncols() || mat.nrows() < 2 {
            return Err(AdqError::Shape(format!(
                "operator must be square with dim >= 2, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(FockOperator { eta, mat })
    }

    pub fn zeros(eta: f64, n: usize) -> Result<FockOperator> {
        FockOperator::new(eta, CMatrix::zeros(n, n))
    }

    pub fn identity(eta: f64, n: usize) -> Result<FockOperator> {
        FockOperator::new(eta, CMatrix::identity(n, n))
    }

    pub fn from_diagonal(eta: f64, diag: &[f64]) -> Result<FockOperator> {
        let n = diag.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        FockOperator::new(eta, m)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    fn same_space(&self, other: &FockOperator) -> Result<()> {
        if self.eta != other.eta || self.dim() != other.dim() {
            return Err(AdqError::Shape(format!(
                "operators live on different spaces: (eta {}, N {}) vs (eta {}, N {})",
                self.eta,
                self.dim(),
                other.eta,
                other.dim()
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &FockOperator) -> Result<FockOperator> {
        self.same_space(other)?;
        Ok(FockOperator {
            eta: self.eta,
            mat: &self.mat * &other.mat,
        })
    }

    pub fn add(&self, other: &FockOperator) -> Result<FockOperator> {
        self.same_space(other)?;
        Ok(FockOperator {
            eta: self.eta,
            mat: &self.mat + &other.mat,
        })
    }

    pub fn sub(&self, other: &FockOperator) -> Result<FockOperator> {
        self.same_space(other)?;
        Ok(FockOperator {
            eta: self.eta,
            mat: &self.mat - &other.mat,
        })
    }

    pub fn commutator(&self, other: &FockOperator) -> Result<FockOperator> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn scale(&self, c: Complex64) -> FockOperator {
        FockOperator {
            eta: self.eta,
            mat: &self.mat * c,
        }
    }

    pub fn adjoint(&self) -> FockOperator {
        FockOperator {
            eta: self.eta,
            mat: self.mat.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    /// Largest |a_ij − b_ij| over the leading `block`×`block` corner.
    pub fn max_abs_diff(&self, other: &FockOperator, block: usize) -> Result<f64> {
        self.same_space(other)?;
        let b = block.min(self.dim());
        let mut m = 0.0f64;
        for i in 0..b {
            for j in 0..b {
                m = m.max((self.mat[(i, j)] - other.mat[(i, j)]).norm());
            }
        }
        Ok(m)
    }

    /// Largest |a_ij| over the leading corner.
    pub fn max_abs(&self, block: usize) -> f64 {
        let b = block.min(self.dim());
        let mut m = 0.0f64;
        for i in 0..b {
            for j in 0..b {
                m = m.max(self.mat[(i, j)].norm());
            }
        }
        m
    }

    /// Truncate or zero-pad to dimension `n`.
    pub fn resized(&self, n: usize) -> Result<FockOperator> {
        let mut m = CMatrix::zeros(n, n);
        let k = n.min(self.dim());
        m.view_mut((0, 0), (k, k))
            .copy_from(&self.mat.view((0, 0), (k, k)));
        FockOperator::new(self.eta, m)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.mat[(i, j)].norm() <= tol))
    }

    /// Rows of "re,im" pairs.
    pub fn to_csv_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| {
                (0..self.dim())
                    .flat_map(|j| {
                        let c = self.mat[(i, j)];
                        [c.re, c.im]
                    })
                    .collect()
            })
            .collect()
    }
}

/// √(n<! Γ(2η+n>) / (n>! Γ(2η+n<)))
fn element_prefactor(eta: f64, n_lo: usize, n_hi: usize) -> f64 {
    let two_eta = 2.0 * eta;
    let l = ln_factorial(n_lo) - ln_factorial(n_hi)
        + ln_gamma_signed(two_eta + n_hi as f64)
            .expect("2eta+n > 0")
            .0
        - ln_gamma_signed(two_eta + n_lo as f64)
            .expect("2eta+n > 0")
            .0;
    (0.5 * l).exp()
}

/// Real radial factor R_{nn′}(|z|) with U_{nn′}(p(z)) = R_{nn′}(|z|) e^{i(n′−n)φ}.
pub fn radial_element(eta: f64, n: usize, np: usize, r: f64) -> f64 {
    let (lo, hi) = if n <= np { (n, np) } else { (np, n) };
    let d = hi - lo;
    let u = r * r;
    let sign = if n < np && d % 2 == 1 { -1.0 } else { 1.0 };
    let p = jacobi_poly(lo, d as f64, 2.0 * eta - 1.0, 1.0 - 2.0 * u);
    sign * element_prefactor(eta, lo, hi) * (1.0 - u).powf(eta) * r.powi(d as i32) * p
}

/// Log-factorial and log-Γ(2η+j) tables for repeated radial evaluations.
#[derive(Debug, Clone)]
pub struct RadialTable {
    eta: f64,
    ln_fact: Vec<f64>,
    ln_g: Vec<f64>,
}

impl RadialTable {
    pub fn new(eta: f64, len: usize) -> Result<RadialTable> {
        check_eta(eta)?;
        let mut ln_fact = Vec::with_capacity(len);
        let mut ln_g = Vec::with_capacity(len);
        let mut lf = 0.0;
        let mut lg = ln_gamma_signed(2.0 * eta)?.0;
        for j in 0..len {
            ln_fact.push(lf);
            ln_g.push(lg);
            lf += ((j + 1) as f64).ln();
            lg += (2.0 * eta + j as f64).ln();
        }
        Ok(RadialTable { eta, ln_fact, ln_g })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn len(&self) -> usize {
        self.ln_fact.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ln_fact.is_empty()
    }

    /// R_{nk}(r); falls back to direct evaluation outside the table.
    pub fn element(&self, n: usize, k: usize, r: f64) -> f64 {
        self.element_defect(n, k, r, 1.0 - r * r)
    }

    /// R_{nk}(r) given an accurate defect 1 − r², for radii where forming it would cancel.
    pub fn element_defect(&self, n: usize, k: usize, r: f64, defect: f64) -> f64 {
        let (lo, hi) = if n <= k { (n, k) } else { (k, n) };
        if hi >= self.len() {
            return radial_element(self.eta, n, k, r);
        }
        let d = hi - lo;
        let sign = if n < k && d % 2 == 1 { -1.0 } else { 1.0 };
        let pre =
            (0.5 * (self.ln_fact[lo] - self.ln_fact[hi] + self.ln_g[hi] - self.ln_g[lo])).exp();
        let p = jacobi_poly(lo, d as f64, 2.0 * self.eta - 1.0, 2.0 * defect - 1.0);
        sign * pre * defect.powf(self.eta) * r.powi(d as i32) * p
    }
}

/// U^η_{nn′}(p(z)) through the Jacobi-polynomial form.
pub fn u_element_p(eta: f64, n: usize, np: usize, z: DiskPoint) -> Complex64 {
    let r = z.z().norm();
    let phi = z.z().arg();
    Complex64::from_polar(1.0, (np as f64 - n as f64) * phi) * radial_element(eta, n, np, r)
}

/// U^η_{nn′}(p(z)) through the ₂F₁ form; independent of the Jacobi route.
pub fn u_element_p_hypergeometric(
    eta: f64,
    n: usize,
    np: usize,
    z: DiskPoint,
) -> Result<Complex64> {
    let (lo, hi) = if n <= np { (n, np) } else { (np, n) };
    let d = hi - lo;
    let u = z.abs2();
    let two_eta = 2.0 * eta;
    let l = ln_factorial(hi) - ln_factorial(lo) + ln_gamma_signed(two_eta + hi as f64)?.0
        - ln_gamma_signed(two_eta + lo as f64)?.0;
    let pre =
        (0.5 * l).exp() * (1.0 - u).powf(eta) * z.z().norm().powi(d as i32) / ln_factorial(d).exp();
    let f =
        crate::specfun::hypergeom::hyp2f1_terminating(lo, hi as f64 + two_eta, d as f64 + 1.0, u)?;
    let sign = if n < np && d % 2 == 1 { -1.0 } else { 1.0 };
    Ok(Complex64::from_polar(1.0, (np as f64 - n as f64) * z.z().arg()) * (sign * pre * f))
}

pub fn u_matrix_p(eta: f64, z: DiskPoint, n: usize) -> Result<FockOperator> {
    check_eta(eta)?;
    let r = z.z().norm();
    let phi = z.z().arg();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = Complex64::from_polar(1.0, (j as f64 - i as f64) * phi)
                * radial_element(eta, i, j, r);
        }
    }
    FockOperator::new(eta, m)
}

pub fn u_matrix_h(eta: f64, theta: f64, n: usize) -> Result<FockOperator> {
    check_eta(eta)?;
    let d: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.0, -(eta + k as f64) * theta))
        .collect();
    FockOperator::new(eta, CMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)))
}

/// U(g) = U(p(z)) U(h(θ)) from the Cartan factors of g.
pub fn u_matrix(eta: f64, g: &GroupElement, n: usize) -> Result<FockOperator> {
    let (z, theta) = g.cartan_decompose();
    u_matrix_p(eta, z, n)?.mul(&u_matrix_h(eta, theta, n)?)
}

#[derive(Debug, Clone)]
pub struct Generators {
    pub k0: FockOperator,
    pub kplus: FockOperator,
    pub kminus: FockOperator,
    pub k1: FockOperator,
    pub k2: FockOperator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    K0,
    K1,
    K2,
    Kplus,
    Kminus,
}

impl Generators {
    pub fn get(&self, a: Generator) -> &FockOperator {
        match a {
            Generator::K0 => &self.k0,
            Generator::K1 => &self.k1,
            Generator::K2 => &self.k2,
            Generator::Kplus => &self.kplus,
            Generator::Kminus => &self.kminus,
        }
    }
}

pub fn generators(eta: f64, n: usize) -> Result<Generators> {
    check_eta(eta)?;
    let mut k0 = CMatrix::zeros(n, n);
    let mut kp = CMatrix::zeros(n, n);
    for i in 0..n {
        k0[(i, i)] = Complex64::new(eta + i as f64, 0.0);
        if i + 1 < n {
            let f = i as f64;
            kp[(i + 1, i)] = Complex64::new(((f + 1.0) * (2.0 * eta + f)).sqrt(), 0.0);
        }
    }
    let km = kp.transpose();
    let k2 = (&kp + &km) * Complex64::new(0.5, 0.0);
    let k1 = (&kp - &km) * Complex64::new(0.0, 0.5);
    Ok(Generators {
        k0: FockOperator::new(eta, k0)?,
        kplus: FockOperator::new(eta, kp)?,
        kminus: FockOperator::new(eta, km)?,
        k1: FockOperator::new(eta, k1)?,
        k2: FockOperator::new(eta, k2)?,
    })
}

/// (K₊K₋ + K₋K₊)/2 − K0².
pub fn casimir(eta: f64, n: usize) -> Result<FockOperator> {
    let g = generators(eta, n)?;
    let pm = g.kplus.mul(&g.kminus)?;
    let mp = g.kminus.mul(&g.kplus)?;
    pm.add(&mp)?
        .scale(Complex64::new(0.5, 0.0))
        .sub(&g.k0.mul(&g.k0)?)
}

pub fn parity(eta: f64, n: usize) -> Result<FockOperator> {
    let d: Vec<f64> = (0..n)
        .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    FockOperator::from_diagonal(eta, &d)
}

/// tr U^η(p(z)) = (1−|z|²)^η (1+|z|)^{1−2η} / (2|z|).
pub fn trace_u_p_closed(eta: f64, z: DiskPoint) -> Result<f64> {
    let r = z.z().norm();
    if r == 0.0 {
        return Err(AdqError::Domain("trace of U(p(0)) = I diverges".into()));
    }
    Ok((1.0 - r * r).powf(eta) * (1.0 + r).powf(1.0 - 2.0 * eta) / (2.0 * r))
}

/// tr U^η(g) = ½ (a²−1)^{−1/2} (a + (a²−1)^{1/2})^{1−2η}, a = Re α, for |Re α| > 1.
pub fn trace_u_closed(eta: f64, g: &GroupElement) -> Result<f64> {
    let a = g.alpha.re;
    if a <= 1.0 {
        return Err(AdqError::Domain(format!(
            "closed trace needs Re alpha > 1, got {a}"
        )));
    }
    let s = (a * a - 1.0).sqrt();
    Ok(0.5 / s * (a + s).powf(1.0 - 2.0 * eta))
}

/// The general parity-trace expression as printed:
/// ½ ((1−Im α)²)^{−1/2} ((Im α)² + ((1−Im α)²)^{1/2})^{1−2η}.
pub fn trace_parity_u_printed(eta: f64, g: &GroupElement) -> f64 {
    let b = g.alpha.im;
    let s = ((1.0 - b) * (1.0 - b)).sqrt();
    0.5 / s * (b * b + s).powf(1.0 - 2.0 * eta)
}

fn diagonal_terms(eta: f64, z: DiskPoint, alternate: bool) -> impl Iterator<Item = f64> {
    let u = z.abs2();
    let pre = (1.0 - u).powf(eta);
    JacobiSeq::new(0.0, 2.0 * eta - 1.0, 1.0 - 2.0 * u)
        .enumerate()
        .map(move |(n, p)| {
            if alternate && n % 2 == 1 {
                -pre * p
            } else {
                pre * p
            }
        })
}

/// Abel-regularized Σ U_nn(p(z)).
pub fn trace_u_p_abel(eta: f64, z: DiskPoint, opts: &AbelOptions) -> Result<AbelSum> {
    check_eta(eta)?;
    abel_sum(diagonal_terms(eta, z, false), opts)
}

/// tr(P U^η(p(z))) = 1/2 for every z.
pub fn trace_parity_u_p(_eta: f64, _z: DiskPoint) -> f64 {
    0.5
}

/// Abel-regularized Σ (−1)^n U_nn(p(z)).
pub fn trace_parity_u_p_abel(eta: f64, z: DiskPoint, opts: &AbelOptions) -> Result<AbelSum> {
    check_eta(eta)?;
    abel_sum(diagonal_terms(eta, z, true), opts)
}

/// Abel-regularized tr(P U(g)) for g = p(z)h(θ), as (real, imaginary) sums.
pub fn trace_parity_u_abel(
    eta: f64,
    g: &GroupElement,
    opts: &AbelOptions,
) -> Result<(AbelSum, AbelSum)> {
    let (z, theta) = g.cartan_decompose();
    let phase = move |n: usize| Complex64::from_polar(1.0, -(eta + n as f64) * theta);
    let re = abel_sum(
        diagonal_terms(eta, z, true)
            .enumerate()
            .map(move |(n, t)| (phase(n) * t).re),
        opts,
    )?;
    let im = abel_sum(
        diagonal_terms(eta, z, true)
            .enumerate()
            .map(move |(n, t)| (phase(n) * t).im),
        opts,
    )?;
    Ok((re, im))
}

/// exp(ξK₊ − ξ̄K₋) on the truncated space.
pub fn displacement(eta: f64, xi: Complex64, n: usize) -> Result<FockOperator> {
    if xi.norm().tanh() > 0.99 {
        return Err(AdqError::Domain(format!(
            "|xi| = {} exceeds tanh^-1(0.99)",
            xi.norm()
        )));
    }
    let g = generators(eta, n)?;
    let a = &g.kplus.mat * xi - &g.kminus.mat * xi.conj();
    let e = a.exp();
    if e.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(AdqError::Numeric(
            "matrix exponential produced non-finite entries".into(),
        ));
    }
    FockOperator::new(eta, e)
}

/// ξ = tanh⁻¹|z| e^{i arg z}.
pub fn xi_of(z: DiskPoint) -> Complex64 {
    Complex64::from_polar(z.z().norm().atanh(), z.z().arg())
}

/// |z;η⟩ = (1−|z|²)^η Σ √((2η)_n/n!) z^n e_n, truncated.
pub fn coherent_state(eta: f64, z: DiskPoint, n: usize) -> Vec<Complex64> {
    let u = z.abs2();
    let mut out = Vec::with_capacity(n);
    let mut c = (1.0 - u).powf(eta);
    let mut zn = ONE;
    for k in 0..n {
        out.push(zn * c);
        let kf = k as f64;
        c *= ((2.0 * eta + kf) / (kf + 1.0)).sqrt();
        zn *= z.z();
    }
    out
}

/// The operator combination the generators are carried to by U(g)·U(g)†.
pub fn conjugated_generator(
    g: &GroupElement,
    a: Generator,
    gens: &Generators,
) -> Result<FockOperator> {
    let (al, be) = (g.alpha, g.beta);
    let (k0, kp, km) = (&gens.k0, &gens.kplus, &gens.kminus);
    let lin = |c0: Complex64, cp: Complex64, cm: Complex64| -> Result<FockOperator> {
        k0.scale(c0).add(&kp.scale(cp))?.add(&km.scale(cm))
    };
    let c0 = Complex64::new(al.norm_sqr() + be.norm_sqr(), 0.0);
    let t0 = lin(c0, -al.conj() * be.conj(), -al * be)?;
    let tp = lin(-2.0 * al.conj() * be, al.conj() * al.conj(), be * be)?;
    let tm = lin(-2.0 * al * be.conj(), be.conj() * be.conj(), al * al)?;
    match a {
        Generator::K0 => Ok(t0),
        Generator::Kplus => Ok(tp),
        Generator::Kminus => Ok(tm),
        Generator::K2 => tp.add(&tm).map(|x| x.scale(Complex64::new(0.5, 0.0))),
        Generator::K1 => tp.sub(&tm).map(|x| x.scale(Complex64::new(0.0, 0.5))),
    }
}

/// Max deviation of U(g) K_a U(g)† from its predicted linear combination on the
/// leading (N − margin) block. The inner contraction runs over an enlarged space,
/// doubled until the block stops moving, since the rows of U(p(z)) spread in
/// proportion to their index.
pub fn covariance_check(
    eta: f64,
    g: &GroupElement,
    a: Generator,
    n: usize,
    margin: usize,
) -> Result<f64> {
    let block = n.saturating_sub(margin);
    let conj_block = |dim: usize| -> Result<FockOperator> {
        let u = u_matrix(eta, g, dim)?;
        let gens = generators(eta, dim)?;
        u.mul(gens.get(a))?.mul(&u.adjoint())?.resized(n)
    };
    let mut dim = 2 * n;
    let mut lhs = conj_block(dim)?;
    loop {
        let next_dim = 2 * dim;
        let next = conj_block(next_dim)?;
        let change = next.max_abs_diff(&lhs, block)?;
        lhs = next;
        dim = next_dim;
        if change <= 1e-13 * lhs.max_abs(block).max(1.0) {
            break;
        }
        if dim >= 16 * n.max(16) {
            return Err(AdqError::Numeric(format!(
                "U(g) K U(g)^† did not settle on the {block}-block (last change {change:e})"
            )));
        }
    }
    let rhs = conjugated_generator(g, a, &generators(eta, n)?)?;
    lhs.max_abs_diff(&rhs, block)
}

/// Default truncation margin max(2, N/4).
pub fn default_margin(n: usize) -> usize {
    (n / 4).max(2)
}

/// Haar integral of U_{mm′}(g) conj(U_{nn′}(g)) over g = p(z)h(θ) with measure
/// d²z/(1−|z|²)² · dθ/(2π), θ ∈ [0, 4π).
pub fn haar_overlap(
    eta: f64,
    (m, mp): (usize, usize),
    (n, np): (usize, usize),
    radial_order: usize,
    angular_points: usize,
    theta_points: usize,
) -> Result<Complex64> {
    check_eta(eta)?;
    // the integrand carries (1−u)^{2η} against dμ = dv dφ/(1+v)²
    let beta = 2.0 * eta - 2.0;
    let q = crate::specfun::quadrature::gauss_jacobi(radial_order, 0.0, beta)?;
    let mut acc = ZERO;
    let dphi = 2.0 * std::f64::consts::PI / angular_points as f64;
    let dth = 4.0 * std::f64::consts::PI / theta_points as f64;
    let mut theta_factor = ZERO;
    for t in 0..theta_points {
        let th = t as f64 * dth;
        let a = Complex64::from_polar(1.0, -(eta + mp as f64) * th);
        let b = Complex64::from_polar(1.0, -(eta + np as f64) * th);
        theta_factor += a * b.conj() * dth / (2.0 * std::f64::consts::PI);
    }
    for (&v, &w) in q.nodes.iter().zip(&q.weights) {
        let r = (0.5 * (1.0 - v)).sqrt();
        let radial = radial_element(eta, m, mp, r) * radial_element(eta, n, np, r);
        let mut ang = ZERO;
        for j in 0..angular_points {
            let phi = j as f64 * dphi;
            ang +=
                Complex64::from_polar(1.0, ((mp as f64 - m as f64) - (np as f64 - n as f64)) * phi)
                    * dphi;
        }
        acc += ang * (w * radial * (1.0 + v).powf(-2.0 - beta));
    }
    Ok(acc * theta_factor)
}
