//! The unit disk as a homogeneous space of SU(1,1).

use crate::error::{AdqError, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const BOUNDARY_GAP: f64 = 1e-14;
const DET_TOL: f64 = 1e-12;

/// A point of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub fn new(z: Complex64) -> Result<DiskPoint> {
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() >= 1.0 - BOUNDARY_GAP {
            return Err(AdqError::Domain(format!(
                "|z| = {} is not inside the unit disk",
                z.norm()
            )));
        }
        Ok(DiskPoint(z))
    }

    pub fn from_re_im(x: f64, y: f64) -> Result<DiskPoint> {
        DiskPoint::new(Complex64::new(x, y))
    }

    pub fn from_polar(r: f64, phi: f64) -> Result<DiskPoint> {
        DiskPoint::new(Complex64::from_polar(r, phi))
    }

    pub fn origin() -> DiskPoint {
        DiskPoint(Complex64::new(0.0, 0.0))
    }

    pub fn z(&self) -> Complex64 {
        self.0
    }

    /// |z|²
    pub fn abs2(&self) -> f64 {
        self.0.norm_sqr()
    }

    pub fn conj(&self) -> DiskPoint {
        DiskPoint(self.0.conj())
    }

    pub fn neg(&self) -> DiskPoint {
        DiskPoint(-self.0)
    }
}

/// Density of the invariant measure dμ = d²z / (1−|z|²)².
pub fn measure_density(z: DiskPoint) -> f64 {
    (1.0 - z.abs2()).powi(-2)
}

/// SU(1,1) element [[α, β], [β̄, ᾱ]] with |α|² − |β|² = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl GroupElement {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<GroupElement> {
        let g = GroupElement { alpha, beta };
        let d = g.det();
        if (d - 1.0).abs() > DET_TOL * (alpha.norm_sqr() + beta.norm_sqr()).max(1.0) {
            return Err(AdqError::Domain(format!(
                "|alpha|^2 - |beta|^2 = {d}, expected 1"
            )));
        }
        Ok(g)
    }

    pub fn identity() -> GroupElement {
        GroupElement {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    pub fn det(&self) -> f64 {
        self.alpha.norm_sqr() - self.beta.norm_sqr()
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [
            [self.alpha, self.beta],
            [self.beta.conj(), self.alpha.conj()],
        ]
    }

    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let (a1, b1, a2, b2) = (self.alpha, self.beta, other.alpha, other.beta);
        let mut g = GroupElement {
            alpha: a1 * a2 + b1 * b2.conj(),
            beta: a1 * b2 + b1 * a2.conj(),
        };
        let d = g.det();
        if (d - 1.0).abs() > 1e-10 * (g.alpha.norm_sqr() + g.beta.norm_sqr()) {
            log::warn!(
                "determinant drift {:.3e} after compose; renormalizing",
                d - 1.0
            );
        }
        let s = d.sqrt();
        g.alpha /= s;
        g.beta /= s;
        g
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            alpha: self.alpha.conj(),
            beta: -self.beta,
        }
    }

    /// p(z) = δ [[1, z], [z̄, 1]], δ = (1−|z|²)^{−1/2}.
    pub fn p(z: DiskPoint) -> GroupElement {
        let delta = (1.0 - z.abs2()).powf(-0.5);
        GroupElement {
            alpha: Complex64::new(delta, 0.0),
            beta: z.z() * delta,
        }
    }

    /// h(θ) = diag(e^{iθ/2}, e^{−iθ/2}).
    pub fn h(theta: f64) -> GroupElement {
        GroupElement {
            alpha: Complex64::from_polar(1.0, 0.5 * theta),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    /// s(u) = [[cosh u/2, sinh u/2], [sinh u/2, cosh u/2]].
    pub fn s(u: f64) -> GroupElement {
        GroupElement {
            alpha: Complex64::new((0.5 * u).cosh(), 0.0),
            beta: Complex64::new((0.5 * u).sinh(), 0.0),
        }
    }

    /// l(v) = [[cosh v/2, i sinh v/2], [−i sinh v/2, cosh v/2]].
    pub fn l(v: f64) -> GroupElement {
        GroupElement {
            alpha: Complex64::new((0.5 * v).cosh(), 0.0),
            beta: Complex64::new(0.0, (0.5 * v).sinh()),
        }
    }

    /// g = p(z) h(θ) with z = β/ᾱ and θ = 2 arg α in [0, 4π).
    pub fn cartan_decompose(&self) -> (DiskPoint, f64) {
        let z = self.beta / self.alpha.conj();
        let theta = (2.0 * self.alpha.arg()).rem_euclid(4.0 * PI);
        (DiskPoint(clamp_into_disk(z)), theta)
    }

    /// z ↦ (αz + β)/(β̄z + ᾱ).
    pub fn act(&self, z: DiskPoint) -> DiskPoint {
        let w = (self.alpha * z.z() + self.beta) / (self.beta.conj() * z.z() + self.alpha.conj());
        DiskPoint(clamp_into_disk(w))
    }

    pub fn approx_eq(&self, other: &GroupElement, tol: f64) -> bool {
        (self.alpha - other.alpha).norm() <= tol && (self.beta - other.beta).norm() <= tol
    }
}

fn clamp_into_disk(z: Complex64) -> Complex64 {
    let r = z.norm();
    let rmax = 1.0 - BOUNDARY_GAP;
    if r >= rmax {
        z * (rmax / r) * (1.0 - f64::EPSILON)
    } else {
        z
    }
}

pub fn p_matrix(z: DiskPoint) -> GroupElement {
    GroupElement::p(z)
}

pub fn h_matrix(theta: f64) -> GroupElement {
    GroupElement::h(theta)
}

pub fn mobius_act(g: &GroupElement, z: DiskPoint) -> DiskPoint {
    g.act(z)
}

/// p(−z) p(z′) = p(t) h(θ) with t = p(−z)·z′.
pub fn pz_composition(z: DiskPoint, zp: DiskPoint) -> (DiskPoint, f64) {
    let g = GroupElement::p(z.neg()).compose(&GroupElement::p(zp));
    let t = GroupElement::p(z.neg()).act(zp);
    let (_, theta) = g.cartan_decompose();
    (t, theta)
}

/// The classical generators k₀, k₁, k₂ and k± = k₂ ∓ i k₁ at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalObservables {
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
    pub kplus: Complex64,
    pub kminus: Complex64,
}

impl ClassicalObservables {
    pub fn from_k(k0: f64, k1: f64, k2: f64) -> ClassicalObservables {
        ClassicalObservables {
            k0,
            k1,
            k2,
            kplus: Complex64::new(k2, -k1),
            kminus: Complex64::new(k2, k1),
        }
    }

    /// k₀² − k₁² − k₂²
    pub fn shell(&self) -> f64 {
        self.k0 * self.k0 - self.k1 * self.k1 - self.k2 * self.k2
    }
}

pub fn observables(z: DiskPoint) -> ClassicalObservables {
    let w = z.z();
    let d = 1.0 - z.abs2();
    ClassicalObservables::from_k((1.0 + z.abs2()) / d, 2.0 * w.im / d, 2.0 * w.re / d)
}

/// Stereographic projection of the upper hyperboloid sheet onto the disk.
pub fn hyperboloid_to_disk(k0: f64, k1: f64, k2: f64) -> Result<DiskPoint> {
    let shell = k0 * k0 - k1 * k1 - k2 * k2;
    if k0 <= 0.0 || (shell - 1.0).abs() > 1e-9 * k0 * k0 {
        return Err(AdqError::Domain(format!(
            "({k0}, {k1}, {k2}) is off the upper sheet k0^2 - k1^2 - k2^2 = 1"
        )));
    }
    DiskPoint::new(Complex64::new(k2, k1) / (1.0 + k0))
}

/// Observables pulled back by g: the values of k_a ∘ g⁻¹ written in terms of k_a.
pub fn coadjoint_transform(g: &GroupElement, obs: &ClassicalObservables) -> ClassicalObservables {
    let (a, b) = (g.alpha, g.beta);
    let k0 = (a.norm_sqr() + b.norm_sqr()) * obs.k0 - 2.0 * (a * b * obs.kplus).re;
    let kplus = -2.0 * a * b.conj() * obs.k0 + a * a * obs.kplus + b.conj() * b.conj() * obs.kminus;
    ClassicalObservables {
        k0,
        k1: -kplus.im,
        k2: kplus.re,
        kplus,
        kminus: kplus.conj(),
    }
}

/// k₀(p(z′)·z) = k₀(z′)k₀(z) + Re(k₋(z′)k₊(z)).
pub fn k0_translated(zp: DiskPoint, z: DiskPoint) -> f64 {
    let (a, b) = (observables(zp), observables(z));
    a.k0 * b.k0 + (a.kminus * b.kplus).re
}

/// k₊(p(z′)·z) = k₊(z′)k₀(z) + (k₊(z) + z̄′² k₋(z)) / (1−|z′|²).
pub fn kplus_translated(zp: DiskPoint, z: DiskPoint) -> Complex64 {
    let (a, b) = (observables(zp), observables(z));
    let zc = zp.z().conj();
    a.kplus * b.k0 + (b.kplus + zc * zc * b.kminus) / (1.0 - zp.abs2())
}

/// {f, g} = (1−|z|²)²/(2i) (∂f ∂̄g − ∂̄f ∂g) by central differences.
pub fn poisson_bracket<F, G>(f: F, g: G, z: DiskPoint, h_step: Option<f64>) -> Result<f64>
where
    F: Fn(DiskPoint) -> f64,
    G: Fn(DiskPoint) -> f64,
{
    let h = h_step.unwrap_or(1e-5 * (1.0 - z.z().norm()));
    if !(h > 1e-12) {
        return Err(AdqError::Numeric(format!(
            "finite-difference step {h:e} underflows"
        )));
    }
    let at = |dx: f64, dy: f64| DiskPoint::new(z.z() + Complex64::new(dx, dy));
    let grad = |q: &dyn Fn(DiskPoint) -> f64| -> Result<(f64, f64)> {
        let qx = (q(at(h, 0.0)?) - q(at(-h, 0.0)?)) / (2.0 * h);
        let qy = (q(at(0.0, h)?) - q(at(0.0, -h)?)) / (2.0 * h);
        Ok((qx, qy))
    };
    let (fx, fy) = grad(&f)?;
    let (gx, gy) = grad(&g)?;
    let wirt = |x: f64, y: f64| (Complex64::new(x, -y) * 0.5, Complex64::new(x, y) * 0.5);
    let (df, dbf) = wirt(fx, fy);
    let (dg, dbg) = wirt(gx, gy);
    let val = (1.0 - z.abs2()).powi(2) / Complex64::new(0.0, 2.0) * (df * dbg - dbf * dg);
    Ok(val.re)
}

/// Global AdS₂ coordinates (y², y⁰, y¹) on the hyperboloid of curvature κ.
pub fn ads_coords(theta: f64, u: f64, kappa: f64) -> (f64, f64, f64) {
    let c = u.cosh() / kappa;
    (c * theta.cos(), c * theta.sin(), u.sinh() / kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    fn dp(x: f64, y: f64) -> DiskPoint {
        DiskPoint::from_re_im(x, y).unwrap()
    }

    fn mat_mul(a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
        let mut m = [[c(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        m
    }

    #[test]
    fn disk_rejects_boundary() {
        assert!(DiskPoint::new(c(1.0, 0.0)).is_err());
        assert!(DiskPoint::new(c(0.6, 0.8)).is_err());
        assert!(DiskPoint::new(c(0.6, 0.79)).is_ok());
    }

    #[test]
    fn p_examples() {
        assert!(GroupElement::p(DiskPoint::origin()).approx_eq(&GroupElement::identity(), 0.0));
        let g = GroupElement::p(dp(0.5, 0.0));
        assert!((g.alpha.re - 1.154_700_538_379_251_5).abs() < 1e-15);
        assert!((g.beta.re - 0.577_350_269_189_625_8).abs() < 1e-15);
        let z = dp(0.3, -0.2);
        assert!(GroupElement::p(z)
            .inverse()
            .approx_eq(&GroupElement::p(z.neg()), 1e-15));
    }

    #[test]
    fn compose_matches_matrix_product() {
        let (g1, g2) = (GroupElement::p(dp(0.3, 0.0)), GroupElement::p(dp(0.0, 0.4)));
        let m = mat_mul(g1.matrix(), g2.matrix());
        let g = g1.compose(&g2);
        assert!((g.alpha - m[0][0]).norm() < 1e-15 && (g.beta - m[0][1]).norm() < 1e-15);
        assert!((m[1][0] - g.beta.conj()).norm() < 1e-15);
        assert!(g
            .compose(&g.inverse())
            .approx_eq(&GroupElement::identity(), 1e-14));
        assert!(GroupElement::identity().compose(&g).approx_eq(&g, 0.0));
    }

    #[test]
    fn cartan_examples() {
        let (z, t) = GroupElement::p(dp(0.3, 0.0)).cartan_decompose();
        assert!((z.z() - c(0.3, 0.0)).norm() < 1e-15 && t.abs() < 1e-15);
        let (z, t) = GroupElement::h(PI / 2.0).cartan_decompose();
        assert!(z.z().norm() < 1e-15 && (t - PI / 2.0).abs() < 1e-15);
        let g = GroupElement::p(dp(0.2, 0.1)).compose(&GroupElement::h(1.3));
        let (z, t) = g.cartan_decompose();
        assert!((z.z() - c(0.2, 0.1)).norm() < 1e-14 && (t - 1.3).abs() < 1e-14);
    }

    #[test]
    fn pz_composition_examples() {
        let z = dp(0.3, 0.4);
        let (t, _) = pz_composition(z, z);
        assert!(t.z().norm() < 1e-15);
        let (t, th) = pz_composition(DiskPoint::origin(), dp(0.0, 0.5));
        assert!((t.z() - c(0.0, 0.5)).norm() < 1e-15 && th.abs() < 1e-15);
        let (z, zp) = (dp(0.3, 0.0), dp(0.0, 0.5));
        let (t, th) = pz_composition(z, zp);
        let lhs = GroupElement::p(z.neg()).compose(&GroupElement::p(zp));
        let rhs = GroupElement::p(t).compose(&GroupElement::h(th));
        assert!(lhs.approx_eq(&rhs, 1e-14));
    }

    #[test]
    fn observable_examples() {
        let o = observables(DiskPoint::origin());
        assert_eq!((o.k0, o.k1, o.k2), (1.0, 0.0, 0.0));
        let o = observables(dp(0.5, 0.0));
        assert!(
            (o.k0 - 5.0 / 3.0).abs() < 1e-15 && (o.k2 - 4.0 / 3.0).abs() < 1e-15 && o.k1 == 0.0
        );
        let z = dp(0.3, -0.6);
        let o = observables(z);
        assert!((o.shell() - 1.0).abs() < 1e-12);
        assert!((o.kplus - 2.0 * z.z().conj() / (1.0 - z.abs2())).norm() < 1e-14);
        assert_eq!(o.kplus, o.kminus.conj());
    }

    #[test]
    fn hyperboloid_round_trip() {
        assert!(hyperboloid_to_disk(1.0, 0.0, 0.0).unwrap().z().norm() == 0.0);
        let z = hyperboloid_to_disk(5.0 / 3.0, 0.0, 4.0 / 3.0).unwrap();
        assert!((z.z() - c(0.5, 0.0)).norm() < 1e-15);
        assert!(hyperboloid_to_disk(2.0, 0.0, 0.0).is_err());
        let w = dp(-0.41, 0.33);
        let o = observables(w);
        assert!((hyperboloid_to_disk(o.k0, o.k1, o.k2).unwrap().z() - w.z()).norm() < 1e-14);
    }

    #[test]
    fn coadjoint_subgroups() {
        let z = dp(0.25, -0.35);
        let o = observables(z);
        let id = coadjoint_transform(&GroupElement::identity(), &o);
        assert!((id.k0 - o.k0).abs() < 1e-15 && (id.kplus - o.kplus).norm() < 1e-15);
        let th = 0.7;
        let r = coadjoint_transform(&GroupElement::h(th), &o);
        assert!((r.k0 - o.k0).abs() < 1e-14);
        assert!((r.kplus - Complex64::from_polar(1.0, th) * o.kplus).norm() < 1e-14);
        let u = 0.8;
        let s = coadjoint_transform(&GroupElement::s(u), &o);
        assert!((s.k0 - (u.cosh() * o.k0 - u.sinh() * o.k2)).abs() < 1e-13);
        assert!((s.k1 - o.k1).abs() < 1e-13);
        assert!((s.k2 - (-u.sinh() * o.k0 + u.cosh() * o.k2)).abs() < 1e-13);
        let v = -0.6;
        let l = coadjoint_transform(&GroupElement::l(v), &o);
        assert!((l.k0 - (v.cosh() * o.k0 - v.sinh() * o.k1)).abs() < 1e-13);
        assert!((l.k1 - (-v.sinh() * o.k0 + v.cosh() * o.k1)).abs() < 1e-13);
        assert!((l.k2 - o.k2).abs() < 1e-13);
    }

    #[test]
    fn translated_observables() {
        let (zp, z) = (dp(0.3, 0.2), dp(-0.5, 0.1));
        let direct = observables(GroupElement::p(zp).act(z));
        assert!((k0_translated(zp, z) - direct.k0).abs() < 1e-13);
        assert!((kplus_translated(zp, z) - direct.kplus).norm() < 1e-13);
        // the multiplicative (1−|z′|²) factor does not reproduce the Möbius pullback
        let (a, b) = (observables(zp), observables(z));
        let zc = zp.z().conj();
        let printed = a.kplus * b.k0 + (1.0 - zp.abs2()) * (b.kplus + zc * zc * b.kminus);
        assert!((printed - direct.kplus).norm() > 1e-2);
    }

    #[test]
    fn poisson_relations() {
        let z = dp(0.3, 0.2);
        let k0 = |w: DiskPoint| observables(w).k0;
        let k1 = |w: DiskPoint| observables(w).k1;
        let k2 = |w: DiskPoint| observables(w).k2;
        let o = observables(z);
        assert!((poisson_bracket(k0, k1, z, None).unwrap() - o.k2).abs() < 1e-6);
        assert!((poisson_bracket(k0, k2, z, None).unwrap() + o.k1).abs() < 1e-6);
        assert!((poisson_bracket(k1, k2, z, None).unwrap() + o.k0).abs() < 1e-6);
        for w in [dp(-0.5, 0.1), dp(0.0, 0.7)] {
            assert!((poisson_bracket(k1, k2, w, None).unwrap() + observables(w).k0).abs() < 1e-6);
        }
        assert!(poisson_bracket(k0, k0, z, None).unwrap().abs() < 1e-9);
        assert!(poisson_bracket(k0, k1, z, Some(1e-14)).is_err());
    }

    #[test]
    fn ads_examples() {
        let (a, b, cc) = ads_coords(0.0, 0.0, 1.0);
        assert_eq!((a, b, cc), (1.0, 0.0, 0.0));
        let (a, b, _) = ads_coords(PI / 2.0, 0.0, 1.0);
        assert!(a.abs() < 1e-16 && (b - 1.0).abs() < 1e-16);
    }

    fn arb_point() -> impl Strategy<Value = DiskPoint> {
        (0.0f64..0.95, 0.0f64..(2.0 * PI)).prop_map(|(r, p)| DiskPoint::from_polar(r, p).unwrap())
    }

    fn arb_group() -> impl Strategy<Value = GroupElement> {
        (arb_point(), 0.0f64..(4.0 * PI))
            .prop_map(|(z, t)| GroupElement::p(z).compose(&GroupElement::h(t)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn determinant_preserved(g1 in arb_group(), g2 in arb_group()) {
            prop_assert!((g1.compose(&g2).det() - 1.0).abs() < 1e-12);
            prop_assert!((g1.inverse().det() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn action_is_left_action(g1 in arb_group(), g2 in arb_group(), z in arb_point()) {
            let a = g1.compose(&g2).act(z).z();
            let b = g1.act(g2.act(z)).z();
            prop_assert!((a - b).norm() < 1e-10);
            prop_assert!((g1.inverse().act(g1.act(z)).z() - z.z()).norm() < 1e-10);
        }

        #[test]
        fn cartan_round_trip(z in arb_point(), t in 0.0f64..(4.0 * PI)) {
            let g = GroupElement::p(z).compose(&GroupElement::h(t));
            let (z2, t2) = g.cartan_decompose();
            prop_assert!((z2.z() - z.z()).norm() < 1e-12);
            let d = (t2 - t).rem_euclid(4.0 * PI);
            prop_assert!(d.min(4.0 * PI - d) < 1e-12);
        }

        #[test]
        fn measure_invariance(g in arb_group(), z in (0.0f64..0.8, 0.0f64..std::f64::consts::TAU)) {
            let z = DiskPoint::from_polar(z.0, z.1).unwrap();
            let h = 1e-6;
            let f = |w: Complex64| g.act(DiskPoint::new(w).unwrap()).z();
            let dx = (f(z.z() + h) - f(z.z() - h)) / (2.0 * h);
            let dy = (f(z.z() + Complex64::new(0.0, h)) - f(z.z() - Complex64::new(0.0, h))) / (2.0 * h);
            let jac = dx.re * dy.im - dx.im * dy.re;
            let lhs = measure_density(g.act(z)) * jac.abs();
            prop_assert!((lhs / measure_density(z) - 1.0).abs() < 1e-6);
        }

        #[test]
        fn coadjoint_is_pullback(g in arb_group(), z in arb_point()) {
            let t = coadjoint_transform(&g, &observables(z));
            let d = observables(g.inverse().act(z));
            let scale = d.k0;
            prop_assert!((t.k0 - d.k0).abs() < 1e-9 * scale);
            prop_assert!((t.kplus - d.kplus).norm() < 1e-9 * scale);
        }

        #[test]
        fn ads_on_shell(th in -10.0f64..10.0, u in -3.0f64..3.0, kappa in 0.1f64..5.0) {
            let (y2, y0, y1) = ads_coords(th, u, kappa);
            let q = y2 * y2 + y0 * y0 - y1 * y1;
            prop_assert!((q * kappa * kappa - 1.0).abs() < 1e-12 * u.cosh().powi(2));
        }
    }
}
