//! Background parameters and single-point spectral quantities.

use serde::{Deserialize, Serialize};

use crate::error::{fmt_c, HirotaError, Result};
use crate::linalg::{c, mat2, Mat2, C, I};

/// Physical constants of the lattice model and its background.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub a: f64,
    pub b: f64,
    #[serde(rename = "A")]
    pub amp: f64,
    #[serde(rename = "B")]
    pub phase: f64,
    #[serde(default)]
    pub phase_plus: f64,
    #[serde(default)]
    pub phase_minus: f64,
}

impl Params {
    pub fn new(a: f64, b: f64, amp: f64, phase: f64) -> Result<Self> {
        let p = Params { a, b, amp, phase, phase_plus: 0.0, phase_minus: 0.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.a, self.b, self.amp, self.phase, self.phase_plus, self.phase_minus];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(HirotaError::Invalid("parameters must be finite".into()));
        }
        if self.amp < 0.0 {
            return Err(HirotaError::Invalid("A must be >= 0".into()));
        }
        Ok(())
    }

    /// r = sqrt(1 + A^2).
    pub fn r(&self) -> f64 {
        (1.0 + self.amp * self.amp).sqrt()
    }

    /// Background frequency C.
    pub fn freq(&self) -> f64 {
        let s = 1.0 + self.amp * self.amp;
        2.0 * self.a * (1.0 - s * self.phase.cos()) + 2.0 * self.b * s * self.phase.sin()
    }

    /// The branch point r + A, where rogue waves are seeded.
    pub fn z1(&self) -> f64 {
        self.r() + self.amp
    }

    pub fn branch_points(&self) -> [f64; 4] {
        let (r, a) = (self.r(), self.amp);
        [r + a, r - a, -(r + a), -(r - a)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Sheet {
    /// |zeta| <= 1.
    #[default]
    Principal,
    Other,
}

/// Side from which a point on the cut is approached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CutSide {
    #[default]
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralScalars {
    pub z: C,
    pub sheet: Sheet,
    pub zeta: C,
    pub xi: C,
    pub omega: C,
    pub delta: C,
    /// Scalar with T(z; v = A) = delta * X(z; A) + d * I.
    pub d: C,
    pub eta: C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionTag {
    SigmaPlus,
    SigmaMinus,
    Omega0,
    OmegaIn,
    OmegaOut,
    BranchPoint,
}

/// delta(z) = (b + ia) e^{-iB} / z + (b - ia) z e^{iB}.
pub fn delta(z: C, p: &Params) -> C {
    let e = C::from_polar(1.0, p.phase);
    c(p.b, p.a) / (e * z) + c(p.b, -p.a) * z * e
}

/// Trace half of the time matrix on the background:
/// theta(z) = A^2 (a sinB + b cosB) + (b/2)(z^2 e^{iB} + z^{-2} e^{-iB}).
pub fn theta(z: C, p: &Params) -> C {
    let e = C::from_polar(1.0, p.phase);
    let a2 = p.amp * p.amp;
    let base = a2 * (p.a * p.phase.sin() + p.b * p.phase.cos());
    base + 0.5 * p.b * (z * z * e + 1.0 / (z * z * e))
}

/// Discriminant (1+z^2)^2 - 4 r^2 z^2, factored through the branch points.
fn discriminant(z: C, p: &Params) -> C {
    let [p1, p2, p3, p4] = p.branch_points();
    (z - p1) * (z - p2) * (z - p3) * (z - p4)
}

/// Both roots of r(zeta + 1/zeta) = z + 1/z, small-modulus root first.
fn zeta_roots(z: C, p: &Params) -> (C, C) {
    let r = p.r();
    let s = discriminant(z, p).sqrt();
    let w = 1.0 + z * z;
    let big = if (w + s).norm() >= (w - s).norm() { w + s } else { w - s };
    let big = big / (2.0 * r * z);
    let small = 1.0 / big;
    (small, big)
}

pub fn on_cut(z: C, p: &Params) -> bool {
    let tol = 1e-14 * z.norm().max(1.0);
    let x = z.re.abs();
    z.im.abs() <= tol && x >= p.r() - p.amp - tol && x <= p.r() + p.amp + tol
}

/// zeta on the requested sheet. On the cut or unit circle both roots have
/// modulus one and the choice is made by continuity.
pub fn zeta(z: C, p: &Params, sheet: Sheet, side: Option<CutSide>) -> Result<C> {
    if z.norm() == 0.0 {
        return Err(HirotaError::ZeroArgument);
    }
    let (small, big) = zeta_roots(z, p);
    let principal = if on_cut(z, p) {
        let side = side.ok_or_else(|| HirotaError::CutAmbiguity(fmt_c(z)))?;
        let eps = 1e-7 * z.norm().max(1.0);
        let probe = match side {
            CutSide::Upper => z + c(0.0, eps),
            CutSide::Lower => z - c(0.0, eps),
        };
        nearest(zeta_roots(probe, p).0, small, big)
    } else if (z.norm() - 1.0).abs() < 1e-14 {
        // Unit circle: continue from the inside.
        nearest(zeta_roots(z * (1.0 - 1e-7), p).0, small, big)
    } else {
        small
    };
    Ok(match sheet {
        Sheet::Principal => principal,
        Sheet::Other => 1.0 / principal,
    })
}

fn nearest(probe: C, u: C, v: C) -> C {
    if (probe - u).norm() <= (probe - v).norm() {
        u
    } else {
        v
    }
}

pub fn eval_spectral(z: C, p: &Params, sheet: Sheet, side: Option<CutSide>) -> Result<SpectralScalars> {
    let zeta = zeta(z, p, sheet, side)?;
    if p.amp == 0.0 {
        return Err(HirotaError::Invalid("xi is undefined for A = 0".into()));
    }
    let r = p.r();
    let omega = 0.5 * r * (zeta - 1.0 / zeta);
    let xi = (r * zeta - z) / p.amp;
    let dl = delta(z, p);
    let d = theta(z, p) - 0.5 * dl * (z + 1.0 / z);
    Ok(SpectralScalars { z, sheet, zeta, xi, omega, delta: dl, d, eta: zeta.ln() })
}

pub fn classify_region(z: C, p: &Params) -> RegionTag {
    let tol = 1e-12 * z.norm().max(1.0);
    if p.branch_points().iter().any(|&b| (z - b).norm() <= tol) {
        return RegionTag::BranchPoint;
    }
    let x = z.re.abs();
    if z.im.abs() <= tol && x >= p.r() - p.amp && x <= p.r() + p.amp {
        return if x >= 1.0 { RegionTag::SigmaPlus } else { RegionTag::SigmaMinus };
    }
    let m = z.norm();
    if (m - 1.0).abs() <= tol {
        RegionTag::Omega0
    } else if m < 1.0 {
        RegionTag::OmegaIn
    } else {
        RegionTag::OmegaOut
    }
}

/// Diagonal time evolution exp{[theta(z) + delta omega sigma3] t}.
pub fn time_phase(t: f64, z: C, p: &Params, sheet: Sheet, side: Option<CutSide>) -> Result<Mat2> {
    let s = eval_spectral(z, p, sheet, side)?;
    let th = theta(z, p);
    let dw = s.delta * s.omega;
    let zero = C::new(0.0, 0.0);
    Ok(mat2(((th + dw) * t).exp(), zero, zero, ((th - dw) * t).exp()))
}

/// Lattice shift matrix X(z; v).
pub fn x_matrix(z: C, v: C) -> Mat2 {
    mat2(z, v, -v.conj(), 1.0 / z)
}

/// Time matrix T_n(z) built from v_n and v_{n-1}.
pub fn t_matrix(z: C, vn: C, vm: C, p: &Params) -> Mat2 {
    let (a, b) = (p.a, p.b);
    let e = C::from_polar(1.0, p.phase);
    let eh = C::from_polar(1.0, 0.5 * p.phase);
    let cc = p.freq();
    let sq = (z * eh - 1.0 / (z * eh)).powi(2);
    let bm = c(b, -a);
    let bp = c(b, a);
    let t11 = bm * vn * vm.conj() * e - I * (a / 2.0) * sq + b * z * z * e - I * (cc / 2.0);
    let t12 = bm * vn * z * e + bp * vm / (z * e);
    let t21 = -bp * vn.conj() / (e * z) - bm * vm.conj() * e * z;
    let t22 = bp * vn.conj() * vm / e + I * (a / 2.0) * sq + b / (z * z * e) + I * (cc / 2.0);
    mat2(t11, t12, t21, t22)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig() -> Params {
        Params::new(1.0, 0.5, 5.0 / 12.0, 0.0).unwrap()
    }

    fn rel(a: C, b: C) -> f64 {
        (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
    }

    #[test]
    fn r_and_freq() {
        let p = Params::new(0.7, 1.3, 0.9, 0.4).unwrap();
        assert!((p.r() * p.r() - p.amp * p.amp - 1.0).abs() < 1e-15);
        let s = 1.0 + 0.81;
        let cc = 2.0 * 0.7 * (1.0 - s * 0.4f64.cos()) + 2.0 * 1.3 * s * 0.4f64.sin();
        assert!((p.freq() - cc).abs() < 1e-14);
    }

    #[test]
    fn unit_point_is_on_unit_circle() {
        let s = eval_spectral(c(1.0, 0.0), &fig(), Sheet::Principal, Some(CutSide::Upper)).unwrap();
        assert!((s.zeta.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn branch_point_values() {
        for amp in [0.1, 5.0 / 12.0, 2.0] {
            let p = Params::new(1.0, 0.5, amp, 0.0).unwrap();
            let s = eval_spectral(c(p.z1(), 0.0), &p, Sheet::Principal, Some(CutSide::Upper)).unwrap();
            assert!((s.zeta - 1.0).norm() < 1e-7);
            assert!(s.omega.norm() < 1e-7);
        }
    }

    #[test]
    fn real_point_outside_cut() {
        let s = eval_spectral(c(1.8, 0.0), &fig(), Sheet::Principal, None).unwrap();
        // Independent: smaller root of r zeta^2 - (z + 1/z) zeta + r = 0.
        let r: f64 = 13.0 / 12.0;
        let w: f64 = 1.8 + 1.0 / 1.8;
        let root: f64 = (w - (w * w - 4.0 * r * r as f64).sqrt()) / (2.0 * r);
        assert!((s.zeta.re - root).abs() < 1e-14 && s.zeta.im.abs() < 1e-15);
        assert!((s.zeta.re - 0.6606126842706663).abs() < 1e-12);
        assert!((s.omega.norm() - 0.4621140364845559).abs() < 1e-12);
        assert!((s.xi.re + 2.6024070208962677).abs() < 1e-12);
        assert!((s.eta.re + 0.414587565073447).abs() < 1e-12);
        let dw = s.delta * s.omega;
        assert!((dw - c(-0.5442676429706992, 0.5750752454030029)).norm() < 1e-12);
    }

    #[test]
    fn cut_requires_hint() {
        let p = fig();
        assert!(matches!(
            eval_spectral(c(1.2, 0.0), &p, Sheet::Principal, None),
            Err(HirotaError::CutAmbiguity(_))
        ));
        let up = eval_spectral(c(1.2, 0.0), &p, Sheet::Principal, Some(CutSide::Upper)).unwrap();
        let lo = eval_spectral(c(1.2, 0.0), &p, Sheet::Principal, Some(CutSide::Lower)).unwrap();
        assert!((up.zeta - lo.zeta.conj()).norm() < 1e-14);
        assert!(up.zeta.im < 0.0);
        // Limit from the upper half plane agrees with the upper-side value.
        let near = eval_spectral(c(1.2, 1e-9), &p, Sheet::Principal, None).unwrap();
        assert!((near.zeta - up.zeta).norm() < 1e-7);
    }

    #[test]
    fn zero_rejected() {
        assert_eq!(
            eval_spectral(C::new(0.0, 0.0), &fig(), Sheet::Principal, None),
            Err(HirotaError::ZeroArgument)
        );
    }

    #[test]
    fn regions() {
        let p = fig();
        assert_eq!(classify_region(c(1.5, 0.0), &p), RegionTag::BranchPoint);
        assert_eq!(classify_region(c(-2.0 / 3.0, 0.0), &p), RegionTag::BranchPoint);
        assert_eq!(classify_region(c(0.0, 1.0), &p), RegionTag::Omega0);
        assert_eq!(classify_region(c(1.2, 0.0), &p), RegionTag::SigmaPlus);
        assert_eq!(classify_region(c(-0.8, 0.0), &p), RegionTag::SigmaMinus);
        assert_eq!(classify_region(c(0.3, 0.2), &p), RegionTag::OmegaIn);
        assert_eq!(classify_region(c(1.8, 0.0), &p), RegionTag::OmegaOut);
    }

    #[test]
    fn time_phase_identity_and_det() {
        let p = Params::new(0.8, 0.6, 0.7, 0.3).unwrap();
        let z = c(1.4, 0.5);
        let m0 = time_phase(0.0, z, &p, Sheet::Principal, None).unwrap();
        assert!((m0 - Mat2::identity()).norm() < 1e-15);
        let t = 0.7;
        let m = time_phase(t, z, &p, Sheet::Principal, None).unwrap();
        let det = m[(0, 0)] * m[(1, 1)];
        assert!(rel(det, (2.0 * theta(z, &p) * t).exp()) < 1e-13);
    }

    #[test]
    fn time_phase_solves_its_ode() {
        // mu_t = (delta omega sigma3 + theta I) mu, checked by central differences.
        let p = fig();
        let z = c(1.8, 0.0);
        let s = eval_spectral(z, &p, Sheet::Principal, None).unwrap();
        let h = 1e-4;
        let t = 0.9;
        let f = |t| time_phase(t, z, &p, Sheet::Principal, None).unwrap();
        let d = (f(t + h) - f(t - h)) / C::new(2.0 * h, 0.0);
        let gen = mat2(theta(z, &p) + s.delta * s.omega, C::new(0.0, 0.0), C::new(0.0, 0.0), theta(z, &p) - s.delta * s.omega);
        assert!((d - gen * f(t)).norm() < 1e-7);
        // b = 0, B = 0: no scalar prefactor.
        let q = Params::new(1.0, 0.0, 0.4, 0.0).unwrap();
        assert!(theta(c(1.3, 0.2), &q).norm() < 1e-15);
    }

    #[test]
    fn background_time_matrix_structure() {
        for (b, ph) in [(0.5, 0.0), (1.2, 0.7), (0.5, std::f64::consts::FRAC_PI_2)] {
            let p = Params::new(0.9, b, 5.0 / 12.0, ph).unwrap();
            for z in [c(0.9, 0.3), c(2.0, 0.0), c(0.0, -1.1)] {
                let s = eval_spectral(z, &p, Sheet::Principal, None).unwrap();
                let a = C::new(p.amp, 0.0);
                let t = t_matrix(z, a, a, &p);
                let want = x_matrix(z, a) * s.delta + Mat2::identity() * s.d;
                assert!((t - want).norm() < 1e-13);
            }
        }
    }

    fn arb_z() -> impl Strategy<Value = C> {
        (0.05f64..4.0, -3.1f64..3.1).prop_map(|(m, a)| C::from_polar(m, a))
    }

    proptest! {
        #[test]
        fn uniformization_identities(z in arb_z(), amp in 0.05f64..2.0, ph in -3.0f64..3.0) {
            let p = Params::new(1.0, 0.5, amp, ph).unwrap();
            prop_assume!(!on_cut(z, &p));
            let s = eval_spectral(z, &p, Sheet::Principal, None).unwrap();
            let r = p.r();
            prop_assert!(rel(r * (s.zeta + 1.0 / s.zeta), z + 1.0 / z) < 1e-12);
            let lhs = p.amp * z * (s.xi * s.xi + 1.0);
            prop_assert!(rel(lhs, (1.0 - z * z) * s.xi) < 1e-12);
            prop_assert!(rel(s.omega, 0.5 * r * (s.zeta - 1.0 / s.zeta)) < 1e-12);
            prop_assert!(s.zeta.norm() <= 1.0 + 1e-12);
            let w2 = ((1.0 + z * z).powi(2) - 4.0 * r * r * z * z) / (4.0 * z * z);
            prop_assert!(rel(s.omega * s.omega, w2) < 1e-11);
        }

        #[test]
        fn sheet_involution(z in arb_z(), amp in 0.05f64..2.0) {
            let p = Params::new(1.0, 0.5, amp, 0.0).unwrap();
            prop_assume!(!on_cut(z, &p));
            let a = eval_spectral(z, &p, Sheet::Principal, None).unwrap();
            let b = eval_spectral(z, &p, Sheet::Other, None).unwrap();
            prop_assert!((a.zeta * b.zeta - 1.0).norm() < 1e-12);
            prop_assert!(rel(a.omega, -b.omega) < 1e-12);
            prop_assert!(rel(a.xi * b.xi, C::new(1.0, 0.0)) < 1e-11);
        }
    }
}
