//! Lax-pair solutions on the constant background: the elementary matrix,
//! eigenvectors at spectral points, and Taylor data at the branch point r + A.

use serde::{Deserialize, Serialize};

use crate::error::{fmt_c, HirotaError, Result};
use crate::jet::{Jet, JetParam};
use crate::linalg::{mat2, Mat2, C};
use crate::spectral::{eval_spectral, theta, CutSide, Params, Sheet};

/// The offset added to the phase chi of the elementary matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", content = "coeffs", rename_all = "snake_case")]
pub enum CTilde {
    #[default]
    Zero,
    /// kappa * eta(z).
    Eta(C),
    /// eta(z) * sum_i p_i (z - z1)^i.
    EtaPoly(Vec<C>),
    /// sum_i c_i (z - z1)^i. Only removable when every coefficient vanishes.
    Series(Vec<C>),
}

impl CTilde {
    fn at(&self, z: C, z1: f64, eta: C) -> C {
        let poly = |v: &[C]| v.iter().rev().fold(C::new(0.0, 0.0), |acc, &c| acc * (z - z1) + c);
        match self {
            CTilde::Zero => C::new(0.0, 0.0),
            CTilde::Eta(k) => k * eta,
            CTilde::EtaPoly(p) => eta * poly(p),
            CTilde::Series(s) => poly(s),
        }
    }

    /// As a jet in s with z = z1 + s^2.
    fn jet(&self, eta: &Jet) -> Jet {
        let even = |v: &[C]| {
            let mut out = vec![C::new(0.0, 0.0); eta.len()];
            for (i, &c) in v.iter().enumerate() {
                if 2 * i < out.len() {
                    out[2 * i] = c;
                }
            }
            Jet::new(eta.center, eta.param, out)
        };
        match self {
            CTilde::Zero => Jet::constant(eta, C::new(0.0, 0.0)),
            CTilde::Eta(k) => eta.scale(*k),
            CTilde::EtaPoly(p) => eta * &even(p),
            CTilde::Series(s) => even(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementarySpec {
    pub n0: i64,
    pub t0: f64,
    pub c_tilde: CTilde,
    pub params: Params,
}

impl ElementarySpec {
    pub fn new(params: Params) -> Self {
        ElementarySpec { n0: 0, t0: 0.0, c_tilde: CTilde::Zero, params }
    }
}

/// Eigenvector (f, g) = (sinh(kappa + gamma), -sinh(kappa - gamma)) at (n, t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenfunction {
    pub z: C,
    pub c: C,
    pub f: C,
    pub g: C,
    pub kappa: C,
    pub gamma: C,
}

fn check_branch_distance(z: C, p: &Params) -> Result<()> {
    if z.norm() == 0.0 {
        return Err(HirotaError::ZeroArgument);
    }
    if p.branch_points().iter().any(|&b| (z - b).norm() < 1e-8) {
        return Err(HirotaError::NearBranchPoint(fmt_c(z)));
    }
    Ok(())
}

/// Elementary matrix solution normalized to the identity at (n0, t0):
/// r^{n-n0} e^{theta (t-t0)} [[cosh chi - q S, A S], [-A S, cosh chi + q S]]
/// with q = (1 - z^2)/(2z), S = sinh(chi)/omega and
/// chi = (n - n0) ln zeta + delta omega (t - t0) + c~.
pub fn phi_elementary(n: i64, t: f64, z: C, spec: &ElementarySpec, sheet: Sheet, side: Option<CutSide>) -> Result<Mat2> {
    let p = &spec.params;
    check_branch_distance(z, p)?;
    let s = eval_spectral(z, p, sheet, side)?;
    let dn = (n - spec.n0) as f64;
    let dt = t - spec.t0;
    let chi = s.eta * dn + s.delta * s.omega * dt + spec.c_tilde.at(z, p.z1(), s.eta);
    let big_s = chi.sinh() / s.omega;
    let ch = chi.cosh();
    let q = (1.0 - z * z) / (2.0 * z);
    let pref = p.r().powf(dn) * (theta(z, p) * dt).exp();
    let a = p.amp;
    Ok(mat2(ch - q * big_s, big_s * a, -big_s * a, ch + q * big_s) * pref)
}

/// Seed column applied to the elementary matrix: (1, (r + A) z).
pub fn seed_vector(z: C, p: &Params) -> (C, C) {
    (C::new(1.0, 0.0), z * p.z1())
}

/// gamma with e^{-2 gamma} = -xi(z).
pub fn gamma_of(xi: C) -> C {
    -0.5 * (-xi).ln()
}

pub fn eigenvector(n: i64, t: f64, z: C, c: C, p: &Params, sheet: Sheet, side: Option<CutSide>) -> Result<Eigenfunction> {
    let s = eval_spectral(z, p, sheet, side)?;
    if (s.xi * s.xi - 1.0).norm() < 1e-10 {
        return Err(HirotaError::BranchPointEigenvector(fmt_c(z)));
    }
    let gamma = gamma_of(s.xi);
    let kappa = s.eta * (n as f64) + s.delta * s.omega * t + c;
    Ok(Eigenfunction { z, c, f: (kappa + gamma).sinh(), g: -(kappa - gamma).sinh(), kappa, gamma })
}

/// Translation constant c making g/f = rho at kappa = c.
pub fn c_for_ratio(rho: C, gamma: C) -> C {
    let e = (-2.0 * gamma).exp();
    0.5 * ((1.0 + rho * e) / (rho + e)).ln()
}

/// Taylor coefficients of (f, g) = Phi(n, t, z) (1, (r + A) z) in powers of
/// (z - z1), z1 = r + A, orders 0..=order.
///
/// Evaluated with jets in s, z = z1 + s^2. f and g are even in s whenever the
/// branch point is removable; odd coefficients above 1e-6 (relative) are rejected.
pub fn taylor_coefficients(n: i64, t: f64, spec: &ElementarySpec, order: usize) -> Result<(Vec<C>, Vec<C>)> {
    let (f, g) = local_jets(n, t, spec, order)?;
    let worst = odd_ratio(&f, &g);
    if worst > 1e-6 {
        return Err(HirotaError::NonremovableSingularity(worst));
    }
    let pick = |j: &Jet| (0..=order).map(|i| j.coeffs[2 * i]).collect::<Vec<_>>();
    Ok((pick(&f), pick(&g)))
}

/// Largest odd-in-s coefficient of (f, g) relative to the largest coefficient.
pub fn odd_part_ratio(n: i64, t: f64, spec: &ElementarySpec, order: usize) -> Result<f64> {
    let (f, g) = local_jets(n, t, spec, order)?;
    Ok(odd_ratio(&f, &g))
}

fn odd_ratio(f: &Jet, g: &Jet) -> f64 {
    let mut worst: f64 = 0.0;
    for jet in [f, g] {
        let big = jet.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
        for k in (1..jet.len()).step_by(2) {
            worst = worst.max(jet.coeffs[k].norm() / big);
        }
    }
    worst
}

/// (f, g) as jets in s, z = z1 + s^2, through order 2 * order + 1.
fn local_jets(n: i64, t: f64, spec: &ElementarySpec, order: usize) -> Result<(Jet, Jet)> {
    let p = &spec.params;
    if p.amp <= 0.0 {
        return Err(HirotaError::Invalid("branch-point expansion needs A > 0".into()));
    }
    let z1 = p.z1();
    let r = p.r();
    // Two extra orders are consumed by the s-divisions below.
    let len = 2 * order + 4;
    let center = C::new(z1, 0.0);
    let one = C::new(1.0, 0.0);
    let s = Jet::variable(center, JetParam::SLocal, len - 1);
    let z = (&s * &s).add_const(center);
    let zi = z.recip();

    // cosh(eta) = (z + 1/z)/(2r); u = cosh(eta) - 1 = O(s^2).
    let u = (&z + &zi).scale(C::new(0.5 / r, 0.0)).add_const(-one);
    let u1 = u.shift_down(2).scale(C::new(0.5, 0.0)).sqrt();
    // eta = -2 asinh(s sqrt(u/(2 s^2))); the sign puts |zeta| <= 1 on z > z1.
    let h = Jet::new(center, JetParam::SLocal, {
        let mut v = vec![C::new(0.0, 0.0)];
        v.extend_from_slice(&u1.coeffs);
        v
    });
    let eta = h.asinh().scale(C::new(-2.0, 0.0));
    let omega = eta.sinh().scale(C::new(r, 0.0));

    let e = C::from_polar(1.0, p.phase);
    let dl = &zi.scale(C::new(p.b, p.a) / e) + &z.scale(C::new(p.b, -p.a) * e);
    let z2 = &z * &z;
    let th = (&z2.scale(e) + &z2.recip().scale(1.0 / e)).scale(C::new(0.5 * p.b, 0.0))
        .add_const(C::new(p.amp * p.amp * (p.a * p.phase.sin() + p.b * p.phase.cos()), 0.0));

    let dn = (n - spec.n0) as f64;
    let dt = t - spec.t0;
    let chi = &(&eta.scale(C::new(dn, 0.0)) + &(&dl * &omega).scale(C::new(dt, 0.0))) + &spec.c_tilde.jet(&eta);
    let sh = chi.sinh();
    let scale = sh.coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
    if sh.coeffs[0].norm() > 1e-12 * scale {
        return Err(HirotaError::NonremovableSingularity(f64::INFINITY));
    }
    let big_s = sh.shift_down(1).div(&omega.shift_down(1));
    let chi = chi.truncate(big_s.order());
    let z = z.truncate(big_s.order());
    let ch = chi.cosh();
    let q = (&Jet::constant(&z, one) - &(&z * &z)).div(&z.scale(C::new(2.0, 0.0)));
    let pref = th.truncate(big_s.order()).scale(C::new(dt, 0.0)).exp().scale(C::new(r.powf(dn), 0.0));

    let qs = &q * &big_s;
    let phi11 = &ch - &qs;
    let phi22 = &ch + &qs;
    let as_ = big_s.scale(C::new(p.amp, 0.0));
    let seed2 = z.scale(C::new(z1, 0.0));
    let f = &pref * &(&phi11 + &(&as_ * &seed2));
    let g = &pref * &(&(&phi22 * &seed2) - &as_);

    Ok((f, g))
}
