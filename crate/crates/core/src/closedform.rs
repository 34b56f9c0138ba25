//! Closed forms: the single soliton in hyperbolic form, velocities, the
//! large-time split of multi-solitons, and maximum-amplitude formulas.

use serde::{Deserialize, Serialize};

use crate::darboux::{nfold_from_vectors, DarbouxSystem};
use crate::error::{fmt_c, HirotaError, Result};
use crate::linalg::C;
use crate::seed::{c_for_ratio, eigenvector};
use crate::spectral::{eval_spectral, CutSide, Params, Sheet};

/// Hyperbolic form of the one-soliton:
/// v = A [r3 cosh(X + B3) - r4 cosh(Y + B4)] / [r1 cosh(X + B1) - r2 cosh(Y + B2)]
/// with X = kappa + conj(kappa), Y = kappa - conj(kappa) and
/// B_i = ln(p_i/q_i)/2, r_i = q_i e^{B_i}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonProfile {
    pub z1: C,
    pub c1: C,
    pub p: [C; 4],
    pub q: [C; 4],
    pub b: [C; 4],
    pub r: [C; 4],
    pub gamma1: C,
    pub kappa1: C,
}

impl SolitonProfile {
    pub fn value(&self, amp: f64) -> C {
        let x = self.kappa1 + self.kappa1.conj();
        let y = self.kappa1 - self.kappa1.conj();
        let [r1, r2, r3, r4] = self.r;
        let [b1, b2, b3, b4] = self.b;
        amp * (r3 * (x + b3).cosh() - r4 * (y + b4).cosh()) / (r1 * (x + b1).cosh() - r2 * (y + b2).cosh())
    }
}

pub fn soliton_profile(n: i64, t: f64, z1: C, c1: C, p: &Params) -> Result<SolitonProfile> {
    if z1.norm() <= 1.0 {
        return Err(HirotaError::Invalid(format!("|z1| must exceed 1, got {}", fmt_c(z1))));
    }
    let e = eigenvector(n, t, z1, c1, p, Sheet::Principal, Some(CutSide::Upper))?;
    let (pp, qq) = pq(z1, e.gamma, p.amp);
    let mut b = [C::new(0.0, 0.0); 4];
    let mut r = b;
    for i in 0..4 {
        b[i] = 0.5 * (pp[i] / qq[i]).ln();
        r[i] = qq[i] * b[i].exp();
    }
    Ok(SolitonProfile { z1, c1, p: pp, q: qq, b, r, gamma1: e.gamma, kappa1: e.kappa })
}

fn pq(z1: C, gamma: C, amp: f64) -> ([C; 4], [C; 4]) {
    let zz = z1.norm_sqr();
    let s = gamma + gamma.conj();
    let d = gamma - gamma.conj();
    let w = (zz * zz - 1.0) / (amp * z1.conj());
    let e = |x: C| x.exp();
    let p = [
        zz * e(s) + e(-s),
        zz * e(d) + e(-d),
        e(s) + zz * e(-s) - w * e(d),
        e(d) + zz * e(-d) - w * e(s),
    ];
    let q = [
        zz * e(-s) + e(s),
        zz * e(-d) + e(d),
        e(-s) + zz * e(s) - w * e(-d),
        e(-d) + zz * e(d) - w * e(-s),
    ];
    (p, q)
}

pub fn soliton1(n: i64, t: f64, z1: C, c1: C, p: &Params) -> Result<C> {
    Ok(soliton_profile(n, t, z1, c1, p)?.value(p.amp))
}

/// Background values approached as Re(kappa) -> +inf and -inf.
pub fn far_field_limits(z1: C, p: &Params) -> Result<(C, C)> {
    let e = eigenvector(0, 0.0, z1, C::new(0.0, 0.0), p, Sheet::Principal, Some(CutSide::Upper))?;
    let (pp, qq) = pq(z1, e.gamma, p.amp);
    Ok((p.amp * pp[2] / pp[0], p.amp * qq[2] / qq[0]))
}

/// s = -Re(delta omega) / Re(ln zeta).
pub fn soliton_velocity(z1: C, p: &Params, sheet: Sheet) -> Result<f64> {
    let s = eval_spectral(z1, p, sheet, Some(CutSide::Upper))?;
    if s.eta.re.abs() < 1e-12 {
        return Err(HirotaError::StationaryPhase(fmt_c(z1)));
    }
    Ok(-(s.delta * s.omega).re / s.eta.re)
}

/// Sub-site peak position from three samples around a lattice maximum.
pub fn quadratic_peak(n: i64, left: f64, mid: f64, right: f64) -> f64 {
    let den = left - 2.0 * mid + right;
    if den == 0.0 {
        return n as f64;
    }
    n as f64 + 0.5 * (left - right) / den
}

/// Data of the k-th soliton seen along n - s_k t = const.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticProfile {
    pub k: usize,
    pub s_k: f64,
    /// Velocities of all points; infinite for points on the cut.
    pub velocities: Vec<f64>,
    /// Growth of Re(kappa_i) per unit t along the line, i != k (0 at i = k).
    pub rates: Vec<f64>,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    /// c^(k) = 4 min_{i != k} |Re(ln zeta_i)| |s_i - s_k|.
    pub c_k_rate: f64,
}

pub fn asymptotic_profile(k: usize, sys: &DarbouxSystem) -> Result<AsymptoticProfile> {
    let m = sys.points.len();
    if k >= m {
        return Err(HirotaError::Invalid(format!("soliton index {k} out of range")));
    }
    let p = &sys.params;
    let specs = sys
        .points
        .iter()
        .map(|pt| eval_spectral(pt.z, p, sys.sheet, Some(sys.side)))
        .collect::<Result<Vec<_>>>()?;
    let velocities: Vec<f64> = specs
        .iter()
        .map(|s| if s.eta.re.abs() < 1e-12 { f64::INFINITY } else { -(s.delta * s.omega).re / s.eta.re })
        .collect();
    let s_k = velocities[k];
    if !s_k.is_finite() {
        return Err(HirotaError::StationaryPhase(fmt_c(sys.points[k].z)));
    }
    for (i, &s) in velocities.iter().enumerate() {
        if i != k && (s - s_k).abs() < 1e-10 {
            return Err(HirotaError::TieBreak(s_k, s));
        }
    }
    // Re(kappa_i) / t along the line; for finite s_i this equals Re(ln zeta_i)(s_k - s_i).
    let rates: Vec<f64> = specs
        .iter()
        .enumerate()
        .map(|(i, s)| if i == k { 0.0 } else { (s.delta * s.omega).re + s.eta.re * s_k })
        .collect();
    let c_k_rate = 4.0 * rates.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, r)| r.abs()).fold(f64::INFINITY, f64::min);
    // Phase shift with points ordered by velocity.
    let gam = |i: usize| -> Result<f64> {
        let e = eigenvector(0, 0.0, sys.points[i].z, C::new(0.0, 0.0), p, sys.sheet, Some(sys.side))?;
        Ok((C::new(0.0, 1.0) * e.gamma).re)
    };
    let mut sum = 0.0;
    for i in 0..m {
        if i == k {
            continue;
        }
        let g = gam(i)?;
        if velocities[i] < s_k {
            sum += g;
        } else {
            sum -= g;
        }
    }
    Ok(AsymptoticProfile {
        k,
        s_k,
        velocities,
        rates,
        gamma_plus: -4.0 * sum,
        gamma_minus: 4.0 * sum,
        c_k_rate: if m == 1 { f64::INFINITY } else { c_k_rate },
    })
}

/// The k-th soliton as t -> +inf (`sign` > 0) or -inf: every other kernel
/// vector is replaced by its limit, (1, xi_i) where Re(kappa_i) grows and
/// (xi_i, 1) where it decays.
pub fn asymptotic_soliton(k: usize, sys: &DarbouxSystem, n: i64, t: f64, sign: i8) -> Result<C> {
    let prof = asymptotic_profile(k, sys)?;
    let p = &sys.params;
    let eig = sys.eigenvectors(n, t)?;
    let mut fs = Vec::with_capacity(eig.len());
    let mut gs = Vec::with_capacity(eig.len());
    for (i, e) in eig.iter().enumerate() {
        if i == k {
            fs.push(e.f);
            gs.push(e.g);
            continue;
        }
        let xi = eval_spectral(e.z, p, sys.sheet, Some(sys.side))?.xi;
        let grows = prof.rates[i] * f64::from(sign.signum()) > 0.0;
        if grows {
            fs.push(C::new(1.0, 0.0));
            gs.push(xi);
        } else {
            fs.push(xi);
            gs.push(C::new(1.0, 0.0));
        }
    }
    nfold_from_vectors(p.amp, &sys.zs(), &fs, &gs)
}

/// Largest modulus of the one-soliton and the constant c1 putting it at (0, 0).
pub fn max_amplitude(z1: C, p: &Params) -> Result<(f64, C)> {
    let zz = z1.norm_sqr();
    if zz < 1.0 - 1e-14 {
        return Err(HirotaError::Invalid(format!("|z1| must be at least 1, got {}", fmt_c(z1))));
    }
    let (r, a) = (p.r(), p.amp);
    let m = 0.5 * ((r + a) * zz - (r - a) / zz);
    let e = eigenvector(0, 0.0, z1, C::new(0.0, 0.0), p, Sheet::Principal, Some(CutSide::Upper))?;
    Ok((m, c_for_ratio((r + a) * z1, e.gamma)))
}

/// M_0 = A, M_k = [(sqrt(1+M^2) + M)|z_k|^2 - (sqrt(1+M^2) - M)|z_k|^{-2}] / 2.
pub fn max_amplitude_iterated(zs: &[C], amp: f64) -> Result<f64> {
    let mut m = amp;
    for z in zs {
        let zz = z.norm_sqr();
        if zz <= 1.0 {
            return Err(HirotaError::Invalid(format!("|z| must exceed 1, got {}", fmt_c(*z))));
        }
        let r = (1.0 + m * m).sqrt();
        m = 0.5 * ((r + m) * zz - (r - m) / zz);
    }
    Ok(m)
}

/// Peak of the order-N rogue wave, M_1 = ((r+A)^3 - (r-A)^3)/2 and
/// M_i = (r+A)^2 (sqrt(1+M^2) + M)/2 - (r-A)^2 (sqrt(1+M^2) - M)/2.
pub fn rogue_max(order: usize, amp: f64) -> Result<f64> {
    if order == 0 || amp <= 0.0 {
        return Err(HirotaError::Invalid("rogue_max needs N >= 1 and A > 0".into()));
    }
    let r = (1.0 + amp * amp).sqrt();
    let (up, dn) = (r + amp, r - amp);
    let mut m = 0.5 * (up.powi(3) - dn.powi(3));
    for _ in 1..order {
        let s = (1.0 + m * m).sqrt();
        m = 0.5 * up * up * (s + m) - 0.5 * dn * dn * (s - m);
    }
    Ok(m)
}
