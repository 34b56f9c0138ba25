//! Direct scattering on truncated lattices.
//!
//! Jost solutions come from the transfer-matrix recursion
//! `J(n+1) = X(z; v_n) J(n) M(z)^{-1}`, seeded with the background form
//! `e^{(i/2)B sigma3} T(z)` at the left edge (for `J_-`) and the right edge (for `J_+`).
//! Only the columns that are dominant in their direction of integration are
//! numerically trustworthy away from the unit circle: `J_-,2` and `J_+,1` on the
//! principal sheet. Every coefficient below divides by the closed form
//! `det J_+(n) = (1 - xi^2) Gamma_n^+` rather than the computed determinant, which
//! would inherit the error of the contaminated column.

use crate::error::{fmt_c, HirotaError, Result};
use crate::linalg::{c, mat2, Mat2, C};
use crate::solution::Solution;
use crate::spectral::{eval_spectral, CutSide, Params, Sheet, SpectralScalars};

/// Samples v_n for n_min..=n_max; the edges must have settled to |v| = A.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedPotential {
    pub n_min: i64,
    pub n_max: i64,
    pub values: Vec<C>,
    /// Edge phases (B_-, B_+).
    pub phases: (f64, f64),
    pub params: Params,
}

/// Allowed distance between an edge sample and the background modulus.
pub const EDGE_TOL: f64 = 1e-3;

impl TruncatedPotential {
    pub fn new(n_min: i64, values: Vec<C>, params: Params) -> Result<Self> {
        if values.len() < 2 {
            return Err(HirotaError::Invalid("potential needs at least two sites".into()));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(HirotaError::Invalid("potential has non-finite samples".into()));
        }
        let n_max = n_min + values.len() as i64 - 1;
        let (lo, hi) = (values[0], values[values.len() - 1]);
        for (site, v) in [(n_min, lo), (n_max, hi)] {
            if (v.norm() - params.amp).abs() >= EDGE_TOL {
                return Err(HirotaError::Invalid(format!(
                    "potential has not settled at n = {site}: |v| = {:.6}, A = {}",
                    v.norm(),
                    params.amp
                )));
            }
        }
        Ok(TruncatedPotential { n_min, n_max, values, phases: (lo.arg(), hi.arg()), params })
    }

    /// Samples `sol` on -half..=half at time t.
    pub fn from_solution(sol: &Solution, half: i64, t: f64) -> Result<Self> {
        let values = (-half..=half).map(|n| sol.field(n, t)).collect::<Result<Vec<_>>>()?;
        Self::new(-half, values, sol.params)
    }

    pub fn at(&self, n: i64) -> C {
        self.values[(n - self.n_min) as usize]
    }

    /// prod_{l=n}^{n_max-1} r^2 / (1 + |v_l|^2).
    pub fn gamma_plus(&self, n: i64) -> f64 {
        let r2 = self.params.r().powi(2);
        (n..self.n_max).map(|l| r2 / (1.0 + self.at(l).norm_sqr())).product()
    }

    /// prod_{l=n_min}^{n-1} (1 + |v_l|^2) / r^2.
    pub fn gamma_minus(&self, n: i64) -> f64 {
        let r2 = self.params.r().powi(2);
        (self.n_min..n).map(|l| (1.0 + self.at(l).norm_sqr()) / r2).product()
    }

    /// prod over the whole window of (1 + |v_l|^2) / r^2; equals det S.
    pub fn trace_product(&self) -> f64 {
        self.gamma_minus(self.n_max)
    }
}

/// Jost matrices at every site of the window.
#[derive(Debug, Clone)]
pub struct JostSolutions {
    pub n_min: i64,
    pub minus: Vec<Mat2>,
    pub plus: Vec<Mat2>,
    pub spectral: SpectralScalars,
}

impl JostSolutions {
    pub fn minus_at(&self, n: i64) -> Mat2 {
        self.minus[(n - self.n_min) as usize]
    }

    pub fn plus_at(&self, n: i64) -> Mat2 {
        self.plus[(n - self.n_min) as usize]
    }
}

fn boundary_form(b: f64, xi: C) -> Mat2 {
    let e = C::from_polar(1.0, 0.5 * b);
    let one = c(1.0, 0.0);
    mat2(e, e * xi, xi / e, one / e)
}

fn spectral_at(z: C, p: &Params, sheet: Sheet) -> Result<SpectralScalars> {
    eval_spectral(z, p, sheet, Some(CutSide::Upper)).map_err(|e| match e {
        HirotaError::NearBranchPoint(s) | HirotaError::BranchPointEigenvector(s) => HirotaError::BranchPointDegeneracy(s),
        e => e,
    })
}

fn finite(m: &Mat2) -> bool {
    m.iter().all(|x| x.re.is_finite() && x.im.is_finite() && x.norm() < 1e300)
}

pub fn jost_solutions(pot: &TruncatedPotential, z: C, sheet: Sheet) -> Result<JostSolutions> {
    let p = &pot.params;
    let s = spectral_at(z, p, sheet)?;
    let sites = pot.values.len();
    let range = (pot.n_max - pot.n_min) as f64;
    if range * s.zeta.norm().ln().abs() > 700.0 {
        return Err(HirotaError::Overflow(pot.n_max));
    }
    let r = p.r();
    let (m1, m2) = (r * s.zeta, r / s.zeta);
    let mut minus = Vec::with_capacity(sites);
    let mut j = boundary_form(pot.phases.0, s.xi);
    minus.push(j);
    for k in 0..sites - 1 {
        let x = crate::spectral::x_matrix(z, pot.values[k]);
        j = x * j;
        j.column_mut(0).iter_mut().for_each(|e| *e /= m1);
        j.column_mut(1).iter_mut().for_each(|e| *e /= m2);
        if !finite(&j) {
            return Err(HirotaError::Overflow(pot.n_min + k as i64 + 1));
        }
        minus.push(j);
    }
    let mut plus = vec![Mat2::zeros(); sites];
    let mut j = boundary_form(pot.phases.1, s.xi);
    plus[sites - 1] = j;
    for k in (0..sites - 1).rev() {
        let v = pot.values[k];
        let inv = mat2(1.0 / z, -v, v.conj(), z) / c(1.0 + v.norm_sqr(), 0.0);
        j = inv * j;
        j.column_mut(0).iter_mut().for_each(|e| *e *= m1);
        j.column_mut(1).iter_mut().for_each(|e| *e *= m2);
        if !finite(&j) {
            return Err(HirotaError::Overflow(pot.n_min + k as i64));
        }
        plus[k] = j;
    }
    Ok(JostSolutions { n_min: pot.n_min, minus, plus, spectral: s })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringData {
    pub z: C,
    pub site: i64,
    pub a_coeff: C,
    pub b_coeff: C,
    /// ā(z*) in Wronskian form; vanishes at eigenvalues planted on this sheet.
    pub a_bar: C,
    /// b̄(z*) in Wronskian form.
    pub b_bar: C,
    pub reflection: C,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub jost_minus: Mat2,
    pub jost_plus: Mat2,
}

impl ScatteringData {
    /// a ā + b b̄.
    pub fn det_s(&self) -> C {
        self.a_coeff * self.a_bar + self.b_coeff * self.b_bar
    }
}

fn wronskian(u: (C, C), w: (C, C)) -> C {
    u.0 * w.1 - u.1 * w.0
}

fn col(m: &Mat2, k: usize) -> (C, C) {
    (m[(0, k)], m[(1, k)])
}

fn coeffs_from(pot: &TruncatedPotential, jm: Mat2, jp: Mat2, s: &SpectralScalars, site: i64) -> Result<ScatteringData> {
    let w = 1.0 - s.xi * s.xi;
    if w.norm() < 1e-8 {
        return Err(HirotaError::BranchPointDegeneracy(fmt_c(s.z)));
    }
    let gp = pot.gamma_plus(site);
    let d = w * gp;
    let shift = (2.0 * site as f64 * s.eta).exp();
    let a_coeff = wronskian(col(&jm, 0), col(&jp, 1)) / d;
    let a_bar = wronskian(col(&jp, 0), col(&jm, 1)) / d;
    let b_coeff = wronskian(col(&jp, 0), col(&jm, 0)) * shift / d;
    let b_bar = -wronskian(col(&jm, 1), col(&jp, 1)) / (shift * d);
    Ok(ScatteringData {
        z: s.z,
        site,
        a_coeff,
        b_coeff,
        a_bar,
        b_bar,
        reflection: b_coeff / a_coeff,
        gamma_plus: gp,
        gamma_minus: pot.gamma_minus(site),
        jost_minus: jm,
        jost_plus: jp,
    })
}

/// Coefficients evaluated at the given site.
pub fn scattering_coeffs_at(pot: &TruncatedPotential, z: C, sheet: Sheet, site: i64) -> Result<ScatteringData> {
    if site < pot.n_min || site > pot.n_max {
        return Err(HirotaError::Invalid(format!("site {site} outside the window")));
    }
    let js = jost_solutions(pot, z, sheet)?;
    coeffs_from(pot, js.minus_at(site), js.plus_at(site), &js.spectral, site)
}

/// Coefficients at the site nearest n = 0.
pub fn scattering_coeffs(pot: &TruncatedPotential, z: C, sheet: Sheet) -> Result<ScatteringData> {
    scattering_coeffs_at(pot, z, sheet, 0i64.clamp(pot.n_min, pot.n_max))
}

/// The analytic coefficient whose zeros are the discrete eigenvalues on `sheet`.
/// Only the two stable Jost columns enter, so it stays accurate off the circle.
pub fn discrete_coeff(pot: &TruncatedPotential, z: C, sheet: Sheet) -> Result<C> {
    let p = &pot.params;
    let s = spectral_at(z, p, sheet)?;
    let w = 1.0 - s.xi * s.xi;
    if w.norm() < 1e-8 {
        return Err(HirotaError::BranchPointDegeneracy(fmt_c(z)));
    }
    let site = 0i64.clamp(pot.n_min, pot.n_max);
    let (m1, m2) = (p.r() * s.zeta, p.r() / s.zeta);
    let k0 = (site - pot.n_min) as usize;
    // J_-,2 forward to the site.
    let e = C::from_polar(1.0, 0.5 * pot.phases.0);
    let mut u = (e * s.xi, 1.0 / e);
    for k in 0..k0 {
        let v = pot.values[k];
        u = ((z * u.0 + v * u.1) / m2, (-v.conj() * u.0 + u.1 / z) / m2);
    }
    // J_+,1 backward to the site.
    let e = C::from_polar(1.0, 0.5 * pot.phases.1);
    let mut q = (e, s.xi / e);
    for k in (k0..pot.values.len() - 1).rev() {
        let v = pot.values[k];
        let g = m1 / (1.0 + v.norm_sqr());
        q = ((q.0 / z - v * q.1) * g, (v.conj() * q.0 + z * q.1) * g);
    }
    let out = wronskian(q, u) / (w * pot.gamma_plus(site));
    if !(out.re.is_finite() && out.im.is_finite()) {
        return Err(HirotaError::Overflow(site));
    }
    Ok(out)
}

/// Angular half-width of the slivers cut out around the real axis when the
/// search annulus overlaps the branch cut, and the branch-point margin.
pub const SEARCH_MARGIN: f64 = 1e-2;
const NEWTON_STEP: f64 = 1e-6;
const NEWTON_MAX: usize = 50;

#[derive(Debug, Clone, Copy)]
struct PolarBox {
    r0: f64,
    r1: f64,
    t0: f64,
    t1: f64,
}

impl PolarBox {
    fn point(&self, rho: f64, th: f64) -> C {
        C::from_polar(rho, th)
    }

    fn centre(&self) -> C {
        self.point(0.5 * (self.r0 + self.r1), 0.5 * (self.t0 + self.t1))
    }

    fn contains(&self, z: C) -> bool {
        let m = z.norm();
        let mut th = z.arg();
        while th < self.t0 {
            th += std::f64::consts::TAU;
        }
        m >= self.r0 && m <= self.r1 && th <= self.t1
    }

    fn split(&self) -> [PolarBox; 4] {
        let rm = 0.5 * (self.r0 + self.r1);
        let tm = 0.5 * (self.t0 + self.t1);
        [
            PolarBox { r0: self.r0, r1: rm, t0: self.t0, t1: tm },
            PolarBox { r0: rm, r1: self.r1, t0: self.t0, t1: tm },
            PolarBox { r0: self.r0, r1: rm, t0: tm, t1: self.t1 },
            PolarBox { r0: rm, r1: self.r1, t0: tm, t1: self.t1 },
        ]
    }

    /// Boundary path, counter-clockwise, as a parameter-to-point map on [0, 4).
    fn path(&self, s: f64) -> C {
        let (k, f) = (s.floor() as i32, s - s.floor());
        match k {
            0 => self.point(self.r0 + (self.r1 - self.r0) * f, self.t0),
            1 => self.point(self.r1, self.t0 + (self.t1 - self.t0) * f),
            2 => self.point(self.r1 - (self.r1 - self.r0) * f, self.t1),
            _ => self.point(self.r0, self.t1 - (self.t1 - self.t0) * f),
        }
    }
}

/// Winding number of f around the box boundary, with adaptive refinement so no
/// step turns the phase by more than a quarter turn.
fn winding<F: Fn(C) -> Result<C>>(f: &F, b: &PolarBox) -> Result<i64> {
    let coarse = 64;
    let mut total = 0.0;
    let mut s0 = 0.0;
    let mut f0 = f(b.path(0.0))?;
    for k in 1..=coarse {
        let s1 = 4.0 * k as f64 / coarse as f64;
        let f1 = f(b.path(s1))?;
        total += phase_change(f, b, s0, f0, s1, f1, 0)?;
        s0 = s1;
        f0 = f1;
    }
    Ok((total / std::f64::consts::TAU).round() as i64)
}

fn phase_change<F: Fn(C) -> Result<C>>(f: &F, b: &PolarBox, s0: f64, f0: C, s1: f64, f1: C, depth: u32) -> Result<f64> {
    if f0.norm() == 0.0 || f1.norm() == 0.0 {
        return Err(HirotaError::NonConvergence(fmt_c(b.path(s0))));
    }
    let d = (f1 / f0).arg();
    if d.abs() < std::f64::consts::FRAC_PI_4 || depth > 24 {
        return Ok(d);
    }
    let sm = 0.5 * (s0 + s1);
    let fm = f(b.path(sm))?;
    Ok(phase_change(f, b, s0, f0, sm, fm, depth + 1)? + phase_change(f, b, sm, fm, s1, f1, depth + 1)?)
}

fn newton<F: Fn(C) -> Result<C>>(f: &F, start: C) -> Result<C> {
    let h = c(NEWTON_STEP, 0.0);
    let mut z = start;
    for _ in 0..NEWTON_MAX {
        let fz = f(z)?;
        let df = (f(z + h)? - f(z - h)?) / (2.0 * h);
        if df.norm() == 0.0 {
            break;
        }
        let step = fz / df;
        z -= step;
        if step.norm() <= 1e-14 * z.norm() {
            return Ok(z);
        }
    }
    Err(HirotaError::NonConvergence(fmt_c(start)))
}

/// Refines the zeros inside a box known to hold `count` of them.
fn resolve<F: Fn(C) -> Result<C>>(f: &F, b: PolarBox, count: i64, depth: u32) -> Result<Vec<C>> {
    if count <= 0 {
        return Ok(Vec::new());
    }
    if count == 1 {
        if let Ok(z) = newton(f, b.centre()) {
            if b.contains(z) {
                return Ok(vec![z]);
            }
        }
    }
    if depth >= 12 {
        return Err(HirotaError::NonConvergence(fmt_c(b.centre())));
    }
    let mut out = Vec::new();
    for sub in b.split() {
        let k = winding(f, &sub)?;
        out.extend(resolve(f, sub, k, depth + 1)?);
    }
    Ok(out)
}

fn search_boxes(p: &Params, r_lo: f64, r_hi: f64) -> Vec<PolarBox> {
    use std::f64::consts::{PI, TAU};
    let radial = 4;
    let cut_overlap = r_hi > p.r() - p.amp && r_lo < p.r() + p.amp;
    // Angle intervals avoid the real axis when the cut crosses the annulus; otherwise
    // they are offset so that no boundary lies on an axis.
    let arcs: Vec<(f64, f64)> = if cut_overlap {
        vec![(SEARCH_MARGIN, PI - SEARCH_MARGIN), (PI + SEARCH_MARGIN, TAU - SEARCH_MARGIN)]
    } else {
        let off = 0.0731;
        vec![(off, PI + off), (PI + off, TAU + off)]
    };
    let per_arc = 8;
    let mut out = Vec::new();
    for (a0, a1) in arcs {
        for i in 0..per_arc {
            let t0 = a0 + (a1 - a0) * i as f64 / per_arc as f64;
            let t1 = a0 + (a1 - a0) * (i + 1) as f64 / per_arc as f64;
            for k in 0..radial {
                let r0 = r_lo + (r_hi - r_lo) * k as f64 / radial as f64;
                let r1 = r_lo + (r_hi - r_lo) * (k + 1) as f64 / radial as f64;
                out.push(PolarBox { r0, r1, t0, t1 });
            }
        }
    }
    out
}

/// Zeros of the discrete coefficient in r_lo < |z| < r_hi (outside the unit circle),
/// counted with the argument principle on polar boxes and refined by Newton.
/// Completeness is reported, not certified.
pub fn locate_eigenvalues(pot: &TruncatedPotential, annulus: (f64, f64), sheet: Sheet) -> Result<Vec<C>> {
    let (r_lo, r_hi) = annulus;
    let p = &pot.params;
    if !(r_lo.is_finite() && r_hi.is_finite()) || r_lo >= r_hi {
        return Err(HirotaError::Invalid("annulus: need r_lo < r_hi".into()));
    }
    if r_lo < 1.0 + SEARCH_MARGIN {
        return Err(HirotaError::Invalid("annulus: r_lo must exceed 1 by the search margin".into()));
    }
    for b in p.branch_points() {
        let m = b.abs();
        if m > r_lo - SEARCH_MARGIN && m < r_hi + SEARCH_MARGIN {
            return Err(HirotaError::Invalid(format!("annulus: branch point {b} within the search margin")));
        }
    }
    let f = |z: C| discrete_coeff(pot, z, sheet);
    let boxes = search_boxes(p, r_lo, r_hi);
    let per_box = |b: &PolarBox| -> Result<Vec<C>> {
        let k = winding(&f, b)?;
        match resolve(&f, *b, k, 0) {
            Ok(v) => Ok(v),
            // Retry once on a slightly shifted box before giving up.
            Err(_) => {
                let nudged = PolarBox { t0: b.t0 + 1e-3 * (b.t1 - b.t0), t1: b.t1 + 1e-3 * (b.t1 - b.t0), ..*b };
                let k = winding(&f, &nudged)?;
                resolve(&f, nudged, k, 0)
            }
        }
    };
    #[cfg(feature = "parallel")]
    let found: Vec<Vec<C>> = {
        use rayon::prelude::*;
        boxes.par_iter().map(per_box).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let found: Vec<Vec<C>> = boxes.iter().map(per_box).collect::<Result<_>>()?;
    let mut zs: Vec<C> = Vec::new();
    for z in found.into_iter().flatten() {
        if !zs.iter().any(|w| (w - z).norm() < 1e-8) {
            zs.push(z);
        }
    }
    zs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(zs)
}

/// Splits 1 < |z| < r_max into annuli that keep the search margin away from the
/// unit circle and every branch-point radius. Pieces thinner than 0.05 are dropped.
pub fn search_annuli(p: &Params, r_max: f64) -> Vec<(f64, f64)> {
    let gap = 2.0 * SEARCH_MARGIN;
    let mut cuts: Vec<f64> = p.branch_points().iter().map(|b| b.abs()).filter(|&m| m > 1.0).collect();
    cuts.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let mut lo = 1.0 + gap;
    for m in cuts.into_iter().chain(std::iter::once(r_max + gap)) {
        let hi = (m - gap).min(r_max);
        if hi - lo > 0.05 {
            out.push((lo, hi));
        }
        lo = lo.max(m + gap);
    }
    out
}

/// Eigenvalues over every annulus from [`search_annuli`].
pub fn locate_all(pot: &TruncatedPotential, r_max: f64, sheet: Sheet) -> Result<Vec<C>> {
    let mut zs = Vec::new();
    for ann in search_annuli(&pot.params, r_max) {
        zs.extend(locate_eigenvalues(pot, ann, sheet)?);
    }
    zs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(zs)
}
