//! Darboux dressing of the plane-wave background: the one-step transformation,
//! the N-fold determinant solution and the confluent (rogue-wave) determinant.

use serde::{Deserialize, Serialize};

use crate::error::{fmt_c, HirotaError, Result};
use crate::linalg::{det, frobenius, mat2, toeplitz_upper, CMat, Mat2, C};
use crate::seed::{c_for_ratio, eigenvector, taylor_coefficients, Eigenfunction, ElementarySpec};
use crate::spectral::{CutSide, Params, Sheet};

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// One dressing step: v -> v^[1] for spectral point z1 and kernel vector (f1, g1).
pub fn fundamental_dt(v: C, z1: C, f1: C, g1: C) -> Result<C> {
    if z1.norm() == 0.0 {
        return Err(HirotaError::ZeroArgument);
    }
    let (nf, ng) = (f1.norm_sqr(), g1.norm_sqr());
    if nf == 0.0 && ng == 0.0 {
        return Err(HirotaError::ZeroEigenvector);
    }
    let zz = z1.norm_sqr();
    let zstar = 1.0 / z1.conj();
    Ok(((nf + zz * ng) * v + zstar * (zz * zz - 1.0) * f1 * g1.conj()) / (zz * nf + ng))
}

/// The one-step Darboux matrix at z built from spectral point z1 and kernel vector y.
pub fn v1_matrix(z: C, z1: C, y: (C, C)) -> Result<Mat2> {
    let zz = z1.norm_sqr();
    if (zz - 1.0).abs() < 1e-14 {
        return Err(HirotaError::Invalid(format!("|z1| = 1 at z1 = {}", fmt_c(z1))));
    }
    let zs = 1.0 / z1.conj();
    if (z - zs).norm() < 1e-12 || (z + zs).norm() < 1e-12 {
        return Err(HirotaError::PoleHit(fmt_c(z)));
    }
    let (f, g) = y;
    if f.norm_sqr() == 0.0 && g.norm_sqr() == 0.0 {
        return Err(HirotaError::ZeroEigenvector);
    }
    let yy = f.norm_sqr() + g.norm_sqr();
    let ys = f.norm_sqr() - g.norm_sqr();
    let alpha = yy / (zz - 1.0) - ys / (zz + 1.0);
    let beta = yy / (zz - 1.0) + ys / (zz + 1.0);
    let a1 = zz / (1.0 + 2.0 * g.norm_sqr() / beta);
    let kinv = mat2(C::new(1.0 / alpha, 0.0), ZERO, ZERO, C::new(1.0 / beta, 0.0));
    let proj = mat2(f * f.conj(), f * g.conj(), g * f.conj(), g * g.conj());
    let s3 = mat2(ONE, ZERO, ZERO, -ONE);
    let inner = Mat2::identity() - kinv * proj * (zs / (z - zs)) + s3 * kinv * proj * s3 * (zs / (z + zs));
    Ok(mat2(ONE, ZERO, ZERO, C::new(a1, 0.0)) * inner)
}

/// V1 at z for the eigenvector `eig` (its z is the spectral point).
pub fn darboux_matrix_v1(z: C, eig: &Eigenfunction) -> Result<Mat2> {
    v1_matrix(z, eig.z, (eig.f, eig.g))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub z: C,
    pub c: C,
    #[serde(default = "one")]
    pub multiplicity: u32,
}

/// Rejects a numerically singular Gram matrix. The test runs on D T D with
/// D = diag(|T_ii|^{-1/2}), so rows carrying very different Taylor orders or
/// growth rates do not trip it, while nearly parallel rows still do.
fn check_gram(t: &CMat, dt: C) -> Result<()> {
    let m = t.nrows();
    let mut scaled = t.clone();
    let mut diag = 1.0;
    for i in 0..m {
        let d = t[(i, i)].norm();
        if d == 0.0 || !d.is_finite() {
            return Err(HirotaError::SingularGram { det: dt.norm(), scale: frobenius(t) });
        }
        diag *= d;
        for j in 0..m {
            scaled[(i, j)] /= (d * t[(j, j)].norm()).sqrt();
        }
    }
    let scale = frobenius(&scaled);
    if !(dt.norm() / diag >= 1e-13 * scale.powi(m as i32)) {
        return Err(HirotaError::SingularGram { det: dt.norm() / diag, scale });
    }
    Ok(())
}

fn one() -> u32 {
    1
}

impl SpectralPoint {
    pub fn new(z: C, c: C) -> Self {
        SpectralPoint { z, c, multiplicity: 1 }
    }
}

/// Simple spectral points with translation constants over the background `params`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DarbouxSystem {
    pub points: Vec<SpectralPoint>,
    pub params: Params,
    #[serde(default)]
    pub sheet: Sheet,
    #[serde(default)]
    pub side: CutSide,
}

impl DarbouxSystem {
    pub fn new(points: Vec<SpectralPoint>, params: Params) -> Result<Self> {
        for (i, pt) in points.iter().enumerate() {
            if pt.multiplicity != 1 {
                return Err(HirotaError::Invalid("repeated points go through the rogue-wave path".into()));
            }
            if pt.z.norm() <= 1.0 + 1e-12 {
                return Err(HirotaError::Invalid(format!("|z| must exceed 1, got {}", fmt_c(pt.z))));
            }
            if points[..i].iter().any(|q| (q.z - pt.z).norm() < 1e-12) {
                return Err(HirotaError::Invalid(format!("repeated point {}", fmt_c(pt.z))));
            }
        }
        Ok(DarbouxSystem { points, params, sheet: Sheet::Principal, side: CutSide::Upper })
    }

    pub fn from_points(zs: &[C], cs: &[C], params: Params) -> Result<Self> {
        if zs.len() != cs.len() {
            return Err(HirotaError::Invalid("need one constant per point".into()));
        }
        Self::new(zs.iter().zip(cs).map(|(&z, &c)| SpectralPoint::new(z, c)).collect(), params)
    }

    pub fn zs(&self) -> Vec<C> {
        self.points.iter().map(|p| p.z).collect()
    }

    pub fn eigenvectors(&self, n: i64, t: f64) -> Result<Vec<Eigenfunction>> {
        self.points
            .iter()
            .map(|pt| eigenvector(n, t, pt.z, pt.c, &self.params, self.sheet, Some(self.side)))
            .collect()
    }

    /// Gram-type matrices (alpha, beta) with
    /// alpha_ij = <y_i|y_j>/(z_j - z_i*) - <y_i|s3|y_j>/(z_j + z_i*), beta with +.
    pub fn gram(&self, n: i64, t: f64) -> Result<(CMat, CMat)> {
        let eig = self.eigenvectors(n, t)?;
        let m = eig.len();
        let mut alpha = CMat::zeros(m, m);
        let mut beta = CMat::zeros(m, m);
        for i in 0..m {
            let zs = 1.0 / eig[i].z.conj();
            for j in 0..m {
                let ff = eig[i].f.conj() * eig[j].f;
                let gg = eig[i].g.conj() * eig[j].g;
                let (p, q) = ((ff + gg) / (eig[j].z - zs), (ff - gg) / (eig[j].z + zs));
                alpha[(i, j)] = p - q;
                beta[(i, j)] = p + q;
            }
        }
        Ok((alpha, beta))
    }
}

/// A det H / det T for arbitrary kernel vectors (f_i, g_i) at distinct points.
pub fn nfold_from_vectors(amp: f64, zs: &[C], fs: &[C], gs: &[C]) -> Result<C> {
    let m = zs.len();
    if m == 0 {
        return Ok(C::new(amp, 0.0));
    }
    // Per-point rescaling leaves the ratio unchanged and keeps entries O(1).
    let mut f = Vec::with_capacity(m);
    let mut g = Vec::with_capacity(m);
    for i in 0..m {
        let s = fs[i].norm().max(gs[i].norm());
        if s == 0.0 || !s.is_finite() {
            return Err(if s == 0.0 { HirotaError::ZeroEigenvector } else { HirotaError::Invalid("non-finite eigenvector".into()) });
        }
        f.push(fs[i] / s);
        g.push(gs[i] / s);
    }
    let mut t = CMat::zeros(m, m);
    let mut h = CMat::zeros(m, m);
    for i in 0..m {
        let zi = zs[i].conj();
        for j in 0..m {
            let zj = zs[j];
            let den = zi * zi * zj * zj - 1.0;
            let ff = f[i].conj() * f[j];
            let gg = g[i].conj() * g[j];
            t[(i, j)] = (zi * zj * ff + gg) / den;
            h[(i, j)] = (ff + zi * zj * gg) / den + g[i].conj() * f[j] / (amp * zi);
        }
    }
    let dt = det(&t);
    check_gram(&t, dt)?;
    Ok(det(&h) / dt * amp)
}

pub fn nfold_solution(sys: &DarbouxSystem, n: i64, t: f64) -> Result<C> {
    let eig = sys.eigenvectors(n, t)?;
    let fs: Vec<C> = eig.iter().map(|e| e.f).collect();
    let gs: Vec<C> = eig.iter().map(|e| e.g).collect();
    nfold_from_vectors(sys.params.amp, &sys.zs(), &fs, &gs)
}

/// Applies the fundamental transformation once per point, dressing each later
/// eigenvector by the earlier V1 factors. Returns the field and the V1 product at `z`.
pub fn sequential_dressing(sys: &DarbouxSystem, n: i64, t: f64, z: Option<C>) -> Result<(C, Mat2)> {
    let eig = sys.eigenvectors(n, t)?;
    let mut v = C::new(sys.params.amp, 0.0);
    let mut steps: Vec<(C, (C, C))> = Vec::new();
    for e in &eig {
        let mut y = nalgebra::Vector2::new(e.f, e.g);
        for &(zj, yj) in &steps {
            y = v1_matrix(e.z, zj, yj)? * y;
        }
        v = fundamental_dt(v, e.z, y[0], y[1])?;
        steps.push((e.z, (y[0], y[1])));
    }
    let mut prod = Mat2::identity();
    if let Some(z) = z {
        for &(zj, yj) in &steps {
            prod = v1_matrix(z, zj, yj)? * prod;
        }
    }
    Ok((v, prod))
}

/// Translation constants placing each successive soliton's maximum at (0, 0).
///
/// Point k is tuned against the field already built from points 0..k: with
/// v(0,0) = M e^{i phi} and V the product of earlier V1 factors at z_k, the
/// kernel vector is chosen so V y = (1, (sqrt(1+M^2) + M) z_k e^{-i phi}).
pub fn peak_tuned_constants(zs: &[C], params: &Params) -> Result<Vec<C>> {
    let mut cs: Vec<C> = Vec::with_capacity(zs.len());
    for (k, &z) in zs.iter().enumerate() {
        let sys = DarbouxSystem::from_points(&zs[..k], &cs, *params)?;
        let (v, prod) = sequential_dressing(&sys, 0, 0.0, Some(z))?;
        let m = v.norm();
        let ph = if m > 0.0 { v / m } else { ONE };
        let rho = ((1.0 + m * m).sqrt() + m) * z / ph;
        let inv = prod.try_inverse().ok_or_else(|| HirotaError::PoleHit(fmt_c(z)))?;
        let u = inv * nalgebra::Vector2::new(ONE, rho);
        let e = eigenvector(0, 0.0, z, ZERO, params, sys.sheet, Some(sys.side))?;
        cs.push(c_for_ratio(u[1] / u[0], e.gamma));
    }
    Ok(cs)
}

/// Matrices of the confluent determinant of order N at the branch point z1 = r + A.
#[derive(Debug, Clone, PartialEq)]
pub struct RogueMatrices {
    pub mu: CMat,
    pub j1: CMat,
    pub j2: CMat,
    pub k1: CMat,
    pub k2: CMat,
    pub e: CMat,
    pub f: CMat,
    pub f_coeffs: Vec<C>,
    pub g_coeffs: Vec<C>,
}

/// Taylor coefficients mu_ij of 1/(k^2 y^2 - 1) about k = conj(z1), y = z1,
/// by inverting the two-variable series.
pub fn mu_matrix(z1: C, order: usize) -> CMat {
    let m = order;
    let (k0, y0) = (z1.conj(), z1);
    let ku = [k0 * k0, 2.0 * k0, ONE];
    let yw = [y0 * y0, 2.0 * y0, ONE];
    let mut p = CMat::zeros(m, m);
    for i in 0..m.min(3) {
        for j in 0..m.min(3) {
            p[(i, j)] = ku[i] * yw[j];
        }
    }
    if m == 0 {
        return p;
    }
    p[(0, 0)] -= ONE;
    let mut q = CMat::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let mut s = if i == 0 && j == 0 { ONE } else { ZERO };
            for a in 0..=i.min(2) {
                for b in 0..=j.min(2) {
                    if a + b > 0 {
                        s -= p[(a, b)] * q[(i - a, j - b)];
                    }
                }
            }
            q[(i, j)] = s / p[(0, 0)];
        }
    }
    q
}

pub fn rogue_matrices(n: i64, t: f64, order: usize, spec: &ElementarySpec) -> Result<RogueMatrices> {
    if order == 0 {
        return Err(HirotaError::Invalid("rogue order must be at least 1".into()));
    }
    let z1 = C::new(spec.params.z1(), 0.0);
    let (fc, gc) = taylor_coefficients(n, t, spec, order - 1)?;
    let mu = mu_matrix(z1, order);
    let j1 = toeplitz_upper(&fc, order);
    let k1 = toeplitz_upper(&gc, order);
    let e = toeplitz_upper(&[ZERO, ONE], order);
    let j2 = &j1 * z1 + &j1 * &e;
    let k2 = &k1 * z1 + &k1 * &e;
    let phi: Vec<C> = (0..order).map(|m| if m % 2 == 0 { ONE } else { -ONE } / z1.conj().powi(m as i32 + 1)).collect();
    let f = toeplitz_upper(&phi, order);
    Ok(RogueMatrices { mu, j1, j2, k1, k2, e, f, f_coeffs: fc, g_coeffs: gc })
}

/// Order-N rogue wave A det H / det T with
/// T = K1^H mu K1 + J2^H mu J2 and H = K2^H mu K2 + J1^H mu J1 + (1/A) (g F)^H f.
pub fn rogue_solution(n: i64, t: f64, order: usize, spec: &ElementarySpec) -> Result<C> {
    let m = rogue_matrices(n, t, order, spec)?;
    let amp = spec.params.amp;
    let tm = m.k1.adjoint() * &m.mu * &m.k1 + m.j2.adjoint() * &m.mu * &m.j2;
    let grow = CMat::from_row_slice(1, order, &m.g_coeffs) * &m.f;
    let frow = CMat::from_row_slice(1, order, &m.f_coeffs);
    let hm = m.k2.adjoint() * &m.mu * &m.k2 + m.j1.adjoint() * &m.mu * &m.j1 + grow.adjoint() * frow / C::new(amp, 0.0);
    // The confluent Gram matrix is ill-conditioned by construction (its columns are
    // Taylor orders), yet the ratio is stable, so only a vanishing det is rejected.
    let dt = det(&tm);
    if !(dt.norm() > f64::MIN_POSITIVE && dt.norm().is_finite()) {
        return Err(HirotaError::SingularGram { det: dt.norm(), scale: frobenius(&tm) });
    }
    Ok(det(&hm) / dt * amp)
}
