//! Extended-precision reference evaluation of the elementary matrix, used
//! only by tests as an independent oracle for the branch-point Taylor data.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::linalg::C;
use crate::seed::{CTilde, ElementarySpec};

const PREC: u32 = 160;

#[derive(Clone, Debug)]
pub struct Mc {
    pub re: Float,
    pub im: Float,
}

fn fl(x: f64) -> Float {
    Float::with_val(PREC, x)
}

impl Mc {
    pub fn new(re: Float, im: Float) -> Self {
        Mc { re, im }
    }
    pub fn from_c(z: C) -> Self {
        Mc::new(fl(z.re), fl(z.im))
    }
    pub fn real(x: &Float) -> Self {
        Mc::new(x.clone(), fl(0.0))
    }
    pub fn add(&self, o: &Mc) -> Mc {
        Mc::new(Float::with_val(PREC, &self.re + &o.re), Float::with_val(PREC, &self.im + &o.im))
    }
    pub fn sub(&self, o: &Mc) -> Mc {
        Mc::new(Float::with_val(PREC, &self.re - &o.re), Float::with_val(PREC, &self.im - &o.im))
    }
    pub fn mul(&self, o: &Mc) -> Mc {
        let re = Float::with_val(PREC, &self.re * &o.re) - Float::with_val(PREC, &self.im * &o.im);
        let im = Float::with_val(PREC, &self.re * &o.im) + Float::with_val(PREC, &self.im * &o.re);
        Mc::new(re, im)
    }
    pub fn scale(&self, k: &Float) -> Mc {
        Mc::new(Float::with_val(PREC, &self.re * k), Float::with_val(PREC, &self.im * k))
    }
    pub fn norm2(&self) -> Float {
        Float::with_val(PREC, &self.re * &self.re) + Float::with_val(PREC, &self.im * &self.im)
    }
    pub fn abs(&self) -> Float {
        self.norm2().sqrt()
    }
    pub fn recip(&self) -> Mc {
        let d = self.norm2();
        Mc::new(Float::with_val(PREC, &self.re / &d), Float::with_val(PREC, -&self.im) / &d)
    }
    pub fn div(&self, o: &Mc) -> Mc {
        self.mul(&o.recip())
    }
    pub fn sqrt(&self) -> Mc {
        let m = self.abs();
        let re = (Float::with_val(PREC, &m + &self.re) / 2u32).sqrt();
        let mut im = (Float::with_val(PREC, &m - &self.re) / 2u32).sqrt();
        if self.im.is_sign_negative() {
            im = -im;
        }
        Mc::new(re, im)
    }
    pub fn ln(&self) -> Mc {
        let arg = self.im.clone().atan2(&self.re);
        Mc::new(self.abs().ln(), arg)
    }
    pub fn exp(&self) -> Mc {
        let e = self.re.clone().exp();
        let (s, c) = self.im.clone().sin_cos(fl(0.0));
        Mc::new(Float::with_val(PREC, &e * &c), Float::with_val(PREC, &e * &s))
    }
    pub fn sinh(&self) -> Mc {
        let e = self.exp();
        e.sub(&e.recip()).scale(&fl(0.5))
    }
    pub fn cosh(&self) -> Mc {
        let e = self.exp();
        e.add(&e.recip()).scale(&fl(0.5))
    }
}

fn poly(v: &[C], x: &Mc) -> Mc {
    let mut acc = Mc::from_c(C::new(0.0, 0.0));
    for c in v.iter().rev() {
        acc = acc.mul(x).add(&Mc::from_c(*c));
    }
    acc
}

/// (f, g) = Phi(n, t, z1 + w) (1, (r + A) z) with every operation in 160-bit
/// arithmetic; zeta is the smaller-modulus root (w must keep z off the cut).
pub fn seeded_column(n: i64, t: f64, w: &Mc, spec: &ElementarySpec) -> (Mc, Mc) {
    let p = &spec.params;
    let amp = fl(p.amp);
    let r = (Float::with_val(PREC, &amp * &amp) + 1u32).sqrt();
    let z1 = Float::with_val(PREC, &r + &amp);
    let z = Mc::real(&z1).add(w);
    let one = Mc::from_c(C::new(1.0, 0.0));
    let z2 = z.mul(&z);
    let disc = one.add(&z2).mul(&one.add(&z2)).sub(&z2.scale(&(Float::with_val(PREC, &r * &r) * 4u32)));
    let s = disc.sqrt();
    let two_rz = z.scale(&Float::with_val(PREC, &r * 2u32));
    let ra = one.add(&z2).add(&s).div(&two_rz);
    let rb = one.add(&z2).sub(&s).div(&two_rz);
    let zeta = if ra.abs() < rb.abs() { ra } else { rb };
    let omega = zeta.sub(&zeta.recip()).scale(&Float::with_val(PREC, &r / 2u32));
    let eta = zeta.ln();

    let phase = fl(p.phase);
    let (sb, cb) = phase.clone().sin_cos(fl(0.0));
    let e = Mc::new(cb.clone(), sb.clone());
    let bp = Mc::from_c(C::new(p.b, p.a));
    let bm = Mc::from_c(C::new(p.b, -p.a));
    let delta = bp.div(&e.mul(&z)).add(&bm.mul(&z).mul(&e));
    let ze = z2.mul(&e);
    let base = Float::with_val(PREC, &amp * &amp) * (fl(p.a) * &sb + fl(p.b) * &cb);
    let theta = ze.add(&ze.recip()).scale(&fl(0.5 * p.b)).add(&Mc::real(&base));

    let dn = fl((n - spec.n0) as f64);
    let dt = fl(t - spec.t0);
    let shift = z.sub(&Mc::real(&z1));
    let ct = match &spec.c_tilde {
        CTilde::Zero => Mc::from_c(C::new(0.0, 0.0)),
        CTilde::Eta(k) => eta.mul(&Mc::from_c(*k)),
        CTilde::EtaPoly(v) => eta.mul(&poly(v, &shift)),
        CTilde::Series(v) => poly(v, &shift),
    };
    let chi = eta.scale(&dn).add(&delta.mul(&omega).scale(&dt)).add(&ct);
    let big_s = chi.sinh().div(&omega);
    let ch = chi.cosh();
    let q = one.sub(&z2).div(&z.scale(&fl(2.0)));
    let pref = theta.scale(&dt).exp().scale(&Float::with_val(PREC, r.clone().pow(&dn)));
    let a_s = big_s.scale(&amp);
    let seed2 = z.scale(&z1);
    let f = ch.sub(&q.mul(&big_s)).add(&a_s.mul(&seed2));
    let g = ch.add(&q.mul(&big_s)).mul(&seed2).sub(&a_s);
    (pref.mul(&f), pref.mul(&g))
}

/// Trapezoid rule on |z - z1| = radius with nodes offset by half a step.
pub fn cauchy_taylor(n: i64, t: f64, spec: &ElementarySpec, order: usize, radius: f64, nodes: usize) -> (Vec<C>, Vec<C>) {
    let zero = Mc::from_c(C::new(0.0, 0.0));
    let mut fs = vec![zero.clone(); order + 1];
    let mut gs = fs.clone();
    let tau = Float::with_val(PREC, Constant::Pi) * 2u32;
    let m = fl(nodes as f64);
    for k in 0..nodes {
        let th = Float::with_val(PREC, &tau * (fl(k as f64) + 0.5)) / &m;
        let (s, c) = th.sin_cos(fl(0.0));
        let w = Mc::new(Float::with_val(PREC, &c * radius), Float::with_val(PREC, &s * radius));
        let (f, g) = seeded_column(n, t, &w, spec);
        let winv = w.recip();
        let mut wp = Mc::from_c(C::new(1.0, 0.0));
        for i in 0..=order {
            fs[i] = fs[i].add(&f.mul(&wp));
            gs[i] = gs[i].add(&g.mul(&wp));
            wp = wp.mul(&winv);
        }
    }
    let done = |v: Vec<Mc>| v.iter().map(|x| Float::with_val(PREC, &x.re / &m)).zip(v.iter().map(|x| Float::with_val(PREC, &x.im / &m))).map(|(a, b)| C::new(a.to_f64(), b.to_f64())).collect();
    (done(fs), done(gs))
}
