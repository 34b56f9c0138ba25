//! Truncated complex power series.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::linalg::C;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JetParam {
    /// z = center + s^2.
    SLocal,
    /// z - center.
    ZShift,
}

/// Power series sum c_k x^k truncated after `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub center: C,
    pub param: JetParam,
    pub coeffs: Vec<C>,
}

const ZERO: C = C::new(0.0, 0.0);

impl Jet {
    pub fn new(center: C, param: JetParam, coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "jet needs at least one coefficient");
        Jet { center, param, coeffs }
    }

    pub fn constant(like: &Jet, v: C) -> Self {
        let mut coeffs = vec![ZERO; like.len()];
        coeffs[0] = v;
        Jet { coeffs, ..like.meta() }
    }

    /// The expansion variable itself (s or z - center).
    pub fn variable(center: C, param: JetParam, order: usize) -> Self {
        let mut coeffs = vec![ZERO; order + 1];
        if order >= 1 {
            coeffs[1] = C::new(1.0, 0.0);
        }
        Jet { center, param, coeffs }
    }

    fn meta(&self) -> Jet {
        Jet { center: self.center, param: self.param, coeffs: Vec::new() }
    }

    fn with(&self, coeffs: Vec<C>) -> Jet {
        Jet { coeffs, ..self.meta() }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn scale(&self, k: C) -> Jet {
        self.with(self.coeffs.iter().map(|&x| x * k).collect())
    }

    pub fn add_const(&self, k: C) -> Jet {
        let mut v = self.coeffs.clone();
        v[0] += k;
        self.with(v)
    }

    pub fn recip(&self) -> Jet {
        Jet::constant(self, C::new(1.0, 0.0)).div(self)
    }

    pub fn div(&self, d: &Jet) -> Jet {
        let n = self.len().min(d.len());
        let d0 = d.coeffs[0];
        assert!(d0.norm() > 0.0, "division by a jet with zero leading coefficient");
        let mut q = vec![ZERO; n];
        for k in 0..n {
            let mut s = self.coeffs[k];
            for j in 1..=k {
                s -= d.coeffs[j] * q[k - j];
            }
            q[k] = s / d0;
        }
        self.with(q)
    }

    pub fn exp(&self) -> Jet {
        let n = self.len();
        let mut e = vec![ZERO; n];
        e[0] = self.coeffs[0].exp();
        for k in 1..n {
            let mut s = ZERO;
            for j in 1..=k {
                s += self.coeffs[j] * e[k - j] * (j as f64);
            }
            e[k] = s / (k as f64);
        }
        self.with(e)
    }

    /// Principal log; the leading coefficient must be nonzero.
    pub fn ln(&self) -> Jet {
        let n = self.len();
        let a0 = self.coeffs[0];
        assert!(a0.norm() > 0.0, "log of a jet with zero leading coefficient");
        let mut l = vec![ZERO; n];
        l[0] = a0.ln();
        for k in 1..n {
            let mut s = self.coeffs[k] * (k as f64);
            for j in 1..k {
                s -= l[j] * self.coeffs[k - j] * (j as f64);
            }
            l[k] = s / (a0 * (k as f64));
        }
        self.with(l)
    }

    /// Principal square root; the leading coefficient must be nonzero.
    pub fn sqrt(&self) -> Jet {
        let n = self.len();
        let a0 = self.coeffs[0];
        assert!(a0.norm() > 0.0, "sqrt of a jet with zero leading coefficient");
        let mut s = vec![ZERO; n];
        s[0] = a0.sqrt();
        for k in 1..n {
            let mut acc = self.coeffs[k];
            for j in 1..k {
                acc -= s[j] * s[k - j];
            }
            s[k] = acc / (2.0 * s[0]);
        }
        self.with(s)
    }

    pub fn sinh(&self) -> Jet {
        let (p, m) = (self.exp(), (-self).exp());
        (&p - &m).scale(C::new(0.5, 0.0))
    }

    pub fn cosh(&self) -> Jet {
        let (p, m) = (self.exp(), (-self).exp());
        (&p + &m).scale(C::new(0.5, 0.0))
    }

    pub fn asinh(&self) -> Jet {
        let one = C::new(1.0, 0.0);
        let root = (self * self).add_const(one).sqrt();
        (self + &root).ln()
    }

    /// Multiply by x^k, dropping terms beyond the order.
    pub fn shift_up(&self, k: usize) -> Jet {
        let n = self.len();
        let mut v = vec![ZERO; n];
        for i in k..n {
            v[i] = self.coeffs[i - k];
        }
        self.with(v)
    }

    /// Divide by x^k; the first k coefficients are discarded and the order drops by k.
    pub fn shift_down(&self, k: usize) -> Jet {
        assert!(k < self.len());
        self.with(self.coeffs[k..].to_vec())
    }

    pub fn truncate(&self, order: usize) -> Jet {
        self.with(self.coeffs[..=order.min(self.order())].to_vec())
    }

    /// Evaluate the polynomial at x.
    pub fn eval(&self, x: C) -> C {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * x + c)
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        let n = self.len().min(o.len());
        self.with((0..n).map(|k| self.coeffs[k] + o.coeffs[k]).collect())
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        let n = self.len().min(o.len());
        self.with((0..n).map(|k| self.coeffs[k] - o.coeffs[k]).collect())
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        let n = self.len().min(o.len());
        let mut v = vec![ZERO; n];
        for i in 0..n {
            if self.coeffs[i] == ZERO {
                continue;
            }
            for j in 0..n - i {
                v[i + j] += self.coeffs[i] * o.coeffs[j];
            }
        }
        self.with(v)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.with(self.coeffs.iter().map(|&x| -x).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn j(v: Vec<C>) -> Jet {
        Jet::new(C::new(0.0, 0.0), JetParam::ZShift, v)
    }

    fn close(a: &Jet, b: &Jet, tol: f64) -> bool {
        a.coeffs.iter().zip(&b.coeffs).all(|(x, y)| (x - y).norm() <= tol * (1.0 + y.norm()))
    }

    #[test]
    fn exp_of_variable_is_factorial_series() {
        let x = Jet::variable(C::new(0.0, 0.0), JetParam::ZShift, 8);
        let e = x.exp();
        let mut f = 1.0;
        for (k, c) in e.coeffs.iter().enumerate() {
            if k > 0 {
                f *= k as f64;
            }
            assert!((c.re - 1.0 / f).abs() < 1e-15 && c.im == 0.0);
        }
    }

    #[test]
    fn asinh_series() {
        // asinh(x) = x - x^3/6 + 3x^5/40 - 15 x^7/336
        let x = Jet::variable(C::new(0.0, 0.0), JetParam::ZShift, 7);
        let a = x.asinh();
        let want = [0.0, 1.0, 0.0, -1.0 / 6.0, 0.0, 3.0 / 40.0, 0.0, -15.0 / 336.0];
        for (c, w) in a.coeffs.iter().zip(want) {
            assert!((c.re - w).abs() < 1e-15 && c.im.abs() < 1e-15);
        }
    }

    #[test]
    fn sinh_cosh_identity() {
        let x = j(vec![C::new(0.3, 0.1), C::new(1.0, -0.5), C::new(0.2, 0.0), C::new(-0.7, 0.4)]);
        let s = x.sinh();
        let c = x.cosh();
        let one = &(&c * &c) - &(&s * &s);
        assert!(close(&one, &Jet::constant(&x, C::new(1.0, 0.0)), 1e-14));
    }

    #[test]
    fn shifts() {
        let x = j(vec![C::new(0.0, 0.0), C::new(2.0, 0.0), C::new(3.0, 0.0)]);
        assert_eq!(x.shift_down(1).coeffs, vec![C::new(2.0, 0.0), C::new(3.0, 0.0)]);
        assert_eq!(x.shift_up(1).coeffs[2], C::new(2.0, 0.0));
        assert_eq!(x.eval(C::new(2.0, 0.0)), C::new(16.0, 0.0));
    }

    fn arb_jet(order: usize) -> impl Strategy<Value = Jet> {
        proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), order + 1)
            .prop_map(|v| j(v.into_iter().map(|(a, b)| C::new(a, b)).collect()))
    }

    proptest! {
        #[test]
        fn mul_div_roundtrip(p in arb_jet(8), q in arb_jet(8)) {
            // Divisor with 1/q analytic on the unit disc: sum |q_k| < |q_0| for k >= 1.
            let tail: f64 = q.coeffs[1..].iter().map(|c| c.norm()).sum();
            let mut q = q;
            q.coeffs[0] = q.coeffs[0] / q.coeffs[0].norm().max(1e-3) * (tail + 0.5);
            let r = (&p * &q).div(&q);
            prop_assert!(close(&r, &p, 1e-12));
        }

        #[test]
        fn mul_commutes_with_truncation(p in arb_jet(8), q in arb_jet(8)) {
            let a = (&p * &q).truncate(5);
            let b = &p.truncate(5) * &q.truncate(5);
            prop_assert!(close(&a, &b, 1e-14));
        }

        #[test]
        fn ln_inverts_exp(p in arb_jet(6)) {
            let q = p.exp().ln();
            // Constant term agrees modulo 2 pi i.
            let d0 = q.coeffs[0] - p.coeffs[0];
            prop_assert!(d0.re.abs() < 1e-12);
            prop_assert!(((d0.im / std::f64::consts::TAU).round() * std::f64::consts::TAU - d0.im).abs() < 1e-12);
            for k in 1..p.len() {
                prop_assert!((q.coeffs[k] - p.coeffs[k]).norm() < 1e-10 * (1.0 + p.coeffs[k].norm()));
            }
        }

        #[test]
        fn sqrt_squares_back(p in arb_jet(8)) {
            prop_assume!(p.coeffs[0].norm() > 0.5);
            let s = p.sqrt();
            let back = &s * &s;
            let scale = s.coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
            for (a, b) in back.coeffs.iter().zip(&p.coeffs) {
                prop_assert!((a - b).norm() <= 1e-12 * scale * scale * 16.0);
            }
        }
    }
}
