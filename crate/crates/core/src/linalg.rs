//! Small dense complex matrices.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

pub type C = Complex64;
pub type Mat2 = Matrix2<C>;
pub type CMat = DMatrix<C>;

pub const I: C = C::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn mat2(a: C, b: C, c: C, d: C) -> Mat2 {
    Mat2::new(a, b, c, d)
}

pub fn det(m: &CMat) -> C {
    if m.nrows() == 0 {
        return C::new(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Upper-triangular Toeplitz matrix with first row `coeffs`.
pub fn toeplitz_upper(coeffs: &[C], n: usize) -> CMat {
    CMat::from_fn(n, n, |i, j| {
        if j >= i && j - i < coeffs.len() {
            coeffs[j - i]
        } else {
            C::new(0.0, 0.0)
        }
    })
}

pub fn max_abs2(m: &Mat2) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}
