//! 2x2 complex matrices and their eigenvalues.

use num_complex::Complex64;

pub type Mat2 = [[Complex64; 2]; 2];

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

pub fn det(a: &Mat2) -> Complex64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn trace(a: &Mat2) -> Complex64 {
    a[0][0] + a[1][1]
}

pub fn from_real(a: [[f64; 2]; 2]) -> Mat2 {
    a.map(|row| row.map(|v| Complex64::new(v, 0.0)))
}

/// Roots of `t^2 - s t + p`, the larger-modulus root computed first so the
/// other one (`p / big`) does not suffer cancellation. Ordered as
/// `[(s - sqrt)/2, (s + sqrt)/2]` with the principal square root.
pub fn quadratic_roots(s: Complex64, p: Complex64) -> [Complex64; 2] {
    let disc = (s * s - 4.0 * p).sqrt();
    let plus = s + disc;
    let minus = s - disc;
    if plus.norm() >= minus.norm() {
        let big = plus / 2.0;
        let small = if big.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { p / big };
        [small, big]
    } else {
        let big = minus / 2.0;
        let small = if big.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { p / big };
        [big, small]
    }
}

/// Eigenvalues from the characteristic polynomial.
pub fn eigenvalues(a: &Mat2) -> [Complex64; 2] {
    quadratic_roots(trace(a), det(a))
}

/// Unit eigenvector of a real matrix for a real eigenvalue, normalised so the
/// first nonzero component is positive.
pub fn real_eigenvector(a: [[f64; 2]; 2], lambda: f64) -> [f64; 2] {
    // rows of A - lambda I; the kernel is orthogonal to the larger row
    let r0 = [a[0][0] - lambda, a[0][1]];
    let r1 = [a[1][0], a[1][1] - lambda];
    let row = if r0[0].hypot(r0[1]) >= r1[0].hypot(r1[1]) { r0 } else { r1 };
    let mut v = if row[0] == 0.0 && row[1] == 0.0 { [1.0, 0.0] } else { [-row[1], row[0]] };
    let n = v[0].hypot(v[1]);
    v = [v[0] / n, v[1] / n];
    if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) {
        v = [-v[0], -v[1]];
    }
    v
}
