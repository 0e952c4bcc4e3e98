//! Dense complex linear algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Largest singular value; zero for empty matrices.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}

pub fn singular_values(m: &CMatrix) -> DVector<f64> {
    m.clone().svd(false, false).singular_values
}

/// Number of singular values strictly above `cutoff`.
pub fn matrix_rank(m: &CMatrix, cutoff: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    singular_values(m).iter().filter(|&&s| s > cutoff).count()
}

/// The partial isometry `sum u_k v_k^*` over singular values above `cutoff`.
pub fn partial_isometry(m: &CMatrix, cutoff: f64) -> CMatrix {
    let (rows, cols) = m.shape();
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut out = CMatrix::zeros(rows, cols);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            out += u.column(k) * v_t.row(k);
        }
    }
    out
}

/// Standard complex Gaussian: real and imaginary parts i.i.d. N(0, 1/2).
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = gaussian(rng);
        }
    }
    m
}

/// Haar-distributed unitary from the QR factorization of a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let qr = gaussian_matrix(n, n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-distributed rotation (orthogonal, determinant +1) of R^n.
pub fn random_rotation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let mut g = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = StandardNormal.sample(rng);
        }
    }
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    if q.determinant() < 0.0 {
        for i in 0..n {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    q
}

pub fn unit_phase<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let t: f64 = rng.random_range(0.0..core::f64::consts::TAU);
    C64::from_polar(1.0, t)
}

pub fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| c(x, 0.0))
}

/// Normalize a complex number to the unit circle.
pub fn to_unimodular(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        ONE
    } else {
        z / r
    }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}
