//! Geometry of spin factors: the tripotent parametrization by real unit
//! vectors, the 2x2 matrix model of `spin(4)`, the Minkowski embedding,
//! spin states and Lorentz boosts.

use alloc::format;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::factors::{spin_bilinear, Element, Factor};
use crate::linalg::{c, partial_isometry, CMatrix, CVector, C64, I, ONE, ZERO};
use crate::tripotent::{require_tripotent, Tolerance};

/// Parametrization of a spin tripotent. Maximal tripotents are `λ a`,
/// minimal ones `(λ/2)(a + i b)` with `a ⊥ b` real unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub enum SpinClassification {
    Zero,
    Maximal { lambda: C64, a: DVector<f64> },
    Minimal { lambda: C64, a: DVector<f64>, b: DVector<f64> },
}

impl SpinClassification {
    /// The tripotent described by this classification.
    pub fn rebuild(&self, d: usize) -> CVector {
        match self {
            SpinClassification::Zero => CVector::zeros(d),
            SpinClassification::Maximal { lambda, a } => real(a) * *lambda,
            SpinClassification::Minimal { lambda, a, b } => (real(a) + real(b) * I) * (*lambda * 0.5),
        }
    }
}

fn real(v: &DVector<f64>) -> CVector {
    v.map(|x| c(x, 0.0))
}

fn spin_vector(x: &Element) -> Result<&CVector> {
    x.vector().ok_or_else(|| Error::FactorMismatch(format!("{} is not a spin factor", x.factor())))
}

fn spin4_vector(x: &Element) -> Result<&CVector> {
    match x.factor() {
        Factor::Spin { d: 4 } => spin_vector(x),
        f => Err(Error::FactorMismatch(format!("expected spin(4), got {f}"))),
    }
}

/// Real and imaginary parts of a coordinate vector.
pub fn split(v: &CVector) -> (DVector<f64>, DVector<f64>) {
    (v.map(|z| z.re), v.map(|z| z.im))
}

/// Principal square root with the phase convention `Re > 0`, else `Im >= 0`.
fn phase_root(s: C64, slack: f64) -> C64 {
    let r = s.sqrt();
    if r.re.abs() <= slack {
        c(0.0, r.im.abs())
    } else if r.re < 0.0 {
        -r
    } else {
        r
    }
}

/// Decomposes a spin tripotent into phase and real part(s).
pub fn classify_spin_tripotent(u: &Element, tol: Tolerance) -> Result<SpinClassification> {
    let v = spin_vector(u)?;
    require_tripotent(u, tol)?;
    if v.norm() <= tol.threshold(1.0) {
        return Ok(SpinClassification::Zero);
    }
    let s = spin_bilinear(v, v);
    if s.norm() > 0.5 {
        let lambda = phase_root(s, tol.threshold(1.0));
        let lambda = lambda / lambda.norm();
        let scaled = v * lambda.conj();
        let (a, im) = split(&scaled);
        if im.norm() > tol.threshold(1.0) {
            return Err(Error::Classification(format!(
                "maximal tripotent is not a phase times a real vector (imaginary residue {:.3e})",
                im.norm()
            )));
        }
        let n = a.norm();
        Ok(SpinClassification::Maximal { lambda, a: a / n })
    } else {
        let (re, im) = split(v);
        Ok(SpinClassification::Minimal { lambda: ONE, a: re * 2.0, b: im * 2.0 })
    }
}

fn maximal_parts(u: &Element, tol: Tolerance) -> Result<(C64, DVector<f64>)> {
    match classify_spin_tripotent(u, tol)? {
        SpinClassification::Maximal { lambda, a } => Ok((lambda, a)),
        _ => Err(Error::Precondition("expected a maximal spin tripotent".into())),
    }
}

/// `λ (a + i b) / 2` for a maximal `u = λ a` and a real unit `b ⊥ a`.
pub fn minimal_below(u: &Element, b: &DVector<f64>, tol: Tolerance) -> Result<Element> {
    let (lambda, a) = maximal_parts(u, tol)?;
    if b.len() != a.len() {
        return Err(Error::Precondition(format!("direction has length {}, expected {}", b.len(), a.len())));
    }
    if (b.norm() - 1.0).abs() > tol.threshold(1.0) || a.dot(b).abs() > tol.threshold(1.0) {
        return Err(Error::Precondition("direction must be a real unit vector orthogonal to a".into()));
    }
    let v = (real(&a) + real(b) * I) * (lambda * 0.5);
    Element::from_vector(u.factor().clone(), v)
}

/// The real unit `b` with `v = λ (a + i b) / 2`, for a minimal `v` below the
/// maximal `u = λ a`.
pub fn decompose_below(v: &Element, u: &Element, tol: Tolerance) -> Result<DVector<f64>> {
    let (lambda, a) = maximal_parts(u, tol)?;
    let w = spin_vector(v)?;
    require_tripotent(v, tol)?;
    let t = w * (lambda.conj() * 2.0) - real(&a);
    let (b, residue) = split(&(t * -I));
    if residue.norm() > tol.threshold(1.0) || (b.norm() - 1.0).abs() > tol.threshold(1.0) {
        return Err(Error::Precondition("tripotent is not a minimal tripotent below u".into()));
    }
    Ok(b)
}

/// Pauli matrix `σ_k`, `k = 0..=3`, with `σ_0 = I`.
pub fn pauli(k: usize) -> CMatrix {
    let m = |a: C64, b: C64, cc: C64, d: C64| CMatrix::from_row_slice(2, 2, &[a, b, cc, d]);
    match k {
        0 => m(ONE, ZERO, ZERO, ONE),
        1 => m(ZERO, ONE, ONE, ZERO),
        2 => m(ZERO, -I, I, ZERO),
        3 => m(ONE, ZERO, ZERO, -ONE),
        _ => panic!("Pauli index {k} out of range"),
    }
}

/// Basis matrices of the model: `ê_0 = I`, `ê_j = -i σ_j`.
pub fn e_hat(k: usize) -> CMatrix {
    if k == 0 {
        pauli(0)
    } else {
        pauli(k) * -I
    }
}

/// `x̂ = Σ x_μ ê_μ`.
pub fn matrix_rep(x: &Element) -> Result<CMatrix> {
    let v = spin4_vector(x)?;
    Ok(CMatrix::from_row_slice(
        2,
        2,
        &[v[0] - I * v[3], -v[2] - I * v[1], v[2] - I * v[1], v[0] + I * v[3]],
    ))
}

/// Inverse of [`matrix_rep`].
pub fn inverse_rep(m: &CMatrix) -> Result<Element> {
    if m.shape() != (2, 2) {
        return Err(Error::InvalidElement(format!("expected a 2x2 matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    let (a, b, cc, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let v = CVector::from_row_slice(&[(a + d) * 0.5, (b + cc) * I * 0.5, (cc - b) * 0.5, (d - a) / (I * 2.0)]);
    Element::from_vector(Factor::Spin { d: 4 }, v)
}

/// `det(x) = Σ x_μ²`, the determinant of `x̂`.
pub fn spin_determinant(x: &Element) -> Result<C64> {
    let v = spin4_vector(x)?;
    Ok(spin_bilinear(v, v))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimeVector(pub [f64; 4]);

impl SpacetimeVector {
    pub fn minkowski_norm(&self) -> f64 {
        let [t, x, y, z] = self.0;
        t * t - x * x - y * y - z * z
    }
}

/// `φ(a) = Σ a_μ σ_μ`, a hermitian matrix with determinant the Minkowski norm.
pub fn minkowski_embed(a: SpacetimeVector) -> CMatrix {
    (0..4).fold(CMatrix::zeros(2, 2), |acc, k| acc + pauli(k) * c(a.0[k], 0.0))
}

/// `½(I + Σ b_j σ_j)` as an element of `spin(4)`.
pub fn spin_state(b: [f64; 3], tol: Tolerance) -> Result<Element> {
    let n = libm::sqrt(b.iter().map(|x| x * x).sum::<f64>());
    if (n - 1.0).abs() > tol.threshold(1.0) {
        return Err(Error::Precondition(format!("spin direction must be a unit vector (norm {n})")));
    }
    let v = CVector::from_row_slice(&[c(0.5, 0.0), I * (b[0] * 0.5), I * (b[1] * 0.5), I * (b[2] * 0.5)]);
    Element::from_vector(Factor::Spin { d: 4 }, v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn from_index(k: usize) -> Result<Self> {
        match k {
            1 => Ok(Axis::X),
            2 => Ok(Axis::Y),
            3 => Ok(Axis::Z),
            _ => Err(Error::Precondition(format!("boost axis must be 1, 2 or 3, got {k}"))),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Axis::X => 1,
            Axis::Y => 2,
            Axis::Z => 3,
        }
    }
}

/// `X -> A X A*` with `A = exp(χ σ_axis / 2)`, applied to `x̂` and pulled back.
pub fn lorentz_boost(x: &Element, rapidity: f64, axis: Axis) -> Result<Element> {
    let xm = matrix_rep(x)?;
    let half = rapidity * 0.5;
    let a = pauli(0) * c(libm::cosh(half), 0.0) + pauli(axis.index()) * c(libm::sinh(half), 0.0);
    inverse_rep(&(&a * xm * a.adjoint()))
}

/// Partial isometry of the singular value decomposition of `x̂`.
pub fn polar_tripotent_part(x: &Element, tol: Tolerance) -> Result<Element> {
    let xm = matrix_rep(x)?;
    let cutoff = tol.threshold(1.0);
    if crate::linalg::op_norm(&xm) <= cutoff {
        return Err(Error::Precondition("polar part of the zero element".into()));
    }
    inverse_rep(&partial_isometry(&xm, cutoff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tripotent::{is_tripotent, leq};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn spin(coords: &[C64]) -> Element {
        Element::from_vector(Factor::Spin { d: coords.len() }, CVector::from_row_slice(coords)).unwrap()
    }

    fn basis(d: usize, k: usize) -> DVector<f64> {
        let mut v = DVector::zeros(d);
        v[k] = 1.0;
        v
    }

    fn close(a: &CMatrix, b: &CMatrix, eps: f64) -> bool {
        (a - b).iter().all(|z| z.norm() <= eps)
    }

    #[test]
    fn classification_examples() {
        let e0 = spin(&[ONE, ZERO, ZERO, ZERO]);
        assert_eq!(
            classify_spin_tripotent(&e0, tol()).unwrap(),
            SpinClassification::Maximal { lambda: ONE, a: basis(4, 0) }
        );
        let v = spin(&[ZERO, c(0.5, 0.0), c(0.0, 0.5), ZERO]);
        assert_eq!(
            classify_spin_tripotent(&v, tol()).unwrap(),
            SpinClassification::Minimal { lambda: ONE, a: basis(4, 1), b: basis(4, 2) }
        );
        let ie0 = spin(&[I, ZERO, ZERO, ZERO]);
        match classify_spin_tripotent(&ie0, tol()).unwrap() {
            SpinClassification::Maximal { lambda, a } => {
                assert!((lambda - I).norm() < 1e-15);
                assert_eq!(a, basis(4, 0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn minimal_below_examples() {
        let e0 = spin(&[ONE, ZERO, ZERO, ZERO]);
        let v = minimal_below(&e0, &basis(4, 3), tol()).unwrap();
        assert_eq!(v, spin(&[c(0.5, 0.0), ZERO, ZERO, c(0.0, 0.5)]));
        assert!(leq(&v, &e0, tol()).unwrap());
        assert_eq!(decompose_below(&v, &e0, tol()).unwrap(), basis(4, 3));
        let ie0 = spin(&[I, ZERO, ZERO, ZERO]);
        let w = minimal_below(&ie0, &basis(4, 1), tol()).unwrap();
        let want = [I * 0.5, c(-0.5, 0.0), ZERO, ZERO];
        assert!(w.vector().unwrap().iter().zip(want).all(|(a, b)| (a - b).norm() < 1e-15));
        assert!(minimal_below(&e0, &basis(4, 0), tol()).is_err());
    }

    #[test]
    fn matrix_model_examples() {
        assert_eq!(matrix_rep(&spin(&[ONE, ZERO, ZERO, ZERO])).unwrap(), pauli(0));
        assert_eq!(matrix_rep(&spin(&[ZERO, ZERO, ZERO, ONE])).unwrap(), e_hat(3));
        let p = matrix_rep(&spin(&[c(0.5, 0.0), ZERO, ZERO, c(0.0, 0.5)])).unwrap();
        assert!(close(&p, &CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]), 1e-15));
        for k in 0..4 {
            let mut v = CVector::zeros(4);
            v[k] = ONE;
            let x = Element::from_vector(Factor::Spin { d: 4 }, v).unwrap();
            assert_eq!(matrix_rep(&x).unwrap(), e_hat(k));
            assert_eq!(inverse_rep(&e_hat(k)).unwrap(), x);
        }
        assert!(matrix_rep(&spin(&[ONE, ZERO, ZERO])).is_err());
    }

    #[test]
    fn determinant_examples() {
        let det = |x: &Element| spin_determinant(x).unwrap();
        assert_eq!(det(&spin(&[c(3.0, 0.0), c(4.0, 0.0), ZERO, ZERO])), c(25.0, 0.0));
        assert_eq!(det(&spin(&[ONE, ZERO, ZERO, ZERO])), ONE);
        assert!(det(&spin(&[c(0.5, 0.0), ZERO, ZERO, c(0.0, 0.5)])).norm() < 1e-15);
    }

    #[test]
    fn minkowski_examples() {
        let t = minkowski_embed(SpacetimeVector([1.0, 0.0, 0.0, 0.0]));
        assert_eq!(t, pauli(0));
        let z = minkowski_embed(SpacetimeVector([0.0, 0.0, 0.0, 1.0]));
        assert_eq!(z, pauli(3));
        assert!((z.determinant() + ONE).norm() < 1e-15);
        let null = minkowski_embed(SpacetimeVector([1.0, 1.0, 0.0, 0.0]));
        assert!(null.determinant().norm() < 1e-15);
    }

    #[test]
    fn spin_states_along_axes() {
        let z = matrix_rep(&spin_state([0.0, 0.0, 1.0], tol()).unwrap()).unwrap();
        assert!(close(&z, &CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]), 1e-15));
        let x = matrix_rep(&spin_state([1.0, 0.0, 0.0], tol()).unwrap()).unwrap();
        let h = c(0.5, 0.0);
        assert!(close(&x, &CMatrix::from_row_slice(2, 2, &[h, h, h, h]), 1e-15));
        // ½(σ0 + σ2), the projection onto (1, i)/√2
        let y = matrix_rep(&spin_state([0.0, 1.0, 0.0], tol()).unwrap()).unwrap();
        assert!(close(&y, &CMatrix::from_row_slice(2, 2, &[h, -I * 0.5, I * 0.5, h]), 1e-15));
        assert!(spin_state([1.0, 1.0, 0.0], tol()).is_err());
    }

    #[test]
    fn boost_examples() {
        let chi = 0.7;
        let id = spin(&[ONE, ZERO, ZERO, ZERO]);
        assert_eq!(lorentz_boost(&id, 0.0, Axis::Y).unwrap(), id);
        let b = lorentz_boost(&id, chi, Axis::Z).unwrap();
        let want = CMatrix::from_row_slice(2, 2, &[c(chi.exp(), 0.0), ZERO, ZERO, c((-chi).exp(), 0.0)]);
        assert!(close(&matrix_rep(&b).unwrap(), &want, 1e-13));
        assert!((spin_determinant(&b).unwrap() - ONE).norm() < 1e-13);
        assert!(!is_tripotent(&b, tol()));
        assert!(close(&matrix_rep(&polar_tripotent_part(&b, tol()).unwrap()).unwrap(), &pauli(0), 1e-13));

        let pz = spin_state([0.0, 0.0, 1.0], tol()).unwrap();
        let bp = lorentz_boost(&pz, chi, Axis::Z).unwrap();
        let want = CMatrix::from_row_slice(2, 2, &[c(chi.exp(), 0.0), ZERO, ZERO, ZERO]);
        assert!(close(&matrix_rep(&bp).unwrap(), &want, 1e-13));
        assert!(spin_determinant(&bp).unwrap().norm() < 1e-13);
        assert!(!is_tripotent(&bp, tol()));
        let polar = polar_tripotent_part(&bp, tol()).unwrap();
        assert!((polar.vector().unwrap() - pz.vector().unwrap()).norm() < 1e-13);
        assert!(Axis::from_index(4).is_err());
    }

    #[test]
    fn polar_part_of_a_tripotent_is_itself() {
        let v = spin(&[c(0.5, 0.0), ZERO, ZERO, c(0.0, 0.5)]);
        let p = polar_tripotent_part(&v, tol()).unwrap();
        assert!((p.vector().unwrap() - v.vector().unwrap()).norm() < 1e-10);
        assert!(polar_tripotent_part(&Element::zero(&Factor::Spin { d: 4 }), tol()).is_err());
    }
}
