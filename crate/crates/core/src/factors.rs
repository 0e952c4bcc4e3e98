//! Cartan factors of types 1 to 4, their finite direct sums, and the triple
//! product, quadratic map and norm on each.
//!
//! Matrix kinds store a dense complex matrix: `rect(m, n)` is every `m x n`
//! matrix, `skew(n)` the antisymmetric and `herm(n)` the symmetric `n x n`
//! matrices (the type 2 and type 3 factors, with the transpose as the
//! involution). The spin factor `spin(d)` is `C^d` with entrywise conjugation
//! and inner product `<x, y> = sum x_i conj(y_i)`.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;


use crate::error::{Error, Result};
use crate::linalg::{self, c, max_abs, op_norm, CMatrix, CVector, C64, ZERO};

/// Symmetry defect repaired silently at construction, relative to the entries.
const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Which Cartan factor an element lives in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Factor {
    /// `B(C^n, C^m)`: all `m x n` complex matrices.
    Rect { m: usize, n: usize },
    /// Antisymmetric `n x n` matrices.
    Skew { n: usize },
    /// Symmetric `n x n` matrices.
    Herm { n: usize },
    /// The spin factor `C^d`.
    Spin { d: usize },
    /// A finite direct sum. Always flat.
    Sum(Vec<Factor>),
}

impl Factor {
    pub fn rect(m: usize, n: usize) -> Result<Self> {
        Factor::Rect { m, n }.validated()
    }

    pub fn skew(n: usize) -> Result<Self> {
        Factor::Skew { n }.validated()
    }

    pub fn herm(n: usize) -> Result<Self> {
        Factor::Herm { n }.validated()
    }

    pub fn spin(d: usize) -> Result<Self> {
        Factor::Spin { d }.validated()
    }

    /// Direct sum of `components`; nested sums are flattened.
    pub fn sum(components: Vec<Factor>) -> Result<Self> {
        let mut flat = Vec::with_capacity(components.len());
        for f in components {
            match f {
                Factor::Sum(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        Factor::Sum(flat).validated()
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidFactor(format!("{self}: {msg}")));
        match self {
            Factor::Rect { m, n } if *m == 0 || *n == 0 => bad("dimensions must be positive"),
            Factor::Skew { n } if *n < 2 => bad("skew factors need n >= 2"),
            Factor::Herm { n } if *n == 0 => bad("dimension must be positive"),
            Factor::Spin { d } if *d < 3 => bad("spin factors need dimension >= 3"),
            Factor::Sum(parts) => {
                if parts.is_empty() {
                    return bad("empty direct sum");
                }
                for p in parts {
                    if matches!(p, Factor::Sum(_)) {
                        return bad("nested direct sum");
                    }
                    p.validate()?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Complex dimension.
    pub fn dim(&self) -> usize {
        match self {
            Factor::Rect { m, n } => m * n,
            Factor::Skew { n } => n * (n - 1) / 2,
            Factor::Herm { n } => n * (n + 1) / 2,
            Factor::Spin { d } => *d,
            Factor::Sum(parts) => parts.iter().map(Factor::dim).sum(),
        }
    }

    /// Maximal cardinality of an orthogonal family of nonzero tripotents.
    pub fn rank(&self) -> usize {
        match self {
            Factor::Rect { m, n } => (*m).min(*n),
            Factor::Skew { n } => n / 2,
            Factor::Herm { n } => *n,
            Factor::Spin { .. } => 2,
            Factor::Sum(parts) => parts.iter().map(Factor::rank).sum(),
        }
    }

    pub fn has_unitary(&self) -> bool {
        match self {
            Factor::Rect { m, n } => m == n,
            Factor::Skew { n } => n % 2 == 0,
            Factor::Herm { .. } | Factor::Spin { .. } => true,
            Factor::Sum(parts) => parts.iter().all(Factor::has_unitary),
        }
    }

    pub fn is_sum(&self) -> bool {
        matches!(self, Factor::Sum(_))
    }

    /// The summands; a single factor is its own only component.
    pub fn components(&self) -> &[Factor] {
        match self {
            Factor::Sum(parts) => parts,
            other => core::slice::from_ref(other),
        }
    }

    /// Shape of the stored matrix for matrix kinds.
    pub fn matrix_shape(&self) -> Option<(usize, usize)> {
        match self {
            Factor::Rect { m, n } => Some((*m, *n)),
            Factor::Skew { n } | Factor::Herm { n } => Some((*n, *n)),
            _ => None,
        }
    }

    /// Every component is a spin factor or a rectangular factor of rank >= 2.
    pub fn supports_reconstruction(&self) -> bool {
        self.components().iter().all(|f| match f {
            Factor::Spin { .. } => true,
            Factor::Rect { m, n } => (*m).min(*n) >= 2,
            _ => false,
        })
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Rect { m, n } => write!(f, "rect({m},{n})"),
            Factor::Skew { n } => write!(f, "skew({n})"),
            Factor::Herm { n } => write!(f, "herm({n})"),
            Factor::Spin { d } => write!(f, "spin({d})"),
            Factor::Sum(parts) => {
                write!(f, "sum(")?;
                for (k, p) in parts.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Storage behind an [`Element`].
#[derive(Debug, Clone, PartialEq)]
pub enum Data {
    Matrix(CMatrix),
    Vector(CVector),
    Sum(Vec<Element>),
}

/// A point of a factor, tagged with the factor it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    factor: Factor,
    data: Data,
}

impl Element {
    /// Wraps a matrix. Skew and herm inputs are checked for (anti)symmetry and
    /// symmetrized when the defect is within tolerance.
    pub fn from_matrix(factor: Factor, m: CMatrix) -> Result<Self> {
        factor.validate()?;
        let Some(shape) = factor.matrix_shape() else {
            return Err(Error::InvalidElement(format!("{factor} does not hold matrices")));
        };
        if m.shape() != shape {
            return Err(Error::InvalidElement(format!(
                "{factor} expects a {}x{} matrix, got {}x{}",
                shape.0,
                shape.1,
                m.nrows(),
                m.ncols()
            )));
        }
        let sign = match factor {
            Factor::Skew { .. } => -1.0,
            Factor::Herm { .. } => 1.0,
            _ => return Ok(Element { factor, data: Data::Matrix(m) }),
        };
        let t = m.transpose();
        let defect = max_abs(&(&m - &t * c(sign, 0.0)));
        if defect > SYMMETRY_TOLERANCE * max_abs(&m).max(1.0) {
            let what = if sign < 0.0 { "antisymmetric" } else { "symmetric" };
            return Err(Error::InvalidElement(format!(
                "{factor} expects a {what} matrix (defect {defect:.3e})"
            )));
        }
        let repaired = (&m + &t * c(sign, 0.0)) * c(0.5, 0.0);
        Ok(Element { factor, data: Data::Matrix(repaired) })
    }

    pub fn from_vector(factor: Factor, v: CVector) -> Result<Self> {
        factor.validate()?;
        match factor {
            Factor::Spin { d } if v.len() == d => Ok(Element { factor, data: Data::Vector(v) }),
            Factor::Spin { d } => Err(Error::InvalidElement(format!(
                "spin({d}) expects {d} coordinates, got {}",
                v.len()
            ))),
            _ => Err(Error::InvalidElement(format!("{factor} does not hold vectors"))),
        }
    }

    pub fn from_components(factor: Factor, parts: Vec<Element>) -> Result<Self> {
        factor.validate()?;
        let Factor::Sum(fs) = &factor else {
            return Err(Error::InvalidElement(format!("{factor} is not a direct sum")));
        };
        if fs.len() != parts.len() {
            return Err(Error::InvalidElement(format!(
                "{factor} has {} components, got {}",
                fs.len(),
                parts.len()
            )));
        }
        for (f, p) in fs.iter().zip(&parts) {
            if f != p.factor() {
                return Err(Error::FactorMismatch(format!("component {} in slot {f}", p.factor())));
            }
        }
        Ok(Element { factor, data: Data::Sum(parts) })
    }

    pub fn zero(factor: &Factor) -> Self {
        let data = match factor {
            Factor::Spin { d } => Data::Vector(CVector::zeros(*d)),
            Factor::Sum(parts) => Data::Sum(parts.iter().map(Element::zero).collect()),
            f => {
                let (r, cl) = f.matrix_shape().expect("matrix kind");
                Data::Matrix(CMatrix::zeros(r, cl))
            }
        };
        Element { factor: factor.clone(), data }
    }

    /// Embeds `part` as component `index` of the sum `factor`, zero elsewhere.
    pub fn embed(factor: &Factor, index: usize, part: Element) -> Result<Self> {
        let Factor::Sum(fs) = factor else {
            return Err(Error::InvalidElement(format!("{factor} is not a direct sum")));
        };
        if index >= fs.len() || fs[index] != part.factor {
            return Err(Error::FactorMismatch(format!("{} into slot {index} of {factor}", part.factor)));
        }
        let mut parts: Vec<Element> = fs.iter().map(Element::zero).collect();
        parts[index] = part;
        Ok(Element { factor: factor.clone(), data: Data::Sum(parts) })
    }

    pub fn factor(&self) -> &Factor {
        &self.factor
    }

    pub fn data(&self) -> &Data {
        &self.data
    }

    pub fn matrix(&self) -> Option<&CMatrix> {
        match &self.data {
            Data::Matrix(m) => Some(m),
            _ => None,
        }
    }

    pub fn vector(&self) -> Option<&CVector> {
        match &self.data {
            Data::Vector(v) => Some(v),
            _ => None,
        }
    }

    /// Component elements; a non-sum element is its own only component.
    pub fn components(&self) -> &[Element] {
        match &self.data {
            Data::Sum(parts) => parts,
            _ => core::slice::from_ref(self),
        }
    }

    /// Coordinates in the orthonormal basis of the factor (with respect to
    /// the trace inner product for matrix kinds). Rect is row-major; skew and
    /// herm use the upper triangle scaled by `sqrt(2)` off the diagonal.
    pub fn coords(&self) -> CVector {
        let sqrt2 = core::f64::consts::SQRT_2;
        match (&self.factor, &self.data) {
            (Factor::Rect { m, n }, Data::Matrix(a)) => {
                CVector::from_fn(m * n, |k, _| a[(k / n, k % n)])
            }
            (Factor::Skew { n }, Data::Matrix(a)) => {
                let mut out = Vec::with_capacity(self.factor.dim());
                for i in 0..*n {
                    for j in i + 1..*n {
                        out.push(a[(i, j)] * sqrt2);
                    }
                }
                CVector::from_vec(out)
            }
            (Factor::Herm { n }, Data::Matrix(a)) => {
                let mut out = Vec::with_capacity(self.factor.dim());
                for i in 0..*n {
                    out.push(a[(i, i)]);
                    for j in i + 1..*n {
                        out.push(a[(i, j)] * sqrt2);
                    }
                }
                CVector::from_vec(out)
            }
            (_, Data::Vector(v)) => v.clone(),
            (_, Data::Sum(parts)) => {
                let mut out = Vec::with_capacity(self.factor.dim());
                for p in parts {
                    out.extend(p.coords().iter().copied());
                }
                CVector::from_vec(out)
            }
            _ => unreachable!("element data always matches its factor"),
        }
    }

    /// Inverse of [`Element::coords`].
    pub fn from_coords(factor: &Factor, v: &CVector) -> Result<Self> {
        factor.validate()?;
        if v.len() != factor.dim() {
            return Err(Error::InvalidElement(format!(
                "{factor} has dimension {}, got {} coordinates",
                factor.dim(),
                v.len()
            )));
        }
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let data = match factor {
            Factor::Rect { m, n } => Data::Matrix(CMatrix::from_fn(*m, *n, |i, j| v[i * n + j])),
            Factor::Skew { n } => {
                let mut a = CMatrix::zeros(*n, *n);
                let mut k = 0;
                for i in 0..*n {
                    for j in i + 1..*n {
                        a[(i, j)] = v[k] * h;
                        a[(j, i)] = -v[k] * h;
                        k += 1;
                    }
                }
                Data::Matrix(a)
            }
            Factor::Herm { n } => {
                let mut a = CMatrix::zeros(*n, *n);
                let mut k = 0;
                for i in 0..*n {
                    a[(i, i)] = v[k];
                    k += 1;
                    for j in i + 1..*n {
                        a[(i, j)] = v[k] * h;
                        a[(j, i)] = v[k] * h;
                        k += 1;
                    }
                }
                Data::Matrix(a)
            }
            Factor::Spin { .. } => Data::Vector(v.clone()),
            Factor::Sum(parts) => {
                let mut offset = 0;
                let mut out = Vec::with_capacity(parts.len());
                for p in parts {
                    let d = p.dim();
                    out.push(Element::from_coords(p, &v.rows(offset, d).into_owned())?);
                    offset += d;
                }
                Data::Sum(out)
            }
        };
        Ok(Element { factor: factor.clone(), data })
    }

    /// The `k`-th orthonormal basis element.
    pub fn basis(factor: &Factor, k: usize) -> Result<Self> {
        let mut v = CVector::zeros(factor.dim());
        if k >= v.len() {
            return Err(Error::InvalidElement(format!("{factor} has no basis element {k}")));
        }
        v[k] = linalg::ONE;
        Element::from_coords(factor, &v)
    }

    /// Entrywise conjugation; on spin factors this is the defining conjugation.
    pub fn conj(&self) -> Self {
        self.map_entries(|z| z.conj())
    }

    fn map_entries(&self, f: impl Fn(C64) -> C64 + Copy) -> Self {
        let data = match &self.data {
            Data::Matrix(m) => Data::Matrix(m.map(f)),
            Data::Vector(v) => Data::Vector(v.map(f)),
            Data::Sum(parts) => Data::Sum(parts.iter().map(|p| p.map_entries(f)).collect()),
        };
        Element { factor: self.factor.clone(), data }
    }

    fn zip_entries(&self, other: &Element, f: impl Fn(C64, C64) -> C64 + Copy) -> Self {
        assert_eq!(self.factor, other.factor, "factor mismatch in element arithmetic");
        let data = match (&self.data, &other.data) {
            (Data::Matrix(a), Data::Matrix(b)) => Data::Matrix(a.zip_map(b, f)),
            (Data::Vector(a), Data::Vector(b)) => Data::Vector(a.zip_map(b, f)),
            (Data::Sum(a), Data::Sum(b)) => {
                Data::Sum(a.iter().zip(b).map(|(x, y)| x.zip_entries(y, f)).collect())
            }
            _ => unreachable!("equal factors imply equal data kinds"),
        };
        Element { factor: self.factor.clone(), data }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map_entries(|z| z * s)
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            Data::Matrix(m) => m.iter().all(|z| *z == ZERO),
            Data::Vector(v) => v.iter().all(|z| *z == ZERO),
            Data::Sum(parts) => parts.iter().all(Element::is_zero),
        }
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.zip_entries(rhs, |a, b| a + b)
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.zip_entries(rhs, |a, b| a - b)
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.map_entries(|z| -z)
    }
}

impl Mul<C64> for &Element {
    type Output = Element;
    fn mul(self, rhs: C64) -> Element {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Element {
    type Output = Element;
    fn mul(self, rhs: f64) -> Element {
        self.scale(c(rhs, 0.0))
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Element {
            type Output = Element;
            fn $m(self, rhs: Element) -> Element { (&self).$m(&rhs) }
        }
        impl $tr<&Element> for Element {
            type Output = Element;
            fn $m(self, rhs: &Element) -> Element { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub);

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

impl Mul<C64> for Element {
    type Output = Element;
    fn mul(self, rhs: C64) -> Element {
        self.scale(rhs)
    }
}

impl Mul<f64> for Element {
    type Output = Element;
    fn mul(self, rhs: f64) -> Element {
        (&self) * rhs
    }
}

pub(crate) fn ensure_same(a: &Element, b: &Element) -> Result<()> {
    if a.factor == b.factor {
        Ok(())
    } else {
        Err(Error::FactorMismatch(format!("{} vs {}", a.factor, b.factor)))
    }
}

/// Spin inner product `<x, y> = sum x_i conj(y_i)`.
pub fn spin_inner(x: &CVector, y: &CVector) -> C64 {
    x.iter().zip(y.iter()).fold(ZERO, |acc, (a, b)| acc + a * b.conj())
}

/// Bilinear pairing `<x, conj(z)> = sum x_i z_i`.
pub fn spin_bilinear(x: &CVector, z: &CVector) -> C64 {
    x.iter().zip(z.iter()).fold(ZERO, |acc, (a, b)| acc + a * b)
}

/// Triple product without the factor check. Callers guarantee agreement.
pub(crate) fn tp(x: &Element, y: &Element, z: &Element) -> Element {
    let data = match (&x.data, &y.data, &z.data) {
        (Data::Matrix(a), Data::Matrix(b), Data::Matrix(cm)) => {
            let bs = b.adjoint();
            let left = a * &bs * cm;
            let right = cm * &bs * a;
            Data::Matrix((left + right) * c(0.5, 0.0))
        }
        (Data::Vector(a), Data::Vector(b), Data::Vector(cv)) => {
            let xy = spin_inner(a, b);
            let zy = spin_inner(cv, b);
            let xz = spin_bilinear(a, cv);
            let ybar = b.map(|w| w.conj());
            Data::Vector(cv * xy + a * zy - ybar * xz)
        }
        (Data::Sum(a), Data::Sum(b), Data::Sum(cs)) => Data::Sum(
            a.iter().zip(b).zip(cs).map(|((p, q), r)| tp(p, q, r)).collect(),
        ),
        _ => panic!("factor mismatch in triple product"),
    };
    Element { factor: x.factor.clone(), data }
}

/// `{x, y, z}`: `(x y* z + z y* x) / 2` on matrix kinds,
/// `<x,y> z + <z,y> x - <x, conj z> conj y` on spin factors, component-wise on sums.
pub fn triple_product(x: &Element, y: &Element, z: &Element) -> Result<Element> {
    ensure_same(x, y)?;
    ensure_same(x, z)?;
    Ok(tp(x, y, z))
}

/// `Q(u) x = {u, x, u}`.
pub fn quadratic_map(u: &Element, x: &Element) -> Result<Element> {
    triple_product(u, x, u)
}

/// The JB*-triple norm: operator norm on matrix kinds, the two-term spin norm
/// on spin factors, and the maximum over components on sums.
pub fn norm(x: &Element) -> f64 {
    match &x.data {
        Data::Matrix(m) => op_norm(m),
        Data::Vector(v) => {
            let s = spin_inner(v, v).re;
            let t = spin_bilinear(v, v).norm();
            let disc = (s * s - t * t).max(0.0);
            libm::sqrt((s + libm::sqrt(disc)).max(0.0))
        }
        Data::Sum(parts) => parts.iter().map(norm).fold(0.0, f64::max),
    }
}

/// Coordinate inner product, conjugate-linear in the second slot.
pub fn inner(x: &Element, y: &Element) -> Result<C64> {
    ensure_same(x, y)?;
    Ok(x.coords().dotc(&y.coords()).conj())
}

/// Euclidean norm of the coordinate vector (Frobenius norm on matrix kinds).
pub fn coord_norm(x: &Element) -> f64 {
    x.coords().norm()
}

/// Deterministic Gaussian element: i.i.d. standard complex Gaussian entries,
/// (anti)symmetrized for skew and herm factors.
pub fn random_element(factor: &Factor, seed: u64) -> Result<Element> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_element_with(factor, &mut rng)
}

pub fn random_element_with<R: Rng + ?Sized>(factor: &Factor, rng: &mut R) -> Result<Element> {
    factor.validate()?;
    Ok(gaussian_element(factor, rng))
}

fn gaussian_element<R: Rng + ?Sized>(factor: &Factor, rng: &mut R) -> Element {
    let half = c(0.5, 0.0);
    let data = match factor {
        Factor::Rect { m, n } => Data::Matrix(linalg::gaussian_matrix(*m, *n, rng)),
        Factor::Skew { n } => {
            let g = linalg::gaussian_matrix(*n, *n, rng);
            Data::Matrix((&g - g.transpose()) * half)
        }
        Factor::Herm { n } => {
            let g = linalg::gaussian_matrix(*n, *n, rng);
            Data::Matrix((&g + g.transpose()) * half)
        }
        Factor::Spin { d } => Data::Vector(CVector::from_fn(*d, |_, _| linalg::gaussian(rng))),
        Factor::Sum(parts) => Data::Sum(parts.iter().map(|p| gaussian_element(p, rng)).collect()),
    };
    Element { factor: factor.clone(), data }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn unit(m: usize, n: usize, i: usize, j: usize) -> Element {
        let mut a = CMatrix::zeros(m, n);
        a[(i, j)] = linalg::ONE;
        Element::from_matrix(Factor::Rect { m, n }, a).unwrap()
    }

    fn spin_vec(coords: &[C64]) -> Element {
        Element::from_vector(Factor::Spin { d: coords.len() }, CVector::from_row_slice(coords))
            .unwrap()
    }

    #[test]
    fn projection_is_a_fixed_point() {
        let e11 = unit(2, 2, 0, 0);
        assert_eq!(triple_product(&e11, &e11, &e11).unwrap(), e11);
    }

    #[test]
    fn mixed_matrix_unit_product() {
        let e11 = unit(2, 2, 0, 0);
        let e12 = unit(2, 2, 0, 1);
        let got = triple_product(&e11, &e11, &e12).unwrap();
        assert_eq!(got, e12.scale(c(0.5, 0.0)));
    }

    #[test]
    fn real_unit_spin_vector_is_fixed() {
        let e0 = spin_vec(&[linalg::ONE, ZERO, ZERO, ZERO]);
        assert_eq!(triple_product(&e0, &e0, &e0).unwrap(), e0);
        assert_eq!(quadratic_map(&e0, &e0).unwrap(), e0);
    }

    #[test]
    fn quadratic_map_examples() {
        let u = &unit(2, 2, 0, 1) + &unit(2, 2, 1, 0);
        assert_eq!(quadratic_map(&u, &unit(2, 2, 1, 1)).unwrap(), unit(2, 2, 0, 0));
        let zero = Element::zero(&Factor::Rect { m: 2, n: 2 });
        let x = random_element(&Factor::Rect { m: 2, n: 2 }, 4).unwrap();
        assert!(quadratic_map(&zero, &x).unwrap().is_zero());
    }

    #[test]
    fn norms() {
        let e0 = spin_vec(&[linalg::ONE, ZERO, ZERO, ZERO]);
        assert!((norm(&e0) - 1.0).abs() < 1e-15);
        let v = spin_vec(&[ZERO, c(0.5, 0.0), c(0.0, 0.5), ZERO]);
        assert!((norm(&v) - 1.0).abs() < 1e-15);
        let mut d = CMatrix::zeros(2, 2);
        d[(0, 0)] = c(3.0, 0.0);
        d[(1, 1)] = c(1.0, 0.0);
        let x = Element::from_matrix(Factor::Rect { m: 2, n: 2 }, d).unwrap();
        assert!((norm(&x) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn random_elements_are_deterministic_and_shaped() {
        let f = Factor::rect(2, 2).unwrap();
        assert_eq!(random_element(&f, 1).unwrap(), random_element(&f, 1).unwrap());
        let s = random_element(&Factor::skew(4).unwrap(), 7).unwrap();
        let m = s.matrix().unwrap();
        assert!(max_abs(&(m + m.transpose())) <= 1e-15);
        let v = random_element(&Factor::spin(3).unwrap(), 3).unwrap();
        assert_eq!(v.vector().unwrap().len(), 3);
    }

    #[test]
    fn mismatched_factors_are_rejected() {
        let a = unit(2, 2, 0, 0);
        let b = unit(2, 3, 0, 0);
        assert!(matches!(triple_product(&a, &a, &b), Err(Error::FactorMismatch(_))));
    }

    #[test]
    fn construction_checks_shape_and_symmetry() {
        let f = Factor::skew(3).unwrap();
        let mut a = CMatrix::zeros(3, 3);
        a[(0, 1)] = linalg::ONE;
        assert!(Element::from_matrix(f.clone(), a.clone()).is_err());
        a[(1, 0)] = c(-1.0 - 1e-13, 0.0);
        let e = Element::from_matrix(f, a).unwrap();
        let m = e.matrix().unwrap();
        assert_eq!(m[(0, 1)], -m[(1, 0)]);
        assert!(Element::from_matrix(Factor::Rect { m: 2, n: 2 }, CMatrix::zeros(2, 3)).is_err());
        assert!(Factor::spin(2).is_err());
        assert!(Factor::skew(1).is_err());
    }

    #[test]
    fn sums_are_flattened_and_coordinates_round_trip() {
        let inner = Factor::sum(vec![Factor::spin(3).unwrap(), Factor::herm(2).unwrap()]).unwrap();
        let f = Factor::sum(vec![inner, Factor::skew(4).unwrap()]).unwrap();
        assert_eq!(f.components().len(), 3);
        assert_eq!(f.dim(), 3 + 3 + 6);
        let x = random_element(&f, 9).unwrap();
        let back = Element::from_coords(&f, &x.coords()).unwrap();
        assert!(coord_norm(&(&back - &x)) < 1e-14);
        // the coordinate norm is the Frobenius norm
        let h = random_element(&Factor::herm(3).unwrap(), 2).unwrap();
        assert!((coord_norm(&h) - h.matrix().unwrap().norm()).abs() < 1e-12);
    }

    #[test]
    fn factor_rank_and_unitary() {
        assert_eq!(Factor::skew(5).unwrap().rank(), 2);
        assert!(!Factor::skew(5).unwrap().has_unitary());
        assert!(Factor::spin(4).unwrap().has_unitary());
        assert!(!Factor::rect(2, 3).unwrap().has_unitary());
    }
}
