//! Tripotents: Peirce decomposition, order, orthogonality, rank and the
//! collinear, governing, quadrangle and trangle configurations.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::factors::{ensure_same, norm, tp, Data, Element, Factor};
use crate::linalg::{c, matrix_rank, CMatrix, CVector, C64};

/// Distance of a Peirce eigenvalue from `{0, 1/2, 1}` that is still snapped.
pub const PEIRCE_SNAP: f64 = 1e-6;

/// Absolute and relative slack for every predicate: a residual passes when
/// `residual <= abs + rel * max(1, scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-9, rel: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Result<Self> {
        if !(abs > 0.0 && rel > 0.0 && abs.is_finite() && rel.is_finite()) {
            return Err(Error::Precondition(format!(
                "tolerances must be positive and finite (abs {abs}, rel {rel})"
            )));
        }
        Ok(Tolerance { abs, rel })
    }

    pub fn threshold(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale.max(1.0)
    }

    pub fn accepts(&self, residual: f64, scale: f64) -> bool {
        residual <= self.threshold(scale)
    }
}

/// Index of a Peirce subspace: `E_k(e)` is the `k/2` eigenspace of `L(e, e)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Peirce {
    Two,
    One,
    Zero,
}

impl Peirce {
    pub const ALL: [Peirce; 3] = [Peirce::Two, Peirce::One, Peirce::Zero];

    pub fn eigenvalue(self) -> f64 {
        match self {
            Peirce::Two => 1.0,
            Peirce::One => 0.5,
            Peirce::Zero => 0.0,
        }
    }

    fn slot(self) -> usize {
        match self {
            Peirce::Two => 0,
            Peirce::One => 1,
            Peirce::Zero => 2,
        }
    }

    /// The Peirce index `k - l + m` when it lies in `{0, 1, 2}`.
    pub fn combine(k: Peirce, l: Peirce, m: Peirce) -> Option<Peirce> {
        let idx = |p: Peirce| 2 - p.slot() as i32;
        match idx(k) - idx(l) + idx(m) {
            2 => Some(Peirce::Two),
            1 => Some(Peirce::One),
            0 => Some(Peirce::Zero),
            _ => None,
        }
    }
}

pub fn tripotent_residual(e: &Element) -> f64 {
    norm(&(&tp(e, e, e) - e))
}

pub fn is_tripotent(e: &Element, tol: Tolerance) -> bool {
    tol.accepts(tripotent_residual(e), norm(e))
}

pub(crate) fn require_tripotent(e: &Element, tol: Tolerance) -> Result<()> {
    let residual = tripotent_residual(e);
    if tol.accepts(residual, norm(e)) {
        Ok(())
    } else {
        Err(Error::NotTripotent { residual })
    }
}

/// Matrix of the complex-linear operator `x -> {a, b, x}` on coordinates.
pub fn l_operator(a: &Element, b: &Element) -> Result<CMatrix> {
    ensure_same(a, b)?;
    let f = a.factor();
    let d = f.dim();
    let mut out = CMatrix::zeros(d, d);
    for k in 0..d {
        let col = tp(a, b, &Element::basis(f, k)?).coords();
        out.set_column(k, &col);
    }
    Ok(out)
}

/// `A` with `Q(e) x = A conj(x)` on coordinates (the basis is real).
pub fn q_operator(e: &Element) -> Result<CMatrix> {
    let f = e.factor();
    let d = f.dim();
    let mut out = CMatrix::zeros(d, d);
    for k in 0..d {
        let col = tp(e, &Element::basis(f, k)?, e).coords();
        out.set_column(k, &col);
    }
    Ok(out)
}

/// Peirce decomposition of a tripotent.
#[derive(Debug, Clone)]
pub struct PeirceData {
    e: Element,
    bases: [CMatrix; 3],
}

impl PeirceData {
    pub fn tripotent(&self) -> &Element {
        &self.e
    }

    /// `(d2, d1, d0)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.bases[0].ncols(), self.bases[1].ncols(), self.bases[2].ncols())
    }

    /// Orthonormal coordinate basis (as columns) of `E_k(e)`.
    pub fn basis(&self, k: Peirce) -> &CMatrix {
        &self.bases[k.slot()]
    }

    /// `P_k(e) x` via the eigenprojection.
    pub fn project(&self, k: Peirce, x: &Element) -> Result<Element> {
        ensure_same(&self.e, x)?;
        let b = self.basis(k);
        let v: CVector = b * (b.adjoint() * x.coords());
        Element::from_coords(x.factor(), &v)
    }

    /// `P_k(e) x` via the polynomial formulas in `L(e, e)` and `Q(e)`.
    pub fn project_closed(&self, k: Peirce, x: &Element) -> Result<Element> {
        peirce_projection(&self.e, k, x)
    }

    /// Membership residual `||L(e,e) x - (k/2) x||`.
    pub fn membership_residual(&self, k: Peirce, x: &Element) -> Result<f64> {
        membership_residual(&self.e, k, x)
    }
}

/// Closed-form Peirce projections: `P2 = Q(e)^2`, `P1 = 2(L(e,e) - Q(e)^2)`,
/// `P0 = Id - 2 L(e,e) + Q(e)^2`.
pub fn peirce_projection(e: &Element, k: Peirce, x: &Element) -> Result<Element> {
    ensure_same(e, x)?;
    let q2 = tp(e, &tp(e, x, e), e);
    Ok(match k {
        Peirce::Two => q2,
        Peirce::One => (&tp(e, e, x) - &q2) * 2.0,
        Peirce::Zero => &(x - &(tp(e, e, x) * 2.0)) + &q2,
    })
}

pub fn membership_residual(e: &Element, k: Peirce, x: &Element) -> Result<f64> {
    ensure_same(e, x)?;
    Ok(norm(&(&tp(e, e, x) - &(x * k.eigenvalue()))))
}

/// Eigen-decomposition of `L(e, e)` grouped by eigenvalue `1, 1/2, 0`.
pub fn peirce(e: &Element, tol: Tolerance) -> Result<PeirceData> {
    require_tripotent(e, tol)?;
    let l = l_operator(e, e)?;
    let herm = (&l + l.adjoint()) * c(0.5, 0.0);
    let d = herm.nrows();
    let eig = SymmetricEigen::new(herm);
    let mut cols: [Vec<CVector>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for j in 0..d {
        let lambda = eig.eigenvalues[j];
        let k = Peirce::ALL
            .into_iter()
            .find(|k| (lambda - k.eigenvalue()).abs() <= PEIRCE_SNAP)
            .ok_or(Error::PeirceDegenerate { eigenvalue: lambda })?;
        cols[k.slot()].push(eig.eigenvectors.column(j).into_owned());
    }
    let to_matrix = |v: &Vec<CVector>| {
        if v.is_empty() {
            CMatrix::zeros(d, 0)
        } else {
            CMatrix::from_columns(v)
        }
    };
    Ok(PeirceData { e: e.clone(), bases: [to_matrix(&cols[0]), to_matrix(&cols[1]), to_matrix(&cols[2])] })
}

fn pair_scale(a: &Element, b: &Element) -> f64 {
    norm(a).max(norm(b))
}

pub(crate) fn orthogonality_residual(e: &Element, u: &Element) -> f64 {
    norm(&tp(e, e, u)).max(norm(&tp(u, u, e)))
}

/// `e ⊥ u`: both `{e,e,u}` and `{u,u,e}` vanish.
pub fn is_orthogonal(e: &Element, u: &Element, tol: Tolerance) -> Result<bool> {
    ensure_same(e, u)?;
    require_tripotent(e, tol)?;
    require_tripotent(u, tol)?;
    Ok(tol.accepts(orthogonality_residual(e, u), pair_scale(e, u)))
}

/// `e <= u`: `u - e` is a tripotent orthogonal to `e`.
pub fn leq(e: &Element, u: &Element, tol: Tolerance) -> Result<bool> {
    ensure_same(e, u)?;
    require_tripotent(e, tol)?;
    require_tripotent(u, tol)?;
    let d = u - e;
    Ok(is_tripotent(&d, tol) && tol.accepts(orthogonality_residual(&d, e), pair_scale(&d, e)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TripotentKind {
    Zero,
    Minimal,
    Complete,
    Unitary,
    Intermediate,
}

/// Classification of a tripotent. `kind` reports the most specific class
/// (unitary before minimal before complete); the flags are independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub kind: TripotentKind,
    pub rank: usize,
    pub minimal: bool,
    pub complete: bool,
    pub unitary: bool,
    pub dims: (usize, usize, usize),
}

pub fn classify(e: &Element, tol: Tolerance) -> Result<Classification> {
    let p = peirce(e, tol)?;
    let dims = p.dims();
    let dim = e.factor().dim();
    let rank = rank_of(e, tol);
    let zero = rank == 0;
    let minimal = dims.0 == 1;
    let complete = dims.2 == 0;
    let unitary = dims.0 == dim;
    let kind = if zero {
        TripotentKind::Zero
    } else if unitary {
        TripotentKind::Unitary
    } else if minimal {
        TripotentKind::Minimal
    } else if complete {
        TripotentKind::Complete
    } else {
        TripotentKind::Intermediate
    };
    Ok(Classification { kind, rank, minimal, complete, unitary, dims })
}

/// Rank of a tripotent: unit singular values for matrix kinds (halved for
/// skew, whose minimal tripotents have matrix rank two), and 0/1/2 for spin.
fn rank_of(e: &Element, tol: Tolerance) -> usize {
    match (e.factor(), e.data()) {
        (Factor::Skew { .. }, Data::Matrix(m)) => matrix_rank(m, tol.threshold(1.0)) / 2,
        (_, Data::Matrix(m)) => matrix_rank(m, tol.threshold(1.0)),
        (_, Data::Vector(v)) => {
            if v.norm() <= tol.threshold(1.0) {
                0
            } else if crate::factors::spin_bilinear(v, v).norm() > 0.5 {
                2
            } else {
                1
            }
        }
        (_, Data::Sum(parts)) => parts.iter().map(|p| rank_of(p, tol)).sum(),
    }
}

fn in_peirce(e: &Element, k: Peirce, x: &Element, tol: Tolerance) -> Result<bool> {
    Ok(tol.accepts(membership_residual(e, k, x)?, pair_scale(e, x)))
}

/// `u ⊤ v`: `u ∈ E_1(v)` and `v ∈ E_1(u)`.
pub fn is_collinear(u: &Element, v: &Element, tol: Tolerance) -> Result<bool> {
    ensure_same(u, v)?;
    require_tripotent(u, tol)?;
    require_tripotent(v, tol)?;
    Ok(in_peirce(v, Peirce::One, u, tol)? && in_peirce(u, Peirce::One, v, tol)?)
}

/// `u ⊢ v`: `v ∈ E_2(u)` and `u ∈ E_1(v)`.
pub fn governs(u: &Element, v: &Element, tol: Tolerance) -> Result<bool> {
    ensure_same(u, v)?;
    require_tripotent(u, tol)?;
    require_tripotent(v, tol)?;
    Ok(in_peirce(u, Peirce::Two, v, tol)? && in_peirce(v, Peirce::One, u, tol)?)
}

/// `u1 ⊥ u3`, `u2 ⊥ u4`, `u1 ⊤ u2 ⊤ u3 ⊤ u4 ⊤ u1` and `u4 = 2{u1, u2, u3}`.
pub fn is_quadrangle(
    u1: &Element,
    u2: &Element,
    u3: &Element,
    u4: &Element,
    tol: Tolerance,
) -> Result<bool> {
    let ok = is_orthogonal(u1, u3, tol)?
        && is_orthogonal(u2, u4, tol)?
        && is_collinear(u1, u2, tol)?
        && is_collinear(u2, u3, tol)?
        && is_collinear(u3, u4, tol)?
        && is_collinear(u4, u1, tol)?;
    if !ok {
        return Ok(false);
    }
    let r = norm(&(u4 - &(tp(u1, u2, u3) * 2.0)));
    Ok(tol.accepts(r, norm(u4)))
}

/// `v ⊥ w`, `u ⊢ v`, `u ⊢ w` and `v = Q(u) w`.
pub fn is_trangle(v: &Element, u: &Element, w: &Element, tol: Tolerance) -> Result<bool> {
    let ok = is_orthogonal(v, w, tol)? && governs(u, v, tol)? && governs(u, w, tol)?;
    if !ok {
        return Ok(false);
    }
    let r = norm(&(v - &tp(u, w, u)));
    Ok(tol.accepts(r, norm(v)))
}

/// The unimodular `γ` with `γ v <= u`, if any: `P_2(v) u = γ v` and `P_1(v) u = 0`.
pub fn scalar_multiple_below(u: &Element, v: &Element, tol: Tolerance) -> Result<Option<C64>> {
    ensure_same(u, v)?;
    require_tripotent(u, tol)?;
    require_tripotent(v, tol)?;
    if norm(u) <= tol.threshold(1.0) || norm(v) <= tol.threshold(1.0) {
        return Err(Error::Precondition("scalar_multiple_below needs nonzero tripotents".into()));
    }
    let scale = pair_scale(u, v);
    let p1 = peirce_projection(v, Peirce::One, u)?;
    if !tol.accepts(norm(&p1), scale) {
        return Ok(None);
    }
    let p2 = peirce_projection(v, Peirce::Two, u)?;
    let vc = v.coords();
    let gamma = vc.dotc(&p2.coords()) / vc.norm_squared();
    if !tol.accepts(norm(&(&p2 - &v.scale(gamma))), scale) {
        return Ok(None);
    }
    if !tol.accepts((gamma.norm() - 1.0).abs(), 1.0) {
        return Ok(None);
    }
    Ok(Some(gamma / gamma.norm()))
}

/// Sum of pairwise orthogonal tripotents.
pub fn orthogonal_sum(items: &[Element], tol: Tolerance) -> Result<Element> {
    let Some(first) = items.first() else {
        return Err(Error::Precondition("orthogonal_sum of an empty family".into()));
    };
    for (i, a) in items.iter().enumerate() {
        for (j, b) in items.iter().enumerate().skip(i + 1) {
            if !is_orthogonal(a, b, tol)? {
                return Err(Error::Precondition(format!("entries {i} and {j} are not orthogonal")));
            }
        }
    }
    let mut total = Element::zero(first.factor());
    for x in items {
        total = &total + x;
    }
    require_tripotent(&total, tol).map_err(|_| {
        Error::Precondition("sum of the family is not a tripotent".into())
    })?;
    Ok(total)
}
