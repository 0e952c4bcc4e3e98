//! Reconstruction on rectangular factors through rectangular grids, and the
//! classification of automorphisms of square factors.

use alloc::format;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::factors::{norm, random_element_with, Element, Factor};
use crate::grids::{grid_linear_extension, rectangular_grid, verify_rectangular_grid, RectGrid};
use crate::linalg::{c, max_abs, CMatrix, ONE};
use crate::linear_map::{Branch, RealLinearMap};
use crate::tripotent::Tolerance;

use super::oracle::TripotentOracle;
use super::phase::detect_branch;
use super::{single_block_report, Block, Config, ReconstructionReport};

/// `T(X) = U g(X) V` on `rect(n, n)`, with `g` the identity, conjugation,
/// transpose or adjoint. `form` numbers these 1 to 4 in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareForm {
    pub form: u8,
    pub transpose: bool,
    pub antilinear: bool,
    pub u: CMatrix,
    pub v: CMatrix,
    /// `max ||T(X) - U g(X) V|| / max(1, ||X||)` over the check samples.
    pub residual: f64,
}

fn unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut a = CMatrix::zeros(n, n);
    a[(i, j)] = ONE;
    a
}

/// Recovers the form and the unitaries of an automorphism of `rect(n, n)`.
/// `U` and `V` are fixed up to the scalar `(μU, conj(μ)V)` by making the
/// first nonzero entry of `U` positive real.
pub fn classify_square_automorphism(t: &RealLinearMap, tol: Tolerance) -> Result<SquareForm> {
    let n = match (t.domain(), t.target()) {
        (Factor::Rect { m, n }, tgt) if m == n && tgt == t.domain() => *n,
        (d, tg) => return Err(Error::Classification(format!("{d} -> {tg} is not a map on a square factor"))),
    };
    let antilinear = match t.branch() {
        Some(b) => b == Branch::Antilinear,
        None => return Err(Error::Classification("map mixes linear and antilinear parts".into())),
    };
    let f = t.domain().clone();
    let image = |a: CMatrix| -> Result<CMatrix> {
        Ok(t.apply(&Element::from_matrix(f.clone(), a)?)?.matrix().expect("rect image").clone())
    };
    let transpose = if n >= 2 {
        let t11 = image(unit(n, 0, 0))?;
        let t12 = image(unit(n, 0, 1))?;
        max_abs(&(&t11 * t12.adjoint())) > max_abs(&(t11.adjoint() * &t12))
    } else {
        false
    };
    // G(a, b) = T(g^{-1}(E_ab)) = u_a v_b^T
    let g = |a: usize, b: usize| if transpose { image(unit(n, b, a)) } else { image(unit(n, a, b)) };
    let g00 = g(0, 0)?;
    let svd = g00.clone().svd(true, false);
    let mut u0 = svd.u.expect("left vectors requested").column(0).into_owned();
    if let Some(z) = u0.iter().find(|z| z.norm() > 1e-8).copied() {
        u0 *= (z / z.norm()).conj();
    }
    let mut u = CMatrix::zeros(n, n);
    let mut v = CMatrix::zeros(n, n);
    let v0 = u0.adjoint() * &g00;
    let v0_mass = c(v0.norm_squared(), 0.0);
    if v0.norm() <= tol.threshold(1.0) {
        return Err(Error::Classification("image of E_11 vanishes".into()));
    }
    for a in 0..n {
        let col = g(a, 0)? * v0.adjoint() / v0_mass;
        u.set_column(a, &col.column(0));
    }
    let u0_mass = c(u0.norm_squared(), 0.0);
    for b in 0..n {
        let row = u0.adjoint() * g(0, b)? / u0_mass;
        v.set_row(b, &row.row(0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut residual = 0.0_f64;
    for _ in 0..10 {
        let x = random_element_with(&f, &mut rng)?;
        let xm = x.matrix().expect("rect element");
        let mut gx = if transpose { xm.transpose() } else { xm.clone() };
        if antilinear {
            gx = gx.map(|z| z.conj());
        }
        let want = Element::from_matrix(f.clone(), &u * gx * &v)?;
        residual = residual.max(norm(&(&t.apply(&x)? - &want)) / norm(&x).max(1.0));
    }
    let eye = CMatrix::identity(n, n);
    let unitarity = max_abs(&(u.adjoint() * &u - &eye)).max(max_abs(&(&v * v.adjoint() - &eye)));
    if !tol.accepts(residual, 1.0) || !tol.accepts(unitarity, 1.0) {
        return Err(Error::Classification(format!(
            "best fit leaves residual {residual:.3e} and unitarity defect {unitarity:.3e}"
        )));
    }
    let form = 1 + u8::from(antilinear) + 2 * u8::from(transpose);
    Ok(SquareForm { form, transpose, antilinear, u, v, residual })
}

pub(crate) fn rect_block(phi: &TripotentOracle, cfg: &Config) -> Result<Block> {
    let tol = cfg.tol;
    let (m, n) = match phi.domain() {
        Factor::Rect { m, n } if (*m).min(*n) >= 2 => (*m, *n),
        f => return Err(Error::Precondition(format!("rectangular reconstruction needs rank >= 2, got {f}"))),
    };
    match phi.target() {
        Factor::Rect { m: p, n: q } if (*p, *q) == (m, n) || (*p, *q) == (n, m) => {}
        f => {
            return Err(Error::structure(
                "target factor (rectangular factor of matching shape)",
                format!("{f} cannot be the image of {}", phi.domain()),
            ))
        }
    }
    let source = rectangular_grid(m, n)?;
    let images: Vec<Element> = source.cells().iter().map(|e| phi.apply(e)).collect::<Result<_>>()?;
    let image_grid = RectGrid::new(m, n, images)?;
    let report = verify_rectangular_grid(&image_grid, tol);
    if let Some(v) = report.first() {
        let cells: Vec<(usize, usize)> = v.cells.iter().map(|&(i, j)| (i + 1, j + 1)).collect();
        return Err(Error::structure(
            v.axiom.label(),
            format!("image of the matrix-unit grid fails at cells {cells:?} (residual {:.3e})", v.residual),
        ));
    }
    let branch = detect_branch(phi, source.cell(0, 0), tol)?;
    let map = grid_linear_extension(&source, &image_grid, branch, tol)?;
    let form = if m == n { Some(classify_square_automorphism(&map, tol)?) } else { None };
    Ok(Block { lambda0: ONE, branch, map, form })
}

/// Rebuilds `T` from `Φ` on `rect(m, n)` and verifies it on sampled tripotents.
pub fn reconstruct_rectangular(phi: &TripotentOracle, cfg: &Config) -> Result<ReconstructionReport> {
    let block = rect_block(phi, cfg)?;
    single_block_report(phi, block, cfg)
}
