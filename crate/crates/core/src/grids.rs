//! Rectangular grids of minimal tripotents and the linear maps they induce.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::factors::{norm, tp, Element, Factor};
use crate::linalg::{CMatrix, ONE};
use crate::linear_map::{Branch, RealLinearMap};
use crate::tripotent::{membership_residual, orthogonality_residual, peirce, tripotent_residual, Peirce, Tolerance};

/// Grids with at most this many cells get every ordered triple checked for
/// axiom (iii); larger grids are checked on a 3x3 window.
pub const FULL_VANISHING_CELLS: usize = 25;

/// An `m x n` family of tripotents indexed by `(row, column)`, zero-based.
#[derive(Debug, Clone, PartialEq)]
pub struct RectGrid {
    m: usize,
    n: usize,
    cells: Vec<Element>,
}

impl RectGrid {
    /// `cells` in row-major order, all in one factor.
    pub fn new(m: usize, n: usize, cells: Vec<Element>) -> Result<Self> {
        if m == 0 || n == 0 || cells.len() != m * n {
            return Err(Error::Precondition(format!("a {m}x{n} grid needs {} cells, got {}", m * n, cells.len())));
        }
        if let Some(bad) = cells.iter().find(|c| c.factor() != cells[0].factor()) {
            return Err(Error::FactorMismatch(format!("grid mixes {} and {}", cells[0].factor(), bad.factor())));
        }
        Ok(RectGrid { m, n, cells })
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn cell(&self, i: usize, j: usize) -> &Element {
        &self.cells[i * self.n + j]
    }

    pub fn cells(&self) -> &[Element] {
        &self.cells
    }

    pub fn factor(&self) -> &Factor {
        self.cells[0].factor()
    }

    pub fn index(&self, k: usize) -> (usize, usize) {
        (k / self.n, k % self.n)
    }

    /// Same indexing, new cells.
    pub fn with_cells(&self, cells: Vec<Element>) -> Result<Self> {
        RectGrid::new(self.m, self.n, cells)
    }
}

/// The matrix units `E_ij` of `rect(m, n)`.
pub fn rectangular_grid(m: usize, n: usize) -> Result<RectGrid> {
    let f = Factor::rect(m, n)?;
    let mut cells = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            let mut a = CMatrix::zeros(m, n);
            a[(i, j)] = ONE;
            cells.push(Element::from_matrix(f.clone(), a)?);
        }
    }
    RectGrid::new(m, n, cells)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GridAxiom {
    /// Every cell is a minimal tripotent.
    Minimality,
    /// Collinear when sharing a row or column, orthogonal otherwise.
    Collinearity,
    /// `u_ik = 2{u_jk, u_jl, u_il}` for `j != i`, `k != l`.
    Quadrangle,
    /// Triple products outside the grid patterns vanish.
    Vanishing,
}

impl GridAxiom {
    pub fn label(self) -> &'static str {
        match self {
            GridAxiom::Minimality => "grid minimality",
            GridAxiom::Collinearity => "grid axiom (i)",
            GridAxiom::Quadrangle => "grid axiom (ii)",
            GridAxiom::Vanishing => "grid axiom (iii)",
        }
    }
}

impl fmt::Display for GridAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridViolation {
    pub axiom: GridAxiom,
    pub cells: Vec<(usize, usize)>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridReport {
    pub ok: bool,
    pub violations: Vec<GridViolation>,
    /// Number of individual relations evaluated.
    pub checks: usize,
}

impl GridReport {
    pub fn first(&self) -> Option<&GridViolation> {
        self.violations.first()
    }
}

/// Checks minimality and grid axioms (i)-(iii). Violations come out grouped
/// in that order.
pub fn verify_rectangular_grid(grid: &RectGrid, tol: Tolerance) -> GridReport {
    let mut violations = Vec::new();
    let mut checks = 0;
    let cells = grid.cells();
    let mut flag = |axiom, idx: &[usize], residual: f64, ok: bool| {
        if !ok {
            violations.push(GridViolation { axiom, cells: idx.iter().map(|&k| grid.index(k)).collect(), residual });
        }
    };

    for (k, u) in cells.iter().enumerate() {
        checks += 1;
        let ok = match peirce(u, tol) {
            Ok(p) => p.dims().0 == 1,
            Err(_) => false,
        };
        flag(GridAxiom::Minimality, &[k], tripotent_residual(u), ok);
    }

    for a in 0..cells.len() {
        for b in a + 1..cells.len() {
            let ((i, j), (p, q)) = (grid.index(a), grid.index(b));
            let (u, v) = (&cells[a], &cells[b]);
            let scale = norm(u).max(norm(v));
            let residual = if i == p || j == q {
                membership_residual(v, Peirce::One, u)
                    .unwrap_or(f64::INFINITY)
                    .max(membership_residual(u, Peirce::One, v).unwrap_or(f64::INFINITY))
            } else {
                orthogonality_residual(u, v)
            };
            checks += 1;
            flag(GridAxiom::Collinearity, &[a, b], residual, tol.accepts(residual, scale));
        }
    }

    let (m, n) = (grid.rows(), grid.cols());
    let at = |i: usize, j: usize| i * n + j;
    for i in 0..m {
        for j in (0..m).filter(|&j| j != i) {
            for k in 0..n {
                for l in (0..n).filter(|&l| l != k) {
                    let target = grid.cell(i, k);
                    let built = tp(grid.cell(j, k), grid.cell(j, l), grid.cell(i, l)) * 2.0;
                    let residual = norm(&(target - &built));
                    checks += 1;
                    flag(
                        GridAxiom::Quadrangle,
                        &[at(j, k), at(j, l), at(i, l), at(i, k)],
                        residual,
                        tol.accepts(residual, norm(target)),
                    );
                }
            }
        }
    }

    let window: Vec<usize> = if cells.len() <= FULL_VANISHING_CELLS {
        (0..cells.len()).collect()
    } else {
        (0..m.min(3)).flat_map(|i| (0..n.min(3)).map(move |j| at(i, j))).collect()
    };
    for &a in &window {
        for &b in &window {
            for &c in &window {
                let ((ai, aj), (bi, bj), (ci, cj)) = (grid.index(a), grid.index(b), grid.index(c));
                let patterned = (aj == bj && bi == ci) || (cj == bj && bi == ai);
                if patterned {
                    continue;
                }
                let residual = norm(&tp(&cells[a], &cells[b], &cells[c]));
                checks += 1;
                flag(GridAxiom::Vanishing, &[a, b, c], residual, tol.accepts(residual, 1.0));
            }
        }
    }

    GridReport { ok: violations.is_empty(), violations, checks }
}

/// The map sending each source cell to its image, extended linearly
/// (`x_ij -> x_ij`) or antilinearly (`x_ij -> conj(x_ij)`) in the coefficients
/// `x = Σ x_ij u_ij`.
pub fn grid_linear_extension(
    source: &RectGrid,
    images: &RectGrid,
    branch: Branch,
    tol: Tolerance,
) -> Result<RealLinearMap> {
    if (source.rows(), source.cols()) != (images.rows(), images.cols()) {
        return Err(Error::Precondition("source and image grids differ in shape".into()));
    }
    let report = verify_rectangular_grid(images, tol);
    if let Some(v) = report.first() {
        return Err(Error::Precondition(format!(
            "image family fails {} at cells {:?} (residual {:.3e})",
            v.axiom, v.cells, v.residual
        )));
    }
    let domain = source.factor().clone();
    let target = images.factor().clone();
    let mut l = CMatrix::zeros(target.dim(), domain.dim());
    for (u, w) in source.cells().iter().zip(images.cells()) {
        let uc = u.coords();
        let wc = w.coords();
        let scale = uc.norm_squared();
        let row = match branch {
            Branch::Linear => uc.adjoint(),
            Branch::Antilinear => uc.transpose(),
        };
        l += &wc * row / crate::linalg::c(scale, 0.0);
    }
    RealLinearMap::new(domain, target, branch, l)
}

/// Sums of every pairwise orthogonal subfamily of `cells`, starting with zero.
pub fn orthogonal_closure(cells: &[Element], tol: Tolerance) -> Result<Vec<Element>> {
    let Some(first) = cells.first() else {
        return Err(Error::Precondition("orthogonal closure of an empty family".into()));
    };
    let n = cells.len();
    let mut orth = alloc::vec![false; n * n];
    for a in 0..n {
        for b in a + 1..n {
            let o = crate::tripotent::is_orthogonal(&cells[a], &cells[b], tol)?;
            orth[a * n + b] = o;
            orth[b * n + a] = o;
        }
    }
    let mut out = Vec::new();
    let mut stack: Vec<(usize, Vec<usize>, Element)> = alloc::vec![(0, Vec::new(), Element::zero(first.factor()))];
    while let Some((next, chosen, sum)) = stack.pop() {
        for k in (next..n).rev() {
            if chosen.iter().all(|&j| orth[j * n + k]) {
                let mut c = chosen.clone();
                c.push(k);
                stack.push((k + 1, c, &sum + &cells[k]));
            }
        }
        out.push(sum);
    }
    Ok(out)
}
