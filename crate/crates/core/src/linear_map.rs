//! Real-linear maps between factors, acting on coordinate vectors as
//! `x -> A x + B conj(x)`.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::factors::{Element, Factor};
use crate::linalg::{CMatrix, CVector};

/// Whether a map is complex-linear or conjugate-linear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Linear,
    Antilinear,
}

impl Branch {
    /// Composition rule: two conjugations cancel.
    pub fn then(self, other: Branch) -> Branch {
        if self == other {
            Branch::Linear
        } else {
            Branch::Antilinear
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::Linear => "linear",
            Branch::Antilinear => "antilinear",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A real-linear map `x -> A vec(x) + B conj(vec(x))`. Pure maps carry only one
/// of the two parts; direct sums of blocks of different branches carry both.
#[derive(Debug, Clone, PartialEq)]
pub struct RealLinearMap {
    domain: Factor,
    target: Factor,
    linear: Option<CMatrix>,
    antilinear: Option<CMatrix>,
}

impl RealLinearMap {
    pub fn new(domain: Factor, target: Factor, branch: Branch, matrix: CMatrix) -> Result<Self> {
        domain.validate()?;
        target.validate()?;
        if matrix.shape() != (target.dim(), domain.dim()) {
            return Err(Error::FactorMismatch(format!(
                "map matrix is {}x{}, {domain} -> {target} needs {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                target.dim(),
                domain.dim()
            )));
        }
        let (linear, antilinear) = match branch {
            Branch::Linear => (Some(matrix), None),
            Branch::Antilinear => (None, Some(matrix)),
        };
        Ok(RealLinearMap { domain, target, linear, antilinear })
    }

    pub fn identity(factor: &Factor) -> Self {
        let d = factor.dim();
        RealLinearMap::new(factor.clone(), factor.clone(), Branch::Linear, CMatrix::identity(d, d))
            .expect("identity has matching shape")
    }

    /// Coordinate-wise complex conjugation (entrywise on matrix kinds).
    pub fn conjugation(factor: &Factor) -> Self {
        let d = factor.dim();
        RealLinearMap::new(factor.clone(), factor.clone(), Branch::Antilinear, CMatrix::identity(d, d))
            .expect("conjugation has matching shape")
    }

    pub fn domain(&self) -> &Factor {
        &self.domain
    }

    pub fn target(&self) -> &Factor {
        &self.target
    }

    /// The branch, or `None` for a mixed direct sum.
    pub fn branch(&self) -> Option<Branch> {
        match (&self.linear, &self.antilinear) {
            (Some(_), None) => Some(Branch::Linear),
            (None, Some(_)) => Some(Branch::Antilinear),
            _ => None,
        }
    }

    /// The matrix of a pure map.
    pub fn matrix(&self) -> Option<&CMatrix> {
        match (&self.linear, &self.antilinear) {
            (Some(m), None) | (None, Some(m)) => Some(m),
            _ => None,
        }
    }

    pub fn linear_part(&self) -> Option<&CMatrix> {
        self.linear.as_ref()
    }

    pub fn antilinear_part(&self) -> Option<&CMatrix> {
        self.antilinear.as_ref()
    }

    pub fn apply_coords(&self, v: &CVector) -> CVector {
        let mut out = CVector::zeros(self.target.dim());
        if let Some(a) = &self.linear {
            out += a * v;
        }
        if let Some(b) = &self.antilinear {
            out += b * v.map(|z| z.conj());
        }
        out
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        if x.factor() != &self.domain {
            return Err(Error::FactorMismatch(format!("map on {} applied to {}", self.domain, x.factor())));
        }
        Element::from_coords(&self.target, &self.apply_coords(&x.coords()))
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &RealLinearMap) -> Result<Self> {
        if first.target != self.domain {
            return Err(Error::FactorMismatch(format!("cannot compose {} -> {} after {} -> {}",
                self.domain, self.target, first.domain, first.target)));
        }
        let conj = |m: &CMatrix| m.map(|z| z.conj());
        let mut linear: Option<CMatrix> = None;
        let mut antilinear: Option<CMatrix> = None;
        let add = |slot: &mut Option<CMatrix>, m: CMatrix| {
            *slot = Some(match slot.take() {
                Some(prev) => prev + m,
                None => m,
            });
        };
        if let Some(a1) = &self.linear {
            if let Some(a2) = &first.linear {
                add(&mut linear, a1 * a2);
            }
            if let Some(b2) = &first.antilinear {
                add(&mut antilinear, a1 * b2);
            }
        }
        if let Some(b1) = &self.antilinear {
            if let Some(b2) = &first.antilinear {
                add(&mut linear, b1 * conj(b2));
            }
            if let Some(a2) = &first.linear {
                add(&mut antilinear, b1 * conj(a2));
            }
        }
        Ok(RealLinearMap { domain: first.domain.clone(), target: self.target.clone(), linear, antilinear })
    }

    /// Block map between direct sums: each `(source, dest, map)` sends
    /// component `source` of `domain` to component `dest` of `target`.
    pub fn direct_sum(domain: &Factor, target: &Factor, blocks: &[(usize, usize, RealLinearMap)]) -> Result<Self> {
        let offsets = |f: &Factor| -> Vec<usize> {
            let mut acc = 0;
            f.components()
                .iter()
                .map(|c| {
                    let o = acc;
                    acc += c.dim();
                    o
                })
                .collect()
        };
        let (src_off, dst_off) = (offsets(domain), offsets(target));
        let mut linear: Option<CMatrix> = None;
        let mut antilinear: Option<CMatrix> = None;
        for (s, t, map) in blocks {
            let (sf, tf) = match (domain.components().get(*s), target.components().get(*t)) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::FactorMismatch(format!("block {s} -> {t} out of range"))),
            };
            if sf != &map.domain || tf != &map.target {
                return Err(Error::FactorMismatch(format!(
                    "block {s} -> {t} expects {sf} -> {tf}, got {} -> {}",
                    map.domain, map.target
                )));
            }
            for (part, slot) in [(&map.linear, &mut linear), (&map.antilinear, &mut antilinear)] {
                if let Some(m) = part {
                    let full = slot.get_or_insert_with(|| CMatrix::zeros(target.dim(), domain.dim()));
                    full.view_mut((dst_off[*t], src_off[*s]), m.shape()).copy_from(m);
                }
            }
        }
        Ok(RealLinearMap { domain: domain.clone(), target: target.clone(), linear, antilinear })
    }
}
