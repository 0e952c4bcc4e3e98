//! Maps on tripotents: generated ground truths, finite tables, and
//! arbitrary callables.

use alloc::boxed::Box;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::factors::{Element, Factor};
use crate::linalg::{complexify, random_rotation, random_unitary, CMatrix, C64, ONE};
use crate::linear_map::{Branch, RealLinearMap};
use crate::tripotent::{tripotent_residual, Tolerance};
use crate::factors::norm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Applies a known real-linear triple isomorphism.
    Generated,
    /// Looks inputs up in a finite table.
    Table,
    /// Wraps a caller-supplied function.
    External,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Generated => "generated",
            Provenance::Table => "table",
            Provenance::External => "external",
        }
    }
}

type MapFn = dyn Fn(&Element) -> Result<Element> + Send + Sync;

#[derive(Clone)]
enum Backing {
    Map(RealLinearMap),
    Table(Arc<Vec<(Element, Element)>>),
    Function(Arc<MapFn>),
}

/// A map `Φ` from the tripotents of `domain` to those of `target`. Every
/// output is checked to be a tripotent.
#[derive(Clone)]
pub struct TripotentOracle {
    domain: Factor,
    target: Factor,
    tol: Tolerance,
    backing: Backing,
}

impl fmt::Debug for TripotentOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TripotentOracle")
            .field("domain", &self.domain)
            .field("target", &self.target)
            .field("provenance", &self.provenance())
            .finish()
    }
}

impl TripotentOracle {
    pub fn from_map(map: RealLinearMap) -> Self {
        TripotentOracle {
            domain: map.domain().clone(),
            target: map.target().clone(),
            tol: Tolerance::default(),
            backing: Backing::Map(map),
        }
    }

    /// A finite table, which must be a bijection on its carrier.
    pub fn table(domain: Factor, target: Factor, entries: Vec<(Element, Element)>, tol: Tolerance) -> Result<Self> {
        domain.validate()?;
        target.validate()?;
        for (k, (x, y)) in entries.iter().enumerate() {
            if x.factor() != &domain || y.factor() != &target {
                return Err(Error::FactorMismatch(format!(
                    "table entry {k} maps {} to {}, expected {domain} to {target}",
                    x.factor(),
                    y.factor()
                )));
            }
        }
        let close = |a: &Element, b: &Element| tol.accepts(norm(&(a - b)), norm(a).max(norm(b)));
        for i in 0..entries.len() {
            for j in i + 1..entries.len() {
                if close(&entries[i].0, &entries[j].0) {
                    return Err(Error::Precondition(format!("table inputs {i} and {j} coincide")));
                }
                if close(&entries[i].1, &entries[j].1) {
                    return Err(Error::Precondition(format!("table is not injective: outputs {i} and {j} coincide")));
                }
            }
        }
        Ok(TripotentOracle { domain, target, tol, backing: Backing::Table(Arc::new(entries)) })
    }

    pub fn external(
        domain: Factor,
        target: Factor,
        f: impl Fn(&Element) -> Result<Element> + Send + Sync + 'static,
    ) -> Self {
        TripotentOracle { domain, target, tol: Tolerance::default(), backing: Backing::Function(Arc::new(f)) }
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn domain(&self) -> &Factor {
        &self.domain
    }

    pub fn target(&self) -> &Factor {
        &self.target
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    pub fn provenance(&self) -> Provenance {
        match self.backing {
            Backing::Map(_) => Provenance::Generated,
            Backing::Table(_) => Provenance::Table,
            Backing::Function(_) => Provenance::External,
        }
    }

    /// The ground truth of a generated oracle.
    pub fn ground_truth(&self) -> Option<&RealLinearMap> {
        match &self.backing {
            Backing::Map(m) => Some(m),
            _ => None,
        }
    }

    /// Entries of a table-backed oracle.
    pub fn carrier(&self) -> Option<&[(Element, Element)]> {
        match &self.backing {
            Backing::Table(t) => Some(t),
            _ => None,
        }
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        if x.factor() != &self.domain {
            return Err(Error::FactorMismatch(format!("oracle on {} applied to {}", self.domain, x.factor())));
        }
        let y = match &self.backing {
            Backing::Map(m) => m.apply(x)?,
            Backing::Table(t) => {
                let tol = self.tol;
                t.iter()
                    .find(|(a, _)| tol.accepts(norm(&(a - x)), norm(a).max(norm(x))))
                    .map(|(_, b)| b.clone())
                    .ok_or(Error::OracleMiss)?
            }
            Backing::Function(f) => f(x)?,
        };
        if y.factor() != &self.target {
            return Err(Error::FactorMismatch(format!("oracle produced {}, expected {}", y.factor(), self.target)));
        }
        let residual = tripotent_residual(&y);
        if !self.tol.accepts(residual, norm(&y)) {
            return Err(Error::structure(
                "tripotent preservation",
                format!("oracle output is not a tripotent (residual {residual:.3e})"),
            ));
        }
        Ok(y)
    }
}

/// Recipes for generated oracles.
#[derive(Debug, Clone, PartialEq)]
pub enum Recipe {
    Identity,
    /// Coordinate-wise conjugation.
    Conjugation,
    /// `x -> λ0 U g(x)` on `spin(d)`, `U` a random rotation of the real part,
    /// `g` the identity or the conjugation.
    Spin { lambda0: C64, rotation_seed: u64, antilinear: bool },
    /// `X -> U g(X) V` on `rect(m, n)` with Haar unitaries `U, V` (identities
    /// when `seed` is `None`), `g` composed of optional transpose and conjugation.
    Rect { seed: Option<u64>, transpose: bool, antilinear: bool },
    /// Component `i` goes to component `sigma[i]` of the target, via `components[i]`.
    Sum { components: Vec<Recipe>, sigma: Vec<usize> },
    /// An explicit map.
    Map(RealLinearMap),
}

/// Builds the ground-truth map of a recipe on `factor`.
pub fn recipe_map(factor: &Factor, recipe: &Recipe) -> Result<RealLinearMap> {
    factor.validate()?;
    match (recipe, factor) {
        (Recipe::Identity, f) => Ok(RealLinearMap::identity(f)),
        (Recipe::Conjugation, f) => Ok(RealLinearMap::conjugation(f)),
        (Recipe::Spin { lambda0, rotation_seed, antilinear }, Factor::Spin { d }) => {
            if (lambda0.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::Precondition(format!("λ0 = {lambda0} is not unimodular")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*rotation_seed);
            let u = complexify(&random_rotation(*d, &mut rng)) * *lambda0;
            let branch = if *antilinear { Branch::Antilinear } else { Branch::Linear };
            RealLinearMap::new(factor.clone(), factor.clone(), branch, u)
        }
        (Recipe::Rect { seed, transpose, antilinear }, Factor::Rect { m, n }) => {
            let (m, n) = (*m, *n);
            let (rows, cols) = if *transpose { (n, m) } else { (m, n) };
            let (u, v) = match seed {
                Some(s) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(*s);
                    let u = random_unitary(rows, &mut rng);
                    (u, random_unitary(cols, &mut rng))
                }
                None => (CMatrix::identity(rows, rows), CMatrix::identity(cols, cols)),
            };
            let target = Factor::rect(rows, cols)?;
            let mut l = CMatrix::zeros(rows * cols, m * n);
            for k in 0..m * n {
                let mut e = CMatrix::zeros(m, n);
                e[(k / n, k % n)] = ONE;
                let g = if *transpose { e.transpose() } else { e };
                let img = Element::from_matrix(target.clone(), &u * g * &v)?;
                l.set_column(k, &img.coords());
            }
            let branch = if *antilinear { Branch::Antilinear } else { Branch::Linear };
            RealLinearMap::new(factor.clone(), target, branch, l)
        }
        (Recipe::Sum { components, sigma }, Factor::Sum(parts)) => {
            if components.len() != parts.len() || sigma.len() != parts.len() {
                return Err(Error::Precondition(format!(
                    "{factor} has {} components; recipe has {} and σ has {}",
                    parts.len(),
                    components.len(),
                    sigma.len()
                )));
            }
            let mut seen = alloc::vec![false; parts.len()];
            for &s in sigma {
                if s >= parts.len() || core::mem::replace(&mut seen[s], true) {
                    return Err(Error::Precondition(format!("σ = {sigma:?} is not a permutation")));
                }
            }
            let maps = parts
                .iter()
                .zip(components)
                .map(|(p, r)| recipe_map(p, r))
                .collect::<Result<Vec<_>>>()?;
            let mut targets: Vec<Option<Factor>> = alloc::vec![None; parts.len()];
            for (i, map) in maps.iter().enumerate() {
                targets[sigma[i]] = Some(map.target().clone());
            }
            let target = Factor::sum(targets.into_iter().map(|t| t.expect("σ is a permutation")).collect())?;
            let blocks: Vec<(usize, usize, RealLinearMap)> =
                maps.into_iter().enumerate().map(|(i, m)| (i, sigma[i], m)).collect();
            RealLinearMap::direct_sum(factor, &target, &blocks)
        }
        (Recipe::Map(m), f) => {
            if m.domain() != f {
                return Err(Error::FactorMismatch(format!("map on {} for factor {f}", m.domain())));
            }
            Ok(m.clone())
        }
        (r, f) => Err(Error::Precondition(format!("recipe {} does not apply to {f}", recipe_name(r)))),
    }
}

fn recipe_name(r: &Recipe) -> &'static str {
    match r {
        Recipe::Identity => "identity",
        Recipe::Conjugation => "conjugation",
        Recipe::Spin { .. } => "spin",
        Recipe::Rect { .. } => "rect",
        Recipe::Sum { .. } => "sum",
        Recipe::Map(_) => "map",
    }
}

/// An oracle applying the recipe's ground truth.
pub fn make_oracle(factor: &Factor, recipe: &Recipe) -> Result<TripotentOracle> {
    Ok(TripotentOracle::from_map(recipe_map(factor, recipe)?))
}

/// The oracle `x -> component(dest) of Φ(embed_source(x))`, failing when the
/// image leaks into another component.
pub(crate) fn restrict(phi: &TripotentOracle, source: usize, dest: usize) -> Result<TripotentOracle> {
    let domain = phi.domain().components()[source].clone();
    let target = phi.target().components()[dest].clone();
    let outer = phi.clone();
    let tol = phi.tolerance();
    let f = Box::new(move |x: &Element| -> Result<Element> {
        let full = if outer.domain().is_sum() { Element::embed(outer.domain(), source, x.clone())? } else { x.clone() };
        let y = outer.apply(&full)?;
        let parts = y.components();
        for (k, p) in parts.iter().enumerate() {
            if k != dest && !tol.accepts(norm(p), 1.0) {
                return Err(Error::FactorRouting(format!(
                    "image of a tripotent in component {source} has mass {:.3e} in component {k}",
                    norm(p)
                )));
            }
        }
        Ok(parts[dest].clone())
    });
    Ok(TripotentOracle::external(domain, target, f).with_tolerance(tol))
}
