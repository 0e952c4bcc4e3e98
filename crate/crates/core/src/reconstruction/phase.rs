//! The phase map `f_u` with `Φ(λu) = f_u(λ) Φ(u)` and the branch it selects.

use alloc::format;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::factors::{norm, Element};
use crate::linalg::{unit_phase, C64, I};
use crate::linear_map::Branch;
use crate::sampling::random_tripotent;
use crate::tripotent::Tolerance;

use super::oracle::TripotentOracle;

/// `f_u(λ)`: the unimodular scalar with `Φ(λu) = f Φ(u)`.
pub fn extract_phase(phi: &TripotentOracle, u: &Element, lambda: C64, tol: Tolerance) -> Result<C64> {
    let pu = phi.apply(u)?;
    let pu_c = pu.coords();
    let mass = pu_c.norm_squared();
    if libm::sqrt(mass) <= tol.threshold(1.0) {
        return Err(Error::Precondition("Φ(u) vanishes".into()));
    }
    let pl = phi.apply(&u.scale(lambda))?;
    let f = pu_c.dotc(&pl.coords()) / mass;
    let miss = norm(&(&pl - &pu.scale(f)));
    if !tol.accepts(miss, norm(&pu)) || !tol.accepts((f.norm() - 1.0).abs(), 1.0) {
        return Err(Error::structure(
            "phase invariance (Φ(λu) ∈ TΦ(u))",
            format!("λ = {lambda}: Φ(λu) is off the circle through Φ(u) by {miss:.3e} (|f| = {:.6})", f.norm()),
        ));
    }
    Ok(f / f.norm())
}

/// Linear when `f_u(i) = i`, antilinear when `f_u(i) = -i`.
pub fn detect_branch(phi: &TripotentOracle, u: &Element, tol: Tolerance) -> Result<Branch> {
    let f = extract_phase(phi, u, I, tol)?;
    if tol.accepts((f - I).norm(), 1.0) {
        Ok(Branch::Linear)
    } else if tol.accepts((f + I).norm(), 1.0) {
        Ok(Branch::Antilinear)
    } else {
        Err(Error::DiscontinuousPhase { re: f.re, im: f.im })
    }
}

/// Group-law residuals of the phase map, maximized over the samples.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMapReport {
    /// `|f(λμ) - f(λ) f(μ)|`.
    pub multiplicativity: f64,
    /// `|f(conj λ) - conj f(λ)|`.
    pub conjugation: f64,
    /// `|f(-1) + 1|`.
    pub minus_one: f64,
    pub f_i: C64,
    /// `|f_u(λ) - f_w(λ)|` for a second tripotent `w`.
    pub cross: f64,
    pub samples: usize,
}

/// Samples `λ, μ` uniformly on the circle and measures the phase-map laws
/// on `u`, comparing against `second` (or a random tripotent from `seed`).
pub fn phase_map_report(
    phi: &TripotentOracle,
    u: &Element,
    second: Option<&Element>,
    samples: usize,
    seed: u64,
    tol: Tolerance,
) -> Result<PhaseMapReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let other = match second {
        Some(w) => w.clone(),
        None => random_tripotent(phi.domain(), &mut rng)?,
    };
    let f = |w: &Element, z: C64| extract_phase(phi, w, z, tol);
    let minus_one = (f(u, C64::new(-1.0, 0.0))? + 1.0).norm();
    let f_i = f(u, I)?;
    let (mut mult, mut conj, mut cross) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..samples {
        let lambda = unit_phase(&mut rng);
        let mu = unit_phase(&mut rng);
        let fl = f(u, lambda)?;
        mult = mult.max((f(u, lambda * mu)? - fl * f(u, mu)?).norm());
        conj = conj.max((f(u, lambda.conj())? - fl.conj()).norm());
        cross = cross.max((f(&other, lambda)? - fl).norm());
    }
    Ok(PhaseMapReport { multiplicativity: mult, conjugation: conj, minus_one, f_i, cross, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factors::Factor;
    use crate::grids::rectangular_grid;
    use crate::reconstruction::oracle::{make_oracle, Recipe};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn phase_examples() {
        let f = Factor::rect(2, 2).unwrap();
        let e11 = rectangular_grid(2, 2).unwrap().cell(0, 0).clone();
        let id = make_oracle(&f, &Recipe::Identity).unwrap();
        assert!((extract_phase(&id, &e11, I, tol()).unwrap() - I).norm() < 1e-15);
        let conj = make_oracle(&f, &Recipe::Conjugation).unwrap();
        assert!((extract_phase(&conj, &e11, I, tol()).unwrap() + I).norm() < 1e-15);
        let s = Factor::spin(4).unwrap();
        let lambda0 = C64::from_polar(1.0, core::f64::consts::PI / 5.0);
        let phi = make_oracle(&s, &Recipe::Spin { lambda0, rotation_seed: 11, antilinear: false }).unwrap();
        let e0 = Element::basis(&s, 0).unwrap();
        let m1 = extract_phase(&phi, &e0, C64::new(-1.0, 0.0), tol()).unwrap();
        assert!((m1 + 1.0).norm() < 1e-12);
    }

    #[test]
    fn branches() {
        let f = Factor::rect(2, 2).unwrap();
        let e11 = rectangular_grid(2, 2).unwrap().cell(0, 0).clone();
        let id = make_oracle(&f, &Recipe::Identity).unwrap();
        assert_eq!(detect_branch(&id, &e11, tol()).unwrap(), Branch::Linear);
        let conj = make_oracle(&f, &Recipe::Conjugation).unwrap();
        assert_eq!(detect_branch(&conj, &e11, tol()).unwrap(), Branch::Antilinear);
    }

    #[test]
    fn reports_for_generated_oracles() {
        let f = Factor::rect(2, 3).unwrap();
        let e11 = rectangular_grid(2, 3).unwrap().cell(0, 0).clone();
        let id = make_oracle(&f, &Recipe::Identity).unwrap();
        let r = phase_map_report(&id, &e11, None, 20, 1, tol()).unwrap();
        assert!(r.multiplicativity < 1e-12 && r.conjugation < 1e-12 && r.cross < 1e-12);
        assert!((r.f_i - I).norm() < 1e-15);
        let conj = make_oracle(&f, &Recipe::Rect { seed: Some(2), transpose: false, antilinear: true }).unwrap();
        let r = phase_map_report(&conj, &e11, None, 20, 1, tol()).unwrap();
        assert!(r.multiplicativity < 1e-12 && r.conjugation < 1e-12 && r.minus_one < 1e-12);
        assert!((r.f_i + I).norm() < 1e-12);
    }
}
