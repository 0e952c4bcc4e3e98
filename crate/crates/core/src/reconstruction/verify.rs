//! Comparison of a reconstructed map against the oracle it came from.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::factors::{norm, random_element_with, triple_product, Element, Factor};
use crate::linalg::{c, CMatrix, ONE};
use crate::linear_map::RealLinearMap;
use crate::sampling::random_tripotent;

use super::oracle::TripotentOracle;

/// Residuals of `T` against `Φ`, all relative to `max(1, ||w||)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerificationReport {
    /// `max ||T(w) - Φ(w)||` over sampled tripotents.
    pub max_residual: f64,
    pub n_samples: usize,
    /// `max ||T{x,y,z} - {Tx,Ty,Tz}||` over random triples.
    pub triple_residual: f64,
    /// `max | ||Tx|| - ||x|| |` over random elements.
    pub isometry_residual: f64,
    pub n_triples: usize,
}

/// Canonical tripotents: matrix units (and their antisymmetric or symmetric
/// combinations), real basis vectors and `(e_0 + i e_k)/2` on spin factors.
pub fn canonical_tripotents(factor: &Factor) -> Vec<Element> {
    match factor {
        Factor::Rect { m, n } => (0..m * n)
            .map(|k| {
                let mut a = CMatrix::zeros(*m, *n);
                a[(k / n, k % n)] = ONE;
                Element::from_matrix(factor.clone(), a).expect("matrix unit")
            })
            .collect(),
        Factor::Herm { n } => (0..*n)
            .map(|k| {
                let mut a = CMatrix::zeros(*n, *n);
                a[(k, k)] = ONE;
                Element::from_matrix(factor.clone(), a).expect("diagonal unit")
            })
            .collect(),
        Factor::Skew { n } => {
            let mut out = Vec::new();
            for i in 0..*n {
                for j in i + 1..*n {
                    let mut a = CMatrix::zeros(*n, *n);
                    a[(i, j)] = ONE;
                    a[(j, i)] = -ONE;
                    out.push(Element::from_matrix(factor.clone(), a).expect("antisymmetric unit"));
                }
            }
            out
        }
        Factor::Spin { d } => {
            let mut out: Vec<Element> = (0..*d).map(|k| Element::basis(factor, k).expect("basis")).collect();
            for k in 1..*d {
                let v = (out[0].coords() + out[k].coords() * c(0.0, 1.0)) * c(0.5, 0.0);
                out.push(Element::from_coords(factor, &v).expect("minimal"));
            }
            out
        }
        Factor::Sum(parts) => parts
            .iter()
            .enumerate()
            .flat_map(|(i, p)| {
                canonical_tripotents(p)
                    .into_iter()
                    .map(move |e| Element::embed(factor, i, e).expect("component slot"))
            })
            .collect(),
    }
}

/// Compares `t` with `phi` on the canonical tripotents followed by `n_samples`
/// random ones (the table entries when `phi` is table-backed), and checks that
/// `t` preserves triple products and norms on random elements.
pub fn verify_extension(t: &RealLinearMap, phi: &TripotentOracle, n_samples: usize, seed: u64) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = phi.domain();
    let samples: Vec<Element> = match phi.carrier() {
        Some(entries) => entries.iter().map(|(x, _)| x.clone()).collect(),
        None => {
            let mut v = canonical_tripotents(domain);
            for _ in 0..n_samples {
                v.push(random_tripotent(domain, &mut rng)?);
            }
            v
        }
    };
    let mut max_residual = 0.0_f64;
    for w in &samples {
        let r = norm(&(&t.apply(w)? - &phi.apply(w)?)) / norm(w).max(1.0);
        max_residual = max_residual.max(r);
    }

    let n_triples = (n_samples / 4).max(10);
    let (mut triple_residual, mut isometry_residual) = (0.0_f64, 0.0_f64);
    for _ in 0..n_triples {
        let x = random_element_with(domain, &mut rng)?;
        let y = random_element_with(domain, &mut rng)?;
        let z = random_element_with(domain, &mut rng)?;
        let lhs = t.apply(&triple_product(&x, &y, &z)?)?;
        let rhs = triple_product(&t.apply(&x)?, &t.apply(&y)?, &t.apply(&z)?)?;
        let scale = (norm(&x) * norm(&y) * norm(&z)).max(1.0);
        triple_residual = triple_residual.max(norm(&(&lhs - &rhs)) / scale);
        isometry_residual = isometry_residual.max((norm(&t.apply(&x)?) - norm(&x)).abs() / norm(&x).max(1.0));
    }
    Ok(VerificationReport { max_residual, n_samples: samples.len(), triple_residual, isometry_residual, n_triples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reconstruction::oracle::{make_oracle, Recipe};

    #[test]
    fn identity_against_identity_is_exact() {
        let f = Factor::sum(alloc::vec![Factor::spin(3).unwrap(), Factor::rect(2, 2).unwrap()]).unwrap();
        let phi = make_oracle(&f, &Recipe::Identity).unwrap();
        let r = verify_extension(&RealLinearMap::identity(&f), &phi, 30, 0).unwrap();
        assert_eq!(r.max_residual, 0.0);
        assert!(r.triple_residual < 1e-12 && r.isometry_residual < 1e-12);
    }

    #[test]
    fn identity_against_transpose_is_detected() {
        let f = Factor::rect(2, 2).unwrap();
        let phi = make_oracle(&f, &Recipe::Rect { seed: None, transpose: true, antilinear: false }).unwrap();
        let r = verify_extension(&RealLinearMap::identity(&f), &phi, 10, 0).unwrap();
        assert!(r.max_residual >= 1.0);
    }
}
