//! Random tripotents of every rank, used for verification sampling.

use alloc::vec::Vec;

use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::factors::{Element, Factor};
use crate::linalg::{self, c, gaussian_matrix, partial_isometry, random_unitary, CMatrix, CVector, ZERO};

/// Random real unit vector in `R^d`.
pub fn random_real_unit<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let v = DVector::<f64>::from_fn(d, |_, _| StandardNormal.sample(rng));
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

/// Random orthonormal pair `(a, b)` in `R^d`.
pub fn random_orthonormal_pair<R: Rng + ?Sized>(d: usize, rng: &mut R) -> (DVector<f64>, DVector<f64>) {
    let a = random_real_unit(d, rng);
    loop {
        let g = random_real_unit(d, rng);
        let b = &g - &a * a.dot(&g);
        let n = b.norm();
        if n > 1e-6 {
            return (a, b / n);
        }
    }
}

fn complex(v: &DVector<f64>) -> CVector {
    v.map(|x| c(x, 0.0))
}

/// A random tripotent of the given rank (`0..=factor.rank()`) in a non-sum factor.
pub fn random_tripotent_of_rank<R: Rng + ?Sized>(factor: &Factor, rank: usize, rng: &mut R) -> Result<Element> {
    factor.validate()?;
    if rank > factor.rank() {
        return Err(Error::Precondition(alloc::format!("{factor} has rank {}, asked for {rank}", factor.rank())));
    }
    match factor {
        Factor::Rect { m, n } => {
            let g = if rank == 0 {
                CMatrix::zeros(*m, *n)
            } else {
                gaussian_matrix(*m, rank, rng) * gaussian_matrix(rank, *n, rng)
            };
            Element::from_matrix(factor.clone(), partial_isometry(&g, 1e-10))
        }
        Factor::Herm { n } => {
            let u = random_unitary(*n, rng);
            let mut d = CMatrix::zeros(*n, *n);
            for k in 0..rank {
                d[(k, k)] = linalg::unit_phase(rng);
            }
            Element::from_matrix(factor.clone(), &u * d * u.transpose())
        }
        Factor::Skew { n } => {
            let u = random_unitary(*n, rng);
            let mut j = CMatrix::zeros(*n, *n);
            for k in 0..rank {
                let z = linalg::unit_phase(rng);
                j[(2 * k, 2 * k + 1)] = z;
                j[(2 * k + 1, 2 * k)] = -z;
            }
            Element::from_matrix(factor.clone(), &u * j * u.transpose())
        }
        Factor::Spin { d } => {
            let lambda = linalg::unit_phase(rng);
            let v = match rank {
                0 => CVector::from_element(*d, ZERO),
                1 => {
                    let (a, b) = random_orthonormal_pair(*d, rng);
                    (complex(&a) + complex(&b) * linalg::I) * (lambda * 0.5)
                }
                _ => complex(&random_real_unit(*d, rng)) * lambda,
            };
            Element::from_vector(factor.clone(), v)
        }
        Factor::Sum(_) => Err(Error::Precondition("rank-targeted sampling needs a single factor".into())),
    }
}

/// A random nonzero tripotent: rank uniform in `1..=rank` on a single factor;
/// on sums each component draws a rank in `0..=rank` and at least one is nonzero.
pub fn random_tripotent<R: Rng + ?Sized>(factor: &Factor, rng: &mut R) -> Result<Element> {
    factor.validate()?;
    match factor {
        Factor::Sum(parts) => {
            let mut ranks: Vec<usize> = parts.iter().map(|p| rng.random_range(0..=p.rank())).collect();
            if ranks.iter().all(|&r| r == 0) {
                let k = rng.random_range(0..parts.len());
                ranks[k] = rng.random_range(1..=parts[k].rank());
            }
            let comps = parts
                .iter()
                .zip(&ranks)
                .map(|(p, &r)| random_tripotent_of_rank(p, r, rng))
                .collect::<Result<Vec<_>>>()?;
            Element::from_components(factor.clone(), comps)
        }
        f => {
            let r = rng.random_range(1..=f.rank());
            random_tripotent_of_rank(f, r, rng)
        }
    }
}

/// A random minimal tripotent of a single factor.
pub fn random_minimal<R: Rng + ?Sized>(factor: &Factor, rng: &mut R) -> Result<Element> {
    random_tripotent_of_rank(factor, 1, rng)
}
