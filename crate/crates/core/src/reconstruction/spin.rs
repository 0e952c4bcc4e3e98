//! Reconstruction on spin factors: `T = λ0 Ũ`, possibly composed with the
//! conjugation.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::factors::{Element, Factor};
use crate::linalg::{complexify, C64};
use crate::linear_map::RealLinearMap;
use crate::spin::{classify_spin_tripotent, split, SpinClassification};

use super::oracle::TripotentOracle;
use super::phase::detect_branch;
use super::{single_block_report, Block, Config, ReconstructionReport};

pub(crate) fn spin_block(phi: &TripotentOracle, cfg: &Config) -> Result<Block> {
    let tol = cfg.tol;
    let d = match phi.domain() {
        Factor::Spin { d } => *d,
        f => return Err(Error::Precondition(format!("spin reconstruction on {f}"))),
    };
    if phi.target() != phi.domain() {
        return Err(Error::structure(
            "target factor (spin factor of equal dimension)",
            format!("{} cannot be the image of {}", phi.target(), phi.domain()),
        ));
    }
    let basis: Vec<Element> = (0..d).map(|k| Element::basis(phi.domain(), k)).collect::<Result<_>>()?;

    let (lambda0, _) = match classify_spin_tripotent(&phi.apply(&basis[0])?, tol)? {
        SpinClassification::Maximal { lambda, a } => (lambda, a),
        other => {
            return Err(Error::structure(
                "maximality (Φ maps maximal tripotents to maximal tripotents)",
                format!("Φ(e_0) classifies as {other:?}"),
            ))
        }
    };
    let branch = detect_branch(phi, &basis[0], tol)?;

    let mut u = DMatrix::<f64>::zeros(d, d);
    for (k, e) in basis.iter().enumerate() {
        let w = phi.apply(e)?.coords() * lambda0.conj();
        let (re, im) = split(&w);
        if !tol.accepts(im.norm(), 1.0) || !tol.accepts((re.norm() - 1.0).abs(), 1.0) {
            return Err(Error::structure(
                "real sphere (conj(λ0) Φ maps S_R onto S_R)",
                format!("conj(λ0) Φ(e_{k}) has imaginary part {:.3e} and real norm {:.6}", im.norm(), re.norm()),
            ));
        }
        u.set_column(k, &re);
    }
    let gram = u.transpose() * &u - DMatrix::<f64>::identity(d, d);
    let defect = gram.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if !tol.accepts(defect, 1.0) {
        return Err(Error::structure(
            "orthogonality (<Φ1(a), Φ1(b)> = 0 on the real basis)",
            format!("Gram matrix of conj(λ0) Φ(e_k) is off the identity by {defect:.3e}"),
        ));
    }
    let map = RealLinearMap::new(phi.domain().clone(), phi.target().clone(), branch, complexify(&u) * lambda0)?;
    Ok(Block { lambda0, branch, map, form: None })
}

/// Rebuilds `T` from `Φ` on `spin(d)` and verifies it on sampled tripotents.
pub fn reconstruct_spin(phi: &TripotentOracle, cfg: &Config) -> Result<ReconstructionReport> {
    let block = spin_block(phi, cfg)?;
    single_block_report(phi, block, cfg)
}

/// The rotation part `U` of a reconstructed spin block, `U = conj(λ0) T` on reals.
pub fn rotation_part(block_map: &RealLinearMap, lambda0: C64) -> Option<DMatrix<f64>> {
    let m = block_map.matrix()? * lambda0.conj();
    Some(m.map(|z| z.re))
}
