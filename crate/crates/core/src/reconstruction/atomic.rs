//! Reconstruction on finite direct sums: route components, then rebuild each block.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::factors::{norm, Element, Factor};
use crate::linear_map::RealLinearMap;

use super::oracle::{restrict, TripotentOracle};
use super::rect::rect_block;
use super::spin::spin_block;
use super::verify::{canonical_tripotents, verify_extension};
use super::{Block, BlockReport, Config, ReconstructionReport};

/// The permutation `σ` with `Φ(component i) ⊆ component σ(i)`, found from one
/// nonzero tripotent per component.
pub fn component_routing(phi: &TripotentOracle, cfg: &Config) -> Result<Vec<usize>> {
    let dom = phi.domain().components();
    let tgt = phi.target().components();
    if dom.len() != tgt.len() {
        return Err(Error::FactorRouting(format!(
            "{} components cannot be matched with {}",
            dom.len(),
            tgt.len()
        )));
    }
    let mut sigma = Vec::with_capacity(dom.len());
    for (i, f) in dom.iter().enumerate() {
        let e = canonical_tripotents(f).into_iter().next().expect("every factor has a tripotent");
        let x = if phi.domain().is_sum() { Element::embed(phi.domain(), i, e)? } else { e };
        let y = phi.apply(&x)?;
        let hit: Vec<usize> = y
            .components()
            .iter()
            .enumerate()
            .filter(|(_, p)| !cfg.tol.accepts(norm(p), 1.0))
            .map(|(k, _)| k)
            .collect();
        match hit.as_slice() {
            [k] => {
                if sigma.contains(k) {
                    return Err(Error::FactorRouting(format!("two components are sent to component {k}")));
                }
                sigma.push(*k);
            }
            _ => {
                return Err(Error::FactorRouting(format!(
                    "image of a tripotent of component {i} is supported on components {hit:?}"
                )))
            }
        }
    }
    Ok(sigma)
}

fn block_for(phi: &TripotentOracle, cfg: &Config) -> Result<Block> {
    match phi.domain() {
        Factor::Spin { .. } => spin_block(phi, cfg),
        Factor::Rect { .. } => rect_block(phi, cfg),
        f => Err(Error::Precondition(format!("no reconstruction route for {f}"))),
    }
}

/// Rebuilds `T` on a finite sum of spin and rank >= 2 rectangular factors.
pub fn reconstruct_atomic(phi: &TripotentOracle, cfg: &Config) -> Result<ReconstructionReport> {
    if !phi.domain().supports_reconstruction() {
        return Err(Error::Precondition(format!(
            "{} has a component outside spin and rank >= 2 rectangular factors",
            phi.domain()
        )));
    }
    let sigma = component_routing(phi, cfg)?;
    let mut blocks = Vec::with_capacity(sigma.len());
    let mut parts = Vec::with_capacity(sigma.len());
    for (i, &dest) in sigma.iter().enumerate() {
        let sub = restrict(phi, i, dest)?;
        let block = block_for(&sub, cfg)?;
        let check = verify_extension(&block.map, &sub, cfg.samples, cfg.block_seed(i))?;
        parts.push((i, dest, block.map.clone()));
        blocks.push(BlockReport {
            source: i,
            dest,
            lambda0: block.lambda0,
            branch: block.branch,
            map: block.map,
            form: block.form,
            residual: check.max_residual,
        });
    }
    let map = if phi.domain().is_sum() {
        RealLinearMap::direct_sum(phi.domain(), phi.target(), &parts)?
    } else {
        parts.pop().expect("one block").2
    };
    let verification = verify_extension(&map, phi, cfg.samples, cfg.seed)?;
    Ok(ReconstructionReport { blocks, sigma, map, verification })
}
