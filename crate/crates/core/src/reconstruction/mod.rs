//! Reconstruction of real-linear triple isomorphisms from maps on tripotents
//! that preserve order and orthogonality.

mod atomic;
mod oracle;
mod phase;
mod preservation;
mod rect;
mod spin;
mod verify;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

pub use atomic::{component_routing, reconstruct_atomic};
pub use oracle::{make_oracle, recipe_map, Provenance, Recipe, TripotentOracle};
pub use phase::{detect_branch, extract_phase, phase_map_report, PhaseMapReport};
pub use preservation::{
    additive_tuples, check_preservation, PreservationMode, PreservationReport, Violation, ViolationClass,
};
pub use rect::{classify_square_automorphism, reconstruct_rectangular, SquareForm};
pub use spin::{reconstruct_spin, rotation_part};
pub use verify::{canonical_tripotents, verify_extension, VerificationReport};

use crate::error::{Error, Result};
use crate::factors::Factor;
use crate::linalg::C64;
use crate::linear_map::{Branch, RealLinearMap};
use crate::tripotent::Tolerance;

/// Tolerance, verification sample count and seed for a reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub tol: Tolerance,
    pub samples: usize,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config { tol: Tolerance::default(), samples: 300, seed: 0 }
    }
}

impl Config {
    pub(crate) fn block_seed(&self, i: usize) -> u64 {
        self.seed ^ (0x9e37_79b9_7f4a_7c15_u64.wrapping_mul(i as u64 + 1))
    }
}

pub(crate) struct Block {
    lambda0: C64,
    branch: Branch,
    map: RealLinearMap,
    form: Option<SquareForm>,
}

/// One factor-to-factor piece of a reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockReport {
    pub source: usize,
    pub dest: usize,
    pub lambda0: C64,
    pub branch: Branch,
    pub map: RealLinearMap,
    /// Automorphism form, for square rectangular blocks.
    pub form: Option<SquareForm>,
    /// Largest residual of the block against the restricted oracle.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport {
    pub blocks: Vec<BlockReport>,
    /// `sigma[i]` is the target component receiving domain component `i`.
    pub sigma: Vec<usize>,
    pub map: RealLinearMap,
    pub verification: VerificationReport,
}

impl ReconstructionReport {
    /// `λ0` of the first block.
    pub fn lambda0(&self) -> C64 {
        self.blocks[0].lambda0
    }

    /// The common branch, or `None` when blocks disagree.
    pub fn branch(&self) -> Option<Branch> {
        let b = self.blocks[0].branch;
        self.blocks.iter().all(|x| x.branch == b).then_some(b)
    }

    pub fn branches(&self) -> Vec<Branch> {
        self.blocks.iter().map(|b| b.branch).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.verification.max_residual
    }

    pub fn n_samples(&self) -> usize {
        self.verification.n_samples
    }
}

pub(crate) fn single_block_report(phi: &TripotentOracle, block: Block, cfg: &Config) -> Result<ReconstructionReport> {
    let verification = verify_extension(&block.map, phi, cfg.samples, cfg.seed)?;
    Ok(ReconstructionReport {
        sigma: vec![0],
        map: block.map.clone(),
        blocks: vec![BlockReport {
            source: 0,
            dest: 0,
            lambda0: block.lambda0,
            branch: block.branch,
            map: block.map,
            form: block.form,
            residual: verification.max_residual,
        }],
        verification,
    })
}

/// Dispatches on the domain: spin, rectangular, or a finite sum.
pub fn reconstruct(phi: &TripotentOracle, cfg: &Config) -> Result<ReconstructionReport> {
    match phi.domain() {
        Factor::Spin { .. } => reconstruct_spin(phi, cfg),
        Factor::Rect { .. } => reconstruct_rectangular(phi, cfg),
        Factor::Sum(_) => reconstruct_atomic(phi, cfg),
        f => Err(Error::Precondition(format!(
            "{f}: reconstruction covers spin factors, rectangular factors of rank >= 2 and their sums"
        ))),
    }
}
