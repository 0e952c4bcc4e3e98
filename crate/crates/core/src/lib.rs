//! Finite-dimensional Cartan factors, tripotent calculus, and reconstruction
//! of real-linear triple isomorphisms from maps on tripotents.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod error;
pub mod factors;
pub mod grids;
pub mod linalg;
pub mod linear_map;
pub mod reconstruction;
pub mod sampling;
pub mod spin;
pub mod tripotent;

pub use error::{Error, Result};
pub use factors::{norm, quadratic_map, random_element, triple_product, Element, Factor};
