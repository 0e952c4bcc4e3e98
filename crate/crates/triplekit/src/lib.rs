//! JSON formats, self-test suites and command implementations on top of
//! `triplekit-core`.

pub mod commands;
pub mod json;
pub mod suites;

pub use triplekit_core as core;
