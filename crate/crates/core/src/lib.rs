//! Pointwise and exact verification of Hermitian geometry with torsion.

pub mod cohomology;
pub mod exterior;
pub mod hermitian;
pub mod jet;
pub mod lie;
pub mod models;
pub mod quadrature;
pub mod report;
