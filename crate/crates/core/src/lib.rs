//! Exact graph complexes of modular operads.
//!
//! Modular graphs with canonical forms, nestings and their fiber complexes,
//! coefficient systems, Feynman transforms and exact rational homology.

pub mod coefficients;
pub mod feynman;
pub mod fiber_complex;
pub mod graphs;
pub mod homalg;
pub mod nestings;
pub mod perm;
pub mod spectral;
