//! Finite-scale graph limit computations on step kernels.
//!
//! Kernels here are symmetric functions that are constant on the blocks of a
//! finite weighted partition. The crate computes cut norms (five set/sign
//! variants plus complex and Hilbert relaxations), cut and L1 distances via
//! couplings and interval permutations, homomorphism densities, W-random
//! graphs with exact entropies, operator spectra and Schatten norms, and
//! decides equivalence through purification.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix `f64`, which is what the command-line tool uses.

pub mod cutdist;
pub mod cutnorm;
pub mod error;
pub mod extremal;
pub mod homdensity;
pub mod io;
pub mod kernels;
pub mod sampling;
pub mod scalar;
pub mod spectral;
pub mod structure;

pub use error::{Error, Result};
pub use kernels::{
    builtin, equalize, graphon_from_graph, pullback, Builtin, Discretization, FiniteMPMap,
    GraphFlavor, MultiGraph, SimpleGraph,
};
pub use scalar::Scalar;

pub type StepKernel = kernels::StepKernel<f64>;
pub type StepGraphon = kernels::StepGraphon<f64>;
pub type MPMap = kernels::FiniteMPMap<f64>;




pub type CutWitness = cutnorm::CutWitness<f64>;
pub type Coupling = cutdist::Coupling<f64>;
pub type DistanceBracket = cutdist::DistanceBracket<f64>;
pub type Purification = structure::Purification<f64>;
