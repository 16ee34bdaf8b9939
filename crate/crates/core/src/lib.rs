//! Star resource theories: star-shaped free sets described by fortresses of
//! polyhedral cones, geometric-mean quantifiers over free sections, free
//! operations, and four concrete witnesses (two-qubit discord, total
//! correlations, non-unistochasticity, non-Markovianity of Pauli mixtures).

pub mod discord;
pub mod error;
pub mod games;
pub mod markov;
pub mod numerics;
pub mod quantum_rep;
pub mod srt_core;
pub mod total_corr;
pub mod unistochastic;

pub use error::{Error, Result};
pub use numerics::{HermitianMatrix, Metric, RealVector};
pub use srt_core::{ConvexSection, Domain, PolyhedralCone, StarTheory, WitnessReport};
