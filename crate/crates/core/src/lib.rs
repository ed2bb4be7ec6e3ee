//! Exact two-fermion eigenstates of the periodic chain with
//! nearest-neighbour hopping `J` and interaction `U`, compiled into a
//! canonical matrix-product state.
//!
//! The pipeline runs Bethe roots, real amplitudes, the canonical form
//! `A = Q Lambda Q^T`, Givens folding of `Q^T`, the explicit MPS of the
//! folded ladder state and unfolding gate by gate. Entropies are in nats. Block entropies come in
//! two readings, the von Neumann entropy `-sum lambda^2 ln lambda^2` and `-sum lambda ln lambda`.

// `!(x >= tol)` comparisons are meant to catch NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bethe;
pub mod circuits;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod mps;
pub mod oracle;
pub mod pipeline;
pub mod poly;
pub mod skewspec;
pub mod wavefunction;

pub use bethe::{
    energy_gap, enumerate_spectrum, ground_state, BetheSolution, ChainParams, ClassSelection,
    MomentumClass, SolutionKind,
};
pub use circuits::{GivensGate, GivensSchedule, PairCascade, PairRotation};
pub use error::{Error, Result};
pub use measures::{block_entropy, two_body_entropy, von_neumann, BlockEntropy, EntropyReport, TwoBodyEntropy};
pub use mps::{CanonicalMps, MpsConfig, TwoSiteGate};
pub use oracle::SectorSpectrum;
pub use pipeline::{decompose, Decomposition, Method, ScanPoint};
pub use skewspec::{youla, YoulaFactors};
pub use wavefunction::{AntisymMatrix, UpperAmplitudes};
