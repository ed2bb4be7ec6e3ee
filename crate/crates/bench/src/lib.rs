//! Fixtures shared by the criterion benches.

use bethechain_core::bethe::bethe_polynomial;
use bethechain_core::pipeline::decompose;
use bethechain_core::wavefunction::{amplitudes, antisymmetrize};
use bethechain_core::{ground_state, AntisymMatrix, ChainParams, Decomposition, MomentumClass};
use num_complex::Complex64;

pub fn params(sites: usize, u: f64) -> ChainParams {
    ChainParams::new(sites, 1.0, u).expect("valid chain")
}

/// Coefficients of the Bethe polynomial for momentum class `n`.
pub fn polynomial(sites: usize, u: f64, n: usize) -> Vec<Complex64> {
    let cls = MomentumClass::new(n, sites).expect("class");
    bethe_polynomial(&params(sites, u), &cls).expect("polynomial")
}

/// Antisymmetric ground-state amplitude matrix.
pub fn ground_matrix(sites: usize, u: f64) -> AntisymMatrix {
    let p = params(sites, u);
    let sol = ground_state(&p).expect("ground state");
    antisymmetrize(&amplitudes(&sol, &p).expect("amplitudes"))
}

pub fn ground_decomposition(sites: usize, u: f64) -> Decomposition {
    decompose(&params(sites, u)).expect("decomposition").1
}
