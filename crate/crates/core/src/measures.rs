//! Entanglement and two-body entropies, in nats.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::random_orthogonal;
use crate::skewspec::youla_values;
use crate::wavefunction::AntisymMatrix;

/// `-sum p ln p` with `0 ln 0 = 0`.
///
/// Entries down to `-1e-14` are clipped to zero and the vector is
/// renormalized if its sum is within `1e-8` of one.
pub fn von_neumann(p: &[f64]) -> Result<f64> {
    if let Some(bad) = p.iter().find(|&&x| !(x >= -1e-14)) {
        return Err(Error::Contract(format!("negative probability {bad:e}")));
    }
    let total: f64 = p.iter().map(|&x| x.max(0.0)).sum();
    if !((total - 1.0).abs() <= 1e-8) {
        return Err(Error::Contract(format!("probabilities sum to {total}")));
    }
    Ok(p.iter()
        .map(|&x| x.max(0.0) / total)
        .filter(|&x| x > 0.0)
        .map(|x| -x * x.ln())
        .sum())
}

/// Entropy of one cut from its Schmidt coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockEntropy {
    /// `-sum lambda^2 ln lambda^2`, the entropy of the reduced density matrix.
    pub von_neumann: f64,
    /// `-sum lambda ln lambda`.
    pub as_written: f64,
}

/// Both readings of a cut's entropy. `lambdas` must satisfy
/// `sum lambda^2 = 1` within `1e-8`.
pub fn block_entropy(lambdas: &[f64]) -> Result<BlockEntropy> {
    if let Some(bad) = lambdas.iter().find(|&&l| !(l >= 0.0)) {
        return Err(Error::Contract(format!("negative Schmidt coefficient {bad}")));
    }
    let p: Vec<f64> = lambdas.iter().map(|l| l * l).collect();
    let von_neumann = von_neumann(&p)?;
    let norm = p.iter().sum::<f64>().sqrt();
    let as_written = lambdas
        .iter()
        .map(|&l| l / norm)
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.ln())
        .sum();
    Ok(BlockEntropy {
        von_neumann,
        as_written,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoBodyEntropy {
    /// `-sum alpha ln alpha`.
    pub as_written: f64,
    /// `-sum alpha^2 ln alpha^2`.
    pub variant: f64,
}

/// Both readings of the pair-coefficient entropy.
pub fn two_body_entropy(alphas: &[f64]) -> Result<TwoBodyEntropy> {
    if let Some(bad) = alphas.iter().find(|&&a| !(a >= 0.0)) {
        return Err(Error::Contract(format!("negative pair coefficient {bad}")));
    }
    let norm: f64 = alphas.iter().map(|a| a * a).sum();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Contract(format!("sum alpha^2 = {norm}, expected 1")));
    }
    let xlnx = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    Ok(TwoBodyEntropy {
        as_written: alphas.iter().map(|&a| xlnx(a)).sum(),
        variant: alphas.iter().map(|&a| xlnx(a * a)).sum(),
    })
}

/// Largest change of the pair spectrum under `trials` seeded random
/// orthogonal mode rotations `A -> V A V^T`.
pub fn single_body_invariance_check(a: &AntisymMatrix, trials: usize, seed: u64) -> f64 {
    let reference = youla_values(a);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = a.sites();
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let v = random_orthogonal(n, &mut rng);
        let rotated = &v * a.matrix() * v.transpose();
        let rotated = AntisymMatrix::from_matrix((&rotated - rotated.transpose()) * 0.5)
            .expect("antisymmetric by construction");
        let alphas = youla_values(&rotated);
        for (x, y) in reference.iter().zip(&alphas) {
            worst = worst.max((x - y).abs());
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    /// von Neumann `S_L` for `L = 1 .. N-1`.
    pub block_profile: Vec<f64>,
    /// `-sum lambda ln lambda` for `L = 1 .. N-1`.
    pub block_profile_as_written: Vec<f64>,
    /// Both readings at `L = (N-1)/2`.
    pub half_chain: f64,
    pub half_chain_as_written: f64,
    pub two_body: f64,
    pub two_body_variant: f64,
    /// Descending Schmidt values per cut `L = 1 .. N-1`.
    pub schmidt_spectra: Vec<Vec<f64>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

    #[test]
    fn von_neumann_examples() {
        assert_eq!(von_neumann(&[1.0]).unwrap(), 0.0);
        assert!((von_neumann(&[0.5, 0.5]).unwrap() - LN_2).abs() < 1e-15);
        let expected = -(0.9f64 * 0.9f64.ln() + 0.1 * 0.1f64.ln());
        let got = von_neumann(&[0.9, 0.1]).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.325_082_9).abs() < 1e-7);
        assert!(von_neumann(&[0.5, 0.6]).is_err());
        assert!(von_neumann(&[1.0 + 1e-15, -1e-15]).is_ok());
        assert!(von_neumann(&[1.1, -0.1]).is_err());
    }

    #[test]
    fn block_entropy_readings() {
        let b = block_entropy(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        assert!((b.von_neumann - LN_2).abs() < 1e-15);
        assert!((b.as_written - FRAC_1_SQRT_2 * LN_2).abs() < 1e-15);
        let product = block_entropy(&[1.0]).unwrap();
        assert_eq!((product.von_neumann, product.as_written), (0.0, 0.0));
        assert!(block_entropy(&[0.5, 0.5]).is_err());
    }

    #[test]
    fn schur_concavity_spot_checks() {
        // (0.5, 0.3, 0.2) majorizes (0.4, 0.35, 0.25).
        let peaked = von_neumann(&[0.5, 0.3, 0.2]).unwrap();
        let flat = von_neumann(&[0.4, 0.35, 0.25]).unwrap();
        assert!(flat > peaked);
    }

    #[test]
    fn two_body_examples() {
        let single = two_body_entropy(&[1.0]).unwrap();
        assert_eq!((single.as_written, single.variant), (0.0, 0.0));
        let even = two_body_entropy(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        assert!((even.as_written - 0.490_129_0).abs() < 1e-7);
        assert!((even.variant - LN_2).abs() < 1e-15);
        assert!(two_body_entropy(&[-0.6, 0.8]).is_err());
    }

    #[test]
    fn two_body_is_permutation_invariant() {
        let a = two_body_entropy(&[0.6, 0.0, 0.8]).unwrap();
        let b = two_body_entropy(&[0.8, 0.6, 0.0]).unwrap();
        assert!((a.as_written - b.as_written).abs() < 1e-15);
        assert!((a.variant - b.variant).abs() < 1e-15);
    }

    #[test]
    fn identity_rotation_changes_nothing() {
        let mut m = nalgebra::DMatrix::zeros(3, 3);
        m[(0, 1)] = 0.6;
        m[(1, 0)] = -0.6;
        let a = AntisymMatrix::from_matrix(m).unwrap();
        assert_eq!(single_body_invariance_check(&a, 0, 1), 0.0);
    }
}
