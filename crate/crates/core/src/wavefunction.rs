//! Fock-basis amplitudes of a two-fermion eigenstate.
//!
//! Sites are 1-based in the public API. The two-particle basis is ordered
//! lexicographically over `(m1, m2)`, `m1 < m2`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bethe::{BetheSolution, ChainParams};
use crate::error::{Error, Result};

/// Largest chain expanded into an explicit two-particle vector by default.
pub const DENSE_SITE_LIMIT: usize = 64;
/// Largest residual imaginary part, relative to the largest amplitude.
pub const REALNESS_TOL: f64 = 1e-9;

/// Position of `(m1, m2)` (1-based, `m1 < m2`) in the lexicographic basis.
pub fn pair_index(sites: usize, m1: usize, m2: usize) -> usize {
    debug_assert!(1 <= m1 && m1 < m2 && m2 <= sites);
    (m1 - 1) * (2 * sites - m1) / 2 + (m2 - m1 - 1)
}

/// Basis configurations `(m1, m2)` in lexicographic order.
pub fn pair_basis(sites: usize) -> Vec<(usize, usize)> {
    let mut basis = Vec::with_capacity(sites * (sites - 1) / 2);
    for m1 in 1..=sites {
        for m2 in m1 + 1..=sites {
            basis.push((m1, m2));
        }
    }
    basis
}

/// Real amplitudes `a[m1][m2]`, `m1 < m2`, packed in basis order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperAmplitudes {
    sites: usize,
    values: Vec<f64>,
}

impl UpperAmplitudes {
    pub fn zeros(sites: usize) -> Self {
        Self {
            sites,
            values: vec![0.0; sites * sites.saturating_sub(1) / 2],
        }
    }

    pub fn from_packed(sites: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != sites * sites.saturating_sub(1) / 2 {
            return Err(Error::Contract(format!(
                "{} amplitudes for {sites} sites",
                values.len()
            )));
        }
        Ok(Self { sites, values })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn packed(&self) -> &[f64] {
        &self.values
    }

    /// `a[m1][m2]`, zero unless `m1 < m2`.
    pub fn get(&self, m1: usize, m2: usize) -> f64 {
        if m1 >= m2 || m1 == 0 || m2 > self.sites {
            0.0
        } else {
            self.values[pair_index(self.sites, m1, m2)]
        }
    }

    pub fn set(&mut self, m1: usize, m2: usize, value: f64) {
        assert!(m1 < m2 && m1 >= 1 && m2 <= self.sites, "({m1}, {m2}) not in upper triangle");
        let idx = pair_index(self.sites, m1, m2);
        self.values[idx] = value;
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}

/// Real antisymmetric amplitude matrix; the state is
/// `(1/2) sum_{mn} A_mn c+_m c+_n |0>`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntisymMatrix {
    a: DMatrix<f64>,
}

impl AntisymMatrix {
    /// Accepts `m` if `max|m + m^T| <= 1e-13 max|m|`; the result is exactly
    /// antisymmetric (the upper triangle is kept).
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Contract("amplitude matrix must be square".into()));
        }
        let n = m.nrows();
        let scale = m.amax();
        let mut asym = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                asym = asym.max((m[(i, j)] + m[(j, i)]).abs());
            }
        }
        if asym > 1e-13 * scale {
            return Err(Error::Contract(format!(
                "matrix is not antisymmetric: max|A + A^T| = {asym:e}"
            )));
        }
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                a[(i, j)] = m[(i, j)];
                a[(j, i)] = -m[(i, j)];
            }
        }
        Ok(Self { a })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.a
    }

    pub fn sites(&self) -> usize {
        self.a.nrows()
    }

    /// `(1/2) ||A||_F^2`, the squared norm of the state.
    pub fn half_norm_sq(&self) -> f64 {
        0.5 * self.a.norm_squared()
    }

    pub fn upper(&self) -> UpperAmplitudes {
        let n = self.sites();
        let mut values = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                values.push(self.a[(i, j)]);
            }
        }
        UpperAmplitudes { sites: n, values }
    }
}

/// Complex amplitudes of `sol` in basis order, unit norm.
pub fn complex_amplitudes(sol: &BetheSolution) -> Vec<Complex64> {
    let n = sol.sites;
    match sol.wavefunction {
        crate::bethe::Wavefunction::Plane {
            center,
            p,
            parity,
            scale,
        } => {
            let h: Vec<Complex64> = (0..n)
                .map(|r| crate::bethe::profile(p, parity, n, r as f64 - n as f64 / 2.0) * scale)
                .collect();
            let phase: Vec<Complex64> = (0..=2 * n)
                .map(|t| Complex64::from_polar(1.0, center * t as f64))
                .collect();
            let mut out = Vec::with_capacity(n * (n - 1) / 2);
            for m1 in 1..=n {
                for m2 in m1 + 1..=n {
                    out.push(phase[m1 + m2] * h[m2 - m1]);
                }
            }
            out
        }
        crate::bethe::Wavefunction::AdjacentPair => pair_basis(n)
            .into_iter()
            .map(|(m1, m2)| sol.amplitude(m1, m2))
            .collect(),
    }
}

/// Real amplitudes of `sol` after removing the global phase.
///
/// The phase is `exp(-i arg(sum a^2) / 2)`; the first amplitude above
/// `1e-9 max|a|` is then made positive.
pub fn amplitudes(sol: &BetheSolution, params: &ChainParams) -> Result<UpperAmplitudes> {
    if sol.sites != params.n {
        return Err(Error::Contract(format!(
            "solution has {} sites, parameters {}",
            sol.sites, params.n
        )));
    }
    real_amplitudes(sol.sites, &complex_amplitudes(sol))
}

/// Phase-fixes a complex two-particle vector into real amplitudes.
pub fn real_amplitudes(sites: usize, values: &[Complex64]) -> Result<UpperAmplitudes> {
    let square: Complex64 = values.iter().map(|a| a * a).sum();
    let rot = Complex64::from_polar(1.0, -square.arg() / 2.0);
    let max = values.iter().map(|a| a.norm()).fold(0.0_f64, f64::max);
    if max == 0.0 {
        return Err(Error::Numerical("state vector vanishes".into()));
    }
    let mut worst_im = 0.0_f64;
    let mut real: Vec<f64> = values
        .iter()
        .map(|&a| {
            let b = a * rot;
            worst_im = worst_im.max(b.im.abs());
            b.re
        })
        .collect();
    if worst_im > REALNESS_TOL * max {
        return Err(Error::ComplexState(worst_im / max));
    }
    fix_sign_and_norm(&mut real);
    UpperAmplitudes::from_packed(sites, real)
}

/// Unit norm, first significant entry positive.
pub(crate) fn fix_sign_and_norm(values: &mut [f64]) {
    let max = values.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
    let norm = values.iter().map(|a| a * a).sum::<f64>().sqrt();
    let first = values.iter().find(|a| a.abs() > REALNESS_TOL * max).copied();
    let sign = if first.is_some_and(|a| a < 0.0) { -1.0 } else { 1.0 };
    // Skipping the division near unit norm keeps the operation idempotent.
    let factor = if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
        sign
    } else {
        sign / norm
    };
    if norm > 0.0 && factor != 1.0 {
        for a in values.iter_mut() {
            *a *= factor;
        }
    }
}

pub fn antisymmetrize(a: &UpperAmplitudes) -> AntisymMatrix {
    let n = a.sites;
    let mut m = DMatrix::zeros(n, n);
    let mut idx = 0;
    for i in 0..n {
        for j in i + 1..n {
            let v = a.values[idx];
            m[(i, j)] = v;
            m[(j, i)] = -v;
            idx += 1;
        }
    }
    AntisymMatrix { a: m }
}

pub fn state_vector(a: &UpperAmplitudes) -> Result<DVector<f64>> {
    state_vector_with_limit(a, DENSE_SITE_LIMIT)
}

pub fn state_vector_with_limit(a: &UpperAmplitudes, limit: usize) -> Result<DVector<f64>> {
    if a.sites > limit {
        return Err(Error::Capacity {
            what: "dense two-particle vector (sites)",
            required: a.sites,
            limit,
        });
    }
    Ok(DVector::from_column_slice(&a.values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bethe::{ground_state, ChainParams};

    #[test]
    fn pair_index_is_lexicographic() {
        let n = 6;
        for (k, (m1, m2)) in pair_basis(n).into_iter().enumerate() {
            assert_eq!(pair_index(n, m1, m2), k);
        }
    }

    #[test]
    fn lower_triangle_reads_zero() {
        let p = ChainParams::new(7, 1.0, -2.0).unwrap();
        let a = amplitudes(&ground_state(&p).unwrap(), &p).unwrap();
        assert_eq!(a.get(3, 3), 0.0);
        assert_eq!(a.get(5, 2), 0.0);
        assert!((a.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn antisymmetrize_examples() {
        let z = antisymmetrize(&UpperAmplitudes::zeros(4));
        assert_eq!(z.matrix(), &DMatrix::zeros(4, 4));
        let mut a = UpperAmplitudes::zeros(2);
        a.set(1, 2, 1.0);
        let m = antisymmetrize(&a);
        assert_eq!(m.matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        assert_eq!(m.upper(), a);
    }

    #[test]
    fn antisymmetry_is_exact() {
        let p = ChainParams::new(5, 1.0, -2.0).unwrap();
        let a = amplitudes(&ground_state(&p).unwrap(), &p).unwrap();
        let m = antisymmetrize(&a);
        let sum = m.matrix() + m.matrix().transpose();
        assert!(sum.iter().all(|&x| x == 0.0));
        assert!((m.half_norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn state_vector_layout() {
        let mut a = UpperAmplitudes::zeros(3);
        a.set(1, 2, 1.0);
        assert_eq!(state_vector(&a).unwrap().as_slice(), &[1.0, 0.0, 0.0]);
        let big = UpperAmplitudes::zeros(65);
        assert!(matches!(state_vector(&big), Err(Error::Capacity { .. })));
    }

    #[test]
    fn phase_fixing_is_idempotent() {
        let p = ChainParams::new(9, 1.0, 1.5).unwrap();
        let a = amplitudes(&ground_state(&p).unwrap(), &p).unwrap();
        let as_complex: Vec<Complex64> = a.packed().iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let b = real_amplitudes(9, &as_complex).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn complex_state_is_rejected() {
        let values = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ];
        assert!(matches!(real_amplitudes(3, &values), Err(Error::ComplexState(_))));
    }
}
