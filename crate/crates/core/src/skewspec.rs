//! Canonical form `A = Q Lambda Q^T` of a real antisymmetric matrix, with
//! `Lambda` block diagonal in blocks `[[0, alpha_j], [-alpha_j, 0]]`.
//!
//! `A` is first reduced to tridiagonal form. Splitting the tridiagonal
//! matrix by even and odd indices leaves `[[0, B], [-B^T, 0]]` with `B`
//! lower bidiagonal, so the pair coefficients are the singular values of
//! `B`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{orthogonality_defect, skew_tridiagonalize};
use crate::wavefunction::AntisymMatrix;

/// Largest tolerated `max|Q^T Q - I|` before the factorization is rejected.
pub const ORTHOGONALITY_LIMIT: f64 = 1e-10;
const TIE_TOL: f64 = 1e-12;
const PARTICIPATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct YoulaFactors {
    pub q: DMatrix<f64>,
    /// Non-negative, descending; `floor(N/2)` entries.
    pub alphas: Vec<f64>,
    /// 0-based columns of `q` spanning the kernel (the last column for odd
    /// `N`).
    pub kernel_columns: Vec<usize>,
}

impl YoulaFactors {
    pub fn sites(&self) -> usize {
        self.q.nrows()
    }

    /// 1-based column pairs `(2j-1, 2j)` carrying `alpha_j`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (1..=self.alphas.len()).map(|j| (2 * j - 1, 2 * j)).collect()
    }

    /// Block-diagonal `Lambda`.
    pub fn lambda(&self) -> DMatrix<f64> {
        let n = self.sites();
        let mut l = DMatrix::zeros(n, n);
        for (j, &a) in self.alphas.iter().enumerate() {
            l[(2 * j, 2 * j + 1)] = a;
            l[(2 * j + 1, 2 * j)] = -a;
        }
        l
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.q * self.lambda() * self.q.transpose()
    }
}

/// Factorizes `a`. Ties in `alpha` are ordered by the lowest site on which
/// the pair's modes have weight.
pub fn youla(a: &AntisymMatrix) -> Result<YoulaFactors> {
    let n = a.sites();
    let mut work = a.matrix().clone();
    let (e, q0) = skew_tridiagonalize(&mut work, true);
    let q0 = q0.expect("accumulated");
    let m = n / 2;
    let b = bidiagonal_block(&e, n);

    let mut s = DMatrix::<f64>::zeros(n, n);
    let mut sigma = Vec::with_capacity(m);
    let mut kernel_columns = Vec::new();
    if m > 0 {
        let svd = b.clone().svd(true, true);
        let u = svd.u.expect("left vectors");
        let vt = svd.v_t.expect("right vectors");
        for j in 0..m {
            sigma.push(svd.singular_values[j]);
            for i in 0..u.nrows() {
                s[(2 * i, 2 * j)] = u[(i, j)];
            }
            for i in 0..m {
                s[(2 * i + 1, 2 * j + 1)] = vt[(j, i)];
            }
        }
        if n % 2 == 1 {
            let w = orthogonal_complement(&u);
            for i in 0..w.len() {
                s[(2 * i, n - 1)] = w[i];
            }
        }
    } else if n == 1 {
        s[(0, 0)] = 1.0;
    }
    if n % 2 == 1 {
        kernel_columns.push(n - 1);
    }
    let q = q0 * s;

    // Order pairs by descending alpha, ties by first participating site.
    let first_site = |j: usize| -> usize {
        let scale = q.column(2 * j).amax().max(q.column(2 * j + 1).amax());
        (0..n)
            .find(|&i| q[(i, 2 * j)].abs().max(q[(i, 2 * j + 1)].abs()) > PARTICIPATION_TOL * scale)
            .unwrap_or(n)
    };
    let amax = sigma.iter().cloned().fold(0.0_f64, f64::max);
    let sites: Vec<usize> = (0..m).map(first_site).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&x, &y| {
        if (sigma[x] - sigma[y]).abs() <= TIE_TOL * amax {
            sites[x].cmp(&sites[y])
        } else {
            sigma[y].total_cmp(&sigma[x])
        }
    });
    let mut sorted = DMatrix::<f64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        sorted.set_column(2 * dst, &q.column(2 * src));
        sorted.set_column(2 * dst + 1, &q.column(2 * src + 1));
    }
    if n % 2 == 1 {
        sorted.set_column(n - 1, &q.column(n - 1));
    }
    let alphas: Vec<f64> = order.iter().map(|&j| sigma[j]).collect();

    let defect = orthogonality_defect(&sorted);
    if !(defect <= ORTHOGONALITY_LIMIT) {
        return Err(Error::Numerical(format!(
            "Youla factor lost orthogonality: max|Q^T Q - I| = {defect:e}"
        )));
    }
    Ok(YoulaFactors {
        q: sorted,
        alphas,
        kernel_columns,
    })
}

/// Pair coefficients only, descending. Skips every orthogonal factor.
pub fn youla_values(a: &AntisymMatrix) -> Vec<f64> {
    let n = a.sites();
    let mut work = a.matrix().clone();
    let (e, _) = skew_tridiagonalize(&mut work, false);
    if n < 2 {
        return Vec::new();
    }
    let mut sigma: Vec<f64> = bidiagonal_block(&e, n).singular_values().iter().copied().collect();
    sigma.sort_by(|x, y| y.total_cmp(x));
    sigma
}

/// `B[i][j] = T[2i][2j+1]`: `ceil(N/2) x floor(N/2)`, lower bidiagonal.
fn bidiagonal_block(e: &[f64], n: usize) -> DMatrix<f64> {
    let rows = n.div_ceil(2);
    let cols = n / 2;
    let mut b = DMatrix::<f64>::zeros(rows, cols);
    for i in 0..rows {
        // Superdiagonal of T is t_k = -e_k.
        if i < cols {
            b[(i, i)] = -e[2 * i];
        }
        if i >= 1 {
            b[(i, i - 1)] = e[2 * i - 1];
        }
    }
    b
}

/// Unit vector orthogonal to the orthonormal columns of `u` (which has one
/// more row than columns).
fn orthogonal_complement(u: &DMatrix<f64>) -> DVector<f64> {
    let rows = u.nrows();
    let mut best = DVector::<f64>::zeros(rows);
    let mut best_norm = -1.0;
    for r in 0..rows {
        let mut w = DVector::<f64>::zeros(rows);
        w[r] = 1.0;
        for _ in 0..2 {
            let proj = u.tr_mul(&w);
            w -= u * proj;
        }
        let norm = w.norm();
        if norm > best_norm {
            best_norm = norm;
            best = w;
        }
    }
    for _ in 0..2 {
        let proj = u.tr_mul(&best);
        best -= u * proj;
        best /= best.norm();
    }
    let lead = best.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(1.0);
    if lead < 0.0 {
        best.neg_mut();
    }
    best
}

/// Single-particle modes `f+_k = sum_m M[k][m] c+_m`, i.e. `M = Q^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMap {
    pub modes: DMatrix<f64>,
    pub alphas: Vec<f64>,
}

impl ModeMap {
    /// Amplitude matrix of `sum_j alpha_j f+_{2j-1} f+_{2j} |0>`.
    pub fn amplitude_matrix(&self) -> DMatrix<f64> {
        let n = self.modes.nrows();
        let mut l = DMatrix::zeros(n, n);
        for (j, &a) in self.alphas.iter().enumerate() {
            l[(2 * j, 2 * j + 1)] = a;
            l[(2 * j + 1, 2 * j)] = -a;
        }
        self.modes.transpose() * l * &self.modes
    }
}

pub fn paired_modes(factors: &YoulaFactors) -> ModeMap {
    ModeMap {
        modes: factors.q.transpose(),
        alphas: factors.alphas.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_antisymmetric;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn asym(rows: usize, data: &[f64]) -> AntisymMatrix {
        AntisymMatrix::from_matrix(DMatrix::from_row_slice(rows, rows, data)).unwrap()
    }

    #[test]
    fn canonical_two_by_two() {
        let f = youla(&asym(2, &[0.0, 0.7, -0.7, 0.0])).unwrap();
        assert!((f.alphas[0] - 0.7).abs() < 1e-15);
        assert!((f.q.clone() - DMatrix::identity(2, 2)).amax() < 1e-15);
        assert!(f.kernel_columns.is_empty());
    }

    #[test]
    fn zero_matrix() {
        let f = youla(&AntisymMatrix::from_matrix(DMatrix::zeros(5, 5)).unwrap()).unwrap();
        assert_eq!(f.alphas, vec![0.0, 0.0]);
        assert_eq!(f.kernel_columns, vec![4]);
        assert_eq!(f.reconstruct(), DMatrix::zeros(5, 5));
    }

    #[test]
    fn alphas_match_gram_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_antisymmetric(5, &mut rng);
        let f = youla(&AntisymMatrix::from_matrix(a.clone()).unwrap()).unwrap();
        let mut ev: Vec<f64> = (a.transpose() * &a).symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|x, y| y.total_cmp(x));
        for (j, &alpha) in f.alphas.iter().enumerate() {
            let expected = ev[2 * j].max(0.0).sqrt();
            assert!((alpha - expected).abs() <= 1e-10 * expected, "{alpha} vs {expected}");
            assert!((ev[2 * j] - ev[2 * j + 1]).abs() < 1e-10);
        }
        assert!(ev[4].abs() < 1e-12);
    }

    #[test]
    fn values_path_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [3, 8, 17] {
            let a = AntisymMatrix::from_matrix(random_antisymmetric(n, &mut rng)).unwrap();
            let full = youla(&a).unwrap().alphas;
            let vals = youla_values(&a);
            for (x, y) in full.iter().zip(&vals) {
                assert!((x - y).abs() < 1e-12 * full[0]);
            }
        }
    }

    #[test]
    fn tied_alphas_order_by_site() {
        // Two identical pairs on sites (3,4) and (1,2).
        let mut m = DMatrix::zeros(4, 4);
        m[(2, 3)] = 0.5;
        m[(3, 2)] = -0.5;
        m[(0, 1)] = 0.5;
        m[(1, 0)] = -0.5;
        let f = youla(&AntisymMatrix::from_matrix(m.clone()).unwrap()).unwrap();
        assert!((f.reconstruct() - m).amax() < 1e-14);
        assert!(f.q[(0, 0)].abs() + f.q[(1, 0)].abs() > 0.5);
    }

    #[test]
    fn identity_modes() {
        let f = youla(&asym(2, &[0.0, 1.0, -1.0, 0.0])).unwrap();
        let modes = paired_modes(&f);
        assert_eq!(modes.modes, DMatrix::identity(2, 2));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]
            #[test]
            fn factorization_contracts(n in 2usize..16, seed in any::<u64>()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let a = random_antisymmetric(n, &mut rng);
                let f = youla(&AntisymMatrix::from_matrix(a.clone()).unwrap()).unwrap();
                prop_assert!(orthogonality_defect(&f.q) <= 1e-12);
                let fro = a.norm();
                prop_assert!((f.reconstruct() - &a).norm() <= 1e-10 * fro.max(1.0));
                prop_assert!(f.alphas.windows(2).all(|w| w[0] >= w[1]));
                let sum: f64 = f.alphas.iter().map(|x| x * x).sum();
                prop_assert!((sum - 0.5 * fro * fro).abs() <= 1e-10 * fro * fro);
                prop_assert_eq!(f.kernel_columns.len(), n % 2);
            }
        }
    }
}
