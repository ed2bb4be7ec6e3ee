//! Small dense kernels shared by the factorization and the oracles.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

/// Reduces a real antisymmetric matrix to tridiagonal form `A = Q0 T Q0^T`
/// by Householder reflections.
///
/// Returns the subdiagonal `e` of `T` (`T[k+1][k] = e[k]`, `T[k][k+1] =
/// -e[k]`) and, when requested, `Q0`. The input is overwritten.
pub fn skew_tridiagonalize(a: &mut DMatrix<f64>, accumulate: bool) -> (Vec<f64>, Option<DMatrix<f64>>) {
    let n = a.nrows();
    assert!(a.is_square());
    let mut q0 = accumulate.then(|| DMatrix::<f64>::identity(n, n));
    let mut e = vec![0.0; n.saturating_sub(1)];
    if n < 2 {
        return (e, q0);
    }
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n - 1 {
        let len = n - k - 1;
        let x0 = a[(k + 1, k)];
        let tail_sq: f64 = (k + 2..n).map(|i| a[(i, k)] * a[(i, k)]).sum();
        if tail_sq == 0.0 {
            e[k] = x0;
            continue;
        }
        let norm = (x0 * x0 + tail_sq).sqrt();
        let beta = if x0 >= 0.0 { -norm } else { norm };
        let tau = (beta - x0) / beta;
        let scale = 1.0 / (x0 - beta);
        let v = &mut v[..len];
        v[0] = 1.0;
        for i in 1..len {
            v[i] = a[(k + 1 + i, k)] * scale;
        }
        e[k] = beta;
        for i in k + 1..n {
            a[(i, k)] = 0.0;
            a[(k, i)] = 0.0;
        }
        a[(k + 1, k)] = beta;
        a[(k, k + 1)] = -beta;

        // p = tau * S v over the trailing block S = A[k+1.., k+1..].
        let p = &mut p[..len];
        p.iter_mut().for_each(|x| *x = 0.0);
        for j in 0..len {
            let vj = tau * v[j];
            if vj == 0.0 {
                continue;
            }
            let col = a.column(k + 1 + j);
            let col = &col.as_slice()[k + 1..];
            for i in 0..len {
                p[i] += col[i] * vj;
            }
        }
        // S <- S + v p^T - p v^T
        for j in 0..len {
            let (pj, vj) = (p[j], v[j]);
            let mut col = a.column_mut(k + 1 + j);
            let col = &mut col.as_mut_slice()[k + 1..];
            for i in 0..len {
                col[i] += v[i] * pj - p[i] * vj;
            }
        }
        if let Some(q) = q0.as_mut() {
            // Q0[:, k+1..] <- Q0[:, k+1..] (I - tau v v^T)
            let mut w = vec![0.0; n];
            for j in 0..len {
                let vj = v[j];
                if vj == 0.0 {
                    continue;
                }
                let col = q.column(k + 1 + j);
                for (wi, &c) in w.iter_mut().zip(col.iter()) {
                    *wi += c * vj;
                }
            }
            for j in 0..len {
                let f = tau * v[j];
                if f == 0.0 {
                    continue;
                }
                let mut col = q.column_mut(k + 1 + j);
                for (c, &wi) in col.iter_mut().zip(w.iter()) {
                    *c -= wi * f;
                }
            }
        }
    }
    (e, q0)
}

/// `max |Q^T Q - I|`.
pub fn orthogonality_defect(q: &DMatrix<f64>) -> f64 {
    let g = q.tr_mul(q);
    let mut worst = 0.0_f64;
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `R`'s diagonal moved into `Q`.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Antisymmetric matrix with independent standard normal upper entries.
pub fn random_antisymmetric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let mut a = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        for i in 0..j {
            let x: f64 = rng.sample(StandardNormal);
            a[(i, j)] = x;
            a[(j, i)] = -x;
        }
    }
    a
}

/// Thin SVD `M = U diag(s) V^T` with `k = min(rows, cols)` triplets in
/// descending order.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub u: DMatrix<f64>,
    pub s: Vec<f64>,
    pub v_t: DMatrix<f64>,
}

/// One-sided Jacobi SVD. Slower than bidiagonalization but accurate to a
/// few ulps in every singular triplet, which the canonical MPS updates
/// need. Vectors belonging to exactly zero singular values are returned as
/// zeros.
pub fn jacobi_svd(m: &DMatrix<f64>) -> ThinSvd {
    if m.nrows() < m.ncols() {
        let t = jacobi_svd(&m.transpose());
        return ThinSvd {
            u: t.v_t.transpose(),
            s: t.s,
            v_t: t.u.transpose(),
        };
    }
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(cols, cols);
    for _sweep in 0..80 {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for r in 0..rows {
                    let (x, y) = (a[(r, i)], a[(r, j)]);
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..rows {
                    let (x, y) = (a[(r, i)], a[(r, j)]);
                    a[(r, i)] = c * x - s * y;
                    a[(r, j)] = s * x + c * y;
                }
                for r in 0..cols {
                    let (x, y) = (v[(r, i)], v[(r, j)]);
                    v[(r, i)] = c * x - s * y;
                    v[(r, j)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let mut u = DMatrix::<f64>::zeros(rows, cols);
    let mut v_t = DMatrix::<f64>::zeros(cols, cols);
    let mut s = Vec::with_capacity(cols);
    for (k, &j) in order.iter().enumerate() {
        s.push(norms[j]);
        if norms[j] > 0.0 {
            u.set_column(k, &(a.column(j) / norms[j]));
        }
        v_t.set_row(k, &v.column(j).transpose());
    }
    ThinSvd { u, s, v_t }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn jacobi_svd_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (r, c) in [(4, 10), (10, 4), (7, 7), (1, 5)] {
            let m = DMatrix::<f64>::from_fn(r, c, |_, _| rng.sample(StandardNormal));
            let svd = jacobi_svd(&m);
            let k = r.min(c);
            assert_eq!(svd.s.len(), k);
            assert!(svd.s.windows(2).all(|w| w[0] >= w[1]));
            let rec = &svd.u * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(svd.s.clone())) * &svd.v_t;
            assert!((rec - &m).amax() < 1e-14 * m.amax().max(1.0) * 10.0);
            assert!(orthogonality_defect(&svd.u) < 1e-14);
            assert!(orthogonality_defect(&svd.v_t.transpose()) < 1e-14);
        }
    }

    #[test]
    fn tridiagonal_form_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 3, 6, 9] {
            let a = random_antisymmetric(n, &mut rng);
            let mut work = a.clone();
            let (e, q0) = skew_tridiagonalize(&mut work, true);
            let q0 = q0.unwrap();
            let mut t = DMatrix::<f64>::zeros(n, n);
            for k in 0..n - 1 {
                t[(k + 1, k)] = e[k];
                t[(k, k + 1)] = -e[k];
            }
            let back = &q0 * t * q0.transpose();
            assert!((back - &a).amax() < 1e-13, "n = {n}");
            assert!(orthogonality_defect(&q0) < 1e-14);
        }
    }

    #[test]
    fn random_orthogonal_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = random_orthogonal(12, &mut rng);
        assert!(orthogonality_defect(&q) < 1e-14);
    }
}
