//! Independent references: two-particle Hamiltonians, exact diagonalization,
//! Schmidt spectra from the amplitude matrix, explicit partial traces and
//! dense simulators for the gate sequences.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bethe::ChainParams;
use crate::circuits::{GivensGate, PairRotation};
use crate::error::{Error, Result};
use crate::measures::von_neumann;
use crate::wavefunction::{pair_basis, pair_index, AntisymMatrix, UpperAmplitudes};

/// Largest chain with an explicitly stored two-particle Hamiltonian.
pub const DENSE_HAMILTONIAN_LIMIT: usize = 64;
/// Largest chain for the explicit partial trace.
pub const PARTIAL_TRACE_LIMIT: usize = 14;
/// Largest chain for full Fock-space operators.
pub const FOCK_LIMIT: usize = 12;
/// Required eigen-residual of the iterative solver.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-9;
const LANCZOS_SEED: u64 = 0x5eed_1a2c;

/// Sign of `c+_to c_from` acting on the occupation bitmask `occ` (bit
/// `s-1` is site `s`), or `None` if the move is blocked.
fn hop(occ: u128, from: usize, to: usize) -> Option<(u128, f64)> {
    let (fb, tb) = (1u128 << (from - 1), 1u128 << (to - 1));
    if occ & fb == 0 || (occ & tb != 0 && from != to) {
        return None;
    }
    let below = |mask: u128, site: usize| (mask & ((1u128 << (site - 1)) - 1)).count_ones();
    let removed = occ & !fb;
    let sign = below(occ, from) + below(removed, to);
    let sign = if sign % 2 == 0 { 1.0 } else { -1.0 };
    Some((removed | tb, sign))
}

/// Off-diagonal and diagonal structure of `H` in the two-particle basis.
#[derive(Debug, Clone)]
pub struct SparseHamiltonian {
    dim: usize,
    diagonal: Vec<f64>,
    /// `(row, col, value)` hopping entries.
    offdiag: Vec<(usize, usize, f64)>,
}

impl SparseHamiltonian {
    pub fn new(params: &ChainParams) -> Result<Self> {
        params.validate()?;
        let n = params.n;
        let basis = pair_basis(n);
        let dim = basis.len();
        let mut diagonal = vec![0.0; dim];
        let mut offdiag = Vec::with_capacity(4 * dim);
        for (col, &(m1, m2)) in basis.iter().enumerate() {
            let adjacent = m2 == m1 + 1 || (m1 == 1 && m2 == n);
            if adjacent {
                diagonal[col] = params.u;
            }
            if params.j == 0.0 {
                continue;
            }
            for &m in &[m1, m2] {
                for to in [if m == n { 1 } else { m + 1 }, if m == 1 { n } else { m - 1 }] {
                    let occ = (1u128 << (m1 - 1)) | (1u128 << (m2 - 1));
                    if n > 128 {
                        // Bitmask signs only cover 128 sites; use the
                        // ordering rule instead.
                        let other = if m == m1 { m2 } else { m1 };
                        if to == other {
                            continue;
                        }
                        let crosses = (m < other) != (to < other);
                        let (a, b) = if to < other { (to, other) } else { (other, to) };
                        let sign = if crosses { -1.0 } else { 1.0 };
                        offdiag.push((pair_index(n, a, b), col, params.j * sign));
                        continue;
                    }
                    if let Some((next, sign)) = hop(occ, m, to) {
                        let a = next.trailing_zeros() as usize + 1;
                        let b = 128 - next.leading_zeros() as usize;
                        offdiag.push((pair_index(n, a, b), col, params.j * sign));
                    }
                }
            }
        }
        Ok(Self {
            dim,
            diagonal,
            offdiag,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for ((yi, &d), &xi) in y.iter_mut().zip(&self.diagonal).zip(x) {
            *yi = d * xi;
        }
        for &(r, c, v) in &self.offdiag {
            y[r] += v * x[c];
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut h = DMatrix::from_diagonal(&DVector::from_column_slice(&self.diagonal));
        for &(r, c, v) in &self.offdiag {
            h[(r, c)] += v;
        }
        h
    }
}

/// `H` over the lexicographic two-particle basis.
pub fn dense_hamiltonian(params: &ChainParams) -> Result<DMatrix<f64>> {
    if params.n > DENSE_HAMILTONIAN_LIMIT {
        return Err(Error::Capacity {
            what: "dense Hamiltonian (sites)",
            required: params.n,
            limit: DENSE_HAMILTONIAN_LIMIT,
        });
    }
    Ok(SparseHamiltonian::new(params)?.to_dense())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactGround {
    pub e0: f64,
    pub e1: f64,
    pub vector: DVector<f64>,
    pub residual: f64,
}

/// All eigenvalues, ascending.
pub fn dense_spectrum(params: &ChainParams) -> Result<Vec<f64>> {
    let h = dense_hamiltonian(params)?;
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

pub fn exact_ground_dense(params: &ChainParams) -> Result<ExactGround> {
    let h = dense_hamiltonian(params)?;
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    if order.len() < 2 {
        return Err(Error::Numerical("sector too small".into()));
    }
    let vector = eig.eigenvectors.column(order[0]).into_owned();
    let e0 = eig.eigenvalues[order[0]];
    let residual = (&h * &vector - &vector * e0).norm();
    Ok(ExactGround {
        e0,
        e1: eig.eigenvalues[order[1]],
        vector,
        residual,
    })
}

/// Two lowest eigenvalues by thick-restart Lanczos with full
/// reorthogonalization, from a fixed-seed random start vector.
pub fn exact_ground(params: &ChainParams) -> Result<ExactGround> {
    let h = SparseHamiltonian::new(params)?;
    lanczos_lowest(&h, 2)
}

fn lanczos_lowest(h: &SparseHamiltonian, wanted: usize) -> Result<ExactGround> {
    let dim = h.dim();
    if dim <= 2 * wanted + 2 {
        let dense = h.to_dense();
        let eig = dense.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let vector = eig.eigenvectors.column(order[0]).into_owned();
        let e0 = eig.eigenvalues[order[0]];
        let residual = (&dense * &vector - &vector * e0).norm();
        return Ok(ExactGround {
            e0,
            e1: eig.eigenvalues[order[1]],
            vector,
            residual,
        });
    }
    let max_basis = dim.min(96);
    let keep = (wanted + 6).min(max_basis - 2);
    let scale = h
        .diagonal
        .iter()
        .map(|d| d.abs())
        .fold(0.0_f64, f64::max)
        .max(h.offdiag.iter().map(|e| e.2.abs()).fold(0.0, f64::max))
        .max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(LANCZOS_SEED);
    let mut start: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
    normalize(&mut start);

    let mut basis: Vec<Vec<f64>> = vec![start];
    let mut t = DMatrix::<f64>::zeros(max_basis, max_basis);
    let mut locked = 0usize;
    let mut w = vec![0.0; dim];
    for _restart in 0..500 {
        let mut j = locked;
        while j < max_basis {
            h.matvec(&basis[j], &mut w);
            for (i, v) in basis.iter().enumerate() {
                // Rows below `locked` carry the arrowhead couplings of the
                // restarted Ritz vectors.
                let c = dot(v, &w);
                t[(i, j)] = c;
                t[(j, i)] = c;
                axpy(-c, v, &mut w);
            }
            for v in basis.iter() {
                let c = dot(v, &w);
                axpy(-c, v, &mut w);
            }
            let beta = norm(&w);
            if j + 1 == max_basis || beta <= 1e-14 * scale {
                j += 1;
                break;
            }
            let next: Vec<f64> = w.iter().map(|x| x / beta).collect();
            if j + 1 < max_basis {
                basis.push(next);
            }
            j += 1;
        }
        let m = j;
        let sub = t.view((0, 0), (m, m)).into_owned();
        let eig = sub.symmetric_eigen();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        // Ritz vectors of the lowest `keep` values.
        let kept = keep.min(m);
        let ritz: Vec<Vec<f64>> = order[..kept]
            .iter()
            .map(|&c| {
                let mut y = vec![0.0; dim];
                for (i, v) in basis.iter().take(m).enumerate() {
                    axpy(eig.eigenvectors[(i, c)], v, &mut y);
                }
                y
            })
            .collect();
        let mut residuals = Vec::with_capacity(wanted);
        for (y, &c) in ritz.iter().zip(&order).take(wanted) {
            h.matvec(y, &mut w);
            axpy(-eig.eigenvalues[c], y, &mut w);
            residuals.push(norm(&w));
        }
        let worst = residuals.iter().cloned().fold(0.0_f64, f64::max);
        if worst <= 1e-11 * scale || m < max_basis {
            let e0 = eig.eigenvalues[order[0]];
            let e1 = eig.eigenvalues[order[1]];
            let residual = residuals[0];
            if residual > EIGEN_RESIDUAL_TOL {
                return Err(Error::NoConvergence {
                    iterations: m,
                    worst_residual: residual,
                });
            }
            return Ok(ExactGround {
                e0,
                e1,
                vector: DVector::from_vec(ritz[0].clone()),
                residual,
            });
        }
        // Restart from the kept Ritz vectors plus the last residual direction.
        let mut next = w.clone();
        h.matvec(&basis[m - 1], &mut next);
        for v in basis.iter() {
            let c = dot(v, &next);
            axpy(-c, v, &mut next);
        }
        for y in &ritz {
            let c = dot(y, &next);
            axpy(-c, y, &mut next);
        }
        normalize(&mut next);
        t.fill(0.0);
        for (i, &c) in order[..kept].iter().enumerate() {
            t[(i, i)] = eig.eigenvalues[c];
        }
        basis = ritz;
        basis.push(next);
        locked = kept;
    }
    Err(Error::NoConvergence {
        iterations: 500,
        worst_residual: f64::NAN,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

fn normalize(x: &mut [f64]) {
    let n = norm(x);
    x.iter_mut().for_each(|v| *v /= n);
}

/// Schmidt spectrum across the cut after site `cut`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorSpectrum {
    pub cut: usize,
    /// Singular values of the `L x (N-L)` block (one fermion on each side).
    pub sv_11: Vec<f64>,
    /// Norm of the amplitudes with both fermions left of the cut.
    pub w_20: f64,
    pub w_02: f64,
    /// All nonzero Schmidt values, descending.
    pub schmidt: Vec<f64>,
}

impl SectorSpectrum {
    pub fn entropy(&self) -> Result<f64> {
        von_neumann(&self.schmidt.iter().map(|s| s * s).collect::<Vec<_>>())
    }
}

/// Schmidt values from the blocks of the amplitude matrix.
pub fn sector_schmidt(a: &AntisymMatrix, cut: usize) -> Result<SectorSpectrum> {
    let n = a.sites();
    if cut == 0 || cut >= n {
        return Err(Error::InvalidParams(format!("cut {cut} outside 1..{n}")));
    }
    let m = a.matrix();
    let cross = m.view((0, cut), (cut, n - cut)).into_owned();
    let w_20 = m.view((0, 0), (cut, cut)).norm() / std::f64::consts::SQRT_2;
    let w_02 = m.view((cut, cut), (n - cut, n - cut)).norm() / std::f64::consts::SQRT_2;
    let sv_11 = singular_values(&cross);
    let mut schmidt: Vec<f64> = sv_11
        .iter()
        .copied()
        .chain([w_20, w_02])
        .filter(|&x| x > 0.0)
        .collect();
    schmidt.sort_by(|x, y| y.total_cmp(x));
    Ok(SectorSpectrum {
        cut,
        sv_11,
        w_20,
        w_02,
        schmidt,
    })
}

/// Singular values, descending. Large blocks go through a seeded
/// randomized range finder whose residual is checked; the rank guess is
/// doubled until the captured weight is complete, with a full SVD as the
/// last resort.
fn singular_values(c: &DMatrix<f64>) -> Vec<f64> {
    let (r, k) = (c.nrows(), c.ncols());
    let small = r.min(k);
    let mut sketch = 12usize;
    if small > 48 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0c0ffee);
        while 2 * sketch < small {
            let omega = DMatrix::<f64>::from_fn(k, sketch, |_, _| StandardNormal.sample(&mut rng));
            let y = c * omega;
            let q = y.qr().q();
            let b = q.tr_mul(c);
            let resid = (c - &q * &b).norm();
            if resid <= 1e-13 {
                let mut sv: Vec<f64> = b.singular_values().iter().copied().collect();
                sv.sort_by(|x, y| y.total_cmp(x));
                // Directions beyond the rank carry rounding noise only.
                let floor = 1e-13 * sv.first().copied().unwrap_or(0.0);
                sv.retain(|&s| s > floor);
                return sv;
            }
            sketch *= 2;
        }
    }
    let mut sv: Vec<f64> = c.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv.retain(|&s| s > 0.0);
    sv
}

/// Explicit reduced density matrix of sites `1..=cut` from a two-particle
/// vector. Returns its spectrum (descending) and entropy.
pub fn partial_trace_entropy(v: &DVector<f64>, cut: usize, sites: usize) -> Result<(Vec<f64>, f64)> {
    if sites > PARTIAL_TRACE_LIMIT {
        return Err(Error::Capacity {
            what: "partial trace (sites)",
            required: sites,
            limit: PARTIAL_TRACE_LIMIT,
        });
    }
    if v.len() != sites * (sites - 1) / 2 {
        return Err(Error::Contract("vector length does not match the sector".into()));
    }
    if cut > sites {
        return Err(Error::InvalidParams(format!("cut {cut} beyond {sites} sites")));
    }
    // Block configurations with at most two fermions, keyed by bitmask.
    let configs = |lo: usize, hi: usize| -> Vec<u32> {
        let mut out = vec![0u32];
        for a in lo..=hi {
            out.push(1 << a);
        }
        for a in lo..=hi {
            for b in a + 1..=hi {
                out.push((1 << a) | (1 << b));
            }
        }
        out
    };
    let left = configs(1, cut);
    let right = configs(cut + 1, sites);
    let li = |mask: u32| left.iter().position(|&x| x == mask).expect("left config");
    let ri = |mask: u32| right.iter().position(|&x| x == mask).expect("right config");
    let mut psi = DMatrix::<f64>::zeros(left.len(), right.len());
    for (idx, (m1, m2)) in pair_basis(sites).into_iter().enumerate() {
        let (b1, b2) = (1u32 << m1, 1u32 << m2);
        let (lm, rm) = match (m1 <= cut, m2 <= cut) {
            (true, true) => (b1 | b2, 0),
            (true, false) => (b1, b2),
            _ => (0, b1 | b2),
        };
        psi[(li(lm), ri(rm))] += v[idx];
    }
    let rho = &psi * psi.transpose();
    let mut spectrum: Vec<f64> = rho.symmetric_eigenvalues().iter().map(|&x| x.max(0.0)).collect();
    spectrum.sort_by(|x, y| y.total_cmp(x));
    let total: f64 = spectrum.iter().sum();
    let entropy = von_neumann(&spectrum.iter().map(|x| x / total).collect::<Vec<_>>())?;
    Ok((spectrum, entropy))
}

/// `A -> R A R^T` for a Givens mode rotation on `(j, j+1)`.
pub fn simulate_givens(a: &mut DMatrix<f64>, g: &GivensGate) {
    let (s, c) = (g.theta / 2.0).sin_cos();
    let (lo, hi) = (g.j - 1, g.j);
    // R: c+_lo -> c c+_lo - s c+_hi, c+_hi -> c c+_hi + s c+_lo.
    for apply_rows in [true, false] {
        let len = a.nrows();
        for t in 0..len {
            let (x, y) = if apply_rows {
                (a[(lo, t)], a[(hi, t)])
            } else {
                (a[(t, lo)], a[(t, hi)])
            };
            let (nx, ny) = (c * x + s * y, c * y - s * x);
            if apply_rows {
                a[(lo, t)] = nx;
                a[(hi, t)] = ny;
            } else {
                a[(t, lo)] = nx;
                a[(t, hi)] = ny;
            }
        }
    }
}

/// Pair rotation on the amplitudes of `omega_l` and `omega_{l+1}`.
pub fn simulate_pair_rotation(a: &mut DMatrix<f64>, r: &PairRotation) {
    let (s, c) = (r.phi / 2.0).sin_cos();
    let (p, q) = (2 * r.l - 2, 2 * r.l);
    let (x, y) = (a[(p, p + 1)], a[(q, q + 1)]);
    let (nx, ny) = (c * x - s * y, s * x + c * y);
    a[(p, p + 1)] = nx;
    a[(p + 1, p)] = -nx;
    a[(q, q + 1)] = ny;
    a[(q + 1, q)] = -ny;
}

/// Amplitude matrix of the ladder state `sum_l a_l omega_l` on `sites`.
pub fn ladder_matrix(alphas: &[f64], sites: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(sites, sites);
    for (j, &a) in alphas.iter().enumerate() {
        m[(2 * j, 2 * j + 1)] = a;
        m[(2 * j + 1, 2 * j)] = -a;
    }
    m
}

/// Fermionic operators on the full `2^N` Fock space, basis index
/// `sum_s n_s 2^{N-s}`, with Jordan-Wigner strings over lower sites.
#[derive(Debug, Clone)]
pub struct FockSpace {
    sites: usize,
    annihilators: Vec<DMatrix<f64>>,
}

impl FockSpace {
    pub fn new(sites: usize) -> Result<Self> {
        if sites > FOCK_LIMIT {
            return Err(Error::Capacity {
                what: "Fock-space operators (sites)",
                required: sites,
                limit: FOCK_LIMIT,
            });
        }
        let dim = 1usize << sites;
        let bit = |s: usize| 1usize << (sites - s);
        let annihilators = (1..=sites)
            .map(|s| {
                let mut c = DMatrix::zeros(dim, dim);
                for idx in 0..dim {
                    if idx & bit(s) != 0 {
                        let lower = (1..s).filter(|&t| idx & bit(t) != 0).count();
                        c[(idx ^ bit(s), idx)] = if lower % 2 == 0 { 1.0 } else { -1.0 };
                    }
                }
                c
            })
            .collect();
        Ok(Self {
            sites,
            annihilators,
        })
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    /// `c_s` for 1-based `s`.
    pub fn c(&self, s: usize) -> &DMatrix<f64> {
        &self.annihilators[s - 1]
    }

    /// `exp(theta/2 (c+_j c_{j+1} - c+_{j+1} c_j))`.
    pub fn givens_unitary(&self, g: &GivensGate) -> DMatrix<f64> {
        let (a, b) = (self.c(g.j), self.c(g.j + 1));
        let gen = a.transpose() * b - b.transpose() * a;
        (gen * (g.theta / 2.0)).exp()
    }

    /// `exp(phi/2 (P+_{l+1} P_l - P+_l P_{l+1}))`, `P_l = c_{2l} c_{2l-1}`.
    pub fn pair_unitary(&self, r: &PairRotation) -> DMatrix<f64> {
        let pair = |l: usize| self.c(2 * l) * self.c(2 * l - 1);
        let (p, q) = (pair(r.l), pair(r.l + 1));
        let gen = q.transpose() * &p - p.transpose() * &q;
        (gen * (r.phi / 2.0)).exp()
    }

    /// Embeds two-particle amplitudes `a[m1][m2] c+_{m1} c+_{m2} |0>`.
    pub fn embed(&self, a: &UpperAmplitudes) -> DVector<f64> {
        embed_two_particle(a).expect("size checked at construction")
    }
}

/// Two-particle amplitudes in the `2^N` Fock space (`N <= 20`).
pub fn embed_two_particle(a: &UpperAmplitudes) -> Result<DVector<f64>> {
    let n = a.sites();
    if n > crate::mps::CONTRACT_SITE_LIMIT {
        return Err(Error::Capacity {
            what: "dense Fock vector (sites)",
            required: n,
            limit: crate::mps::CONTRACT_SITE_LIMIT,
        });
    }
    let mut v = DVector::zeros(1 << n);
    for (m1, m2) in pair_basis(n) {
        v[(1 << (n - m1)) | (1 << (n - m2))] = a.get(m1, m2);
    }
    Ok(v)
}
