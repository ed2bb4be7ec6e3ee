//! Canonical matrix-product states for spinless fermions.
//!
//! Site tensors `Gamma_s^k` (`k` the occupation of site `s`) and bond
//! vectors `lambda_b` follow the Vidal form: the state is
//! `lambda_0 Gamma_1 lambda_1 Gamma_2 ... Gamma_N lambda_N`. Each site keeps
//! both orthonormal products, `A_s = lambda_{s-1} Gamma_s` and
//! `B_s = Gamma_s lambda_s`. Gates act on both and are split by SVDs
//! weighted with the left bond: `B` of a split-off site is `V^T`, its `A` is
//! `U^T` times the gated `A` product, and no update divides by a `lambda`.
//! Small Schmidt values therefore never amplify rounding errors.
//!
//! Occupations are ordered by site with creation operators in ascending
//! site order. Adjacent number-conserving gates and pair rotations inside a
//! contiguous block need no Jordan-Wigner string corrections.

use log::{debug, trace};
use nalgebra::{DMatrix, DVector, Matrix4};
use serde::{Deserialize, Serialize};

use crate::circuits::{Direction, GivensGate, GivensSchedule, PairRotation};
use crate::error::{Error, Result};
use crate::linalg::jacobi_svd;
use crate::measures::von_neumann;

/// Default singular-value cutoff.
pub const DEFAULT_TRUNC_TOL: f64 = 1e-12;
/// Singular values below this fraction of the largest are rounding noise
/// and are always dropped.
pub const ROUNDING_FLOOR: f64 = 1e-14;
/// Largest relative norm a truncation may remove from one Schmidt vector
/// of the neighbouring bonds; smaller defects are removed by a polar
/// re-orthonormalization.
pub const SPLIT_LOSS_TOL: f64 = 0.5;
/// Largest chain expanded into the full `2^N` Fock space.
pub const CONTRACT_SITE_LIMIT: usize = 20;
/// Canonical residual above which entropy readout refuses.
pub const CANONICAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpsConfig {
    pub chi_max: usize,
    pub trunc_tol: f64,
}

impl MpsConfig {
    /// `chi_max = 2 + ceil(N/2)`, the two-particle Schmidt-rank bound.
    pub fn for_sites(sites: usize) -> Self {
        Self {
            chi_max: 2 + sites.div_ceil(2),
            trunc_tol: DEFAULT_TRUNC_TOL,
        }
    }

    /// No truncation beyond the rounding floor and no bond cap.
    pub fn exact() -> Self {
        Self {
            chi_max: usize::MAX,
            trunc_tol: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct UpdateStats {
    pub gates_applied: usize,
    pub discarded_weight: f64,
    /// Sum over gates of `| ||psi|| - 1 |` before renormalization.
    pub cumulative_norm_drift: f64,
    pub max_norm_drift: f64,
}

/// Real gate on the occupation basis `|00>, |01>, |10>, |11>` (index
/// `2 n_j + n_{j+1}`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSiteGate {
    pub u: Matrix4<f64>,
}

impl TwoSiteGate {
    pub fn new(u: Matrix4<f64>) -> Result<Self> {
        let defect = (u.transpose() * u - Matrix4::identity()).amax();
        if defect > 1e-12 {
            return Err(Error::Contract(format!("gate is not orthogonal ({defect:e})")));
        }
        Ok(Self { u })
    }

    pub fn identity() -> Self {
        Self {
            u: Matrix4::identity(),
        }
    }

    fn as_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(4, 4, |i, j| self.u[(i, j)])
    }
}

/// The Givens mode rotation as a two-site gate: identity on `|00>` and
/// `|11>`, and on the one-particle block
/// `c+_{j+1} -> c c+_{j+1} + s c+_j`, `c+_j -> c c+_j - s c+_{j+1}`.
pub fn gate_from_givens(g: &GivensGate) -> TwoSiteGate {
    let (s, c) = (g.theta / 2.0).sin_cos();
    let mut u = Matrix4::identity();
    u[(1, 1)] = c;
    u[(2, 1)] = s;
    u[(1, 2)] = -s;
    u[(2, 2)] = c;
    TwoSiteGate { u }
}

/// 16x16 pair rotation on sites `2l-1 .. 2l+2` (index `8 n1 + 4 n2 + 2 n3 +
/// n4`): `|1100> -> cos(phi/2)|1100> + sin(phi/2)|0011>`.
pub fn pair_rotation_gate(phi: f64) -> DMatrix<f64> {
    let (s, c) = (phi / 2.0).sin_cos();
    let mut u = DMatrix::identity(16, 16);
    let (left, right) = (0b1100, 0b0011);
    u[(left, left)] = c;
    u[(right, left)] = s;
    u[(left, right)] = -s;
    u[(right, right)] = c;
    u
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalMps {
    sites: usize,
    /// `A_s^k = lambda_s Gamma_s^k`, `chi_s x chi_{s+1}` for 0-based site `s`.
    left: Vec<[DMatrix<f64>; 2]>,
    /// `B_s^k = Gamma_s^k lambda_{s+1}`.
    right: Vec<[DMatrix<f64>; 2]>,
    /// `lambdas[b]` for bonds `b = 0..=N`.
    lambdas: Vec<Vec<f64>>,
    config: MpsConfig,
    stats: UpdateStats,
}

impl CanonicalMps {
    /// Product Fock state with the given occupations.
    pub fn product(occupations: &[bool], config: MpsConfig) -> Result<Self> {
        let sites = occupations.len();
        if sites == 0 {
            return Err(Error::InvalidParams("empty chain".into()));
        }
        let tensors: Vec<[DMatrix<f64>; 2]> = occupations
            .iter()
            .map(|&occ| {
                let one = DMatrix::from_element(1, 1, 1.0);
                let zero = DMatrix::zeros(1, 1);
                if occ {
                    [zero, one]
                } else {
                    [one, zero]
                }
            })
            .collect();
        Ok(Self {
            sites,
            left: tensors.clone(),
            right: tensors,
            lambdas: vec![vec![1.0]; sites + 1],
            config,
            stats: UpdateStats::default(),
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn config(&self) -> MpsConfig {
        self.config
    }

    pub fn stats(&self) -> UpdateStats {
        self.stats
    }

    /// `Gamma^k` of 1-based site `s`, recovered as `B / lambda_s`.
    pub fn gamma(&self, s: usize, k: usize) -> DMatrix<f64> {
        let mut g = self.right[s - 1][k].clone();
        for (j, &l) in self.lambdas[s].iter().enumerate() {
            g.column_mut(j).scale_mut(1.0 / l);
        }
        g
    }

    /// Left-orthonormal `A^k = lambda_{s-1} Gamma^k` of 1-based site `s`.
    pub fn left_tensor(&self, s: usize, k: usize) -> &DMatrix<f64> {
        &self.left[s - 1][k]
    }

    /// Right-orthonormal `B^k = Gamma^k lambda_s` of 1-based site `s`.
    pub fn right_tensor(&self, s: usize, k: usize) -> &DMatrix<f64> {
        &self.right[s - 1][k]
    }

    /// Schmidt coefficients across bond `b` (sites `1..=b` on the left).
    pub fn lambda(&self, b: usize) -> &[f64] {
        &self.lambdas[b]
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        self.lambdas.iter().map(Vec::len).collect()
    }

    pub fn max_bond_dim(&self) -> usize {
        self.lambdas.iter().map(Vec::len).max().unwrap_or(1)
    }

    /// Largest deviation from the left and right orthonormality conditions,
    /// from unit-norm bonds, and between `lambda_{s-1} B_s` and `A_s lambda_s`.
    pub fn canonical_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for s in 0..self.sites {
            let (ll, lr) = (&self.lambdas[s], &self.lambdas[s + 1]);
            let mut left = DMatrix::<f64>::zeros(lr.len(), lr.len());
            let mut right = DMatrix::<f64>::zeros(ll.len(), ll.len());
            for k in 0..2 {
                let a = &self.left[s][k];
                let b = &self.right[s][k];
                left += a.tr_mul(a);
                right += b * b.transpose();
                for i in 0..ll.len() {
                    for j in 0..lr.len() {
                        worst = worst.max((ll[i] * b[(i, j)] - a[(i, j)] * lr[j]).abs());
                    }
                }
            }
            worst = worst
                .max((left - DMatrix::identity(lr.len(), lr.len())).amax())
                .max((right - DMatrix::identity(ll.len(), ll.len())).amax());
        }
        for l in &self.lambdas {
            let norm: f64 = l.iter().map(|x| x * x).sum();
            worst = worst.max((norm - 1.0).abs());
        }
        worst
    }

    /// `sum_s <n_s>`.
    pub fn particle_number(&self) -> f64 {
        (0..self.sites)
            .map(|s| {
                let a = &self.left[s][1];
                let lr = &self.lambdas[s + 1];
                let mut acc = 0.0;
                for i in 0..a.nrows() {
                    for j in 0..a.ncols() {
                        let x = a[(i, j)] * lr[j];
                        acc += x * x;
                    }
                }
                acc
            })
            .sum()
    }

    /// Applies a two-site gate on sites `j, j+1` (1-based).
    pub fn apply_two_site(&mut self, j: usize, gate: &TwoSiteGate) -> Result<()> {
        self.apply_gate(j, 2, &gate.as_dmatrix())
    }

    /// Applies a pair rotation on sites `2l-1 .. 2l+2`. The two pairs of
    /// sites are treated as four-dimensional blocks, so the rotation is a
    /// nearest-neighbour gate of the blocked chain; the result is split back
    /// into single sites by successive SVDs.
    pub fn apply_four_site(&mut self, r: &PairRotation) -> Result<()> {
        if r.l == 0 || 2 * r.l + 2 > self.sites {
            return Err(Error::InvalidParams(format!(
                "pair rotation l = {} needs sites {}..={} in a chain of {}",
                r.l,
                2 * r.l as i64 - 1,
                2 * r.l + 2,
                self.sites
            )));
        }
        self.apply_gate(2 * r.l - 1, 4, &pair_rotation_gate(r.phi))
    }

    /// Applies a `2^width` dimensional gate on sites `first ..
    /// first+width-1` (1-based). Index `K` of the gate has the first site as
    /// its most significant bit.
    pub fn apply_gate(&mut self, first: usize, width: usize, u: &DMatrix<f64>) -> Result<()> {
        let dim = 1usize << width;
        if first == 0 || first + width - 1 > self.sites || width == 0 {
            return Err(Error::InvalidParams(format!(
                "gate on sites {first}..{} outside chain of {}",
                first + width - 1,
                self.sites
            )));
        }
        if u.nrows() != dim || u.ncols() != dim {
            return Err(Error::Contract(format!("gate must be {dim}x{dim}")));
        }
        let s0 = first - 1;

        // theta[K] = B_{s0}^{k1} ... B_{s0+width-1}^{kw}, and the same
        // product of A tensors.
        let gated = |tensors: &[[DMatrix<f64>; 2]]| -> Vec<DMatrix<f64>> {
            let mut prod: Vec<DMatrix<f64>> = tensors[s0].to_vec();
            for t in &tensors[s0 + 1..s0 + width] {
                prod = prod.iter().flat_map(|p| [p * &t[0], p * &t[1]]).collect();
            }
            let (rows, cols) = (prod[0].nrows(), prod[0].ncols());
            (0..dim)
                .map(|kk| {
                    let mut out = DMatrix::<f64>::zeros(rows, cols);
                    for (kp, p) in prod.iter().enumerate() {
                        let w = u[(kk, kp)];
                        if w != 0.0 {
                            out += p * w;
                        }
                    }
                    out
                })
                .collect()
        };
        let mut theta = gated(&self.right);
        let mut theta_a = gated(&self.left);

        let left_lambda = self.lambdas[s0].clone();
        let norm = theta
            .iter()
            .map(|t| {
                let mut acc = 0.0;
                for i in 0..t.nrows() {
                    for j in 0..t.ncols() {
                        let x = left_lambda[i] * t[(i, j)];
                        acc += x * x;
                    }
                }
                acc
            })
            .sum::<f64>()
            .sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Numerical(format!("state norm {norm} after gate")));
        }
        let drift = (norm - 1.0).abs();
        self.stats.cumulative_norm_drift += drift;
        self.stats.max_norm_drift = self.stats.max_norm_drift.max(drift);
        if drift > 1e-10 {
            debug!("norm drift {drift:e} at sites {first}..{}", first + width - 1);
        }
        for t in theta.iter_mut().chain(theta_a.iter_mut()) {
            t.scale_mut(1.0 / norm);
        }

        // Split off the rightmost site until one remains.
        let chi_l = left_lambda.len();
        for r in (2..=width).rev() {
            let site = s0 + r - 1;
            let chi_r = theta[0].ncols();
            let rest = theta.len() / 2;
            let reshape = |t: &[DMatrix<f64>], weighted: bool| {
                let mut m = DMatrix::<f64>::zeros(rest * chi_l, 2 * chi_r);
                for kr in 0..rest {
                    for k in 0..2 {
                        let src = &t[2 * kr + k];
                        for a in 0..chi_l {
                            let w = if weighted { left_lambda[a] } else { 1.0 };
                            for b in 0..chi_r {
                                m[(kr * chi_l + a, k * chi_r + b)] = w * src[(a, b)];
                            }
                        }
                    }
                }
                m
            };
            let svd = jacobi_svd(&reshape(&theta, true));
            let mut keep: Vec<usize> = (0..svd.s.len())
                .filter(|&i| svd.s[i] > self.config.trunc_tol && svd.s[i] > ROUNDING_FLOOR * svd.s[0])
                .collect();
            // Dropping a value removes norm from the neighbouring rows of B
            // and columns of A in proportion to (sigma / lambda)^2. Values are
            // restored, largest first, while a Schmidt vector would lose more
            // than SPLIT_LOSS_TOL of its norm.
            let right_lambda = &self.lambdas[site + 1];
            while keep.len() < svd.s.len()
                && split_loss(&svd, &keep, &left_lambda, right_lambda, rest, chi_r) > SPLIT_LOSS_TOL
            {
                let next = (0..svd.s.len()).find(|i| !keep.contains(i)).expect("a dropped value");
                keep.push(next);
                keep.sort_unstable();
            }
            if keep.is_empty() {
                return Err(Error::Numerical("all singular values truncated".into()));
            }
            if keep.len() > self.config.chi_max {
                return Err(Error::Capacity {
                    what: "bond dimension",
                    required: keep.len(),
                    limit: self.config.chi_max,
                });
            }
            let discarded: f64 = (0..svd.s.len())
                .filter(|i| !keep.contains(i))
                .map(|i| svd.s[i].powi(2))
                .sum();
            self.stats.discarded_weight += discarded;
            if discarded > 0.0 {
                trace!("discarded weight {discarded:e} at bond {}", site);
            }
            let kept_norm = keep.iter().map(|&i| svd.s[i].powi(2)).sum::<f64>().sqrt();
            let chi_new = keep.len();
            let vt = DMatrix::from_fn(chi_new, 2 * chi_r, |row, c| svd.v_t[(keep[row], c)]);
            let uk = DMatrix::from_fn(rest * chi_l, chi_new, |row, c| svd.u[(row, keep[c])]);

            // B = V^T; A = U^T (gated A product), both without dividing by lambda.
            let a_site = uk.tr_mul(&reshape(&theta_a, false)) / kept_norm;
            self.right[site] = [0, 1].map(|k| vt.columns(k * chi_r, chi_r).into_owned());
            self.left[site] = [0, 1].map(|k| a_site.columns(k * chi_r, chi_r).into_owned());
            orthonormalize_columns(&mut self.left[site]);
            self.lambdas[site] = keep.iter().map(|&i| svd.s[i] / kept_norm).collect();

            // Remaining B product: theta V / kept_norm. Remaining A product: U.
            let m_plain = reshape(&theta, false) * vt.transpose() / kept_norm;
            theta = (0..rest)
                .map(|kr| m_plain.rows(kr * chi_l, chi_l).into_owned())
                .collect();
            theta_a = (0..rest).map(|kr| uk.rows(kr * chi_l, chi_l).into_owned()).collect();
        }
        self.right[s0] = [theta[0].clone(), theta[1].clone()];
        orthonormalize_rows(&mut self.right[s0]);
        self.left[s0] = [theta_a[0].clone(), theta_a[1].clone()];
        self.stats.gates_applied += 1;
        Ok(())
    }

    /// Block entropies `S_L`, `L = 1 .. N-1`, in nats, with `p = lambda^2`.
    pub fn block_entropy_profile(&self) -> Result<Vec<f64>> {
        let residual = self.canonical_residual();
        if !(residual <= CANONICAL_TOL) {
            return Err(Error::Numerical(format!(
                "state is not canonical: residual {residual:e}"
            )));
        }
        (1..self.sites)
            .map(|b| von_neumann(&self.lambdas[b].iter().map(|l| l * l).collect::<Vec<_>>()))
            .collect()
    }

    /// Full Fock-space vector, index `sum_s n_s 2^{N-s}`.
    pub fn contract_to_vector(&self) -> Result<DVector<f64>> {
        if self.sites > CONTRACT_SITE_LIMIT {
            return Err(Error::Capacity {
                what: "dense Fock vector (sites)",
                required: self.sites,
                limit: CONTRACT_SITE_LIMIT,
            });
        }
        let mut rows = vec![DMatrix::from_element(1, 1, self.lambdas[0][0])];
        for s in 0..self.sites {
            let b = &self.right[s];
            rows = rows.iter().flat_map(|r| [r * &b[0], r * &b[1]]).collect();
        }
        Ok(DVector::from_iterator(rows.len(), rows.iter().map(|r| r[(0, 0)])))
    }

    pub fn snapshot(&self) -> MpsSnapshot {
        MpsSnapshot {
            sites: self.sites,
            chi_max: self.config.chi_max,
            trunc_tol: self.config.trunc_tol,
            bond_dims: self.bond_dims(),
            lambdas: self.lambdas.clone(),
            left: flatten(&self.left),
            right: flatten(&self.right),
            stats: self.stats,
        }
    }

    pub fn from_snapshot(snap: &MpsSnapshot) -> Result<Self> {
        let n = snap.sites;
        if snap.lambdas.len() != n + 1
            || snap.left.len() != n
            || snap.right.len() != n
            || snap.bond_dims.len() != n + 1
        {
            return Err(Error::Parse("snapshot array lengths do not match site count".into()));
        }
        for (b, l) in snap.lambdas.iter().enumerate() {
            if l.len() != snap.bond_dims[b] {
                return Err(Error::Parse(format!("bond {b} dimension mismatch")));
            }
        }
        Ok(Self {
            sites: n,
            left: unflatten(&snap.left, &snap.bond_dims)?,
            right: unflatten(&snap.right, &snap.bond_dims)?,
            lambdas: snap.lambdas.clone(),
            config: MpsConfig {
                chi_max: snap.chi_max,
                trunc_tol: snap.trunc_tol,
            },
            stats: snap.stats,
        })
    }
}

/// Defects below this are left alone.
const POLAR_SKIP: f64 = 1e-14;

/// `G^{-1/2}` of a Gram matrix close to the identity.
fn inverse_sqrt(g: DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let eig = g.symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x.sqrt()));
    let w = eig.eigenvectors;
    debug_assert_eq!(w.nrows(), n);
    &w * d * w.transpose()
}

/// `B^k <- G^{-1/2} B^k` with `G = sum_k B^k B^k^T`.
fn orthonormalize_rows(b: &mut [DMatrix<f64>; 2]) {
    let n = b[0].nrows();
    let g = &b[0] * b[0].transpose() + &b[1] * b[1].transpose();
    if (&g - DMatrix::identity(n, n)).amax() <= POLAR_SKIP {
        return;
    }
    let p = inverse_sqrt(g);
    for t in b.iter_mut() {
        *t = &p * &*t;
    }
}

/// `A^k <- A^k G^{-1/2}` with `G = sum_k A^k^T A^k`.
fn orthonormalize_columns(a: &mut [DMatrix<f64>; 2]) {
    let n = a[0].ncols();
    let g = a[0].tr_mul(&a[0]) + a[1].tr_mul(&a[1]);
    if (&g - DMatrix::identity(n, n)).amax() <= POLAR_SKIP {
        return;
    }
    let p = inverse_sqrt(g);
    for t in a.iter_mut() {
        *t = &*t * &p;
    }
}

/// Largest entry of the orthonormality defect a truncation leaves in the
/// left neighbour's `B` (rows `(kr, a)` of `U`) and the split site's `A`
/// (columns `(k, b)` of `V^T`), each scaled by the bond weights it divides.
fn split_loss(
    svd: &crate::linalg::ThinSvd,
    keep: &[usize],
    left_lambda: &[f64],
    right_lambda: &[f64],
    rest: usize,
    chi_r: usize,
) -> f64 {
    let chi_l = left_lambda.len();
    let dropped: Vec<usize> = (0..svd.s.len()).filter(|i| !keep.contains(i)).collect();
    if dropped.is_empty() {
        return 0.0;
    }
    let mut worst = 0.0_f64;
    for a in 0..chi_l {
        for a2 in a..chi_l {
            let mut acc = 0.0;
            for &d in &dropped {
                let mut dot = 0.0;
                for kr in 0..rest {
                    dot += svd.u[(kr * chi_l + a, d)] * svd.u[(kr * chi_l + a2, d)];
                }
                acc += svd.s[d].powi(2) * dot;
            }
            worst = worst.max((acc / (left_lambda[a] * left_lambda[a2])).abs());
        }
    }
    for b in 0..chi_r {
        for b2 in b..chi_r {
            let mut acc = 0.0;
            for &d in &dropped {
                let mut dot = 0.0;
                for k in 0..2 {
                    dot += svd.v_t[(d, k * chi_r + b)] * svd.v_t[(d, k * chi_r + b2)];
                }
                acc += svd.s[d].powi(2) * dot;
            }
            worst = worst.max((acc / (right_lambda[b] * right_lambda[b2])).abs());
        }
    }
    worst
}

fn flatten(tensors: &[[DMatrix<f64>; 2]]) -> Vec<[Vec<f64>; 2]> {
    tensors
        .iter()
        .map(|g| {
            [0, 1].map(|k| {
                let m = &g[k];
                (0..m.nrows())
                    .flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)]))
                    .collect()
            })
        })
        .collect()
}

fn unflatten(flat: &[[Vec<f64>; 2]], bond_dims: &[usize]) -> Result<Vec<[DMatrix<f64>; 2]>> {
    flat.iter()
        .enumerate()
        .map(|(s, g)| {
            let (r, c) = (bond_dims[s], bond_dims[s + 1]);
            if g.iter().any(|v| v.len() != r * c) {
                return Err(Error::Parse(format!("site {} tensor size mismatch", s + 1)));
            }
            Ok([0, 1].map(|k| DMatrix::from_row_slice(r, c, &g[k])))
        })
        .collect()
}

/// Self-describing serializable form. `left[s][k]` holds
/// `lambda_{s} Gamma_{s+1}^k` and `right[s][k]` holds `Gamma_{s+1}^k
/// lambda_{s+1}`, both row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpsSnapshot {
    pub sites: usize,
    pub chi_max: usize,
    pub trunc_tol: f64,
    pub bond_dims: Vec<usize>,
    pub lambdas: Vec<Vec<f64>>,
    pub left: Vec<[Vec<f64>; 2]>,
    pub right: Vec<[Vec<f64>; 2]>,
    pub stats: UpdateStats,
}

impl MpsSnapshot {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Label {
    /// Both fermions left of the bond.
    Double,
    /// The pair straddles the bond.
    Split,
    /// Both fermions right of the bond.
    Empty,
}

/// Canonical MPS of the ladder state `sum_j a_j c+_{2j-1} c+_{2j} |0>`.
///
/// Bond `b` carries up to three Schmidt labels: all pairs left of the cut
/// (weight `sqrt(sum_{2j<=b} a_j^2)`), the pair cut in half (`|a_{(b+1)/2}|`,
/// odd `b`), and all pairs right of the cut. Labels of weight at most
/// `trunc_tol` are dropped and each bond is renormalized.
pub fn reduced_state_mps(alphas: &[f64], sites: usize) -> Result<CanonicalMps> {
    reduced_state_mps_with(alphas, sites, MpsConfig::for_sites(sites))
}

pub fn reduced_state_mps_with(alphas: &[f64], sites: usize, config: MpsConfig) -> Result<CanonicalMps> {
    if sites < 2 {
        return Err(Error::InvalidParams("ladder needs at least two sites".into()));
    }
    if alphas.len() > sites / 2 {
        return Err(Error::InvalidParams(format!(
            "{} pair coefficients do not fit on {sites} sites",
            alphas.len()
        )));
    }
    let norm_sq: f64 = alphas.iter().map(|a| a * a).sum();
    if (norm_sq - 1.0).abs() > 1e-10 {
        return Err(Error::Contract(format!(
            "ladder coefficients must be normalized, sum a^2 = {norm_sq}"
        )));
    }
    let a = |j: usize| -> f64 { alphas.get(j - 1).copied().unwrap_or(0.0) };
    let pairs = sites / 2;
    let w_double = |b: usize| -> f64 { (1..=pairs).filter(|&j| 2 * j <= b).map(|j| a(j).powi(2)).sum::<f64>().sqrt() };
    let w_empty = |b: usize| -> f64 { (1..=pairs).filter(|&j| 2 * j > b + 1).map(|j| a(j).powi(2)).sum::<f64>().sqrt() };
    let split = |b: usize| -> f64 {
        if b % 2 == 1 && b < sites {
            a(b.div_ceil(2)).abs()
        } else {
            0.0
        }
    };

    // Labels and weights per bond, sorted by descending weight.
    let mut labels: Vec<Vec<(Label, f64)>> = Vec::with_capacity(sites + 1);
    for b in 0..=sites {
        let mut l: Vec<(Label, f64)> = [
            (Label::Split, split(b)),
            (Label::Empty, w_empty(b)),
            (Label::Double, w_double(b)),
        ]
        .into_iter()
        .filter(|&(_, w)| w > config.trunc_tol && w > 0.0)
        .collect();
        l.sort_by(|x, y| y.1.total_cmp(&x.1));
        labels.push(l);
    }

    let lambdas: Vec<Vec<f64>> = labels
        .iter()
        .map(|l| {
            let n = l.iter().map(|x| x.1 * x.1).sum::<f64>().sqrt();
            l.iter().map(|x| x.1 / n).collect()
        })
        .collect();
    let mut left_tensors = Vec::with_capacity(sites);
    let mut right_tensors = Vec::with_capacity(sites);
    for s in 1..=sites {
        let (left, right) = (&labels[s - 1], &labels[s]);
        let mut g = [
            DMatrix::<f64>::zeros(left.len(), right.len()),
            DMatrix::<f64>::zeros(left.len(), right.len()),
        ];
        for (x, &(lx, wx)) in left.iter().enumerate() {
            for (y, &(ly, wy)) in right.iter().enumerate() {
                match (lx, ly) {
                    (Label::Empty, Label::Empty) => g[0][(x, y)] = 1.0 / wx,
                    (Label::Empty, Label::Split) => g[1][(x, y)] = 1.0 / wx,
                    (Label::Double, Label::Double) => {
                        g[0][(x, y)] = if s % 2 == 0 { 1.0 / wy } else { 1.0 / wx }
                    }
                    (Label::Split, Label::Double) => g[1][(x, y)] = a(s / 2).signum() / wy,
                    _ => {}
                }
            }
        }
        let (ll, lr) = (&lambdas[s - 1], &lambdas[s]);
        left_tensors.push(g.clone().map(|m| DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| ll[i] * m[(i, j)])));
        right_tensors.push(g.map(|m| DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * lr[j])));
    }
    Ok(CanonicalMps {
        sites,
        left: left_tensors,
        right: right_tensors,
        lambdas,
        config,
        stats: UpdateStats::default(),
    })
}

/// Applies an unfolding schedule gate by gate.
pub fn unfold_to_eigenstate(mut mps: CanonicalMps, s: &GivensSchedule) -> Result<CanonicalMps> {
    if s.direction != Direction::Unfolding {
        return Err(Error::Contract("expected an unfolding schedule".into()));
    }
    if s.sites != mps.sites() {
        return Err(Error::Contract(format!(
            "schedule for {} sites applied to {} sites",
            s.sites,
            mps.sites()
        )));
    }
    for g in &s.gates {
        mps.apply_two_site(g.j, &gate_from_givens(g))?;
    }
    let stats = mps.stats();
    debug!(
        "unfolded {} gates: discarded weight {:e}, cumulative norm drift {:e}, max bond {}",
        stats.gates_applied,
        stats.discarded_weight,
        stats.cumulative_norm_drift,
        mps.max_bond_dim()
    );
    Ok(mps)
}

/// Fock-space index of a two-particle configuration (1-based sites).
pub fn fock_index(sites: usize, occupied: &[usize]) -> usize {
    occupied.iter().map(|&m| 1usize << (sites - m)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

    #[test]
    fn single_pair_contracts_to_fock_state() {
        let mps = reduced_state_mps(&[1.0], 3).unwrap();
        let v = mps.contract_to_vector().unwrap();
        let idx = fock_index(3, &[1, 2]);
        assert!((v[idx] - 1.0).abs() < 1e-15);
        assert!((v.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_pair_ladder_amplitudes() {
        let mps = reduced_state_mps(&[0.6, 0.8], 5).unwrap();
        let v = mps.contract_to_vector().unwrap();
        assert!((v[fock_index(5, &[1, 2])] - 0.6).abs() < 1e-12);
        assert!((v[fock_index(5, &[3, 4])] - 0.8).abs() < 1e-12);
        assert!((v.norm() - 1.0).abs() < 1e-12);
        assert!(mps.canonical_residual() < 1e-12);
    }

    #[test]
    fn boundary_tensors_match_pattern() {
        let mps = reduced_state_mps(&[0.8, 0.6], 5).unwrap();
        // Bond 1 holds the split pair (weight a_1) first, then the empty label.
        assert_eq!(mps.lambda(1), &[0.8, 0.6]);
        assert_eq!(mps.gamma(1, 1)[(0, 0)], 1.0);
        assert_eq!(mps.gamma(1, 0)[(0, 1)], 1.0);
    }

    #[test]
    fn ladder_entropy() {
        let mps = reduced_state_mps(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2], 5).unwrap();
        let s = mps.block_entropy_profile().unwrap();
        assert!((s[1] - LN_2).abs() < 1e-12);
        let product = CanonicalMps::product(&[true, true, false], MpsConfig::for_sites(3)).unwrap();
        assert!(product.block_entropy_profile().unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn signed_ladder_even_chain() {
        let mps = reduced_state_mps(&[0.6, -0.48, 0.64], 6).unwrap();
        let v = mps.contract_to_vector().unwrap();
        assert!((v[fock_index(6, &[3, 4])] + 0.48).abs() < 1e-12);
        assert!((v[fock_index(6, &[5, 6])] - 0.64).abs() < 1e-12);
        assert!((mps.particle_number() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unnormalized_ladder() {
        assert!(reduced_state_mps(&[0.5, 0.5], 5).is_err());
    }

    #[test]
    fn givens_gate_examples() {
        let id = gate_from_givens(&GivensGate { stage: 1, j: 1, theta: 0.0 });
        assert_eq!(id.u, Matrix4::identity());
        // theta = pi/2 on c+_{j+1}|0> (index 1).
        let g = gate_from_givens(&GivensGate { stage: 1, j: 1, theta: PI / 2.0 });
        let out = g.u * nalgebra::Vector4::new(0.0, 1.0, 0.0, 0.0);
        let h = FRAC_1_SQRT_2;
        assert!((out - nalgebra::Vector4::new(0.0, h, h, 0.0)).amax() < 1e-15);
        // theta = pi swaps the two modes, with a sign on c+_j -> -c+_{j+1}.
        let g = gate_from_givens(&GivensGate { stage: 1, j: 1, theta: PI });
        let out = g.u * nalgebra::Vector4::new(0.0, 0.0, 1.0, 0.0);
        assert!((out - nalgebra::Vector4::new(0.0, -1.0, 0.0, 0.0)).amax() < 1e-15);
        assert!(TwoSiteGate::new(g.u).is_ok());
    }

    #[test]
    fn fold_unfold_pair_restores_state() {
        let mut mps = reduced_state_mps(&[0.6, 0.8], 5).unwrap();
        let before = mps.contract_to_vector().unwrap();
        let g = GivensGate { stage: 1, j: 2, theta: 0.7 };
        mps.apply_two_site(2, &gate_from_givens(&g)).unwrap();
        mps.apply_two_site(2, &gate_from_givens(&GivensGate { theta: -0.7, ..g })).unwrap();
        let after = mps.contract_to_vector().unwrap();
        assert!((1.0 - before.dot(&after).abs()) < 1e-12);
        assert!(mps.canonical_residual() < 1e-10);
    }

    #[test]
    fn identity_gate_keeps_spectra() {
        let mut mps = reduced_state_mps(&[0.6, 0.8], 5).unwrap();
        let before = mps.clone();
        mps.apply_two_site(3, &TwoSiteGate::identity()).unwrap();
        for b in 0..=5 {
            let (x, y) = (before.lambda(b), mps.lambda(b));
            assert_eq!(x.len(), y.len());
            for (p, q) in x.iter().zip(y) {
                assert!((p - q).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_angle_pair_rotation_is_identity() {
        let mut mps = reduced_state_mps(&[0.6, 0.8], 5).unwrap();
        let before = mps.contract_to_vector().unwrap();
        mps.apply_four_site(&PairRotation { l: 1, phi: 0.0 }).unwrap();
        assert!((mps.contract_to_vector().unwrap() - before).amax() < 1e-12);
    }

    #[test]
    fn single_pair_rotation_mixes_ladder() {
        let (a1, a2) = (0.6, 0.8);
        let phi = 0.9;
        let mut mps = reduced_state_mps(&[a1, a2], 5).unwrap();
        mps.apply_four_site(&PairRotation { l: 1, phi }).unwrap();
        let v = mps.contract_to_vector().unwrap();
        let (s, c) = (phi / 2.0).sin_cos();
        assert!((v[fock_index(5, &[1, 2])] - (c * a1 - s * a2)).abs() < 1e-12);
        assert!((v[fock_index(5, &[3, 4])] - (s * a1 + c * a2)).abs() < 1e-12);
    }

    #[test]
    fn capacity_is_enforced() {
        let config = MpsConfig {
            chi_max: 1,
            trunc_tol: 1e-12,
        };
        let mut mps = CanonicalMps::product(&[true, false, false], config).unwrap();
        let g = GivensGate { stage: 1, j: 1, theta: 1.0 };
        assert!(matches!(
            mps.apply_two_site(1, &gate_from_givens(&g)),
            Err(Error::Capacity { required: 2, .. })
        ));
    }

    #[test]
    fn snapshot_round_trip_is_exact() {
        let mut mps = reduced_state_mps(&[0.6, -0.8], 5).unwrap();
        mps.apply_two_site(2, &gate_from_givens(&GivensGate { stage: 1, j: 2, theta: 0.3 }))
            .unwrap();
        let json = mps.snapshot().to_json().unwrap();
        let back = CanonicalMps::from_snapshot(&MpsSnapshot::from_json(&json).unwrap()).unwrap();
        assert_eq!(back, mps);
    }
}
