//! Two-fermion Bethe solutions of the periodic chain
//! `H = sum_j J (c+_j c_{j+1} + h.c.) + U n_{j+1} n_j`.
//!
//! Each eigenstate is stored in centered form: with `k1 = c + p`,
//! `k2 = c - p` and `sigma = exp(i c N) = +-1` the amplitudes are
//!
//! ```text
//! a(m1, m2) = scale * exp(i c (m1 + m2)) * h(m2 - m1 - N/2)
//! h(x)      = exp(-s) (exp(-i p x) - sigma exp(i p x)),   s = |Im p| N / 2
//! ```
//!
//! which never overflows for deep bound states at large `N`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;

/// `|k1 - k2|` below which a root is treated as an equal-momentum root.
pub const EQUAL_K_TOL: f64 = 1e-8;
/// Allowed imaginary part of `E`, relative to the energy scale.
pub const ENERGY_IMAG_TOL: f64 = 1e-10;
/// Energy separation below which two ground-state candidates are degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Roots whose `s = (zeta + 1/zeta)/2` lies this close to `+-1` are grouped
/// into a cluster at the corresponding equal-momentum point.
const CLUSTER_TOL: f64 = 5e-9;
const PAIRING_TOL: f64 = 1e-6;
/// Below this `|p| N` an odd-parity state is taken at its exact confluent
/// limit `h(x) = x`.
const CONFLUENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub n: usize,
    pub j: f64,
    pub u: f64,
}

impl ChainParams {
    pub fn new(n: usize, j: f64, u: f64) -> Result<Self> {
        let params = Self { n, j, u };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidParams(format!("N = {} (need N >= 3)", self.n)));
        }
        if !self.j.is_finite() || !self.u.is_finite() {
            return Err(Error::InvalidParams("J and U must be finite".into()));
        }
        Ok(())
    }

    /// `U / J`.
    pub fn gamma(&self) -> Result<f64> {
        if self.j == 0.0 {
            return Err(Error::InvalidParams("J = 0 leaves gamma undefined".into()));
        }
        Ok(self.u / self.j)
    }

    /// Two-particle sector dimension `N(N-1)/2`.
    pub fn sector_dim(&self) -> usize {
        self.n * (self.n - 1) / 2
    }
}

/// Total-momentum class `k1 + k2 = 2 pi n / N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumClass {
    pub n: usize,
    pub alpha: Complex64,
    pub total_momentum: f64,
}

impl MomentumClass {
    pub fn new(n: usize, sites: usize) -> Result<Self> {
        if n >= sites {
            return Err(Error::InvalidParams(format!(
                "momentum class {n} outside [0, {sites})"
            )));
        }
        let total_momentum = 2.0 * PI * n as f64 / sites as f64;
        Ok(Self {
            n,
            alpha: Complex64::from_polar(1.0, total_momentum),
            total_momentum,
        })
    }

    /// True when `alpha = -1`, i.e. `2n = N`.
    pub fn is_reduced(&self, sites: usize) -> bool {
        2 * self.n == sites
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolutionKind {
    Generic,
    Free,
    PairedEven,
    Bound,
    /// Two coalesced Bethe roots at an equal-momentum point. The amplitude is
    /// the derivative of the degenerate plane-wave form, `h(x) = x`.
    Confluent,
}

impl std::fmt::Display for SolutionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            SolutionKind::Generic => "generic",
            SolutionKind::Free => "free",
            SolutionKind::PairedEven => "paired-even",
            SolutionKind::Bound => "bound",
            SolutionKind::Confluent => "confluent",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Wavefunction {
    Plane {
        center: f64,
        p: Complex64,
        parity: i8,
        scale: f64,
    },
    /// `sum_m exp(i pi m) c+_m c+_{m+1} |0> / sqrt(N)`.
    AdjacentPair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetheSolution {
    pub k1: Complex64,
    pub k2: Complex64,
    /// NaN for an odd-parity confluent state, whose plane-wave weights
    /// diverge.
    pub q1: Complex64,
    pub q2: Complex64,
    pub energy: f64,
    pub kind: SolutionKind,
    /// Momentum class index `n`; `N / 2` for the paired-even state.
    pub class: usize,
    pub sites: usize,
    pub wavefunction: Wavefunction,
}

impl BetheSolution {
    /// Amplitude of `c+_{m1} c+_{m2} |0>` for 1-based `m1 < m2`; zero
    /// otherwise. Unit-normalized, before any global-phase fixing.
    pub fn amplitude(&self, m1: usize, m2: usize) -> Complex64 {
        let n = self.sites;
        if m1 >= m2 || m1 == 0 || m2 > n {
            return Complex64::new(0.0, 0.0);
        }
        match self.wavefunction {
            Wavefunction::Plane {
                center,
                p,
                parity,
                scale,
            } => {
                let x = m2 as f64 - m1 as f64 - n as f64 / 2.0;
                let phase = Complex64::from_polar(scale, center * (m1 + m2) as f64);
                phase * profile(p, parity, n, x)
            }
            Wavefunction::AdjacentPair => {
                let norm = 1.0 / (n as f64).sqrt();
                if m2 == m1 + 1 {
                    Complex64::new(if m1.is_multiple_of(2) { norm } else { -norm }, 0.0)
                } else if m1 == 1 && m2 == n {
                    // c+_N c+_1 = -c+_1 c+_N, and exp(i pi N) = 1 for even N.
                    Complex64::new(-norm, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }
}

fn is_confluent(p: Complex64, parity: i8, sites: usize) -> bool {
    parity > 0 && p.norm() * sites as f64 <= CONFLUENT_TOL
}

/// Even-in-`p` profile as a function of `w = p^2` and its `w` derivative:
/// `cos(p x)` for parity -1, `sin(p x) / p` for parity +1.
fn profile_in_w(w: Complex64, parity: i8, x: f64) -> (Complex64, Complex64) {
    let x2 = x * x;
    if (w * x2).norm() < 1e-4 {
        // Taylor series in w x^2, three terms.
        return if parity > 0 {
            (
                x * (1.0 - w * x2 / 6.0 + w * w * x2 * x2 / 120.0),
                x * x2 * (-1.0 / 6.0 + w * x2 / 60.0),
            )
        } else {
            (
                1.0 - w * x2 / 2.0 + w * w * x2 * x2 / 24.0,
                x2 * (-0.5 + w * x2 / 12.0),
            )
        };
    }
    let q = w.sqrt();
    let (sn, cs) = ((q * x).sin(), (q * x).cos());
    if parity > 0 {
        (sn / q, (q * x * cs - sn) / (2.0 * q * q * q))
    } else {
        (cs, -x * sn / (2.0 * q))
    }
}

/// Newton polish of `w = p^2` for a cluster state from the boundary
/// condition `t h(-N/2) = U h(1 - N/2)`, `t = 2J cos(center)`. Roots near
/// the equal-momentum points are multiple, so the raw estimate carries
/// only about half the working precision.
fn polish_cluster(params: &ChainParams, center: f64, parity: i8, w0: Complex64) -> Complex64 {
    let t = 2.0 * params.j * center.cos();
    let (x0, x1) = (-(params.n as f64) / 2.0, 1.0 - params.n as f64 / 2.0);
    let eval = |w: Complex64| {
        let (h0, d0) = profile_in_w(w, parity, x0);
        let (h1, d1) = profile_in_w(w, parity, x1);
        (h0 * t - h1 * params.u, d0 * t - d1 * params.u)
    };
    let mut w = w0;
    let mut f = eval(w);
    for _ in 0..30 {
        if f.1.norm() == 0.0 {
            break;
        }
        let next = w - f.0 / f.1;
        let g = eval(next);
        if !(g.0.norm() < f.0.norm()) {
            break;
        }
        w = next;
        f = g;
    }
    w
}

/// Relative amplitude `h(x)`, scaled by `exp(-|Im p| N / 2)`.
pub(crate) fn profile(p: Complex64, parity: i8, sites: usize, x: f64) -> Complex64 {
    let s = p.im.abs() * sites as f64 / 2.0;
    if is_confluent(p, parity, sites) {
        return Complex64::new(x, 0.0);
    }
    if s < 30.0 {
        let damp = (-s).exp();
        if parity > 0 {
            Complex64::new(0.0, -2.0 * damp) * (p * x).sin()
        } else {
            (p * x).cos() * (2.0 * damp)
        }
    } else {
        let i = Complex64::i();
        let a = (-i * p * x - s).exp();
        let b = (i * p * x - s).exp();
        if parity > 0 {
            a - b
        } else {
            a + b
        }
    }
}

/// Coefficients of the Bethe polynomial in `z = exp(-i k1)`, highest degree
/// first: `(1+a) z^N - gamma z^{N-1} + gamma a z - (1+a)` with
/// `a = exp(2 pi i n / N)`. For `a = -1` the factor `-gamma z` is divided
/// out, leaving `z^{N-2} + 1`.
pub fn bethe_polynomial(params: &ChainParams, cls: &MomentumClass) -> Result<Vec<Complex64>> {
    params.validate()?;
    let gamma = params.gamma()?;
    let n = params.n;
    if cls.is_reduced(n) {
        let mut c = vec![Complex64::new(0.0, 0.0); n - 1];
        c[0] = Complex64::new(1.0, 0.0);
        c[n - 2] = Complex64::new(1.0, 0.0);
        return Ok(c);
    }
    let one_plus = Complex64::new(1.0, 0.0) + cls.alpha;
    let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
    c[0] = one_plus;
    c[1] = Complex64::new(-gamma, 0.0);
    c[n - 1] = cls.alpha * gamma;
    c[n] = -one_plus;
    Ok(c)
}

/// `2J (cos k1 + cos k2)`, which must be real.
pub fn energy(k1: Complex64, k2: Complex64, j: f64) -> Result<f64> {
    let e = (k1.cos() + k2.cos()) * (2.0 * j);
    let scale = 2.0 * j.abs() * (k1.cos().norm() + k2.cos().norm()).max(1.0);
    if e.im.abs() > ENERGY_IMAG_TOL * scale {
        return Err(Error::ComplexEnergy {
            real: e.re,
            imag: e.im,
        });
    }
    Ok(e.re)
}

fn require_interacting(params: &ChainParams) -> Result<f64> {
    let gamma = params.gamma()?;
    if gamma == 0.0 {
        return Err(Error::UseFreeProtocol);
    }
    Ok(gamma)
}

/// Builds the normalized solution for centered momenta `(c, p)`.
fn plane_solution(
    params: &ChainParams,
    class: usize,
    center: f64,
    p: Complex64,
    parity: i8,
    kind: SolutionKind,
) -> Result<BetheSolution> {
    let n = params.n;
    let norm_sq: f64 = (1..n)
        .map(|r| (n - r) as f64 * profile(p, parity, n, r as f64 - n as f64 / 2.0).norm_sqr())
        .sum();
    if !(norm_sq > 0.0) || !norm_sq.is_finite() {
        return Err(Error::Numerical(format!(
            "vanishing amplitude norm for class {class}, p = {p}"
        )));
    }
    let nu = norm_sq.sqrt();
    let k1 = p + center;
    let k2 = -p + center;
    let confluent = is_confluent(p, parity, n);
    let kind = if confluent {
        SolutionKind::Confluent
    } else {
        kind
    };
    let (q1, q2) = if confluent {
        let nan = Complex64::new(f64::NAN, f64::NAN);
        (nan, nan)
    } else {
        let s = p.im.abs() * n as f64 / 2.0;
        let i = Complex64::i();
        let half = p * (n as f64 / 2.0);
        let q1 = (i * half - s).exp() / nu;
        let q2 = -(-i * half - s).exp() * parity as f64 / nu;
        (q1, q2)
    };
    let energy = energy(k1, k2, params.j)?;
    Ok(BetheSolution {
        k1,
        k2,
        q1,
        q2,
        energy,
        kind,
        class,
        sites: n,
        wavefunction: Wavefunction::Plane {
            center,
            p,
            parity,
            scale: 1.0 / nu,
        },
    })
}

fn class_parity(n: usize) -> i8 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Solution for a single Bethe root `z = exp(-i k1)` in class `cls`.
pub fn assemble_solution(
    z: Complex64,
    cls: &MomentumClass,
    params: &ChainParams,
) -> Result<BetheSolution> {
    params.validate()?;
    require_interacting(params)?;
    if z.norm() == 0.0 || !z.is_finite() {
        return Err(Error::Contract("Bethe root must be finite and nonzero".into()));
    }
    let center = PI * cls.n as f64 / params.n as f64;
    let zeta = z * Complex64::from_polar(1.0, center);
    let p = Complex64::i() * zeta.ln();
    let diff = 2.0 * p;
    let gap = [diff, diff - 2.0 * PI, diff + 2.0 * PI]
        .iter()
        .map(|d| d.norm())
        .fold(f64::INFINITY, f64::min);
    if gap <= EQUAL_K_TOL {
        return Err(Error::EqualMomenta { gap });
    }
    let kind = if p.im.abs() > 1e-12 {
        SolutionKind::Bound
    } else {
        SolutionKind::Generic
    };
    let parity = class_parity(cls.n);
    let mut sol = plane_solution(params, cls.n, center, p, parity, kind)?;
    // Report the principal branch k1 = i Log z, k2 = 2 pi n / N - k1.
    sol.k1 = Complex64::i() * z.ln();
    sol.k2 = Complex64::new(cls.total_momentum, 0.0) - sol.k1;
    Ok(sol)
}

/// All distinct eigenstates of momentum class `n` for `U != 0`.
///
/// Roots related by `k1 <-> k2` are merged. Roots at an equal-momentum point
/// are grouped into clusters: an isolated root there carries no state, while
/// a coalesced pair yields a (possibly confluent) state.
pub fn class_solutions(params: &ChainParams, n: usize) -> Result<Vec<BetheSolution>> {
    params.validate()?;
    require_interacting(params)?;
    let sites = params.n;
    let cls = MomentumClass::new(n, sites)?;
    let coeffs = bethe_polynomial(params, &cls)?;
    let roots = poly::solve_roots(&coeffs)?;
    let center = PI * n as f64 / sites as f64;
    let rot = Complex64::from_polar(1.0, center);
    let zetas: Vec<Complex64> = roots.iter().map(|&z| z * rot).collect();
    let svals: Vec<Complex64> = zetas.iter().map(|&w| (w + w.inv()) * 0.5).collect();

    let mut out = Vec::new();
    let mut used = vec![false; zetas.len()];
    for (fixed, fp_center, parity) in [
        (1.0, center, class_parity(n)),
        (-1.0, center + PI, class_parity(n + sites)),
    ] {
        let members: Vec<usize> = (0..zetas.len())
            .filter(|&i| (svals[i] - fixed).norm() < CLUSTER_TOL)
            .collect();
        let spurious = usize::from(parity > 0);
        let m = members.len();
        if m < spurious || !(m - spurious).is_multiple_of(2) || m - spurious > 2 {
            return Err(Error::Numerical(format!(
                "class {n}: {m} roots at zeta = {fixed}, expected {spurious} or {}",
                spurious + 2
            )));
        }
        for &i in &members {
            used[i] = true;
        }
        if m - spurious == 2 {
            let p_sq: Complex64 = members
                .iter()
                .map(|&i| {
                    let p = Complex64::i() * (zetas[i] * fixed).ln();
                    p * p
                })
                .sum::<Complex64>()
                / 2.0;
            let p = polish_cluster(params, fp_center, parity, p_sq).sqrt();
            let kind = if p.im.abs() > 1e-12 {
                SolutionKind::Bound
            } else {
                SolutionKind::Generic
            };
            out.push(plane_solution(params, n, fp_center, p, parity, kind)?);
        }
    }

    let mut remaining: Vec<usize> = (0..zetas.len()).filter(|&i| !used[i]).collect();
    remaining.reverse();
    while let Some(i) = remaining.pop() {
        let (pos, dist) = remaining
            .iter()
            .enumerate()
            .map(|(pos, &j)| (pos, (svals[j] - svals[i]).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or_else(|| {
                Error::Numerical(format!("class {n}: unpaired Bethe root {}", roots[i]))
            })?;
        if dist > PAIRING_TOL * svals[i].norm().max(1.0) {
            return Err(Error::Numerical(format!(
                "class {n}: Bethe root {} has no swap partner (closest {dist:e})",
                roots[i]
            )));
        }
        remaining.remove(pos);
        out.push(assemble_solution(roots[i], &cls, params)?);
    }
    Ok(out)
}

/// Free-fermion Slater determinants `k = 2 pi j / N`, `1 <= j1 < j2 <= N`.
pub fn free_spectrum(params: &ChainParams) -> Result<Vec<BetheSolution>> {
    params.validate()?;
    if params.u != 0.0 {
        return Err(Error::Contract(format!(
            "free spectrum requires U = 0, got U = {}",
            params.u
        )));
    }
    if params.j == 0.0 {
        return Err(Error::InvalidParams("J = 0".into()));
    }
    let sites = params.n;
    let mut out = Vec::with_capacity(params.sector_dim());
    for j1 in 1..=sites {
        for j2 in j1 + 1..=sites {
            let center = PI * (j1 + j2) as f64 / sites as f64;
            let p = Complex64::new(PI * (j1 as f64 - j2 as f64) / sites as f64, 0.0);
            let parity = class_parity(j1 + j2);
            let mut sol =
                plane_solution(params, (j1 + j2) % sites, center, p, parity, SolutionKind::Free)?;
            sol.k1 = Complex64::new(2.0 * PI * j1 as f64 / sites as f64, 0.0);
            sol.k2 = Complex64::new(2.0 * PI * j2 as f64 / sites as f64, 0.0);
            out.push(sol);
        }
    }
    Ok(out)
}

/// The extra even-`N` eigenstate with both fermions on neighbouring sites
/// and `E = U`.
pub fn paired_even_state(params: &ChainParams) -> Option<BetheSolution> {
    if !params.n.is_multiple_of(2) || params.u == 0.0 || params.validate().is_err() {
        return None;
    }
    Some(BetheSolution {
        k1: Complex64::new(PI, 0.0),
        k2: Complex64::new(PI, 0.0),
        q1: Complex64::new(1.0 / (params.n as f64).sqrt(), 0.0),
        q2: Complex64::new(0.0, 0.0),
        energy: params.u,
        kind: SolutionKind::PairedEven,
        class: params.n / 2,
        sites: params.n,
        wavefunction: Wavefunction::AdjacentPair,
    })
}

/// Complete two-particle spectrum, `N(N-1)/2` states.
pub fn enumerate_spectrum(params: &ChainParams) -> Result<Vec<BetheSolution>> {
    params.validate()?;
    params.gamma()?;
    if params.u == 0.0 {
        return free_spectrum(params);
    }
    let mut out = Vec::with_capacity(params.sector_dim());
    let mut counts = Vec::with_capacity(params.n);
    for n in 0..params.n {
        let sols = class_solutions(params, n)?;
        counts.push(sols.len());
        out.extend(sols);
    }
    out.extend(paired_even_state(params));
    if out.len() != params.sector_dim() {
        let detail = counts
            .iter()
            .enumerate()
            .map(|(n, c)| format!("n={n}:{c}"))
            .collect::<Vec<_>>()
            .join(" ");
        return Err(Error::CountMismatch {
            expected: params.sector_dim(),
            found: out.len(),
            detail,
        });
    }
    Ok(out)
}

/// Which momentum classes a ground-state search visits.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ClassSelection {
    #[default]
    All,
    /// Classes hosting the lowest states of a smaller odd chain with
    /// `probe_sites` sites, mapped both by signed class offset and by total
    /// momentum, plus their neighbours.
    Probe { probe_sites: usize, lowest: usize },
    Explicit(Vec<usize>),
}

impl ClassSelection {
    pub fn probe() -> Self {
        ClassSelection::Probe {
            probe_sites: 21,
            lowest: 4,
        }
    }

    /// Class indices to visit for `params`, ascending.
    pub fn classes(&self, params: &ChainParams) -> Result<Vec<usize>> {
        let sites = params.n;
        let mut classes = match self {
            ClassSelection::All => (0..sites).collect(),
            ClassSelection::Explicit(list) => {
                if let Some(bad) = list.iter().find(|&&n| n >= sites) {
                    return Err(Error::InvalidParams(format!("class {bad} >= N = {sites}")));
                }
                list.clone()
            }
            ClassSelection::Probe {
                probe_sites,
                lowest,
            } => {
                if *probe_sites >= sites || params.u == 0.0 {
                    return Ok((0..sites).collect());
                }
                let probe = ChainParams::new(*probe_sites, params.j, params.u)?;
                let mut sols = enumerate_spectrum(&probe)?;
                sols.sort_by(|a, b| a.energy.total_cmp(&b.energy));
                let mut picked = Vec::new();
                for sol in sols.iter().take(*lowest) {
                    // Low excitations keep their signed class offset; the
                    // total momentum itself is mapped as well.
                    let half = (*probe_sites / 2) as i64;
                    let signed = (sol.class as i64 + half).rem_euclid(*probe_sites as i64) - half;
                    let k = 2.0 * PI * sol.class as f64 / *probe_sites as f64;
                    let centre = (k * sites as f64 / (2.0 * PI)).round() as i64;
                    for base in [signed, centre] {
                        for delta in -1..=1 {
                            picked.push((base + delta).rem_euclid(sites as i64) as usize);
                        }
                    }
                }
                picked
            }
        };
        classes.sort_unstable();
        classes.dedup();
        Ok(classes)
    }
}

fn candidate_states(params: &ChainParams, selection: &ClassSelection) -> Result<Vec<BetheSolution>> {
    params.validate()?;
    params.gamma()?;
    if params.u == 0.0 {
        return free_spectrum(params);
    }
    if matches!(selection, ClassSelection::All) {
        return enumerate_spectrum(params);
    }
    let mut out = Vec::new();
    for n in selection.classes(params)? {
        out.extend(class_solutions(params, n)?);
    }
    out.extend(paired_even_state(params));
    Ok(out)
}

/// Ground state and first excited energy.
pub fn lowest_two(
    params: &ChainParams,
    selection: &ClassSelection,
) -> Result<(BetheSolution, f64)> {
    if params.n.is_multiple_of(2) {
        return Err(Error::Unsupported(format!(
            "odd N required for ground states, got N = {}",
            params.n
        )));
    }
    let mut states = candidate_states(params, selection)?;
    if states.len() < 2 {
        return Err(Error::Numerical("fewer than two states found".into()));
    }
    states.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let e1 = states[1].energy;
    let ground = states.swap_remove(0);
    Ok((ground, e1))
}

/// Lowest-energy eigenstate over all momentum classes.
pub fn ground_state(params: &ChainParams) -> Result<BetheSolution> {
    ground_state_with(params, &ClassSelection::All)
}

pub fn ground_state_with(params: &ChainParams, selection: &ClassSelection) -> Result<BetheSolution> {
    let (ground, e1) = lowest_two(params, selection)?;
    if e1 - ground.energy <= DEGENERACY_TOL * ground.energy.abs().max(1.0) {
        return Err(Error::Degenerate {
            e0: ground.energy,
            e1,
        });
    }
    Ok(ground)
}

/// `E1 - E0` within the two-particle sector.
pub fn energy_gap(params: &ChainParams) -> Result<f64> {
    energy_gap_with(params, &ClassSelection::All)
}

pub fn energy_gap_with(params: &ChainParams, selection: &ClassSelection) -> Result<f64> {
    let (ground, e1) = lowest_two(params, selection)?;
    Ok(e1 - ground.energy)
}
