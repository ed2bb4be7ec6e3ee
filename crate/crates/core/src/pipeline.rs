//! End-to-end drivers: ground state to factors, schedules and MPS, plus
//! the per-point quantities of parameter scans.

use std::str::FromStr;

use log::debug;
use serde::{Deserialize, Serialize};

use crate::bethe::{lowest_two, BetheSolution, ChainParams, ClassSelection, DEGENERACY_TOL};
use crate::circuits::{fold_schedule, pair_cascade, unfold_sequence, GivensSchedule, PairCascade};
use crate::error::{Error, Result};
use crate::measures::{block_entropy, two_body_entropy, EntropyReport};
use crate::mps::{reduced_state_mps_with, unfold_to_eigenstate, CanonicalMps, MpsConfig};
use crate::oracle::sector_schmidt;
use crate::skewspec::{youla, youla_values, YoulaFactors};
use crate::wavefunction::{amplitudes, antisymmetrize, AntisymMatrix, UpperAmplitudes};

/// Chains up to this size scan every momentum class for the ground state.
pub const FULL_SCAN_LIMIT: usize = 101;

/// Full class scan for small chains, the probe heuristic above.
pub fn default_selection(sites: usize) -> ClassSelection {
    if sites <= FULL_SCAN_LIMIT {
        ClassSelection::All
    } else {
        ClassSelection::probe()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Method {
    /// Unfolded canonical MPS.
    Mps,
    /// Schmidt values from blocks of the amplitude matrix.
    #[default]
    Oracle,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mps" => Ok(Method::Mps),
            "oracle" => Ok(Method::Oracle),
            other => Err(Error::Parse(format!("unknown method '{other}' (mps|oracle)"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Mps => "mps",
            Method::Oracle => "oracle",
        })
    }
}

/// Everything compiled from one real two-fermion state.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub amplitudes: UpperAmplitudes,
    pub matrix: AntisymMatrix,
    pub factors: YoulaFactors,
    pub folding: GivensSchedule,
    /// Diagonal (`+-1`) left after folding.
    pub fold_diagonal: Vec<f64>,
    /// Ladder coefficients of the folded state, `alpha_j d_{2j-1} d_{2j}`.
    pub signed_alphas: Vec<f64>,
    pub cascade: PairCascade,
}

impl Decomposition {
    pub fn sites(&self) -> usize {
        self.amplitudes.sites()
    }

    pub fn unfolding(&self) -> GivensSchedule {
        unfold_sequence(&self.folding).expect("folding schedule")
    }

    /// Folded ladder state, then the unfolding schedule.
    pub fn build_mps(&self, config: MpsConfig) -> Result<CanonicalMps> {
        let mps = reduced_state_mps_with(&self.signed_alphas, self.sites(), config)?;
        unfold_to_eigenstate(mps, &self.unfolding())
    }
}

/// Decomposes arbitrary real amplitudes.
pub fn decompose_amplitudes(amplitudes: UpperAmplitudes) -> Result<Decomposition> {
    let matrix = antisymmetrize(&amplitudes);
    let factors = youla(&matrix)?;
    let (folding, fold_diagonal) = fold_schedule(&factors.q)?;
    let signed_alphas: Vec<f64> = factors
        .alphas
        .iter()
        .enumerate()
        .map(|(j, &a)| a * fold_diagonal[2 * j] * fold_diagonal[2 * j + 1])
        .collect();
    let cascade = pair_cascade(&factors.alphas)?;
    Ok(Decomposition {
        amplitudes,
        matrix,
        factors,
        folding,
        fold_diagonal,
        signed_alphas,
        cascade,
    })
}

/// Ground state of `params` and its decomposition.
pub fn decompose(params: &ChainParams) -> Result<(BetheSolution, Decomposition)> {
    let sol = checked_ground(params, &default_selection(params.n))?.0;
    let amps = amplitudes(&sol, params)?;
    Ok((sol, decompose_amplitudes(amps)?))
}

/// Ground state and first excited energy; a degenerate ground state is an
/// error.
pub fn checked_ground(params: &ChainParams, selection: &ClassSelection) -> Result<(BetheSolution, f64)> {
    let (ground, e1) = lowest_two(params, selection)?;
    if e1 - ground.energy <= DEGENERACY_TOL * ground.energy.abs().max(1.0) {
        return Err(Error::Degenerate {
            e0: ground.energy,
            e1,
        });
    }
    Ok((ground, e1))
}

/// Entropies of the ground state.
pub fn entropy_report(params: &ChainParams, method: Method) -> Result<EntropyReport> {
    let sol = checked_ground(params, &default_selection(params.n))?.0;
    let amps = amplitudes(&sol, params)?;
    state_entropy_report(amps, method, MpsConfig::for_sites(params.n))
}

/// Entropies of arbitrary real amplitudes.
pub fn state_entropy_report(amps: UpperAmplitudes, method: Method, config: MpsConfig) -> Result<EntropyReport> {
    let n = amps.sites();
    let (schmidt_spectra, alphas) = match method {
        Method::Mps => {
            let d = decompose_amplitudes(amps)?;
            let mps = d.build_mps(config)?;
            let spectra = (1..n).map(|b| mps.lambda(b).to_vec()).collect();
            (spectra, d.factors.alphas)
        }
        Method::Oracle => {
            let a = antisymmetrize(&amps);
            let spectra = (1..n)
                .map(|cut| sector_schmidt(&a, cut).map(|s| s.schmidt))
                .collect::<Result<Vec<_>>>()?;
            (spectra, youla_values(&a))
        }
    };
    let cuts = schmidt_spectra
        .iter()
        .map(|s| block_entropy(s))
        .collect::<Result<Vec<_>>>()?;
    let block_profile: Vec<f64> = cuts.iter().map(|c| c.von_neumann).collect();
    let block_profile_as_written: Vec<f64> = cuts.iter().map(|c| c.as_written).collect();
    let tb = two_body_entropy(&alphas)?;
    let half = (n - 1) / 2;
    let at_half = |v: &[f64]| if half >= 1 { v[half - 1] } else { 0.0 };
    Ok(EntropyReport {
        half_chain: at_half(&block_profile),
        half_chain_as_written: at_half(&block_profile_as_written),
        block_profile,
        block_profile_as_written,
        two_body: tb.as_written,
        two_body_variant: tb.variant,
        schmidt_spectra,
    })
}

/// One row of a `U` scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub u: f64,
    pub e0: f64,
    /// von Neumann block entropy at `L = (N-1)/2`.
    pub s_half: f64,
    /// `-sum lambda ln lambda` at the same cut.
    pub s_half_as_written: f64,
    pub two_body: f64,
    pub two_body_variant: f64,
    pub gap: f64,
}

impl ScanPoint {
    pub fn failed(u: f64) -> Self {
        ScanPoint {
            u,
            e0: f64::NAN,
            s_half: f64::NAN,
            s_half_as_written: f64::NAN,
            two_body: f64::NAN,
            two_body_variant: f64::NAN,
            gap: f64::NAN,
        }
    }
}

/// Ground energy, gap, half-chain and two-body entropies at one `U`.
pub fn evaluate_point(params: &ChainParams, method: Method, config: MpsConfig) -> Result<ScanPoint> {
    let (sol, e1) = checked_ground(params, &default_selection(params.n))?;
    let amps = amplitudes(&sol, params)?;
    let n = params.n;
    let half = (n - 1) / 2;
    let (lambdas, alphas) = match method {
        Method::Oracle => {
            let a = antisymmetrize(&amps);
            (sector_schmidt(&a, half)?.schmidt, youla_values(&a))
        }
        Method::Mps => {
            let d = decompose_amplitudes(amps)?;
            let mps = d.build_mps(config)?;
            (mps.lambda(half).to_vec(), d.factors.alphas)
        }
    };
    let cut = block_entropy(&lambdas)?;
    let s_half = cut.von_neumann;
    let tb = two_body_entropy(&alphas)?;
    debug!("U = {}: E0 = {}, S_half = {s_half}", params.u, sol.energy);
    Ok(ScanPoint {
        u: params.u,
        e0: sol.energy,
        s_half,
        s_half_as_written: cut.as_written,
        two_body: tb.as_written,
        two_body_variant: tb.variant,
        gap: e1 - sol.energy,
    })
}

/// `points` equally spaced values from `from` to `to` inclusive.
pub fn grid(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::InvalidParams("a range needs at least 2 points".into()));
    }
    if !(from.is_finite() && to.is_finite()) || from >= to {
        return Err(Error::InvalidParams(format!("empty range [{from}, {to}]")));
    }
    let step = (to - from) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| if i + 1 == points { to } else { from + step * i as f64 })
        .collect())
}
