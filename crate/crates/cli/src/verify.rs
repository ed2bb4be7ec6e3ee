//! Invariant suites run by `verify`.

use bethechain_core::linalg::random_antisymmetric;
use bethechain_core::measures::single_body_invariance_check;
use bethechain_core::mps::{reduced_state_mps_with, unfold_to_eigenstate};
use bethechain_core::oracle::{
    dense_spectrum, embed_two_particle, ladder_matrix, partial_trace_entropy, sector_schmidt, simulate_givens,
};
use bethechain_core::pipeline::{checked_ground, decompose_amplitudes, default_selection, Decomposition};
use bethechain_core::wavefunction::{amplitudes, antisymmetrize, state_vector};
use bethechain_core::{
    block_entropy, enumerate_spectrum, AntisymMatrix, ChainParams, GivensSchedule, MpsConfig, UpperAmplitudes,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;

const ENTROPY_TOL: f64 = 1e-8;
const ENERGY_TOL: f64 = 1e-8;
const OVERLAP_TOL: f64 = 1e-10;
const EXTENDED_SITES: usize = 51;

type Case = Result<(), String>;

#[derive(Debug, Default)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        SuiteResult {
            name,
            ..Default::default()
        }
    }

    fn record(&mut self, label: String, outcome: Case) {
        match outcome {
            Ok(()) => self.passed += 1,
            Err(e) => self.failures.push(format!("{label}: {e}")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub seed: u64,
    pub extended: bool,
    /// Flips every unfolding angle; the overlap suite must then fail.
    pub tamper_gate_sign: bool,
}

impl VerifyOptions {
    pub fn from_config(cfg: &RunConfig, extended: bool, tamper_gate_sign: bool) -> Self {
        VerifyOptions {
            seed: cfg.seed,
            extended,
            tamper_gate_sign,
        }
    }
}

fn ground(n: usize, u: f64) -> Result<UpperAmplitudes, String> {
    let p = ChainParams::new(n, 1.0, u).map_err(|e| e.to_string())?;
    let (sol, _) = checked_ground(&p, &default_selection(n)).map_err(|e| e.to_string())?;
    amplitudes(&sol, &p).map_err(|e| e.to_string())
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> UpperAmplitudes {
    let m = random_antisymmetric(n, rng);
    let scale = (m.norm_squared() / 2.0).sqrt();
    AntisymMatrix::from_matrix(m / scale).expect("antisymmetric").upper()
}

/// Random states for every size, ground states for the odd ones.
fn states(sizes: impl Iterator<Item = usize>, couplings: &[f64], seed: u64) -> Vec<(String, Result<UpperAmplitudes, String>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for n in sizes {
        out.push((format!("N={n} random"), Ok(random_state(n, &mut rng))));
        if n % 2 == 1 {
            for &u in couplings {
                out.push((format!("N={n} U={u}"), ground(n, u)));
            }
        }
    }
    out
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Case {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn triangle_case(amps: UpperAmplitudes) -> Case {
    let n = amps.sites();
    let a = antisymmetrize(&amps);
    let v = state_vector(&amps).map_err(|e| e.to_string())?;
    let mps = decompose_amplitudes(amps)
        .and_then(|d| d.build_mps(MpsConfig::for_sites(n)))
        .map_err(|e| e.to_string())?;
    let profile = mps.block_entropy_profile().map_err(|e| e.to_string())?;
    for cut in 1..n {
        let s_sector = sector_schmidt(&a, cut).and_then(|s| s.entropy()).map_err(|e| e.to_string())?;
        let (_, s_trace) = partial_trace_entropy(&v, cut, n).map_err(|e| e.to_string())?;
        let s_mps = profile[cut - 1];
        let d = (s_mps - s_sector).abs().max((s_mps - s_trace).abs());
        check(d <= ENTROPY_TOL, || format!("L={cut}: MPS {s_mps}, sector {s_sector}, trace {s_trace}"))?;
    }
    Ok(())
}

fn large_triangle_case(amps: UpperAmplitudes) -> Case {
    let n = amps.sites();
    let a = antisymmetrize(&amps);
    let mps = decompose_amplitudes(amps)
        .and_then(|d| d.build_mps(MpsConfig::for_sites(n)))
        .map_err(|e| e.to_string())?;
    for cut in 1..n {
        let s_sector = sector_schmidt(&a, cut).and_then(|s| s.entropy()).map_err(|e| e.to_string())?;
        let s_mps = block_entropy(mps.lambda(cut)).map_err(|e| e.to_string())?.von_neumann;
        check((s_mps - s_sector).abs() <= 1e-6, || format!("L={cut}: MPS {s_mps}, sector {s_sector}"))?;
    }
    Ok(())
}

pub fn oracle_triangle(opts: &VerifyOptions) -> SuiteResult {
    let mut r = SuiteResult::new("oracle-triangle");
    for (label, amps) in states(3..=12, &[-2.0, 1.0], opts.seed) {
        r.record(label, amps.and_then(triangle_case));
    }
    if opts.extended {
        for u in [-2.011, 0.7] {
            r.record(format!("N={EXTENDED_SITES} U={u}"), ground(EXTENDED_SITES, u).and_then(large_triangle_case));
        }
    }
    r
}

fn completeness_case(n: usize, u: f64) -> Case {
    let p = ChainParams::new(n, 1.0, u).map_err(|e| e.to_string())?;
    let mut bethe: Vec<f64> = enumerate_spectrum(&p).map_err(|e| e.to_string())?.iter().map(|s| s.energy).collect();
    bethe.sort_by(f64::total_cmp);
    let expected = n * (n - 1) / 2;
    check(bethe.len() == expected, || format!("{} states, expected {expected}", bethe.len()))?;
    let dense = dense_spectrum(&p).map_err(|e| e.to_string())?;
    let worst = bethe.iter().zip(&dense).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    check(worst <= ENERGY_TOL, || format!("energy deviation {worst:e}"))
}

pub fn spectrum_completeness(opts: &VerifyOptions) -> SuiteResult {
    let mut r = SuiteResult::new("spectrum-completeness");
    let couplings = [-2.0, -std::f64::consts::SQRT_2, 0.0, 1.0, 10.0 / 3.0];
    for n in 3..=12 {
        for u in couplings {
            r.record(format!("N={n} U={u}"), completeness_case(n, u));
        }
    }
    if opts.extended {
        r.record(format!("N={EXTENDED_SITES} U=-2.011"), completeness_case(EXTENDED_SITES, -2.011));
    }
    r
}

fn unfolding(d: &Decomposition, tamper: bool) -> GivensSchedule {
    let mut s = d.unfolding();
    if tamper {
        for g in &mut s.gates {
            g.theta = -g.theta;
        }
    }
    s
}

fn overlap_case(amps: UpperAmplitudes, tamper: bool, contract: bool) -> Case {
    let n = amps.sites();
    let d = decompose_amplitudes(amps).map_err(|e| e.to_string())?;
    let schedule = unfolding(&d, tamper);

    let mut m = ladder_matrix(&d.signed_alphas, n);
    for g in &schedule.gates {
        simulate_givens(&mut m, g);
    }
    let dense = m.component_mul(d.matrix.matrix()).sum() / 2.0;
    check(dense >= 1.0 - OVERLAP_TOL, || format!("amplitude overlap {dense}"))?;

    let mps = reduced_state_mps_with(&d.signed_alphas, n, MpsConfig::for_sites(n))
        .and_then(|mps| unfold_to_eigenstate(mps, &schedule))
        .map_err(|e| e.to_string())?;
    if contract {
        let v = mps.contract_to_vector().map_err(|e| e.to_string())?;
        let target = embed_two_particle(&d.amplitudes).map_err(|e| e.to_string())?;
        let o = v.dot(&target);
        check(o >= 1.0 - OVERLAP_TOL, || format!("MPS overlap {o}"))?;
    }
    Ok(())
}

pub fn unfolding_overlap(opts: &VerifyOptions) -> SuiteResult {
    let mut r = SuiteResult::new("unfolding-overlap");
    for (label, amps) in states(3..=12, &[-2.011, -2.0, 0.0, 1.0], opts.seed.wrapping_add(1)) {
        r.record(label, amps.and_then(|a| overlap_case(a, opts.tamper_gate_sign, true)));
    }
    if opts.extended {
        r.record(
            format!("N={EXTENDED_SITES} U=-2.011"),
            ground(EXTENDED_SITES, -2.011).and_then(|a| overlap_case(a, opts.tamper_gate_sign, false)),
        );
    }
    r
}

fn invariance_case(amps: UpperAmplitudes, seed: u64) -> Case {
    let n = amps.sites();
    let d = decompose_amplitudes(amps).map_err(|e| e.to_string())?;
    let dev = single_body_invariance_check(&d.matrix, 10, seed);
    check(dev <= 1e-9, || format!("pair spectrum moved by {dev:e} under mode rotations"))?;
    let mps = d.build_mps(MpsConfig::for_sites(n)).map_err(|e| e.to_string())?;
    let particles = mps.particle_number();
    check((particles - 2.0).abs() <= 1e-10, || format!("particle number {particles}"))?;
    let residual = mps.canonical_residual();
    check(residual <= 1e-10, || format!("canonical residual {residual:e}"))
}

fn free_case(n: usize) -> Case {
    let d = decompose_amplitudes(ground(n, 0.0)?).map_err(|e| e.to_string())?;
    let pairs = d.factors.alphas.iter().filter(|&&a| a > 1e-10).count();
    check(pairs == 1, || format!("{pairs} pair coefficients at U = 0"))?;
    check(d.cascade.rotations.is_empty(), || "non-empty pair cascade at U = 0".into())
}

pub fn invariance(opts: &VerifyOptions) -> SuiteResult {
    let mut r = SuiteResult::new("invariance");
    for (label, amps) in states(3..=12, &[-2.0, 1.0], opts.seed.wrapping_add(2)) {
        r.record(label, amps.and_then(|a| invariance_case(a, opts.seed)));
    }
    for n in (3..=11).step_by(2) {
        r.record(format!("N={n} U=0 free collapse"), free_case(n));
    }
    if opts.extended {
        r.record(
            format!("N={EXTENDED_SITES} U=-2.011"),
            ground(EXTENDED_SITES, -2.011).and_then(|a| invariance_case(a, opts.seed)),
        );
    }
    r
}

pub fn run_all(opts: &VerifyOptions) -> Vec<SuiteResult> {
    vec![
        oracle_triangle(opts),
        spectrum_completeness(opts),
        unfolding_overlap(opts),
        invariance(opts),
    ]
}
