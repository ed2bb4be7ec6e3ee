//! ground, spectrum, entropy-profile, gap and decompose.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use bethechain_core::circuits::{cascade_from_text, cascade_to_text, schedule_from_text, schedule_to_text};
use bethechain_core::oracle::{embed_two_particle, exact_ground, ladder_matrix, simulate_givens, simulate_pair_rotation};
use bethechain_core::pipeline::{checked_ground, decompose, default_selection, grid, state_entropy_report, Decomposition};
use bethechain_core::skewspec::youla_values;
use bethechain_core::wavefunction::{amplitudes, antisymmetrize};
use bethechain_core::mps::{reduced_state_mps_with, unfold_to_eigenstate};
use bethechain_core::{enumerate_spectrum, ChainParams, GivensSchedule, MpsConfig, PairCascade};
use log::info;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde_json::json;

use crate::config::RunConfig;
use crate::exit::Failure;
use crate::output::{emit, float, header, row};

/// Ground energies are cross-checked by Lanczos up to this many sites.
const LANCZOS_CHECK_LIMIT: usize = 201;
const ENERGY_TOL: f64 = 1e-8;
/// MPS contraction for the decompose round trip.
const CONTRACT_LIMIT: usize = 14;

/// Plain notation for moderate magnitudes, exponent notation otherwise.
fn human(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-4..1e6).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn params(cfg: &RunConfig) -> Result<ChainParams, Failure> {
    Ok(ChainParams::new(cfg.sites()?, cfg.j, cfg.coupling()?)?)
}

fn common(cfg: &RunConfig, p: &ChainParams) -> Vec<(&'static str, String)> {
    vec![
        ("N", p.n.to_string()),
        ("J", p.j.to_string()),
        ("U", p.u.to_string()),
        ("method", cfg.method.to_string()),
    ]
}

pub fn ground(cfg: &RunConfig) -> Result<(), Failure> {
    let p = params(cfg)?;
    let (sol, e1) = checked_ground(&p, &default_selection(p.n))?;
    let amps = amplitudes(&sol, &p)?;
    let alphas = youla_values(&antisymmetrize(&amps));
    let report = state_entropy_report(amps, cfg.method, cfg.mps_config(p.n))?;

    let lanczos = if p.n <= LANCZOS_CHECK_LIMIT {
        let exact = exact_ground(&p)?;
        let dev = (exact.e0 - sol.energy).abs();
        if dev > ENERGY_TOL * sol.energy.abs().max(1.0) {
            eprintln!("Bethe E0 {} vs Lanczos E0 {}: residual {dev:e}", sol.energy, exact.e0);
            return Err(Failure::numerical("ground energy disagrees with the Lanczos oracle"));
        }
        Some((exact.e0, dev))
    } else {
        None
    };

    let pairs = alphas.iter().filter(|&&a| a > 1e-12).count();
    let mut text = String::new();
    let _ = writeln!(text, "N = {}, J = {}, U = {}", p.n, p.j, p.u);
    let _ = writeln!(text, "E0 = {}", human(sol.energy));
    let _ = writeln!(text, "gap = {}", human(e1 - sol.energy));
    if let Some((e0, dev)) = lanczos {
        let _ = writeln!(text, "Lanczos E0 = {} (|dE| = {dev:.2e})", human(e0));
    }
    let _ = writeln!(text, "k1 = {}", sol.k1);
    let _ = writeln!(text, "k2 = {}", sol.k2);
    let _ = writeln!(text, "kind = {}, momentum class = {}", sol.kind, sol.class);
    let _ = writeln!(text, "pair coefficients above 1e-12: {pairs} of {}", alphas.len());
    let shown: Vec<String> = alphas.iter().take(6).map(|a| format!("{a:.6e}")).collect();
    let _ = writeln!(text, "largest alphas: {}", shown.join(" "));
    let _ = writeln!(text, "S_half = {} (von Neumann, {})", human(report.half_chain), cfg.method);
    let _ = writeln!(text, "S_half_as_written = {}", human(report.half_chain_as_written));
    let _ = writeln!(text, "S_twobody_as_written = {}", human(report.two_body));
    let _ = writeln!(text, "S_twobody_variant = {}", human(report.two_body_variant));
    print!("{text}");

    if let Some(out) = &cfg.out {
        let mut csv = header("ground", &common(cfg, &p), &["quantity", "value"]);
        let rows = [
            ("E0", sol.energy),
            ("gap", e1 - sol.energy),
            ("k1_re", sol.k1.re),
            ("k1_im", sol.k1.im),
            ("k2_re", sol.k2.re),
            ("k2_im", sol.k2.im),
            ("S_half", report.half_chain),
            ("S_half_as_written", report.half_chain_as_written),
            ("S_twobody_as_written", report.two_body),
            ("S_twobody_variant", report.two_body_variant),
        ];
        for (k, v) in rows {
            csv.push_str(&row(&[k.to_owned(), float(v)]));
        }
        for (i, a) in alphas.iter().enumerate() {
            csv.push_str(&row(&[format!("alpha_{}", i + 1), float(*a)]));
        }
        emit(Some(out), &csv)?;
    }
    Ok(())
}

pub fn spectrum(cfg: &RunConfig) -> Result<(), Failure> {
    let p = params(cfg)?;
    let mut states = enumerate_spectrum(&p)?;
    states.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.class.cmp(&b.class)));
    let columns = ["index", "class", "kind", "energy", "k1_re", "k1_im", "k2_re", "k2_im"];
    let mut csv = header("spectrum", &common(cfg, &p)[..3], &columns);
    for (i, s) in states.iter().enumerate() {
        csv.push_str(&row(&[
            i.to_string(),
            s.class.to_string(),
            s.kind.to_string(),
            float(s.energy),
            float(s.k1.re),
            float(s.k1.im),
            float(s.k2.re),
            float(s.k2.im),
        ]));
    }
    emit(cfg.out.as_deref(), &csv)?;
    Ok(())
}

pub fn entropy_profile(cfg: &RunConfig) -> Result<(), Failure> {
    let p = params(cfg)?;
    let (sol, _) = checked_ground(&p, &default_selection(p.n))?;
    let report = state_entropy_report(amplitudes(&sol, &p)?, cfg.method, cfg.mps_config(p.n))?;
    let columns = ["L", "S_L", "S_L_as_written", "schmidt_rank"];
    let mut csv = header("entropy-profile", &common(cfg, &p), &columns);
    for (i, spectrum) in report.schmidt_spectra.iter().enumerate() {
        let rank = spectrum.iter().filter(|&&l| l > 0.0).count();
        csv.push_str(&row(&[
            (i + 1).to_string(),
            float(report.block_profile[i]),
            float(report.block_profile_as_written[i]),
            rank.to_string(),
        ]));
    }
    emit(cfg.out.as_deref(), &csv)?;
    Ok(())
}

pub fn gap(cfg: &RunConfig) -> Result<(), Failure> {
    let n = cfg.sites()?;
    let us = match (cfg.u, cfg.u_range) {
        (_, Some((a, b, k))) => grid(a, b, k)?,
        (Some(u), None) => vec![u],
        (None, None) => return Err(Failure::usage("--u or a --u-from/--u-to/--points range is required")),
    };
    let rows = us
        .par_iter()
        .map(|&u| {
            let p = ChainParams::new(n, cfg.j, u)?;
            let (sol, e1) = checked_ground(&p, &default_selection(n))?;
            Ok(row(&[float(u), float(sol.energy), float(e1), float(e1 - sol.energy)]))
        })
        .collect::<Result<Vec<String>, bethechain_core::Error>>()?;
    let params = [("N", n.to_string()), ("J", cfg.j.to_string())];
    let mut csv = header("gap", &params, &["U", "E0", "E1", "gap"]);
    csv.extend(rows);
    emit(cfg.out.as_deref(), &csv)?;
    Ok(())
}

/// Overlaps recovered from the files written by `decompose`.
#[derive(Debug, Clone, Copy)]
pub struct RoundTrip {
    pub amplitude_overlap: f64,
    pub cascade_overlap: f64,
    pub mps_overlap: Option<f64>,
}

/// Half the Frobenius product: each pair appears twice in an antisymmetric matrix.
fn pair_overlap(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.component_mul(b).sum() / 2.0
}

/// Re-simulates schedules read back from disk against the target state.
pub fn round_trip(
    d: &Decomposition,
    unfolding: &GivensSchedule,
    cascade: &PairCascade,
    signed_alphas: &[f64],
    alphas: &[f64],
) -> Result<RoundTrip, Failure> {
    let n = d.sites();
    let target = d.matrix.matrix();

    let mut m = ladder_matrix(signed_alphas, n);
    for g in &unfolding.gates {
        simulate_givens(&mut m, g);
    }
    let amplitude_overlap = pair_overlap(&m, target);

    let mut c = DMatrix::zeros(n, n);
    let t = cascade.terminal;
    c[(2 * t - 2, 2 * t - 1)] = cascade.terminal_sign;
    c[(2 * t - 1, 2 * t - 2)] = -cascade.terminal_sign;
    for r in cascade.reconstruction() {
        simulate_pair_rotation(&mut c, &r);
    }
    let cascade_overlap = pair_overlap(&c, &ladder_matrix(alphas, n));

    let mps_overlap = if n <= CONTRACT_LIMIT {
        let mps = reduced_state_mps_with(signed_alphas, n, MpsConfig::for_sites(n))?;
        let mps = unfold_to_eigenstate(mps, unfolding)?;
        let v = mps.contract_to_vector()?;
        Some(v.dot(&embed_two_particle(&d.amplitudes)?))
    } else {
        None
    };
    Ok(RoundTrip {
        amplitude_overlap,
        cascade_overlap,
        mps_overlap,
    })
}

fn read_floats(value: &serde_json::Value, key: &str) -> Result<Vec<f64>, Failure> {
    value[key]
        .as_array()
        .and_then(|a| a.iter().map(|x| x.as_f64()).collect::<Option<Vec<_>>>())
        .ok_or_else(|| Failure::numerical(format!("factors file: bad field {key}")))
}

pub fn decompose_cmd(cfg: &RunConfig) -> Result<(), Failure> {
    let p = params(cfg)?;
    let dir = cfg
        .out
        .as_deref()
        .ok_or_else(|| Failure::usage("decompose needs --out DIR"))?;
    fs::create_dir_all(dir)?;
    let (sol, d) = decompose(&p)?;
    let n = p.n;
    let unfolding = d.unfolding();

    let q: Vec<Vec<f64>> = d.factors.q.row_iter().map(|r| r.iter().copied().collect()).collect();
    let factors = json!({
        "sites": n,
        "alphas": d.factors.alphas,
        "signed_alphas": d.signed_alphas,
        "fold_diagonal": d.fold_diagonal,
        "kernel_columns": d.factors.kernel_columns,
        "q": q,
    });
    let files = [
        ("folding.txt", schedule_to_text(&d.folding)),
        ("unfolding.txt", schedule_to_text(&unfolding)),
        ("cascade.txt", cascade_to_text(&d.cascade)),
        ("factors.json", format!("{}\n", serde_json::to_string_pretty(&factors).expect("json"))),
    ];
    for (name, text) in &files {
        fs::write(dir.join(name), text)?;
    }

    let rt = reread(dir, &d)?;
    let mut meta = String::new();
    let _ = writeln!(meta, "# bethechain decompose");
    let _ = writeln!(meta, "N = {n}");
    let _ = writeln!(meta, "J = {}", p.j);
    let _ = writeln!(meta, "U = {}", p.u);
    let _ = writeln!(meta, "E0 = {}", float(sol.energy));
    let _ = writeln!(meta, "givens_gates = {}", d.folding.gates.len());
    let _ = writeln!(meta, "pair_rotations = {}", d.cascade.rotations.len());
    let _ = writeln!(meta, "amplitude_overlap = {}", float(rt.amplitude_overlap));
    let _ = writeln!(meta, "cascade_overlap = {}", float(rt.cascade_overlap));
    match rt.mps_overlap {
        Some(o) => {
            let _ = writeln!(meta, "mps_overlap = {}", float(o));
        }
        None => {
            let _ = writeln!(meta, "mps_overlap = skipped (N > {CONTRACT_LIMIT})");
        }
    }
    fs::write(dir.join("metadata.txt"), &meta)?;
    info!("wrote {}", dir.display());
    print!("{meta}");

    let worst = [Some(rt.amplitude_overlap), Some(rt.cascade_overlap), rt.mps_overlap]
        .into_iter()
        .flatten()
        .map(|o| 1.0 - o)
        .fold(0.0_f64, f64::max);
    if worst > 1e-8 {
        return Err(Failure::numerical(format!("round trip lost overlap: 1 - overlap = {worst:e}")));
    }
    Ok(())
}

fn reread(dir: &Path, d: &Decomposition) -> Result<RoundTrip, Failure> {
    let unfolding = schedule_from_text(&fs::read_to_string(dir.join("unfolding.txt"))?)?;
    let cascade = cascade_from_text(&fs::read_to_string(dir.join("cascade.txt"))?)?;
    let factors: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("factors.json"))?)
        .map_err(|e| Failure::numerical(format!("factors file: {e}")))?;
    let signed = read_floats(&factors, "signed_alphas")?;
    let alphas = read_floats(&factors, "alphas")?;
    round_trip(d, &unfolding, &cascade, &signed, &alphas)
}
