use bethechain_core::circuits::{schedule_from_text, schedule_to_text, cascade_from_text, cascade_to_text};
use bethechain_core::linalg::random_antisymmetric;
use bethechain_core::mps::{gate_from_givens, reduced_state_mps, MpsSnapshot};
use bethechain_core::oracle::{embed_two_particle, FockSpace};
use bethechain_core::pipeline::{decompose, decompose_amplitudes};
use bethechain_core::wavefunction::amplitudes;
use bethechain_core::{AntisymMatrix, CanonicalMps, ChainParams, GivensGate, MpsConfig, PairRotation};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> AntisymMatrix {
    let m = random_antisymmetric(n, rng);
    let s = (m.norm_squared() / 2.0).sqrt();
    AntisymMatrix::from_matrix(m / s).unwrap()
}

fn overlap(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.dot(b).abs()
}

#[test]
fn givens_gates_match_fock_space_unitaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let n = 7;
    let fock = FockSpace::new(n).unwrap();
    let a = random_state(n, &mut rng);
    let d = decompose_amplitudes(a.upper()).unwrap();
    let mut mps = d.build_mps(MpsConfig::exact()).unwrap();
    let mut v = fock.embed(&a.upper());
    for _ in 0..25 {
        let g = GivensGate {
            stage: 1,
            j: rng.random_range(1..n),
            theta: rng.random_range(-3.0..3.0),
        };
        mps.apply_two_site(g.j, &gate_from_givens(&g)).unwrap();
        v = fock.givens_unitary(&g) * v;
    }
    let w = mps.contract_to_vector().unwrap();
    let dev = (&w - &v).amax();
    assert!(dev < 1e-12, "deviation {dev:e}, overlap {}", w.dot(&v));
    assert!(mps.canonical_residual() < 1e-12);
}

#[test]
fn pair_rotations_match_fock_space_unitaries() {
    let n = 8;
    let fock = FockSpace::new(n).unwrap();
    let alphas = [0.8, 0.0, 0.6, 0.0];
    let mut mps = reduced_state_mps(&alphas, n).unwrap();
    let mut v = mps.contract_to_vector().unwrap();
    for r in [
        PairRotation { l: 1, phi: 0.7 },
        PairRotation { l: 3, phi: -1.9 },
        PairRotation { l: 2, phi: 2.4 },
    ] {
        mps.apply_four_site(&r).unwrap();
        v = fock.pair_unitary(&r) * v;
    }
    let w = mps.contract_to_vector().unwrap();
    assert!((w - &v).amax() < 1e-12);
    assert!((mps.particle_number() - 2.0).abs() < 1e-12);
}

#[test]
fn pipeline_reproduces_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 3..=12 {
        let a = random_state(n, &mut rng);
        let d = decompose_amplitudes(a.upper()).unwrap();
        let mps = d.build_mps(MpsConfig::for_sites(n)).unwrap();
        let target = embed_two_particle(&a.upper()).unwrap();
        let got = mps.contract_to_vector().unwrap();
        assert!(overlap(&got, &target) > 1.0 - 1e-12, "N={n}");
        assert!(mps.max_bond_dim() <= 2 + n.div_ceil(2));
    }
}

#[test]
fn ground_state_mps_matches_state_vector() {
    for (n, u) in [(9, -2.011), (11, 1.0), (15, -3.0)] {
        let p = ChainParams::new(n, 1.0, u).unwrap();
        let (sol, d) = decompose(&p).unwrap();
        let v = embed_two_particle(&amplitudes(&sol, &p).unwrap()).unwrap();
        let mps = d.build_mps(MpsConfig::for_sites(n)).unwrap();
        assert!(overlap(&mps.contract_to_vector().unwrap(), &v) > 1.0 - 1e-10, "N={n} U={u}");
    }
}

#[test]
fn snapshot_round_trip_is_exact() {
    let p = ChainParams::new(9, 1.0, -2.0).unwrap();
    let (_, d) = decompose(&p).unwrap();
    let mps = d.build_mps(MpsConfig::for_sites(9)).unwrap();
    let json = mps.snapshot().to_json().unwrap();
    let back = CanonicalMps::from_snapshot(&MpsSnapshot::from_json(&json).unwrap()).unwrap();
    assert_eq!(back, mps);
    assert!(MpsSnapshot::from_json("{\"sites\": 3}").is_err());
}

#[test]
fn schedules_survive_text_round_trip() {
    let p = ChainParams::new(7, 1.0, -2.0).unwrap();
    let (_, d) = decompose(&p).unwrap();
    let fold = schedule_from_text(&schedule_to_text(&d.folding)).unwrap();
    assert_eq!(fold, d.folding);
    let unfold = d.unfolding();
    assert_eq!(schedule_from_text(&schedule_to_text(&unfold)).unwrap(), unfold);
    assert_eq!(cascade_from_text(&cascade_to_text(&d.cascade)).unwrap(), d.cascade);
}
