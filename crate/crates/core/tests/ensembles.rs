use std::f64::consts::{FRAC_PI_2, PI};

use fragqsp::evolve::{schedule_from_phases, PropagatorConfig};
use fragqsp::fragment::{build_fragment, DEFAULT_CAPACITY};
use fragqsp::hamiltonian::{build_h_ph, build_h_stag};
use fragqsp::observables::{diagonal_ensemble_profile, krylov_profile, time_average, SeededRun};
use fragqsp::qsp::PhaseSequence;
use fragqsp::PseudospinString;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn long_time_average_approaches_diagonal_ensemble() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for seed in ["ud-+du", "udu-+d", "ududud", "u-+dud"] {
        let s: PseudospinString = seed.parse().unwrap();
        let run = SeededRun::<f64>::new(&s, DEFAULT_CAPACITY, PropagatorConfig::default()).unwrap();
        assert!(run.basis.dim() <= 100);
        let phases = PhaseSequence::new((0..5).map(|_| rng.gen_range(-PI..PI)).collect()).unwrap();
        let sched = schedule_from_phases(&phases, 1.0, 1.0, -FRAC_PI_2).unwrap();
        let record = run.stroboscopic(&sched, 2000).unwrap();
        let avg = time_average(&record, 0).unwrap();
        let u = run.engine.floquet_unitary(&sched).unwrap();
        let diag = diagonal_ensemble_profile(&u, &run.initial, &run.basis).unwrap();
        for (m, (a, d)) in avg.iter().zip(&diag).enumerate() {
            assert!((a - d).abs() < 0.02, "{seed} m={}: {a} vs {d}", m + 1);
        }
        assert!(record.values.iter().flatten().all(|v| v.abs() <= 1.0 + 1e-10));
    }
}

#[test]
fn krylov_average_is_basis_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let basis = build_fragment("ud-+udu-+d".parse::<PseudospinString>().unwrap().encode()).unwrap();
    let dim = basis.dim();
    let mut h = build_h_ph(&basis, 1.0).to_dense() + build_h_stag(&basis, 0.8).to_dense();
    for k in 0..dim {
        h[(k, k)] += rng.gen_range(-1.0..1.0);
    }
    let eig = h.symmetric_eigen();
    let krylov = krylov_profile::<f64>(&basis);
    for m in 1..=basis.pseudospin_len() {
        let z = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            dim,
            basis.states().iter().map(|s| s.pseudospin_z(m).unwrap() as f64),
        ));
        let rotated = eig.eigenvectors.transpose() * z * &eig.eigenvectors;
        let trace: f64 = (0..dim).map(|n| rotated[(n, n)]).sum();
        assert!((trace / dim as f64 - krylov[m - 1]).abs() < 1e-12);
    }
}
