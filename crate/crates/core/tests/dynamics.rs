use std::f64::consts::{FRAC_PI_2, PI};

use fragqsp::evolve::{schedule_from_phases, DriveEngine, Propagator, PropagatorConfig};
use fragqsp::fragment::{build_fragment, FragmentBasis};
use fragqsp::hamiltonian::{build_h_ph, StateVector};
use fragqsp::qsp::PhaseSequence;
use fragqsp::PseudospinString;
use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn basis(s: &str) -> FragmentBasis {
    build_fragment(s.parse::<PseudospinString>().unwrap().encode()).unwrap()
}

fn random_phases(rng: &mut ChaCha8Rng, max_degree: usize) -> PhaseSequence<f64> {
    let d = rng.gen_range(0..=max_degree);
    PhaseSequence::new((0..=d).map(|_| rng.gen_range(-PI..PI)).collect()).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> StateVector<f64> {
    let mut v =
        StateVector((0..dim).map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect());
    let n = v.norm();
    v.0.iter_mut().for_each(|z| *z /= n);
    v
}

fn max_diff(a: &StateVector<f64>, b: &StateVector<f64>) -> f64 {
    a.0.iter().zip(&b.0).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn drive_preserves_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for s in ["ud+-du", "ududud", "u-+dud"] {
        let b = basis(s);
        let engine = DriveEngine::new(&b, PropagatorConfig::default());
        for _ in 0..10 {
            let sched =
                schedule_from_phases(&random_phases(&mut rng, 6), 1.0, rng.gen_range(0.5..2.0), rng.gen_range(-PI..PI))
                    .unwrap();
            let out = engine.apply(&sched, &random_state(&mut rng, b.dim())).unwrap();
            assert!((out.norm() - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn schedules_compose() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let b = basis("ud+-du");
    let engine = DriveEngine::new(&b, PropagatorConfig::default());
    for _ in 0..10 {
        let a = schedule_from_phases(&random_phases(&mut rng, 5), 1.0, 1.0, -FRAC_PI_2).unwrap();
        let c = schedule_from_phases(&random_phases(&mut rng, 5), 0.7, 1.4, 0.3).unwrap();
        let v = random_state(&mut rng, b.dim());
        let stepwise = engine.apply(&c, &engine.apply(&a, &v).unwrap()).unwrap();
        let joined = engine.apply(&a.then(&c), &v).unwrap();
        assert!(max_diff(&stepwise, &joined) < 1e-10);
    }
}

#[test]
fn dense_and_chebyshev_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for s in ["ududud", "udududududud", "ud-+udu-+d", "ududu-++-d"] {
        let b = basis(s);
        let op = build_h_ph(&b, 1.0);
        let dense = Propagator::new(&op, PropagatorConfig::default());
        assert!(dense.is_dense());
        let cheb = Propagator::chebyshev(&op, PropagatorConfig::default());
        for t in [-FRAC_PI_2, 0.05, 3.7, -25.0] {
            let v = random_state(&mut rng, b.dim());
            let (mut x, mut y) = (v.clone(), v.clone());
            dense.propagate(t, &mut x).unwrap();
            cheb.propagate(t, &mut y).unwrap();
            assert!(max_diff(&x, &y) < 1e-9, "{s} t={t}: {}", max_diff(&x, &y));
        }
    }
}

#[test]
fn chebyshev_drive_matches_dense_drive() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let b = basis("ud-+udu-+d");
    let dense = DriveEngine::new(&b, PropagatorConfig::default());
    let cheb = DriveEngine::new_chebyshev(&b, PropagatorConfig::default());
    let sched = schedule_from_phases(&fragqsp::qsp::bb1_phases(), 1.0, 1.0, -FRAC_PI_2).unwrap().repeated(5);
    let v = random_state(&mut rng, b.dim());
    assert!(max_diff(&dense.apply(&sched, &v).unwrap(), &cheb.apply(&sched, &v).unwrap()) < 1e-9);
}

#[test]
fn reversed_phases_keep_two_level_return_amplitude() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let b = basis("ud");
    let engine = DriveEngine::new(&b, PropagatorConfig::default());
    for _ in 0..20 {
        let phases = random_phases(&mut rng, 6);
        let t_prime = rng.gen_range(-PI..PI);
        let fwd = schedule_from_phases(&phases, 1.0, 1.0, t_prime).unwrap();
        let rev = schedule_from_phases(&phases.reversed(), 1.0, 1.0, t_prime).unwrap();
        for k in 0..2 {
            let e = StateVector::basis_state(2, k);
            let a = engine.apply(&fwd, &e).unwrap().0[k].norm();
            let r = engine.apply(&rev, &e).unwrap().0[k].norm();
            assert!((a - r).abs() < 1e-12);
        }
    }
}
