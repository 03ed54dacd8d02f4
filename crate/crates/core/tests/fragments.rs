use std::collections::{HashSet, VecDeque};

use fragqsp::fragment::{
    build_fragment, partition_regions, partition_regions_confirmed, verify_factorization, RegionClass,
};
use fragqsp::{FockState, Pseudospin, PseudospinString};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ps(s: &str) -> PseudospinString {
    s.parse().unwrap()
}

/// Connected component of `seed` in the full 2^L configuration graph, with
/// edges from explicit window rewriting (no use of the library's hop code).
fn brute_force_component(seed: u64, len: usize) -> Vec<u64> {
    let window_moves = |b: u64| -> Vec<u64> {
        let mut out = Vec::new();
        for j in 0..len - 3 {
            let w: Vec<u64> = (0..4).map(|k| (b >> (j + k)) & 1).collect();
            if w == [0, 1, 1, 0] || w == [1, 0, 0, 1] {
                out.push(b ^ (0b1111 << j));
            }
        }
        out
    };
    let mut seen = HashSet::from([seed]);
    let mut queue = VecDeque::from([seed]);
    while let Some(b) = queue.pop_front() {
        for n in window_moves(b) {
            if seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    let mut v: Vec<u64> = seen.into_iter().collect();
    v.sort_unstable();
    v
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn neel_fragment_matches_brute_force() {
    let seed = ps("udud").encode();
    let oracle = brute_force_component(seed.bits(), 8);
    assert_eq!(oracle.len(), 6);
    let basis = build_fragment(seed).unwrap();
    let got: Vec<u64> = basis.states().iter().map(|s| s.bits()).collect();
    assert_eq!(got, oracle);
}

#[test]
fn random_fragments_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let len = 2 * rng.gen_range(2..=7);
        let bits = rng.gen::<u64>() & ((1 << len) - 1);
        let basis = build_fragment(FockState::new(bits, len).unwrap()).unwrap();
        let got: Vec<u64> = basis.states().iter().map(|s| s.bits()).collect();
        assert_eq!(got, brute_force_component(bits, len));
    }
}

#[test]
fn spin_fragments_have_binomial_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=8usize {
        for _ in 0..6 {
            let symbols: Vec<Pseudospin> =
                (0..n).map(|_| if rng.gen_bool(0.5) { Pseudospin::Up } else { Pseudospin::Down }).collect();
            let ups = symbols.iter().filter(|&&s| s == Pseudospin::Up).count();
            let s = PseudospinString::new(symbols).unwrap();
            assert_eq!(build_fragment(s.encode()).unwrap().dim(), binomial(n, ups), "{s}");
        }
    }
}

#[test]
fn fragments_are_seed_invariant_and_charge_homogeneous() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..60 {
        let len = 2 * rng.gen_range(2..=8);
        let bits = rng.gen::<u64>() & ((1 << len) - 1);
        let seed = FockState::new(bits, len).unwrap();
        let basis = build_fragment(seed).unwrap();
        assert!(basis.is_closed());
        assert!(basis.states().iter().all(|s| s.charges() == seed.charges()));
        for _ in 0..3 {
            let member = basis.states()[rng.gen_range(0..basis.dim())];
            assert_eq!(build_fragment(member).unwrap(), basis);
        }
    }
}

#[test]
fn factorization_holds_for_random_wall_split_strings() {
    use Pseudospin::*;
    let all = [Up, Down, Plus, Minus];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut tested = 0;
    while tested < 300 {
        let n = rng.gen_range(4..=10);
        let s = PseudospinString::new((0..n).map(|_| all[rng.gen_range(0..4)]).collect()).unwrap();
        if partition_regions(&s).active().count() < 2 {
            continue;
        }
        let p = partition_regions_confirmed(&s, &build_fragment(s.encode()).unwrap());
        assert!(verify_factorization(&s).unwrap(), "{s} partitioned as {p}");
        tested += 1;
    }
}

#[test]
fn l28_neel_and_mixed_seed() {
    let neel = ps("udududududududududududududud"[..14].to_string().as_str());
    assert_eq!(build_fragment(neel.encode()).unwrap().dim(), 3432);
    let p = partition_regions(&ps("ududu-++-dudud"));
    assert!(p.regions.iter().all(|r| r.class == RegionClass::Nonintegrable));
}
