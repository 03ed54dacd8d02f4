//! Krylov fragments of the pair-hopping chain.
//!
//! A fragment is the closure of a product state under every pair-hopping
//! move. Basis states are stored ascending so the ordering does not depend
//! on traversal order.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::fock::{ConservedCharges, FockState, Pseudospin, PseudospinString};

pub const DEFAULT_CAPACITY: usize = 1 << 24;

/// Ordered, closed set of configurations forming one Krylov subspace.
#[derive(Clone, Debug)]
pub struct FragmentBasis {
    states: Vec<FockState>,
    index: HashMap<u64, usize>,
    len: usize,
    charges: ConservedCharges,
}

impl FragmentBasis {
    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Number of fermion sites `L`.
    pub fn chain_len(&self) -> usize {
        self.len
    }

    pub fn pseudospin_len(&self) -> usize {
        self.len / 2
    }

    pub fn charges(&self) -> ConservedCharges {
        self.charges
    }

    pub fn index_of(&self, state: FockState) -> Option<usize> {
        if state.len() != self.len {
            return None;
        }
        self.index.get(&state.bits()).copied()
    }

    pub fn contains(&self, state: FockState) -> bool {
        self.index_of(state).is_some()
    }

    /// Every pair-hop image of every member is a member.
    pub fn is_closed(&self) -> bool {
        self.states.iter().all(|s| s.neighbours().all(|(n, _)| self.contains(n)))
    }
}

impl PartialEq for FragmentBasis {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.states == other.states
    }
}

pub fn build_fragment(seed: FockState) -> Result<FragmentBasis> {
    build_fragment_with_capacity(seed, DEFAULT_CAPACITY)
}

/// Breadth-first closure of `seed` under pair hopping.
pub fn build_fragment_with_capacity(seed: FockState, capacity: usize) -> Result<FragmentBasis> {
    let mut seen: HashSet<u64> = HashSet::from([seed.bits()]);
    let mut frontier = vec![seed];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for state in frontier {
            for (neighbour, _) in state.neighbours() {
                if seen.insert(neighbour.bits()) {
                    if seen.len() > capacity {
                        return Err(Error::Capacity { limit: capacity });
                    }
                    next.push(neighbour);
                }
            }
        }
        frontier = next;
    }
    let mut states: Vec<FockState> = seen.into_iter().map(|b| seed.with_bits(b)).collect();
    states.sort_unstable();
    let index = states.iter().enumerate().map(|(k, s)| (s.bits(), k)).collect();
    Ok(FragmentBasis { states, index, len: seed.len(), charges: seed.charges() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegionClass {
    Integrable,
    Nonintegrable,
    FrozenWall,
}

impl RegionClass {
    pub fn code(self) -> char {
        match self {
            RegionClass::Integrable => 'I',
            RegionClass::Nonintegrable => 'N',
            RegionClass::FrozenWall => 'W',
        }
    }
}

/// Inclusive, 1-based pseudospin range with its label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Region {
    pub first: usize,
    pub last: usize,
    pub class: RegionClass,
}

impl Region {
    pub fn len(&self) -> usize {
        self.last + 1 - self.first
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionPartition {
    pub regions: Vec<Region>,
}

impl RegionPartition {
    pub fn active(&self) -> impl Iterator<Item = &Region> {
        self.regions.iter().filter(|r| r.class != RegionClass::FrozenWall)
    }

    /// True when every active region is spin-only.
    pub fn is_integrable(&self) -> bool {
        self.active().all(|r| r.class == RegionClass::Integrable)
    }
}

impl fmt::Display for RegionPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, r) in self.regions.iter().enumerate() {
            if k > 0 {
                f.write_str("|")?;
            }
            write!(f, "{}-{}:{}", r.first, r.last, r.class.code())?;
        }
        Ok(())
    }
}

/// Label the regions of a product state from its text alone.
///
/// Runs of two or more identical fractons are walls, unless the run touches
/// the opposite fracton (`-++`, `++-`, `+--`, `--+`): a pair hop can then act
/// across the run edge, so the run is left inside an active region.
/// Remaining maximal ranges are `Integrable` when spin-only.
///
/// The rule only looks at the initial configuration; see
/// [`partition_regions_confirmed`] for labels checked against the fragment.
pub fn partition_regions(s: &PseudospinString) -> RegionPartition {
    let sym = s.symbols();
    let n = sym.len();
    let mut is_wall = vec![false; n];
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && sym[end + 1] == sym[start] {
            end += 1;
        }
        if sym[start].is_fracton() && end > start {
            let opposite = match sym[start] {
                Pseudospin::Plus => Pseudospin::Minus,
                _ => Pseudospin::Plus,
            };
            let touches = (start > 0 && sym[start - 1] == opposite) || (end + 1 < n && sym[end + 1] == opposite);
            if !touches {
                is_wall[start..=end].iter_mut().for_each(|w| *w = true);
            }
        }
        start = end + 1;
    }
    regions_from_mask(sym, &is_wall)
}

/// [`partition_regions`] with every wall checked against `basis`, the
/// fragment of `s`: a wall survives only if its sites are identical in every
/// member. Demoted walls merge into the neighbouring active regions.
pub fn partition_regions_confirmed(s: &PseudospinString, basis: &FragmentBasis) -> RegionPartition {
    let heuristic = partition_regions(s);
    let (all_and, all_or) = basis.states().iter().fold((u64::MAX, 0u64), |(a, o), st| (a & st.bits(), o | st.bits()));
    let varying = all_and ^ all_or;
    let mut is_wall = vec![false; s.len()];
    for r in heuristic.regions.iter().filter(|r| r.class == RegionClass::FrozenWall) {
        let mask = (((1u128 << (2 * r.len())) - 1) as u64) << (2 * (r.first - 1));
        if varying & mask == 0 {
            is_wall[r.first - 1..r.last].iter_mut().for_each(|w| *w = true);
        }
    }
    regions_from_mask(s.symbols(), &is_wall)
}

fn regions_from_mask(sym: &[Pseudospin], is_wall: &[bool]) -> RegionPartition {
    let n = sym.len();
    let mut regions = Vec::new();
    let mut first = 0;
    while first < n {
        let mut last = first;
        while last + 1 < n && is_wall[last + 1] == is_wall[first] {
            last += 1;
        }
        let class = if is_wall[first] {
            RegionClass::FrozenWall
        } else if sym[first..=last].iter().any(|p| p.is_fracton()) {
            RegionClass::Nonintegrable
        } else {
            RegionClass::Integrable
        };
        regions.push(Region { first: first + 1, last: last + 1, class });
        first = last + 1;
    }
    RegionPartition { regions }
}

/// Check that the fragment of `s` is the product of its region fragments,
/// using the confirmed walls.
pub fn verify_factorization(s: &PseudospinString) -> Result<bool> {
    verify_factorization_with_capacity(s, DEFAULT_CAPACITY)
}

pub fn verify_factorization_with_capacity(s: &PseudospinString, capacity: usize) -> Result<bool> {
    if partition_regions(s).active().count() < 2 {
        return Err(Error::TooFewRegions(partition_regions(s).active().count()));
    }
    let basis = build_fragment_with_capacity(s.encode(), capacity)?;
    let partition = partition_regions_confirmed(s, &basis);
    let active: Vec<&Region> = partition.active().collect();
    let full = basis.dim();
    let mut product = 1usize;
    for r in active {
        let sub = s.slice(r.first, r.last)?;
        product = product.saturating_mul(build_fragment_with_capacity(sub.encode(), capacity)?.dim());
    }
    Ok(full == product)
}

#[cfg(test)]
mod tests {
    use super::*;
    use RegionClass::*;

    fn ps(s: &str) -> PseudospinString {
        s.parse().unwrap()
    }

    fn occ(s: &str) -> FockState {
        FockState::from_occupations(s).unwrap()
    }

    #[test]
    fn small_fragments() {
        let f = build_fragment(occ("0110")).unwrap();
        assert_eq!(f.states(), &[occ("0110"), occ("1001")][..]);
        assert_eq!(build_fragment(occ("1100")).unwrap().dim(), 1);
        assert_eq!(build_fragment(ps("udud").encode()).unwrap().dim(), 6);
    }

    #[test]
    fn basis_is_sorted_closed_and_homogeneous() {
        let f = build_fragment(ps("ud+-du").encode()).unwrap();
        assert!(f.states().windows(2).all(|w| w[0] < w[1]));
        assert!(f.is_closed());
        assert!(f.states().iter().all(|s| s.charges() == f.charges()));
        for (k, s) in f.states().iter().enumerate() {
            assert_eq!(f.index_of(*s), Some(k));
        }
    }

    #[test]
    fn capacity_is_enforced() {
        let err = build_fragment_with_capacity(ps("udududud").encode(), 10).unwrap_err();
        assert_eq!(err, Error::Capacity { limit: 10 });
    }

    #[test]
    fn partition_examples() {
        let p = partition_regions(&ps("ud++du"));
        assert_eq!(
            p.regions,
            vec![
                Region { first: 1, last: 2, class: Integrable },
                Region { first: 3, last: 4, class: FrozenWall },
                Region { first: 5, last: 6, class: Integrable },
            ]
        );
        assert_eq!(p.to_string(), "1-2:I|3-4:W|5-6:I");
        assert_eq!(partition_regions(&ps("uuuu")).regions, vec![Region { first: 1, last: 4, class: Integrable }]);
        // the "++" run touches "-" on both sides, so no wall forms
        let mixed = partition_regions(&ps("ududu-++-dudud"));
        assert_eq!(mixed.regions, vec![Region { first: 1, last: 14, class: Nonintegrable }]);
        assert!(!mixed.is_integrable());
    }

    #[test]
    fn partition_tiles_the_chain() {
        for s in ["+", "++", "u++", "--ud--", "u+d", "ud+-du", "+-+-"] {
            let p = partition_regions(&ps(s));
            let mut next = 1;
            for r in &p.regions {
                assert_eq!(r.first, next);
                next = r.last + 1;
                if r.class == FrozenWall {
                    assert!(r.len() >= 2);
                }
            }
            assert_eq!(next, s.len() + 1);
        }
    }

    #[test]
    fn confirmation_demotes_walls_that_move() {
        // "u-++" can become "-+d+", which puts "-" next to the "++" at 5..6
        let s = ps("d--d++u-++");
        let b = build_fragment(s.encode()).unwrap();
        let confirmed = partition_regions_confirmed(&s, &b);
        assert_eq!(confirmed.to_string(), "1-1:I|2-3:W|4-10:N");
        assert!(verify_factorization(&s).unwrap());
        let frozen = ps("ud++ud");
        let b = build_fragment(frozen.encode()).unwrap();
        assert_eq!(partition_regions_confirmed(&frozen, &b), partition_regions(&frozen));
    }

    #[test]
    fn factorization_examples() {
        assert!(verify_factorization(&ps("ud++ud")).unwrap());
        assert_eq!(build_fragment(ps("ud++ud").encode()).unwrap().dim(), 4);
        assert!(verify_factorization(&ps("ud--ud")).unwrap());
        assert_eq!(verify_factorization(&ps("udud")), Err(Error::TooFewRegions(1)));
    }
}
