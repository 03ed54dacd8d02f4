//! Bit-packed fermion configurations and the pseudospin encoding.
//!
//! Site `j` (1-based) lives in bit `j - 1`, so site 1 is the least
//! significant bit. Pseudospin site `m` groups fermion sites `2m - 1` and
//! `2m`:
//!
//! | symbol | occupations `(n_{2m-1}, n_{2m})` | text |
//! |--------|----------------------------------|------|
//! | Up     | `01`                             | `u`  |
//! | Down   | `10`                             | `d`  |
//! | Plus   | `11`                             | `+`  |
//! | Minus  | `00`                             | `-`  |

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const MAX_SITES: usize = 63;

/// Occupation pattern of `len` spinless-fermion sites.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockState {
    bits: u64,
    len: u8,
}

impl FockState {
    pub fn new(bits: u64, len: usize) -> Result<Self> {
        if !(2..=MAX_SITES).contains(&len) || !len.is_multiple_of(2) {
            return Err(Error::InvalidLength(len));
        }
        if bits >> len != 0 {
            return Err(Error::OutOfRange {
                what: "occupied site",
                index: 64 - bits.leading_zeros() as usize,
                max: len,
            });
        }
        Ok(Self { bits, len: len as u8 })
    }

    /// Parse an occupation string such as `"0110"` (site 1 first).
    pub fn from_occupations(s: &str) -> Result<Self> {
        let mut bits = 0u64;
        let mut len = 0usize;
        for c in s.chars().filter(|c| !c.is_whitespace()) {
            match c {
                '0' => {}
                '1' if len < 64 => bits |= 1 << len,
                '1' => {}
                other => return Err(Error::InvalidSymbol(other)),
            }
            len += 1;
        }
        Self::new(bits, len)
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn len(self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    /// Number of pseudospin sites `N = L / 2`.
    #[inline]
    pub fn pseudospin_len(self) -> usize {
        self.len as usize / 2
    }

    /// `n_j` for 1-based site `j`.
    #[inline]
    pub fn occupation(self, site: usize) -> u8 {
        debug_assert!(site >= 1 && site <= self.len());
        ((self.bits >> (site - 1)) & 1) as u8
    }

    /// Same chain length, different occupations. Caller guarantees the bits fit.
    #[inline]
    pub(crate) fn with_bits(self, bits: u64) -> Self {
        debug_assert_eq!(bits >> self.len, 0);
        Self { bits, len: self.len }
    }

    pub fn charges(self) -> ConservedCharges {
        // sites 1, 3, 5, ... sit on even bit positions
        const ODD_SITES: u64 = 0x5555_5555_5555_5555;
        let n_odd = (self.bits & ODD_SITES).count_ones() as usize;
        let n_even = (self.bits & !ODD_SITES).count_ones() as usize;
        let c_com = set_sites(self.bits).sum();
        ConservedCharges { n_tot: n_odd + n_even, c_com, n_even, n_odd }
    }

    /// `sigma^z_m = n_{2m} - n_{2m-1}`.
    pub fn pseudospin_z(self, m: usize) -> Result<i8> {
        if m == 0 || m > self.pseudospin_len() {
            return Err(Error::OutOfRange { what: "pseudospin site", index: m, max: self.pseudospin_len() });
        }
        Ok(self.pseudospin_z_unchecked(m))
    }

    #[inline]
    pub(crate) fn pseudospin_z_unchecked(self, m: usize) -> i8 {
        self.occupation(2 * m) as i8 - self.occupation(2 * m - 1) as i8
    }

    pub fn symbol(self, m: usize) -> Pseudospin {
        let pair = (self.bits >> (2 * (m - 1))) & 0b11;
        Pseudospin::from_pair_bits(pair)
    }

    pub fn to_pseudospin(self) -> PseudospinString {
        PseudospinString((1..=self.pseudospin_len()).map(|m| self.symbol(m)).collect())
    }

    /// Apply one pair-hopping term on the window `j..=j+3`.
    ///
    /// `Squeeze` is `c†_j c†_{j+3} c_{j+2} c_{j+1}` (window `0110 -> 1001`),
    /// `Antisqueeze` its adjoint. Returns `None` when the window does not
    /// match or lies outside the chain.
    pub fn apply_pair_hop(self, j: usize, direction: HopDirection) -> Option<(FockState, i8)> {
        if j == 0 || j + 3 > self.len() {
            return None;
        }
        let window = (self.bits >> (j - 1)) & 0xF;
        // Operators listed in the order they act on the ket (rightmost first).
        let ops = match (direction, window) {
            (HopDirection::Squeeze, 0b0110) => [(j + 1, false), (j + 2, false), (j + 3, true), (j, true)],
            (HopDirection::Antisqueeze, 0b1001) => [(j, false), (j + 3, false), (j + 2, true), (j + 1, true)],
            _ => return None,
        };
        let mut bits = self.bits;
        let mut sign = 1i8;
        for (site, create) in ops {
            let (next, s) = apply_ladder(bits, site, create)?;
            bits = next;
            sign *= s;
        }
        Some((self.with_bits(bits), sign))
    }

    /// All pair-hop images of this state, both directions, every window.
    pub fn neighbours(self) -> impl Iterator<Item = (FockState, i8)> {
        let len = self.len();
        (1..len.saturating_sub(2)).flat_map(move |j| {
            [HopDirection::Squeeze, HopDirection::Antisqueeze]
                .into_iter()
                .filter_map(move |d| self.apply_pair_hop(j, d))
        })
    }
}

/// Apply `c†_site` (`create`) or `c_site` to an ascending-ordered product
/// state. The sign is the parity of occupied sites to the left.
#[inline]
pub(crate) fn apply_ladder(bits: u64, site: usize, create: bool) -> Option<(u64, i8)> {
    let mask = 1u64 << (site - 1);
    let occupied = bits & mask != 0;
    if occupied == create {
        return None;
    }
    let left = (bits & (mask - 1)).count_ones();
    let sign = if left.is_multiple_of(2) { 1 } else { -1 };
    Some((bits ^ mask, sign))
}

fn set_sites(mut bits: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if bits == 0 {
            return None;
        }
        let tz = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        Some(tz + 1)
    })
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for site in 1..=self.len() {
            write!(f, "{}", self.occupation(site))?;
        }
        Ok(())
    }
}

impl fmt::Debug for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FockState({self})")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HopDirection {
    Squeeze,
    Antisqueeze,
}

/// Total number, center of mass, and sublattice numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConservedCharges {
    pub n_tot: usize,
    pub c_com: usize,
    pub n_even: usize,
    pub n_odd: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pseudospin {
    Up,
    Down,
    Plus,
    Minus,
}

impl Pseudospin {
    /// Two-bit pair value, low bit = site `2m - 1`.
    #[inline]
    pub fn pair_bits(self) -> u64 {
        match self {
            Pseudospin::Up => 0b10,
            Pseudospin::Down => 0b01,
            Pseudospin::Plus => 0b11,
            Pseudospin::Minus => 0b00,
        }
    }

    #[inline]
    fn from_pair_bits(pair: u64) -> Self {
        match pair & 0b11 {
            0b10 => Pseudospin::Up,
            0b01 => Pseudospin::Down,
            0b11 => Pseudospin::Plus,
            _ => Pseudospin::Minus,
        }
    }

    pub fn is_fracton(self) -> bool {
        matches!(self, Pseudospin::Plus | Pseudospin::Minus)
    }

    pub fn as_char(self) -> char {
        match self {
            Pseudospin::Up => 'u',
            Pseudospin::Down => 'd',
            Pseudospin::Plus => '+',
            Pseudospin::Minus => '-',
        }
    }
}

impl TryFrom<char> for Pseudospin {
    type Error = Error;

    fn try_from(c: char) -> Result<Self> {
        match c {
            'u' | 'U' | '↑' => Ok(Pseudospin::Up),
            'd' | 'D' | '↓' => Ok(Pseudospin::Down),
            '+' => Ok(Pseudospin::Plus),
            '-' | '−' => Ok(Pseudospin::Minus),
            other => Err(Error::InvalidSymbol(other)),
        }
    }
}

/// Sequence of pseudospin symbols, site 1 first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PseudospinString(pub Vec<Pseudospin>);

impl PseudospinString {
    pub fn new(symbols: Vec<Pseudospin>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Empty("pseudospin string"));
        }
        if 2 * symbols.len() > MAX_SITES {
            return Err(Error::InvalidLength(2 * symbols.len()));
        }
        Ok(Self(symbols))
    }

    /// Alternating `u d u d ...` of `n` sites.
    pub fn neel(n: usize) -> Result<Self> {
        Self::new((0..n).map(|m| if m % 2 == 0 { Pseudospin::Up } else { Pseudospin::Down }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Pseudospin] {
        &self.0
    }

    pub fn encode(&self) -> FockState {
        let bits = self.0.iter().enumerate().fold(0u64, |acc, (m, s)| acc | (s.pair_bits() << (2 * m)));
        FockState { bits, len: (2 * self.0.len()) as u8 }
    }

    /// Sub-string over the 1-based inclusive pseudospin range.
    pub fn slice(&self, first: usize, last: usize) -> Result<Self> {
        if first == 0 || last < first || last > self.len() {
            return Err(Error::OutOfRange { what: "pseudospin range end", index: last, max: self.len() });
        }
        Self::new(self.0[first - 1..last].to_vec())
    }
}

/// Shorthand for [`PseudospinString::encode`].
pub fn encode_pseudospin(s: &PseudospinString) -> FockState {
    s.encode()
}

impl FromStr for PseudospinString {
    type Err = Error;

    /// Accepts compact text (`"ud++du"`) or whitespace-separated names
    /// (`"UP DOWN PLUS MINUS"`).
    fn from_str(s: &str) -> Result<Self> {
        let words: Vec<&str> = s.split_whitespace().collect();
        let named = |w: &str| match w.to_ascii_uppercase().as_str() {
            "UP" => Some(Pseudospin::Up),
            "DOWN" => Some(Pseudospin::Down),
            "PLUS" => Some(Pseudospin::Plus),
            "MINUS" => Some(Pseudospin::Minus),
            _ => None,
        };
        if !words.is_empty() && words.iter().all(|w| named(w).is_some()) {
            return Self::new(words.into_iter().filter_map(named).collect());
        }
        let symbols = s.chars().filter(|c| !c.is_whitespace()).map(Pseudospin::try_from).collect::<Result<Vec<_>>>()?;
        Self::new(symbols)
    }
}

impl fmt::Display for PseudospinString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.as_char()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn occ(s: &str) -> FockState {
        FockState::from_occupations(s).unwrap()
    }

    fn ps(s: &str) -> PseudospinString {
        s.parse().unwrap()
    }

    #[test]
    fn encode_examples() {
        assert_eq!(ps("UP DOWN").encode(), occ("0110"));
        assert_eq!(ps("PLUS").encode(), occ("11"));
        assert_eq!(ps("MINUS MINUS").encode(), occ("0000"));
        assert_eq!(ps("ud").encode(), occ("0110"));
    }

    #[test]
    fn charges_examples() {
        let c = occ("1001").charges();
        assert_eq!(c, ConservedCharges { n_tot: 2, c_com: 5, n_even: 1, n_odd: 1 });
        assert_eq!(occ("0110").charges(), c);
        assert_eq!(occ("0000").charges(), ConservedCharges { n_tot: 0, c_com: 0, n_even: 0, n_odd: 0 });
    }

    #[test]
    fn pseudospin_z_examples() {
        assert_eq!(ps("u").encode().pseudospin_z(1).unwrap(), 1);
        assert_eq!(ps("d").encode().pseudospin_z(1).unwrap(), -1);
        assert_eq!(ps("+").encode().pseudospin_z(1).unwrap(), 0);
        assert!(ps("ud").encode().pseudospin_z(3).is_err());
        assert!(ps("ud").encode().pseudospin_z(0).is_err());
    }

    #[test]
    fn pair_hop_examples() {
        assert_eq!(occ("0110").apply_pair_hop(1, HopDirection::Squeeze), Some((occ("1001"), 1)));
        assert_eq!(occ("1001").apply_pair_hop(1, HopDirection::Squeeze), None);
        assert_eq!(occ("1001").apply_pair_hop(1, HopDirection::Antisqueeze), Some((occ("0110"), 1)));
        // window 0001 at j = 3 is frozen
        assert_eq!(occ("11000110").apply_pair_hop(3, HopDirection::Squeeze), None);
        assert_eq!(occ("11000110").apply_pair_hop(3, HopDirection::Antisqueeze), None);
        assert_eq!(occ("0110").apply_pair_hop(2, HopDirection::Squeeze), None);
    }

    #[test]
    fn rejects_bad_lengths_and_symbols() {
        assert!(FockState::new(0, 3).is_err());
        assert!(FockState::new(0, 64).is_err());
        assert!(FockState::new(0b100, 2).is_err());
        assert!("ux".parse::<PseudospinString>().is_err());
        assert!("".parse::<PseudospinString>().is_err());
    }

    #[test]
    fn display_round_trip() {
        let s = ps("ududu-++-dudud");
        assert_eq!(s.to_string(), "ududu-++-dudud");
        assert_eq!(s.encode().len(), 28);
        assert_eq!(s.encode().to_pseudospin(), s);
        assert_eq!(occ("0110").to_string(), "0110");
    }

    #[test]
    fn encode_decode_exhaustive() {
        use Pseudospin::*;
        let all = [Up, Down, Plus, Minus];
        for n in 1..=6usize {
            for code in 0..4usize.pow(n as u32) {
                let symbols: Vec<_> = (0..n).map(|k| all[(code >> (2 * k)) & 3]).collect();
                let s = PseudospinString::new(symbols).unwrap();
                assert_eq!(s.encode().to_pseudospin(), s);
            }
        }
    }

    proptest! {
        #[test]
        fn hops_conserve_charges(bits in any::<u64>(), half in 2usize..=10) {
            let len = 2 * half;
            let psi = FockState::new(bits & ((1u64 << len) - 1), len).unwrap();
            for j in 1..=len - 3 {
                for dir in [HopDirection::Squeeze, HopDirection::Antisqueeze] {
                    if let Some((phi, sign)) = psi.apply_pair_hop(j, dir) {
                        prop_assert_eq!(phi.charges(), psi.charges());
                        let back = match dir {
                            HopDirection::Squeeze => HopDirection::Antisqueeze,
                            HopDirection::Antisqueeze => HopDirection::Squeeze,
                        };
                        let (again, sign_back) = phi.apply_pair_hop(j, back).unwrap();
                        prop_assert_eq!(again, psi);
                        prop_assert_eq!(sign * sign_back, 1);
                    }
                }
            }
        }
    }
}
