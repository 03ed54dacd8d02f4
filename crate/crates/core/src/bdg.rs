//! Analytic description of the spin-only (integrable) fragments.
//!
//! Inside such a fragment the pair-hopping chain is an XX chain, i.e. free
//! fermions `d_m` hopping on `N` pseudospin sites with open ends. The sine
//! transform diagonalizes the hopping, and modes `lambda` and `N + 1 - lambda`
//! form a two-level sector in which the drive acts as a QSP sequence with
//! signal `a_lambda = cos(epsilon_lambda t')`.
//!
//! Observables use `sigma^z_m = 2 d†_m d_m - 1`, so no Jordan-Wigner strings
//! are needed.

use nalgebra::{Complex, ComplexField, DMatrix};

use crate::error::{Error, Result};
use crate::evolve::{DriveSchedule, Generator};
use crate::fock::{Pseudospin, PseudospinString};
use crate::qsp::{compose_qsp, PhaseSequence, Unitary2};
use crate::scalar::{lit, phase, to_f64, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BdGSector<T: Real> {
    /// Mode index, `1..=N/2`.
    pub lambda: usize,
    pub energy: T,
    pub signal: T,
}

impl<T: Real> BdGSector<T> {
    /// `lambda pi / (N + 1)`.
    pub fn momentum(&self, n: usize) -> T {
        T::pi() * lit(self.lambda as f64 / (n + 1) as f64)
    }
}

/// `epsilon_lambda = 2 J cos(lambda pi / (N + 1))`, `lambda = 1..=N`.
pub fn mode_energy<T: Real>(n: usize, j: T, lambda: usize) -> T {
    lit::<T>(2.0) * j * (T::pi() * lit(lambda as f64 / (n + 1) as f64)).cos()
}

pub fn sectors<T: Real>(n: usize, j: T, t_prime: T) -> Result<Vec<BdGSector<T>>> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::OddChain(n));
    }
    (1..=n / 2)
        .map(|lambda| {
            let energy = mode_energy(n, j, lambda);
            let angle = energy * t_prime;
            // the signal operator needs epsilon t' = -arccos(a) in [-pi, 0]
            let slack = T::tolerance(1e-14);
            if angle > slack || angle < -T::pi() - slack {
                return Err(Error::SignalCondition { sector: lambda, value: to_f64(angle) });
            }
            Ok(BdGSector { lambda, energy, signal: angle.cos() })
        })
        .collect()
}

/// The QSP unitary of one sector; the phases are `h t_r`.
pub fn sector_unitary<T: Real>(phases: &PhaseSequence<T>, sector: &BdGSector<T>) -> Result<Unitary2<T>> {
    compose_qsp(phases, sector.signal)
}

/// `prod_lambda |P(a_lambda)|^2`.
pub fn neel_transition_probability<T: Real>(sectors: &[BdGSector<T>], phases: &PhaseSequence<T>) -> Result<T> {
    sectors.iter().try_fold(T::one(), |acc, s| Ok(acc * sector_unitary(phases, s)?.m[0][0].norm_sqr()))
}

/// Orthogonal sine transform `S_{m lambda} = sqrt(2/(N+1)) sin(lambda m pi / (N+1))`.
pub fn sine_transform<T: Real>(n: usize) -> DMatrix<T> {
    let norm = lit::<T>(2.0 / (n + 1) as f64).sqrt();
    DMatrix::from_fn(n, n, |r, c| {
        let (m, lambda) = ((r + 1) as f64, (c + 1) as f64);
        norm * (T::pi() * lit(lambda * m / (n + 1) as f64)).sin()
    })
}

/// Single-particle image of a drive schedule on `n` pseudospin sites.
///
/// Pair-hopping segments use the hopping matrix (amplitude `J` on the first
/// off-diagonals), staggered segments use `h diag((-1)^m)`.
pub fn single_particle_unitary<T: Real>(schedule: &DriveSchedule<T>, n: usize) -> DMatrix<Complex<T>> {
    let sine = sine_transform::<T>(n).map(|x| Complex::new(x, T::zero()));
    let mut u = DMatrix::<Complex<T>>::identity(n, n);
    for seg in &schedule.segments {
        let tau = seg.effective_time();
        if tau == T::zero() {
            continue;
        }
        match seg.generator {
            Generator::Staggered => {
                for m in 0..n {
                    // site m + 1 has sign (-1)^{m+1}
                    let e = if m % 2 == 0 { -T::one() } else { T::one() };
                    let p = phase(e * tau);
                    u.row_mut(m).iter_mut().for_each(|z| *z *= p);
                }
            }
            Generator::PairHop => {
                let phases = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |l, _| {
                    phase(mode_energy(n, T::one(), l + 1) * tau)
                }));
                u = &sine * phases * &sine * u;
            }
        }
    }
    u
}

/// `C_{mn} = <d†_m d_n>` on the pseudospin sites.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix<T: Real>(pub DMatrix<Complex<T>>);

impl<T: Real> CorrelationMatrix<T> {
    /// Up sites occupied: `diag(1, 0, 1, 0, ...)`.
    pub fn neel(n: usize) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::OddChain(n));
        }
        let diag = nalgebra::DVector::from_fn(n, |m, _| {
            Complex::new(if m % 2 == 0 { T::one() } else { T::zero() }, T::zero())
        });
        Ok(Self(DMatrix::from_diagonal(&diag)))
    }

    /// Product state of a spin-only string: up sites occupied.
    pub fn from_spins(s: &PseudospinString) -> Result<Self> {
        let occ = occupied_sites(s)?;
        let diag = nalgebra::DVector::from_fn(s.len(), |m, _| {
            Complex::new(if occ.contains(&m) { T::one() } else { T::zero() }, T::zero())
        });
        Ok(Self(DMatrix::from_diagonal(&diag)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> Complex<T> {
        self.0.trace()
    }

    /// `<sigma^z_m> = 2 C_mm - 1`, 1-based `m`.
    pub fn sigma_z(&self, m: usize) -> T {
        lit::<T>(2.0) * self.0[(m - 1, m - 1)].re - T::one()
    }

    pub fn occupation_spectrum(&self) -> Vec<T> {
        self.0.clone().symmetric_eigenvalues().iter().copied().collect()
    }

    pub fn hermiticity_residual(&self) -> T {
        let d = &self.0 - self.0.adjoint();
        d.iter().fold(T::zero(), |w, z| w.max(z.modulus()))
    }
}

/// Heisenberg update `C -> conj(u) C u^T` for a single-particle unitary `u`.
pub fn evolve_correlation<T: Real>(c: &CorrelationMatrix<T>, u: &DMatrix<Complex<T>>) -> Result<CorrelationMatrix<T>> {
    if u.nrows() != c.dim() || u.ncols() != c.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), actual: u.nrows() });
    }
    Ok(CorrelationMatrix(u.conjugate() * &c.0 * u.transpose()))
}

/// 0-based up sites of a spin-only string.
fn occupied_sites(s: &PseudospinString) -> Result<Vec<usize>> {
    let mut occ = Vec::new();
    for (m, p) in s.symbols().iter().enumerate() {
        match p {
            Pseudospin::Up => occ.push(m),
            Pseudospin::Down => {}
            _ => return Err(Error::Fracton { site: m + 1 }),
        }
    }
    Ok(occ)
}

/// `|<s|U|s>|^2` for the Slater determinant `s`: `|det u[occ, occ]|^2`.
pub fn return_probability<T: Real>(u: &DMatrix<Complex<T>>, s: &PseudospinString) -> Result<T> {
    if u.nrows() != s.len() || u.ncols() != s.len() {
        return Err(Error::DimensionMismatch { expected: s.len(), actual: u.nrows() });
    }
    let occ = occupied_sites(s)?;
    let block = u.select_rows(&occ).select_columns(&occ);
    Ok(block.determinant().modulus_squared())
}

pub fn neel_correlation<T: Real>(n: usize) -> Result<CorrelationMatrix<T>> {
    CorrelationMatrix::neel(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::{schedule_from_phases, Segment};
    use crate::qsp::bb1_phases;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn sector_examples() {
        let s2 = sectors(2, 1.0, -FRAC_PI_2).unwrap();
        assert_eq!(s2.len(), 1);
        assert!((s2[0].energy - 1.0).abs() < 1e-15);
        assert!(s2[0].signal.abs() < 1e-15);

        let s4 = sectors(4, 1.0, -FRAC_PI_2).unwrap();
        assert!((s4[0].energy - 1.618_034).abs() < 1e-6);
        // cos(pi cos(pi/5)) evaluated independently
        assert!((s4[0].signal + 0.825_340_805_389_046_5).abs() < 1e-13);

        let s14 = sectors(14, 1.0, -FRAC_PI_2).unwrap();
        assert_eq!(s14.len(), 7);
        for w in s14.windows(2) {
            assert!(w[0].signal != w[1].signal);
        }
        assert!(s14.iter().all(|s| s.signal.abs() <= 1.0 && s.energy > 0.0));
        assert!(matches!(sectors(3, 1.0, -FRAC_PI_2), Err(Error::OddChain(3))));
        assert!(matches!(sectors(4, 1.0, FRAC_PI_2), Err(Error::SignalCondition { .. })));
    }

    #[test]
    fn partner_modes_have_opposite_energy() {
        for n in [2usize, 4, 6, 14] {
            for lambda in 1..=n {
                let e = mode_energy(n, 1.0, lambda);
                let partner = mode_energy(n, 1.0, n + 1 - lambda);
                assert!((e + partner).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn sector_unitary_examples() {
        let s = sectors(2, 1.0, -FRAC_PI_2).unwrap()[0];
        let u = sector_unitary(&PhaseSequence::trivial(), &s).unwrap();
        assert!((u.m[0][1] - Complex::new(0.0, 1.0)).norm() < 1e-15 && u.m[0][0].norm() < 1e-15);
        let top = BdGSector { lambda: 1, energy: 0.0, signal: 1.0 };
        let bb = sector_unitary(&bb1_phases(), &top).unwrap();
        assert!((bb.m[0][0] - Complex::new(0.0, 1.0)).norm() < 1e-14);
        let id = sector_unitary(&PhaseSequence::new(vec![0.0]).unwrap(), &s).unwrap();
        assert_eq!(id, Unitary2::identity());
    }

    #[test]
    fn transition_probability_examples() {
        let s2 = sectors(2, 1.0, -FRAC_PI_2).unwrap();
        assert!(neel_transition_probability(&s2, &PhaseSequence::trivial()).unwrap() < 1e-30);
        let s8 = sectors(8, 1.0, -FRAC_PI_2).unwrap();
        let none = PhaseSequence::new(vec![0.0]).unwrap();
        assert_eq!(neel_transition_probability(&s8, &none).unwrap(), 1.0);
        let p = neel_transition_probability(&sectors(14, 1.0, -FRAC_PI_2).unwrap(), &bb1_phases()).unwrap();
        assert!(p > 0.0 && p < 1.0);
    }

    #[test]
    fn sine_transform_diagonalizes_hopping() {
        let n = 6;
        let s = sine_transform::<f64>(n);
        let hop = DMatrix::from_fn(n, n, |r, c| if r.abs_diff(c) == 1 { 1.0 } else { 0.0 });
        let d = &s * hop * &s;
        for r in 0..n {
            for c in 0..n {
                let expected = if r == c { mode_energy(n, 1.0, r + 1) } else { 0.0 };
                assert!((d[(r, c)] - expected).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn single_particle_examples() {
        let hop = DriveSchedule::from_segments(vec![Segment {
            generator: Generator::PairHop,
            duration: -FRAC_PI_2,
            amplitude: 1.0,
        }]);
        let u = single_particle_unitary(&hop, 2);
        let ix = DMatrix::from_row_slice(
            2,
            2,
            &[Complex::new(0.0, 0.0), Complex::new(0.0, 1.0), Complex::new(0.0, 1.0), Complex::new(0.0, 0.0)],
        );
        assert!((u - &ix).iter().all(|z| z.norm() < 1e-15));

        let zero = schedule_from_phases(&PhaseSequence::new(vec![0.0]).unwrap(), 1.0, 1.0, 0.0).unwrap();
        assert_eq!(single_particle_unitary(&zero, 4), DMatrix::identity(4, 4));

        let stag = DriveSchedule::from_segments(vec![Segment {
            generator: Generator::Staggered,
            duration: PI,
            amplitude: 1.0,
        }]);
        let u = single_particle_unitary(&stag, 4);
        assert!((0..4).all(|m| (u[(m, m)] + Complex::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn correlation_examples() {
        let c = CorrelationMatrix::<f64>::neel(2).unwrap();
        assert_eq!(c.sigma_z(1), 1.0);
        assert_eq!(c.sigma_z(2), -1.0);
        assert_eq!(evolve_correlation(&c, &DMatrix::identity(2, 2)).unwrap(), c);

        let ix = DMatrix::from_row_slice(
            2,
            2,
            &[Complex::new(0.0, 0.0), Complex::new(0.0, 1.0), Complex::new(0.0, 1.0), Complex::new(0.0, 0.0)],
        );
        let flipped = evolve_correlation(&c, &ix).unwrap();
        assert!((flipped.sigma_z(1) + 1.0).abs() < 1e-15);

        let c6 = CorrelationMatrix::<f64>::neel(6).unwrap();
        assert_eq!(c6.trace().re, 3.0);
        assert!(evolve_correlation(&c6, &ix).is_err());
    }

    #[test]
    fn correlation_stays_physical() {
        let n = 6;
        let sched = schedule_from_phases(&PhaseSequence::new(vec![0.4, -1.1, 2.5, 0.9]).unwrap(), 1.0, 1.0, -FRAC_PI_2)
            .unwrap();
        let u = single_particle_unitary(&sched, n);
        let mut c = CorrelationMatrix::<f64>::neel(n).unwrap();
        for _ in 0..10 {
            c = evolve_correlation(&c, &u).unwrap();
        }
        assert!((c.trace().re - 3.0).abs() < 1e-12);
        assert!(c.hermiticity_residual() < 1e-12);
        assert!(c.occupation_spectrum().iter().all(|&e| e > -1e-10 && e < 1.0 + 1e-10));
    }
}
