//! Single-qubit quantum signal processing.
//!
//! The sequence `S(phi_0) W(a) S(phi_1) ... W(a) S(phi_d)` is multiplied
//! left to right as written, so `S(phi_d)` acts first on a ket. Its top-left
//! entry is the polynomial `P(a)` and its top-right entry is
//! `i Q(a) sqrt(1 - a^2)`.

use std::ops::Mul;

use nalgebra::{Complex, ComplexField};

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// 2x2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary2<T: Real> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Real> Unitary2<T> {
    pub fn new(m00: Complex<T>, m01: Complex<T>, m10: Complex<T>, m11: Complex<T>) -> Self {
        Self { m: [[m00, m01], [m10, m11]] }
    }

    pub fn identity() -> Self {
        let (o, z) = (Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()));
        Self::new(o, z, z, o)
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    /// Largest entry of `|U^dagger U - I|`.
    pub fn unitarity_residual(&self) -> T {
        let p = self.adjoint() * *self;
        let id = Self::identity();
        let mut worst = T::zero();
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((p.m[r][c] - id.m[r][c]).modulus());
            }
        }
        worst
    }

    /// Largest entry of `|self - other|`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.m[r][c] - other.m[r][c]).modulus());
            }
        }
        worst
    }

    /// Deviation from the `[[P, iQs], [iQ*s, P*]]` structure: `U11 = conj(U00)`
    /// and `U10 = -conj(U01)`.
    pub fn su2_residual(&self) -> T {
        let m = &self.m;
        (m[1][1] - m[0][0].conj()).modulus().max((m[1][0] + m[0][1].conj()).modulus())
    }
}

impl<T: Real> Mul for Unitary2<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        let e = |r: usize, c: usize| a[r][0] * b[0][c] + a[r][1] * b[1][c];
        Self::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }
}

/// Phases `(phi_0, ..., phi_d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSequence<T: Real>(Vec<T>);

impl<T: Real> PhaseSequence<T> {
    pub fn new(phases: Vec<T>) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::Empty("phase sequence"));
        }
        Ok(Self(phases))
    }

    /// `(0, 0)`: a single bare signal operator.
    pub fn trivial() -> Self {
        Self(vec![T::zero(), T::zero()])
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn phases(&self) -> &[T] {
        &self.0
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }
}

/// `W(a) = [[a, i sqrt(1-a^2)], [i sqrt(1-a^2), a]]`.
pub fn signal_w<T: Real>(a: T) -> Result<Unitary2<T>> {
    // also rejects NaN
    if a.abs().partial_cmp(&T::one()).is_none_or(|o| o.is_gt()) {
        return Err(Error::SignalOutOfRange(to_f64(a)));
    }
    let s = (T::one() - a * a).max(T::zero()).sqrt();
    let diag = Complex::new(a, T::zero());
    let off = Complex::new(T::zero(), s);
    Ok(Unitary2::new(diag, off, off, diag))
}

/// `S(phi) = diag(e^{i phi}, e^{-i phi})`.
pub fn processing_s<T: Real>(phi: T) -> Unitary2<T> {
    let (s, c) = phi.sin_cos();
    let z = Complex::new(T::zero(), T::zero());
    Unitary2::new(Complex::new(c, s), z, z, Complex::new(c, -s))
}

pub fn compose_qsp<T: Real>(phases: &PhaseSequence<T>, a: T) -> Result<Unitary2<T>> {
    let w = signal_w(a)?;
    let (first, rest) = phases.0.split_first().expect("sequence is nonempty");
    Ok(rest.iter().fold(processing_s(*first), |acc, &phi| acc * w * processing_s(phi)))
}

/// `(pi/2, -chi, 2 chi, 0, -2 chi, chi)` with `chi = arccos(-1/4) / 2`.
pub fn bb1_phases<T: Real>() -> PhaseSequence<T> {
    let chi = lit::<T>(-0.25).acos() * lit(0.5);
    let two = lit::<T>(2.0);
    PhaseSequence(vec![T::frac_pi_2(), -chi, two * chi, T::zero(), -two * chi, chi])
}

/// `|P(a)|^2 = |U_00|^2`.
pub fn response<T: Real>(phases: &PhaseSequence<T>, a: T) -> Result<T> {
    Ok(compose_qsp(phases, a)?.m[0][0].norm_sqr())
}

/// `P` and `Q` of a phase sequence, in monomial and Chebyshev bases.
#[derive(Clone, Debug, PartialEq)]
pub struct PQPolynomials<T: Real> {
    pub degree: usize,
    /// Monomial coefficients of `P`, constant term first; length `d + 1`.
    pub p_coeffs: Vec<Complex<T>>,
    /// Monomial coefficients of `Q`; length `d` (empty for `d = 0`).
    pub q_coeffs: Vec<Complex<T>>,
    pub p_chebyshev: Vec<Complex<T>>,
    pub q_chebyshev: Vec<Complex<T>>,
}

impl<T: Real> PQPolynomials<T> {
    pub fn p(&self, a: T) -> Complex<T> {
        horner(&self.p_coeffs, a)
    }

    pub fn q(&self, a: T) -> Complex<T> {
        horner(&self.q_coeffs, a)
    }

    /// Same values through the Chebyshev-basis coefficients.
    pub fn p_via_chebyshev(&self, a: T) -> Complex<T> {
        clenshaw(&self.p_chebyshev, a)
    }

    pub fn q_via_chebyshev(&self, a: T) -> Complex<T> {
        clenshaw(&self.q_chebyshev, a)
    }

    /// Largest `| |P|^2 + (1-a^2)|Q|^2 - 1 |` over `points` uniform samples of `[-1, 1]`.
    pub fn unitarity_residual(&self, points: usize) -> T {
        uniform_grid::<T>(points)
            .map(|a| (self.p(a).norm_sqr() + (T::one() - a * a) * self.q(a).norm_sqr() - T::one()).abs())
            .fold(T::zero(), |w, r| w.max(r))
    }

    /// Largest magnitude among coefficients of the wrong parity.
    pub fn parity_residual(&self) -> T {
        let d = self.degree;
        let cross = |coeffs: &[Complex<T>], parity: usize| {
            coeffs
                .iter()
                .enumerate()
                .filter(|(k, _)| k % 2 != parity % 2)
                .fold(T::zero(), |w, (_, c)| w.max(c.modulus()))
        };
        let q_parity = (d + 1) % 2; // parity of d - 1
        cross(&self.p_coeffs, d).max(cross(&self.q_coeffs, q_parity))
    }
}

pub const VALIDATION_GRID: usize = 1000;
pub const VALIDATION_TOL: f64 = 1e-9;

/// Recover `P` and `Q` by interpolation at Chebyshev nodes and check the
/// degree, parity, and unitarity conditions.
pub fn extract_pq<T: Real>(phases: &PhaseSequence<T>) -> Result<PQPolynomials<T>> {
    let d = phases.degree();
    let p_nodes = chebyshev_nodes::<T>(d + 1);
    let p_values = p_nodes.iter().map(|&a| compose_qsp(phases, a).map(|u| u.m[0][0])).collect::<Result<Vec<_>>>()?;
    let q_nodes = chebyshev_nodes::<T>(d);
    let q_values = q_nodes
        .iter()
        .map(|&a| {
            let s = (T::one() - a * a).sqrt();
            compose_qsp(phases, a).map(|u| u.m[0][1] / Complex::new(T::zero(), s))
        })
        .collect::<Result<Vec<_>>>()?;

    let p_chebyshev = chebyshev_interpolate(&p_nodes, &p_values);
    let q_chebyshev = chebyshev_interpolate(&q_nodes, &q_values);
    let pq = PQPolynomials {
        degree: d,
        p_coeffs: chebyshev_to_monomial(&p_chebyshev),
        q_coeffs: chebyshev_to_monomial(&q_chebyshev),
        p_chebyshev,
        q_chebyshev,
    };

    let tol = T::tolerance(VALIDATION_TOL);
    // Degree: the interpolants of degree d and d-1 must reproduce the
    // composed matrix everywhere, not only at the nodes.
    let mut degree_residual = T::zero();
    for a in uniform_grid::<T>(VALIDATION_GRID) {
        let u = compose_qsp(phases, a)?;
        let s = Complex::new(T::zero(), (T::one() - a * a).max(T::zero()).sqrt());
        let (p, q) = (pq.p(a), pq.q(a));
        degree_residual = degree_residual
            .max((u.m[0][0] - p).modulus())
            .max((u.m[0][1] - s * q).modulus())
            .max((u.m[1][0] - s * q.conj()).modulus())
            .max((u.m[1][1] - p.conj()).modulus());
    }
    if degree_residual > tol {
        return Err(Error::QspCondition { condition: "degree", residual: to_f64(degree_residual) });
    }
    let parity = pq.parity_residual();
    if parity > tol {
        return Err(Error::QspCondition { condition: "parity", residual: to_f64(parity) });
    }
    let unitarity = pq.unitarity_residual(VALIDATION_GRID);
    if unitarity > tol {
        return Err(Error::QspCondition { condition: "unitarity", residual: to_f64(unitarity) });
    }
    Ok(pq)
}

/// `points` equally spaced values covering `[-1, 1]` inclusive.
pub fn uniform_grid<T: Real>(points: usize) -> impl Iterator<Item = T> {
    let step = if points > 1 { lit::<T>(2.0 / (points - 1) as f64) } else { T::zero() };
    (0..points).map(move |k| (-T::one() + step * lit(k as f64)).min(T::one()))
}

/// First-kind Chebyshev nodes `cos(pi (k + 1/2) / n)`, all strictly inside `(-1, 1)`.
pub fn chebyshev_nodes<T: Real>(n: usize) -> Vec<T> {
    (0..n).map(|k| (T::pi() * lit((k as f64 + 0.5) / n as f64)).cos()).collect()
}

/// Chebyshev coefficients of the degree `n - 1` interpolant through
/// first-kind nodes (discrete orthogonality).
fn chebyshev_interpolate<T: Real>(nodes: &[T], values: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = nodes.len();
    (0..n)
        .map(|j| {
            let sum = (0..n).fold(Complex::new(T::zero(), T::zero()), |acc, k| {
                let theta = T::pi() * lit((k as f64 + 0.5) / n as f64);
                acc + values[k] * (theta * lit(j as f64)).cos()
            });
            let weight: T = if j == 0 { lit(1.0 / n as f64) } else { lit(2.0 / n as f64) };
            sum * weight
        })
        .collect()
}

fn chebyshev_to_monomial<T: Real>(cheb: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = cheb.len();
    let mut out = vec![Complex::new(T::zero(), T::zero()); n];
    if n == 0 {
        return out;
    }
    // monomial coefficients of T_{k-1} and T_k
    let mut prev: Vec<T> = vec![T::one()];
    let mut cur: Vec<T> = vec![T::zero(), T::one()];
    out[0] += cheb[0];
    for (k, c) in cheb.iter().enumerate().skip(1) {
        for (i, t) in cur.iter().enumerate() {
            out[i] += *c * *t;
        }
        if k + 1 < n {
            let mut next = vec![T::zero(); cur.len() + 1];
            for (i, t) in cur.iter().enumerate() {
                next[i + 1] += lit::<T>(2.0) * *t;
            }
            for (i, t) in prev.iter().enumerate() {
                next[i] -= *t;
            }
            prev = std::mem::replace(&mut cur, next);
        }
    }
    out
}

fn horner<T: Real>(coeffs: &[Complex<T>], a: T) -> Complex<T> {
    coeffs.iter().rev().fold(Complex::new(T::zero(), T::zero()), |acc, c| acc * a + c)
}

fn clenshaw<T: Real>(coeffs: &[Complex<T>], a: T) -> Complex<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let Some((first, rest)) = coeffs.split_first() else {
        return zero;
    };
    let (mut b1, mut b2) = (zero, zero);
    for c in rest.iter().rev() {
        let b0 = *c + b1 * (a * lit(2.0)) - b2;
        b2 = b1;
        b1 = b0;
    }
    *first + b1 * a - b2
}
