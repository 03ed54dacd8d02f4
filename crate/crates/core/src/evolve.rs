//! Piecewise-constant drive: alternating pair-hopping and staggered segments.
//!
//! A schedule built from phases `(phi_0, ..., phi_d)` runs, in time order,
//! `STAG(t_d), PH(t'), STAG(t_{d-1}), ..., PH(t'), STAG(t_0)` with
//! `t_r = phi_r / h`. The one-cycle unitary is therefore
//! `e^{-i t_0 H_stag} [e^{-i t' H_PH} e^{-i t_1 H_stag}] ... [e^{-i t' H_PH} e^{-i t_d H_stag}]`.

use nalgebra::{Complex, ComplexField, DMatrix};

use crate::error::{Error, Result};
use crate::fragment::FragmentBasis;
use crate::hamiltonian::{build_h_ph, build_h_stag, SparseOperator, StateVector};
use crate::qsp::PhaseSequence;
use crate::scalar::{lit, phase, to_f64, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    PairHop,
    Staggered,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment<T: Real> {
    pub generator: Generator,
    pub duration: T,
    pub amplitude: T,
}

impl<T: Real> Segment<T> {
    /// `duration * amplitude`, the time a unit-amplitude generator runs for.
    pub fn effective_time(&self) -> T {
        self.duration * self.amplitude
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DriveSchedule<T: Real> {
    pub segments: Vec<Segment<T>>,
    pub j: T,
    pub h: T,
    pub t_prime: T,
    pub phases: Vec<T>,
}

impl<T: Real> DriveSchedule<T> {
    /// Schedule from explicit segments (metadata left at zero).
    pub fn from_segments(segments: Vec<Segment<T>>) -> Self {
        Self { segments, j: T::zero(), h: T::zero(), t_prime: T::zero(), phases: Vec::new() }
    }

    /// `self` followed in time by `later`.
    pub fn then(&self, later: &Self) -> Self {
        let mut segments = self.segments.clone();
        segments.extend_from_slice(&later.segments);
        Self::from_segments(segments)
    }

    /// `cycles` back-to-back repetitions.
    pub fn repeated(&self, cycles: usize) -> Self {
        Self::from_segments(self.segments.iter().copied().cycle().take(self.segments.len() * cycles).collect())
    }
}

pub fn schedule_from_phases<T: Real>(phases: &PhaseSequence<T>, j: T, h: T, t_prime: T) -> Result<DriveSchedule<T>> {
    if h == T::zero() {
        return Err(Error::ZeroStaggeredAmplitude);
    }
    let stag = |phi: T| Segment { generator: Generator::Staggered, duration: phi / h, amplitude: h };
    let hop = Segment { generator: Generator::PairHop, duration: t_prime, amplitude: j };
    let mut segments = Vec::with_capacity(2 * phases.degree() + 1);
    let phis = phases.phases();
    for (k, &phi) in phis.iter().enumerate().rev() {
        segments.push(stag(phi));
        if k > 0 {
            segments.push(hop);
        }
    }
    Ok(DriveSchedule { segments, j, h, t_prime, phases: phis.to_vec() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropagatorConfig {
    /// Largest dimension handled by dense eigendecomposition.
    pub dense_max_dim: usize,
    pub chebyshev_tol: f64,
    pub chebyshev_max_order: usize,
    /// Relative norm drift above which the result is renormalized.
    pub renormalize_above: f64,
    /// Relative norm drift treated as failure.
    pub drift_limit: f64,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            dense_max_dim: 4096,
            chebyshev_tol: 1e-12,
            chebyshev_max_order: 100_000,
            renormalize_above: 1e-12,
            drift_limit: 1e-8,
        }
    }
}

#[derive(Clone, Debug)]
enum Method<T: Real> {
    Diagonal(Vec<T>),
    Dense { energies: Vec<T>, vectors: DMatrix<T> },
    Chebyshev { op: SparseOperator<T>, centre: T, half_width: T },
}

/// `v -> exp(-i t H) v` for one fixed Hermitian `H`.
#[derive(Clone, Debug)]
pub struct Propagator<T: Real> {
    dim: usize,
    method: Method<T>,
    config: PropagatorConfig,
}

impl<T: Real> Propagator<T> {
    pub fn new(op: &SparseOperator<T>, config: PropagatorConfig) -> Self {
        let dim = op.dim();
        let method = if op.is_diagonal() {
            Method::Diagonal(op.diagonal())
        } else if dim <= config.dense_max_dim {
            let eig = op.to_dense().symmetric_eigen();
            Method::Dense { energies: eig.eigenvalues.iter().copied().collect(), vectors: eig.eigenvectors }
        } else {
            Self::chebyshev_method(op)
        };
        Self { dim, method, config }
    }

    /// Force the Chebyshev expansion regardless of dimension.
    pub fn chebyshev(op: &SparseOperator<T>, config: PropagatorConfig) -> Self {
        Self { dim: op.dim(), method: Self::chebyshev_method(op), config }
    }

    fn chebyshev_method(op: &SparseOperator<T>) -> Method<T> {
        let (lo, hi) = op.gershgorin_bounds();
        let centre = (lo + hi) * lit(0.5);
        // pad so rounding never pushes the spectrum outside [-1, 1]
        let half_width = (hi - lo) * lit(0.5) * lit(1.0 + 1e-10) + lit(1e-14);
        Method::Chebyshev { op: op.clone(), centre, half_width }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.method, Method::Dense { .. })
    }

    pub fn is_chebyshev(&self) -> bool {
        matches!(self.method, Method::Chebyshev { .. })
    }

    pub fn propagate(&self, time: T, v: &mut StateVector<T>) -> Result<()> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: v.dim() });
        }
        if time == T::zero() {
            return Ok(());
        }
        let before = v.norm();
        match &self.method {
            Method::Diagonal(d) => {
                for (z, &e) in v.0.iter_mut().zip(d) {
                    *z *= phase(e * time);
                }
            }
            Method::Dense { energies, vectors } => dense_apply(energies, vectors, time, &mut v.0),
            Method::Chebyshev { op, centre, half_width } => {
                chebyshev_apply(op, *centre, *half_width, time, &mut v.0, &self.config)?
            }
        }
        self.check_norm(before, v)
    }

    fn check_norm(&self, before: T, v: &mut StateVector<T>) -> Result<()> {
        if before == T::zero() {
            return Ok(());
        }
        let after = v.norm();
        let drift = ((after - before) / before).abs();
        if drift > T::tolerance(self.config.drift_limit) {
            return Err(Error::NormDrift { drift: to_f64(drift), limit: self.config.drift_limit });
        }
        if drift > T::tolerance(self.config.renormalize_above) {
            v.scale(before / after);
        }
        Ok(())
    }
}

fn dense_apply<T: Real>(energies: &[T], vectors: &DMatrix<T>, time: T, v: &mut [Complex<T>]) {
    let zero = Complex::new(T::zero(), T::zero());
    let coords: Vec<Complex<T>> = vectors
        .column_iter()
        .zip(energies)
        .map(|(col, &e)| {
            let proj = col.iter().zip(v.iter()).fold(zero, |acc, (&x, &z)| acc + z * x);
            proj * phase(e * time)
        })
        .collect();
    v.iter_mut().for_each(|z| *z = zero);
    for (col, w) in vectors.column_iter().zip(coords) {
        for (z, &x) in v.iter_mut().zip(col.iter()) {
            *z += w * x;
        }
    }
}

fn chebyshev_apply<T: Real>(
    op: &SparseOperator<T>,
    centre: T,
    half_width: T,
    time: T,
    v: &mut [Complex<T>],
    config: &PropagatorConfig,
) -> Result<()> {
    let global = phase(centre * time);
    if half_width == T::zero() {
        v.iter_mut().for_each(|z| *z *= global);
        return Ok(());
    }
    let x = to_f64(half_width * time);
    let order = chebyshev_order(x, config.chebyshev_tol, config.chebyshev_max_order)?;
    let bessel = bessel_j(x, order);
    let zero = Complex::new(T::zero(), T::zero());
    let dim = v.len();
    let inv = T::one() / half_width;

    // scaled operator (H - centre) / half_width applied to `src`
    let apply = |src: &[Complex<T>], dst: &mut [Complex<T>]| {
        for (r, y) in dst.iter_mut().enumerate() {
            let mut acc = zero;
            for (c, h) in op.row(r) {
                acc += src[c] * h;
            }
            *y = (acc - src[r] * centre) * inv;
        }
    };

    let mut prev: Vec<Complex<T>> = v.to_vec();
    let mut cur = vec![zero; dim];
    apply(&prev, &mut cur);
    let mut out: Vec<Complex<T>> = prev.iter().map(|z| *z * lit::<T>(bessel[0])).collect();
    // (-i)^k cycles through 1, -i, -1, i
    let coeff = |k: usize| -> Complex<T> {
        let c = lit::<T>(2.0 * bessel[k]);
        match k % 4 {
            0 => Complex::new(c, T::zero()),
            1 => Complex::new(T::zero(), -c),
            2 => Complex::new(-c, T::zero()),
            _ => Complex::new(T::zero(), c),
        }
    };
    let mut next = vec![zero; dim];
    for k in 1..=order {
        let a = coeff(k);
        for (o, z) in out.iter_mut().zip(&cur) {
            *o += *z * a;
        }
        if k == order {
            break;
        }
        apply(&cur, &mut next);
        for (n, p) in next.iter_mut().zip(&prev) {
            *n = *n * lit::<T>(2.0) - *p;
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    for (z, o) in v.iter_mut().zip(out) {
        *z = o * global;
    }
    Ok(())
}

/// Smallest order past which `|J_k(x)|` stays below `tol`.
fn chebyshev_order(x: f64, tol: f64, max_order: usize) -> Result<usize> {
    let ax = x.abs();
    let guess = (ax + 10.0 * ax.cbrt() + 30.0).ceil() as usize;
    let span = guess.min(max_order + 1);
    let j = bessel_j(ax, span);
    for k in (ax.floor() as usize)..span {
        if j[k].abs() < tol && j[k + 1].abs() < tol {
            return Ok(k.max(1));
        }
    }
    Err(Error::ChebyshevNotConverged { max_order })
}

/// `J_0(x), ..., J_n(x)` for integer orders by Miller's backward recurrence.
pub fn bessel_j(x: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let top = n.max(ax as usize) + 20 + (40.0 * (n.max(ax as usize) + 1) as f64).sqrt() as usize;
    let start = top + top % 2;
    let mut scratch = vec![0.0; start + 2];
    scratch[start] = 1e-300;
    for k in (1..=start).rev() {
        scratch[k - 1] = 2.0 * k as f64 / ax * scratch[k] - scratch[k + 1];
        if scratch[k - 1].abs() > 1e250 {
            scratch.iter_mut().for_each(|s| *s *= 1e-250);
        }
    }
    let norm = scratch[0] + 2.0 * scratch.iter().skip(2).step_by(2).sum::<f64>();
    for (k, o) in out.iter_mut().enumerate() {
        let sign = if x < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        *o = sign * scratch[k] / norm;
    }
    out
}

/// One-shot `exp(-i duration H) v`.
pub fn propagate_segment<T: Real>(
    op: &SparseOperator<T>,
    duration: T,
    v: &StateVector<T>,
    config: &PropagatorConfig,
) -> Result<StateVector<T>> {
    let mut out = v.clone();
    Propagator::new(op, config.clone()).propagate(duration, &mut out)?;
    Ok(out)
}

/// Unit-amplitude propagators for both generators on one fragment.
#[derive(Clone, Debug)]
pub struct DriveEngine<T: Real> {
    pair_hop: Propagator<T>,
    staggered: Propagator<T>,
    dense_max_dim: usize,
}

impl<T: Real> DriveEngine<T> {
    pub fn new(basis: &FragmentBasis, config: PropagatorConfig) -> Self {
        let dense_max_dim = config.dense_max_dim;
        let pair_hop = Propagator::new(&build_h_ph(basis, T::one()), config.clone());
        let staggered = Propagator::new(&build_h_stag(basis, T::one()), config);
        Self { pair_hop, staggered, dense_max_dim }
    }

    /// Use the Chebyshev expansion for the pair-hopping generator.
    pub fn new_chebyshev(basis: &FragmentBasis, config: PropagatorConfig) -> Self {
        let dense_max_dim = config.dense_max_dim;
        let pair_hop = Propagator::chebyshev(&build_h_ph(basis, T::one()), config.clone());
        let staggered = Propagator::new(&build_h_stag(basis, T::one()), config);
        Self { pair_hop, staggered, dense_max_dim }
    }

    pub fn dim(&self) -> usize {
        self.pair_hop.dim()
    }

    pub fn pair_hop(&self) -> &Propagator<T> {
        &self.pair_hop
    }

    pub fn apply_in_place(&self, schedule: &DriveSchedule<T>, v: &mut StateVector<T>) -> Result<()> {
        for seg in &schedule.segments {
            let prop = match seg.generator {
                Generator::PairHop => &self.pair_hop,
                Generator::Staggered => &self.staggered,
            };
            prop.propagate(seg.effective_time(), v)?;
        }
        Ok(())
    }

    pub fn apply(&self, schedule: &DriveSchedule<T>, v: &StateVector<T>) -> Result<StateVector<T>> {
        let mut out = v.clone();
        self.apply_in_place(schedule, &mut out)?;
        Ok(out)
    }

    /// Dense one-cycle unitary; column `k` is the image of basis state `k`.
    pub fn floquet_unitary(&self, schedule: &DriveSchedule<T>) -> Result<DMatrix<Complex<T>>> {
        let dim = self.dim();
        if dim > self.dense_max_dim {
            return Err(Error::TooLargeForDense { dim, limit: self.dense_max_dim });
        }
        let mut u = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            let col = self.apply(schedule, &StateVector::basis_state(dim, k))?;
            u.column_mut(k).iter_mut().zip(col.0).for_each(|(m, z)| *m = z);
        }
        Ok(u)
    }
}

pub fn apply_drive<T: Real>(
    schedule: &DriveSchedule<T>,
    basis: &FragmentBasis,
    v: &StateVector<T>,
) -> Result<StateVector<T>> {
    DriveEngine::new(basis, PropagatorConfig::default()).apply(schedule, v)
}

pub fn floquet_unitary<T: Real>(schedule: &DriveSchedule<T>, basis: &FragmentBasis) -> Result<DMatrix<Complex<T>>> {
    DriveEngine::new(basis, PropagatorConfig::default()).floquet_unitary(schedule)
}

/// `max |U^dagger U - I|` entrywise.
pub fn unitarity_residual<T: Real>(u: &DMatrix<Complex<T>>) -> T {
    let p = u.adjoint() * u;
    let mut worst = T::zero();
    for r in 0..p.nrows() {
        for c in 0..p.ncols() {
            let target = if r == c { T::one() } else { T::zero() };
            worst = worst.max((p[(r, c)] - Complex::new(target, T::zero())).modulus());
        }
    }
    worst
}
