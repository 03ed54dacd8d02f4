//! Pseudospin-z expectations, stroboscopic records, and their averages.

use nalgebra::{Complex, ComplexField, DMatrix};

use crate::error::{Error, Result};
use crate::evolve::{DriveEngine, DriveSchedule, PropagatorConfig};
use crate::fock::PseudospinString;
use crate::fragment::{build_fragment_with_capacity, FragmentBasis, DEFAULT_CAPACITY};
use crate::hamiltonian::StateVector;
use crate::scalar::{lit, Real};

fn check_site(basis: &FragmentBasis, m: usize) -> Result<()> {
    if m == 0 || m > basis.pseudospin_len() {
        return Err(Error::OutOfRange { what: "pseudospin site", index: m, max: basis.pseudospin_len() });
    }
    Ok(())
}

/// `sigma^z_m` of every basis state.
fn z_column<T: Real>(basis: &FragmentBasis, m: usize) -> Vec<T> {
    basis.states().iter().map(|s| lit(s.pseudospin_z_unchecked(m) as f64)).collect()
}

pub fn sigma_z<T: Real>(v: &StateVector<T>, basis: &FragmentBasis, m: usize) -> Result<T> {
    check_site(basis, m)?;
    if v.dim() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), actual: v.dim() });
    }
    Ok(v.probabilities()
        .zip(basis.states())
        .fold(T::zero(), |acc, (p, s)| acc + p * lit(s.pseudospin_z_unchecked(m) as f64)))
}

/// `<sigma^z_m>` for `m = 1..=N`.
pub fn sigma_z_profile<T: Real>(v: &StateVector<T>, basis: &FragmentBasis) -> Result<Vec<T>> {
    if v.dim() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), actual: v.dim() });
    }
    let n = basis.pseudospin_len();
    let mut out = vec![T::zero(); n];
    for (p, s) in v.probabilities().zip(basis.states()) {
        for (m, o) in out.iter_mut().enumerate() {
            *o += p * lit(s.pseudospin_z_unchecked(m + 1) as f64);
        }
    }
    Ok(out)
}

/// `(1/D) sum_k sigma^z_m(state_k)`: the fragment's infinite-temperature value.
pub fn krylov_infinite_temperature<T: Real>(basis: &FragmentBasis, m: usize) -> Result<T> {
    check_site(basis, m)?;
    let sum: i64 = basis.states().iter().map(|s| s.pseudospin_z_unchecked(m) as i64).sum();
    Ok(lit::<T>(sum as f64) / lit(basis.dim() as f64))
}

pub fn krylov_profile<T: Real>(basis: &FragmentBasis) -> Vec<T> {
    (1..=basis.pseudospin_len()).map(|m| krylov_infinite_temperature(basis, m).expect("site in range")).collect()
}

/// `<sigma^z_m(l)>` for `l = 0..=cycles`, `m = 1..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct StroboscopicRecord<T: Real> {
    pub n_sites: usize,
    /// `values[l][m - 1]`.
    pub values: Vec<Vec<T>>,
}

impl<T: Real> StroboscopicRecord<T> {
    pub fn cycles(&self) -> usize {
        self.values.len() - 1
    }

    pub fn at(&self, l: usize, m: usize) -> T {
        self.values[l][m - 1]
    }

    pub fn initial(&self) -> &[T] {
        &self.values[0]
    }

    pub fn last(&self) -> &[T] {
        self.values.last().expect("record holds the initial row")
    }

    /// `(l, m, value)` rows in cycle-major order.
    pub fn rows(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.values.iter().enumerate().flat_map(|(l, row)| row.iter().enumerate().map(move |(m, &v)| (l, m + 1, v)))
    }
}

/// Fragment, propagators, and initial vector for a product-state seed.
pub struct SeededRun<T: Real> {
    pub basis: FragmentBasis,
    pub engine: DriveEngine<T>,
    pub initial: StateVector<T>,
}

impl<T: Real> SeededRun<T> {
    pub fn new(seed: &PseudospinString, capacity: usize, config: PropagatorConfig) -> Result<Self> {
        let state = seed.encode();
        let basis = build_fragment_with_capacity(state, capacity)?;
        let engine = DriveEngine::new(&basis, config);
        let initial = StateVector::product_state(&basis, state).expect("seed belongs to its own fragment");
        Ok(Self { basis, engine, initial })
    }

    pub fn stroboscopic(&self, schedule: &DriveSchedule<T>, cycles: usize) -> Result<StroboscopicRecord<T>> {
        record_cycles(&self.engine, &self.basis, &self.initial, schedule, cycles)
    }
}

/// Apply `schedule` `cycles` times, recording the profile after each cycle.
pub fn record_cycles<T: Real>(
    engine: &DriveEngine<T>,
    basis: &FragmentBasis,
    initial: &StateVector<T>,
    schedule: &DriveSchedule<T>,
    cycles: usize,
) -> Result<StroboscopicRecord<T>> {
    let mut v = initial.clone();
    let mut values = Vec::with_capacity(cycles + 1);
    values.push(sigma_z_profile(&v, basis)?);
    for _ in 0..cycles {
        engine.apply_in_place(schedule, &mut v)?;
        values.push(sigma_z_profile(&v, basis)?);
    }
    Ok(StroboscopicRecord { n_sites: basis.pseudospin_len(), values })
}

pub fn stroboscopic_run<T: Real>(
    seed: &PseudospinString,
    schedule: &DriveSchedule<T>,
    cycles: usize,
) -> Result<StroboscopicRecord<T>> {
    SeededRun::new(seed, DEFAULT_CAPACITY, PropagatorConfig::default())?.stroboscopic(schedule, cycles)
}

/// Mean over cycles `burn_in < l <= cycles`; a zero-cycle record returns its
/// initial row.
pub fn time_average<T: Real>(record: &StroboscopicRecord<T>, burn_in: usize) -> Result<Vec<T>> {
    let cycles = record.cycles();
    if cycles == 0 {
        return Ok(record.initial().to_vec());
    }
    if burn_in >= cycles {
        return Err(Error::OutOfRange { what: "burn-in", index: burn_in, max: cycles - 1 });
    }
    let count = lit::<T>((cycles - burn_in) as f64);
    let mut out = vec![T::zero(); record.n_sites];
    for row in &record.values[burn_in + 1..] {
        out.iter_mut().zip(row).for_each(|(o, &v)| *o += v);
    }
    out.iter_mut().for_each(|o| *o /= count);
    Ok(out)
}

/// Eigendecomposition of a dense unitary with eigenphases grouped into
/// degenerate clusters.
pub struct FloquetSpectrum<T: Real> {
    vectors: DMatrix<Complex<T>>,
    /// Index ranges into the columns of `vectors` (sorted by eigenphase).
    clusters: Vec<Vec<usize>>,
    pub eigenphases: Vec<T>,
}

pub const CLUSTER_TOL: f64 = 1e-10;

impl<T: Real> FloquetSpectrum<T> {
    pub fn new(u: &DMatrix<Complex<T>>) -> Result<Self> {
        let dim = u.nrows();
        if u.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: u.ncols() });
        }
        let adj = u.adjoint();
        let hermitian_part = (u + &adj) * Complex::new(lit::<T>(0.5), T::zero());
        let skew_part = (u - &adj) * Complex::new(T::zero(), lit::<T>(-0.5));
        // Eigenvectors of a generic real combination of the two commuting
        // Hermitian parts diagonalize U.
        let residual_tol = T::tolerance(1e-8);
        for mix in [0.577_215_664_901_532_9, 1.324_717_957_244_746, -0.414_682_509_851_111_6] {
            let k = &hermitian_part + &skew_part * Complex::new(lit::<T>(mix), T::zero());
            let eig = k.symmetric_eigen();
            let vectors = eig.eigenvectors;
            let uv = u * &vectors;
            let mut phases = Vec::with_capacity(dim);
            let mut worst = T::zero();
            for n in 0..dim {
                let col = vectors.column(n);
                let ucol = uv.column(n);
                let rq = col.dotc(&ucol);
                let arg = rq.argument();
                let lambda = Complex::new(arg.cos(), arg.sin());
                let res = (ucol - col * lambda).norm();
                worst = worst.max(res);
                phases.push(rq.argument());
            }
            if worst > residual_tol {
                continue;
            }
            let mut order: Vec<usize> = (0..dim).collect();
            order.sort_by(|&a, &b| phases[a].partial_cmp(&phases[b]).expect("finite eigenphase"));
            let tol = lit::<T>(CLUSTER_TOL);
            let mut clusters: Vec<Vec<usize>> = Vec::new();
            for &k in &order {
                match clusters.last_mut() {
                    Some(c) if phases[k] - phases[*c.last().unwrap()] < tol => c.push(k),
                    _ => clusters.push(vec![k]),
                }
            }
            // eigenphases near +pi and -pi are the same point on the circle
            if clusters.len() > 1 {
                let first = phases[clusters[0][0]];
                let last = phases[*clusters.last().unwrap().last().unwrap()];
                if first + T::two_pi() - last < tol {
                    let tail = clusters.pop().unwrap();
                    clusters[0].extend(tail);
                }
            }
            let eigenphases = order.iter().map(|&k| phases[k]).collect();
            return Ok(Self { vectors, clusters, eigenphases });
        }
        Err(Error::Eigensolver("eigenvectors of the Hermitian mix do not diagonalize U".into()))
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    /// Long-time average of `<v(l)| O |v(l)>` for diagonal `O`:
    /// `sum_c <v0| P_c O P_c |v0>`, with `P_c` the cluster projectors.
    pub fn diagonal_average(&self, v0: &StateVector<T>, observable: &[T]) -> Result<T> {
        let dim = self.vectors.nrows();
        if v0.dim() != dim || observable.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: v0.dim().min(observable.len()) });
        }
        let zero = Complex::new(T::zero(), T::zero());
        let mut total = T::zero();
        let mut projected = vec![zero; dim];
        for cluster in &self.clusters {
            projected.iter_mut().for_each(|p| *p = zero);
            for &n in cluster {
                let col = self.vectors.column(n);
                let w = col.iter().zip(&v0.0).fold(zero, |acc, (c, v)| acc + c.conj() * v);
                projected.iter_mut().zip(col.iter()).for_each(|(p, c)| *p += *c * w);
            }
            total += projected.iter().zip(observable).fold(T::zero(), |acc, (p, &o)| acc + p.norm_sqr() * o);
        }
        Ok(total)
    }
}

/// Diagonal-ensemble value of `sigma^z_m` for the one-cycle unitary `u`.
pub fn diagonal_ensemble<T: Real>(
    u: &DMatrix<Complex<T>>,
    v0: &StateVector<T>,
    basis: &FragmentBasis,
    m: usize,
) -> Result<T> {
    check_site(basis, m)?;
    FloquetSpectrum::new(u)?.diagonal_average(v0, &z_column(basis, m))
}

/// Diagonal-ensemble values for every site, sharing one eigendecomposition.
pub fn diagonal_ensemble_profile<T: Real>(
    u: &DMatrix<Complex<T>>,
    v0: &StateVector<T>,
    basis: &FragmentBasis,
) -> Result<Vec<T>> {
    let spectrum = FloquetSpectrum::new(u)?;
    (1..=basis.pseudospin_len()).map(|m| spectrum.diagonal_average(v0, &z_column(basis, m))).collect()
}
