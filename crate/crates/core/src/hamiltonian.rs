//! Restricted Hamiltonians on a fragment and the state vectors they act on.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::fragment::FragmentBasis;
use crate::scalar::{lit, Real};

/// Real symmetric matrix in row-compressed form.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator<T: Real> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<T>,
    symmetric: bool,
}

impl<T: Real> SparseOperator<T> {
    /// Assemble from per-row `(column, value)` lists. Columns are sorted and
    /// duplicate entries summed.
    pub fn from_rows(rows: Vec<Vec<(usize, T)>>) -> Result<Self> {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                if c >= dim {
                    return Err(Error::DimensionMismatch { expected: dim, actual: c + 1 });
                }
                if cols.len() > *row_ptr.last().unwrap() && *cols.last().unwrap() == c {
                    let last = values.last_mut().unwrap();
                    *last += v;
                } else {
                    cols.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        let mut op = Self { dim, row_ptr, cols, values, symmetric: false };
        op.symmetric = op.check_symmetric();
        Ok(op)
    }

    pub fn diagonal_from(entries: Vec<T>) -> Self {
        Self::from_rows(entries.into_iter().enumerate().map(|(k, v)| vec![(k, v)]).collect())
            .expect("diagonal entries are in range")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.row(r).find(|&(col, _)| col == c).map(|(_, v)| v).unwrap_or_else(T::zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|r| self.row(r).all(|(c, v)| c == r || v == T::zero()))
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim).map(|r| self.get(r, r)).collect()
    }

    fn check_symmetric(&self) -> bool {
        (0..self.dim).all(|r| self.row(r).all(|(c, v)| self.get(c, r) == v))
    }

    pub fn scaled(&self, factor: T) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        out
    }

    /// Gershgorin enclosure `[lo, hi]` of the spectrum.
    pub fn gershgorin_bounds(&self) -> (T, T) {
        if self.dim == 0 {
            return (T::zero(), T::zero());
        }
        let mut lo = T::max_value().unwrap();
        let mut hi = T::min_value().unwrap();
        for r in 0..self.dim {
            let mut centre = T::zero();
            let mut radius = T::zero();
            for (c, v) in self.row(r) {
                if c == r {
                    centre += v;
                } else {
                    radius += v.abs();
                }
            }
            lo = lo.min(centre - radius);
            hi = hi.max(centre + radius);
        }
        (lo, hi)
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] += v;
            }
        }
        m
    }

    /// `y = H v`, accumulating each row in stored column order.
    pub fn matvec(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.dim];
        self.matvec_into(v, &mut out)?;
        Ok(out)
    }

    pub fn matvec_into(&self, v: &[Complex<T>], out: &mut [Complex<T>]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: v.len() });
        }
        if out.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: out.len() });
        }
        for (r, y) in out.iter_mut().enumerate() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (c, h) in self.row(r) {
                acc += v[c] * h;
            }
            *y = acc;
        }
        Ok(())
    }
}

/// Pair-hopping Hamiltonian restricted to `basis`, amplitude `j`.
pub fn build_h_ph<T: Real>(basis: &FragmentBasis, j: T) -> SparseOperator<T> {
    let rows = basis
        .states()
        .iter()
        .map(|s| {
            s.neighbours()
                .map(|(target, sign)| {
                    let c = basis.index_of(target).expect("fragment basis is closed under pair hopping");
                    (c, j * lit::<T>(sign as f64))
                })
                .collect()
        })
        .collect();
    SparseOperator::from_rows(rows).expect("indices come from the basis")
}

/// Staggered four-fold potential `(h/2) sum_m (-1)^m sigma^z_m`.
pub fn build_h_stag<T: Real>(basis: &FragmentBasis, h: T) -> SparseOperator<T> {
    let half = h * lit(0.5);
    let n = basis.pseudospin_len();
    let diag = basis
        .states()
        .iter()
        .map(|s| {
            let sum: i64 = (1..=n)
                .map(|m| {
                    let z = s.pseudospin_z_unchecked(m) as i64;
                    if m % 2 == 0 {
                        z
                    } else {
                        -z
                    }
                })
                .sum();
            half * lit::<T>(sum as f64)
        })
        .collect();
    SparseOperator::diagonal_from(diag)
}

/// Complex amplitudes aligned with a fragment basis ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real>(pub Vec<Complex<T>>);

impl<T: Real> StateVector<T> {
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut v = vec![Complex::new(T::zero(), T::zero()); dim];
        v[k] = Complex::new(T::one(), T::zero());
        Self(v)
    }

    /// Unit vector on the basis element `state`, if it belongs to `basis`.
    pub fn product_state(basis: &FragmentBasis, state: crate::fock::FockState) -> Option<Self> {
        basis.index_of(state).map(|k| Self::basis_state(basis.dim(), k))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.0
    }

    pub fn norm(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    /// `<self | other>`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.0.iter().zip(&other.0).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn probabilities(&self) -> impl Iterator<Item = T> + '_ {
        self.0.iter().map(|z| z.norm_sqr())
    }

    pub(crate) fn scale(&mut self, factor: T) {
        self.0.iter_mut().for_each(|z| *z *= factor);
    }
}
