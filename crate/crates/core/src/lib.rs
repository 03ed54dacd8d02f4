//! Quantum signal processing inside a Hilbert-space-fragmented
//! pair-hopping chain.
//!
//! The numerical modules are generic over the real scalar ([`Real`]: `f32`
//! or `f64`); the aliases below fix the common double-precision choices.
//!
//! * [`fock`]: bit-packed configurations, pseudospin encoding, pair hops.
//! * [`fragment`]: Krylov fragments and domain-wall regions.
//! * [`hamiltonian`]: restricted pair-hopping and staggered operators.
//! * [`evolve`]: piecewise-constant drive propagation.
//! * [`qsp`]: single-qubit QSP sequences and their polynomials.
//! * [`bdg`]: analytic free-fermion sectors of the spin-only fragments.
//! * [`observables`]: pseudospin expectations and ensemble averages.

pub mod bdg;
pub mod error;
pub mod evolve;
pub mod fock;
pub mod fragment;
pub mod hamiltonian;
pub mod observables;
pub mod qsp;
pub mod scalar;

pub use error::{Error, Result};
pub use evolve::{DriveEngine, DriveSchedule, Generator, PropagatorConfig, Segment};
pub use fock::{ConservedCharges, FockState, HopDirection, Pseudospin, PseudospinString};
pub use fragment::{FragmentBasis, Region, RegionClass, RegionPartition};
pub use scalar::Real;

pub type Unitary2F64 = qsp::Unitary2<f64>;
pub type PhaseSequenceF64 = qsp::PhaseSequence<f64>;
pub type PQPolynomialsF64 = qsp::PQPolynomials<f64>;
pub type SparseOperatorF64 = hamiltonian::SparseOperator<f64>;
pub type StateVectorF64 = hamiltonian::StateVector<f64>;
pub type DriveScheduleF64 = evolve::DriveSchedule<f64>;
pub type DriveEngineF64 = evolve::DriveEngine<f64>;
pub type BdGSectorF64 = bdg::BdGSector<f64>;
pub type CorrelationMatrixF64 = bdg::CorrelationMatrix<f64>;
pub type StroboscopicRecordF64 = observables::StroboscopicRecord<f64>;

pub type Unitary2F32 = qsp::Unitary2<f32>;
pub type PhaseSequenceF32 = qsp::PhaseSequence<f32>;
pub type StateVectorF32 = hamiltonian::StateVector<f32>;
