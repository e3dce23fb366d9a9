//! Semiclassical Monte Carlo simulation and analysis of directed atomic
//! transport in probe-driven dissipative optical lattices.
//!
//! Internal unit system: ħ = 1, lattice-beam wavenumber k_L = 1, recoil
//! frequency ω_r = 1 (so the atomic mass is 1/2). Momenta are in units of
//! ħk_L, energies in ħω_r, times in 1/ω_r.
//!
//! All numerics are generic over the scalar type via [`numeric::Real`];
//! the aliases below pin the default `f64` instantiations.

pub mod dynamics;
pub mod fields;
pub mod lattice;
pub mod numeric;
pub mod observables;
pub mod specfit;

pub use numeric::{Real, SimScalar};

/// Default-precision lattice derivation.
pub type LatticeConfig = lattice::LatticeConfig<f64>;
pub type DerivedLattice = lattice::DerivedLattice<f64>;
pub type AtomicSpecies = lattice::AtomicSpecies<f64>;

/// Default-precision probe drive and field evaluation.
pub type ProbeDrive = fields::ProbeDrive<f64>;
pub type FieldSample = fields::FieldSample<f64>;

/// Default-precision simulation.
pub type SimConfig = dynamics::SimConfig<f64>;
pub type AtomState = dynamics::AtomState<f64>;
pub type EnsembleStats = dynamics::EnsembleStats<f64>;

/// Default-precision observables.
pub type ModeSpectrum = observables::ModeSpectrum<f64>;
pub type SweepResult = observables::SweepResult<f64>;
pub type PeakEstimate = observables::PeakEstimate<f64>;

/// Default-precision spectrum fitting.
pub type SpectrumData = specfit::SpectrumData<f64>;
pub type FitModel = specfit::FitModel<f64>;
pub type FitResult = specfit::FitResult<f64>;
pub type FitOptions = specfit::FitOptions<f64>;
