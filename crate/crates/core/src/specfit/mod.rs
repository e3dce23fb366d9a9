//! Probe transmission spectrum model and fitting.
//!
//! The model is a sum of four Gaussians (two vibrational sidebands, two
//! Brillouin propagating-mode resonances), a linear background, and a
//! Rayleigh Lorentzian + dispersive pair near zero detuning.

pub mod fit;
pub mod io;
pub mod model;

pub use fit::{
    fit_spectrum, init_from_physics, CenterSeeds, FitOptions, FitResult, FreqUnit, SpecFitError,
    SpectrumData,
};
pub use io::{load_spectrum_csv, SpectrumIoError};
pub use model::FitModel;
