//! Beam parameters to derived lattice quantities and back.
//!
//! Inputs are quoted in laboratory units (intensities in mW/cm², angular
//! frequencies in rad/s). All derived quantities live in the internal recoil
//! unit system: ħ = 1, k_L = 1, ω_r = 1, which fixes the atom mass to
//! m = 1/2, the momentum unit to ħk_L, the energy unit to ħω_r and the time
//! unit to 1/ω_r.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::Real;

/// Physical constants of the atom and the driven transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomicSpecies<R> {
    /// Natural linewidth Γ (rad/s).
    pub natural_linewidth_gamma: R,
    /// Recoil frequency ω_r (rad/s).
    pub recoil_frequency_omega_r: R,
    /// Saturation intensity I_sat (mW/cm²).
    pub saturation_intensity_isat: R,
    /// Laser wavenumber k_L (1/m).
    pub wavenumber_kl: R,
}

impl<R: Real> AtomicSpecies<R> {
    /// ⁸⁵Rb on the D2 F_g = 3 → F_e = 4 line: Γ/2π = 6.07 MHz,
    /// ω_r/2π = 3.86 kHz, I_sat = 1.64 mW/cm² (σ-light), λ = 780 nm.
    pub fn rb85() -> Self {
        let two_pi = R::of(2.0) * R::PI();
        AtomicSpecies {
            natural_linewidth_gamma: two_pi * R::of(6.07e6),
            recoil_frequency_omega_r: two_pi * R::of(3.86e3),
            saturation_intensity_isat: R::of(1.64),
            wavenumber_kl: two_pi / R::of(780.24e-9),
        }
    }

    fn validate(&self) -> Result<(), LatticeError> {
        let pos = self.natural_linewidth_gamma > R::zero()
            && self.recoil_frequency_omega_r > R::zero()
            && self.saturation_intensity_isat > R::zero()
            && self.wavenumber_kl > R::zero();
        if pos {
            Ok(())
        } else {
            Err(LatticeError::InvalidSpecies)
        }
    }
}

/// Lattice beam geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    /// Counterpropagating lin⊥lin pair along z (used by the snapshot view).
    OneDLinPerpLin,
    /// Four-beam tetrahedral lin⊥lin lattice (the experimental setup).
    ThreeDTetrahedral,
}

/// Experimenter-chosen beam parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig<R> {
    /// Intensity per lattice beam (mW/cm²).
    pub intensity_per_beam: R,
    /// Laser detuning Δ (rad/s); must be negative (red detuned).
    pub detuning: R,
    /// Beam half-angle in the x-z plane (rad), in (0, π/2).
    pub theta_x: R,
    /// Beam half-angle in the y-z plane (rad), in (0, π/2).
    pub theta_y: R,
    pub geometry: Geometry,
}

/// Every derived lattice quantity, in recoil units (energies in ħω_r,
/// frequencies in ω_r, wavenumbers in k_L).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedLattice<R> {
    /// Saturation parameter s₀ = (I/I_sat)/(1 + 4Δ²/Γ²).
    pub s0: R,
    /// Light shift per beam Δ₀′ = Δ·s₀/2 (< 0), in ω_r.
    pub light_shift_delta0p: R,
    /// Light shift at circular-polarization sites, Δ′ = 8Δ₀′.
    pub light_shift_deltap: R,
    /// Photon scattering rate per beam Γ_S = (Γ/2)·s₀, in ω_r.
    pub gamma_s: R,
    /// Well depth U₀ (> 0), in ħω_r; geometry dependent.
    pub u0: R,
    /// Vibrational frequencies of the 3D lattice, in ω_r.
    pub omega_x: R,
    pub omega_y: R,
    pub omega_z: R,
    /// Vibrational frequency of the 1D lin⊥lin lattice, in ω_r.
    pub omega_v_1d: R,
    /// Spatially averaged pumping rate γ₀ = 2Γ_S/3.
    pub gamma0: R,
    /// Stochastic-resonance prediction (6/π)·sinθ_x·√(|Δ₀′|·ω_r).
    pub gamma_s_sr: R,
    /// Lattice wavenumbers, in k_L.
    pub k_x: R,
    pub k_y: R,
    pub k_z: R,
    pub geometry: Geometry,
    /// Set when s₀ > 0.1, outside the weak-excitation limit.
    pub weak_excitation_violated: bool,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("detuning must be negative (red detuned), got {0}")]
    NonRedDetuned(String),
    #[error("beam intensity must be strictly positive, got {0}")]
    NonPositiveIntensity(String),
    #[error("beam angles must lie in (0, pi/2)")]
    InvalidAngle,
    #[error("species constants must be strictly positive")]
    InvalidSpecies,
    #[error("target well depth and scattering rate must be strictly positive")]
    NonPositiveTarget,
}

fn check_config<R: Real>(cfg: &LatticeConfig<R>) -> Result<(), LatticeError> {
    if cfg.intensity_per_beam <= R::zero() {
        return Err(LatticeError::NonPositiveIntensity(format!(
            "{}",
            cfg.intensity_per_beam
        )));
    }
    if cfg.detuning >= R::zero() {
        return Err(LatticeError::NonRedDetuned(format!("{}", cfg.detuning)));
    }
    let half_pi = R::PI() / R::of(2.0);
    for theta in [cfg.theta_x, cfg.theta_y] {
        if theta <= R::zero() || theta >= half_pi {
            return Err(LatticeError::InvalidAngle);
        }
    }
    Ok(())
}

/// Converts beam parameters into the full set of derived lattice quantities.
pub fn derive_lattice<R: Real>(
    species: &AtomicSpecies<R>,
    cfg: &LatticeConfig<R>,
) -> Result<DerivedLattice<R>, LatticeError> {
    species.validate()?;
    check_config(cfg)?;

    let gamma = species.natural_linewidth_gamma;
    let omega_r = species.recoil_frequency_omega_r;
    let delta_over_gamma = cfg.detuning / gamma;
    let s0 = (cfg.intensity_per_beam / species.saturation_intensity_isat)
        / (R::one() + R::of(4.0) * delta_over_gamma * delta_over_gamma);

    // Recoil units from here on.
    let delta_rec = cfg.detuning / omega_r;
    let gamma_rec = gamma / omega_r;
    let delta0p = delta_rec * s0 / R::of(2.0);
    let gamma_s = gamma_rec * s0 / R::of(2.0);
    let abs_d0p = delta0p.abs();

    let u0 = match cfg.geometry {
        Geometry::OneDLinPerpLin => R::of(4.0 / 3.0) * abs_d0p,
        Geometry::ThreeDTetrahedral => R::of(16.0 / 3.0) * abs_d0p,
    };

    let (sx, cx) = (cfg.theta_x.sin(), cfg.theta_x.cos());
    let (sy, cy) = (cfg.theta_y.sin(), cfg.theta_y.cos());
    let omega_x = R::of(4.0) * sx * abs_d0p.sqrt();
    let omega_y = R::of(4.0) * sy * abs_d0p.sqrt();
    let omega_z = (cx + cy) * (R::of(8.0) * abs_d0p).sqrt();
    let omega_v_1d = R::of(2.0) * (R::of(4.0 / 3.0) * abs_d0p).sqrt();

    Ok(DerivedLattice {
        s0,
        light_shift_delta0p: delta0p,
        light_shift_deltap: R::of(8.0) * delta0p,
        gamma_s,
        u0,
        omega_x,
        omega_y,
        omega_z,
        omega_v_1d,
        gamma0: R::of(2.0 / 3.0) * gamma_s,
        gamma_s_sr: R::of(6.0) / R::PI() * sx * abs_d0p.sqrt(),
        k_x: sx,
        k_y: sy,
        k_z: cx + cy,
        geometry: cfg.geometry,
        weak_excitation_violated: s0 > R::of(0.1),
    })
}

/// Inverts (U₀, Γ_S) targets back to beam parameters (I, Δ).
///
/// Targets are in recoil units. The returned pair round-trips through
/// [`derive_lattice`] exactly (the relations are algebraically invertible).
/// When the implied s₀ exceeds 0.1 the result carries a warning flag rather
/// than failing.
pub fn invert_to_beam_params<R: Real>(
    species: &AtomicSpecies<R>,
    target_u0: R,
    target_gamma_s: R,
    geometry: Geometry,
) -> Result<(R, R, bool), LatticeError> {
    species.validate()?;
    if target_u0 <= R::zero() || target_gamma_s <= R::zero() {
        return Err(LatticeError::NonPositiveTarget);
    }
    let gamma_rec = species.natural_linewidth_gamma / species.recoil_frequency_omega_r;
    // Γ_S = (Γ/2)·s0 and U0 = c·|Δ|·s0/2 with c = 4/3 or 16/3.
    let s0 = R::of(2.0) * target_gamma_s / gamma_rec;
    let c = match geometry {
        Geometry::OneDLinPerpLin => R::of(4.0 / 3.0),
        Geometry::ThreeDTetrahedral => R::of(16.0 / 3.0),
    };
    let abs_delta_rec = R::of(2.0) * target_u0 / (c * s0);
    let delta = -abs_delta_rec * species.recoil_frequency_omega_r;
    let delta_over_gamma = abs_delta_rec / gamma_rec;
    let intensity = species.saturation_intensity_isat
        * s0
        * (R::one() + R::of(4.0) * delta_over_gamma * delta_over_gamma);
    Ok((intensity, delta, s0 > R::of(0.1)))
}

/// Builds a [`DerivedLattice`] straight from (U₀, Γ_S) targets and the beam
/// angles, via the exact inversion and re-derivation.
pub fn derive_from_targets<R: Real>(
    species: &AtomicSpecies<R>,
    target_u0: R,
    target_gamma_s: R,
    theta_x: R,
    theta_y: R,
    geometry: Geometry,
) -> Result<DerivedLattice<R>, LatticeError> {
    let (intensity, delta, _) = invert_to_beam_params(species, target_u0, target_gamma_s, geometry)?;
    derive_lattice(
        species,
        &LatticeConfig {
            intensity_per_beam: intensity,
            detuning: delta,
            theta_x,
            theta_y,
            geometry,
        },
    )
}

/// Probe modulation strength I_p/4I = 4·ε_p² for ε_p = ℰ_p/4ℰ_0.
pub fn modulation_strength<R: Real>(eps_p: R) -> R {
    R::of(4.0) * eps_p * eps_p
}
