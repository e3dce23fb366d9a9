//! JSON run configuration for the command-line tool.
//!
//! Parsing is permissive (serde), validation is explicit: every invariant
//! failure reports a JSON pointer to the offending field so configs can be
//! fixed without reading source code.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use dol::lattice::{self, AtomicSpecies, DerivedLattice, Geometry, LatticeConfig};
use dol::fields::{DriveMode, ProbeDrive};
use dol::observables::DeltaPolicy;
use dol::SimConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error at {pointer}: {detail}")]
    ConfigParse { pointer: String, detail: String },
    #[error("config io: {0}")]
    Io(#[from] std::io::Error),
    #[error("config json: {0}")]
    Json(#[from] serde_json::Error),
}

fn missing(pointer: &str) -> ConfigError {
    ConfigError::ConfigParse {
        pointer: pointer.to_string(),
        detail: "required field is missing".to_string(),
    }
}

fn invalid(pointer: &str, detail: impl Into<String>) -> ConfigError {
    ConfigError::ConfigParse {
        pointer: pointer.to_string(),
        detail: detail.into(),
    }
}

/// A frequency that is either a bare number (ω_r units) or explicitly
/// tagged as kHz (ordinary frequency, converted via the species ω_r).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Frequency {
    Bare(f64),
    Tagged(TaggedFrequency),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaggedFrequency {
    Khz(f64),
    Omegar(f64),
}

impl Frequency {
    /// Value in ω_r units. kHz values are ordinary frequencies ν, so the
    /// angular value is 2πν/ω_r.
    pub fn in_omega_r(self, species: &AtomicSpecies<f64>) -> f64 {
        match self {
            Frequency::Bare(v) | Frequency::Tagged(TaggedFrequency::Omegar(v)) => v,
            Frequency::Tagged(TaggedFrequency::Khz(v)) => {
                2.0 * std::f64::consts::PI * v * 1e3 / species.recoil_frequency_omega_r
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpeciesBlock {
    Named(String),
    Explicit(AtomicSpecies<f64>),
}

impl Default for SpeciesBlock {
    fn default() -> Self {
        SpeciesBlock::Named("rb85".to_string())
    }
}

impl SpeciesBlock {
    pub fn resolve(&self) -> Result<AtomicSpecies<f64>, ConfigError> {
        match self {
            SpeciesBlock::Named(n) if n == "rb85" => Ok(AtomicSpecies::rb85()),
            SpeciesBlock::Named(n) => Err(invalid(
                "/species",
                format!("unknown species {n:?}; use \"rb85\" or explicit constants"),
            )),
            SpeciesBlock::Explicit(s) => Ok(*s),
        }
    }
}

/// Beam parameters as quoted in the lab: intensity per beam in mW/cm² and
/// detuning in units of the natural linewidth Γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamBlock {
    pub intensity_per_beam: f64,
    pub detuning_over_gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetBlock {
    /// Well depth U₀ in ħω_r.
    pub u0: f64,
    /// Scattering rate Γ_S in ω_r.
    pub gamma_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beam: Option<BeamBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<TargetBlock>,
    /// Beam half-angles in degrees (lab convention).
    pub theta_x_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_y_deg: Option<f64>,
    #[serde(default = "default_geometry")]
    pub geometry: Geometry,
}

fn default_geometry() -> Geometry {
    Geometry::ThreeDTetrahedral
}

impl LatticeBlock {
    pub fn derive(&self, species: &AtomicSpecies<f64>) -> Result<DerivedLattice<f64>, ConfigError> {
        let theta_x = self.theta_x_deg.to_radians();
        let theta_y = self.theta_y_deg.unwrap_or(self.theta_x_deg).to_radians();
        let lat = match (&self.beam, &self.targets) {
            (Some(beam), None) => lattice::derive_lattice(
                species,
                &LatticeConfig {
                    intensity_per_beam: beam.intensity_per_beam,
                    detuning: beam.detuning_over_gamma * species.natural_linewidth_gamma,
                    theta_x,
                    theta_y,
                    geometry: self.geometry,
                },
            ),
            (None, Some(t)) => lattice::derive_from_targets(
                species,
                t.u0,
                t.gamma_s,
                theta_x,
                theta_y,
                self.geometry,
            ),
            (Some(_), Some(_)) => {
                return Err(invalid(
                    "/lattice",
                    "exactly one of \"beam\" or \"targets\" must be present, found both",
                ))
            }
            (None, None) => {
                return Err(invalid(
                    "/lattice",
                    "exactly one of \"beam\" or \"targets\" must be present, found neither",
                ))
            }
        };
        lat.map_err(|e| invalid("/lattice", e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveBlock {
    pub eps_p: f64,
    pub delta: Frequency,
    pub mode: DriveMode,
}

impl DriveBlock {
    pub fn to_drive(&self, species: &AtomicSpecies<f64>) -> ProbeDrive<f64> {
        ProbeDrive {
            eps_p: self.eps_p,
            delta: self.delta.in_omega_r(species),
            mode: self.mode,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimBlock {
    pub n_traj: usize,
    /// Integrator step, units 1/ω_r; clamped to the stability bound per run.
    pub dt: f64,
    pub burn_in: f64,
    pub measure_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_temperature: Option<f64>,
    #[serde(default = "default_kicks")]
    pub recoil_kicks_per_jump: u32,
    #[serde(default)]
    pub elastic_scatter_fraction: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_stride")]
    pub sample_stride: usize,
}

fn default_kicks() -> u32 {
    2
}
fn default_stride() -> usize {
    64
}

impl SimBlock {
    pub fn to_sim_config(
        &self,
        lat: &DerivedLattice<f64>,
        drive: &dol::fields::ProbeDrive<f64>,
        seed_override: Option<u64>,
    ) -> Result<SimConfig, ConfigError> {
        let seed = seed_override
            .or(self.seed)
            .ok_or_else(|| missing("/sim/seed"))?;
        let mut cfg = SimConfig {
            n_traj: self.n_traj,
            dt: self.dt,
            burn_in: self.burn_in,
            measure_time: self.measure_time,
            init_temperature: self.init_temperature.unwrap_or(lat.u0 / 10.0),
            recoil_kicks_per_jump: self.recoil_kicks_per_jump,
            elastic_scatter_fraction: self.elastic_scatter_fraction,
            seed,
            sample_stride: self.sample_stride,
        };
        cfg.dt = cfg.dt.min(dol::dynamics::max_stable_dt(lat, drive));
        Ok(cfg)
    }
}

/// Sweep axis: either an explicit grid or a uniform linspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Explicit(Vec<f64>),
    Linear { start: f64, stop: f64, points: usize },
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>, ConfigError> {
        match self {
            GridSpec::Explicit(v) => Ok(v.clone()),
            GridSpec::Linear {
                start,
                stop,
                points,
            } => {
                if *points < 2 || stop <= start {
                    return Err(invalid(
                        "/sweep/grid",
                        "linear grid needs points >= 2 and stop > start",
                    ));
                }
                Ok((0..*points)
                    .map(|i| start + (stop - start) * i as f64 / (*points - 1) as f64)
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepBlock {
    pub grid: GridSpec,
    /// δ choice per noise-sweep point (ignored by sweep-delta).
    #[serde(default = "default_policy")]
    pub delta_policy: DeltaPolicy,
}

fn default_policy() -> DeltaPolicy {
    DeltaPolicy::PeakOfDeltaSweep
}

/// The full run configuration. One file drives every subcommand; blocks
/// irrelevant to a subcommand may be omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub species: SpeciesBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive: Option<DriveBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn lattice(&self) -> Result<&LatticeBlock, ConfigError> {
        self.lattice.as_ref().ok_or_else(|| missing("/lattice"))
    }
    pub fn drive(&self) -> Result<&DriveBlock, ConfigError> {
        self.drive.as_ref().ok_or_else(|| missing("/drive"))
    }
    pub fn sim(&self) -> Result<&SimBlock, ConfigError> {
        self.sim.as_ref().ok_or_else(|| missing("/sim"))
    }
    pub fn sweep(&self) -> Result<&SweepBlock, ConfigError> {
        self.sweep.as_ref().ok_or_else(|| missing("/sweep"))
    }
}

/// Written next to every artifact set; embeds the config verbatim so
/// manifest → config is the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub config: RunConfig,
    pub seed: Option<u64>,
    pub version: String,
    pub wall_time_s: f64,
}

impl Manifest {
    pub fn new(command: &str, config: RunConfig, seed: Option<u64>, wall_time_s: f64) -> Self {
        Manifest {
            command: command.to_string(),
            config,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s,
        }
    }
}
