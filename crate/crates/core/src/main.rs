//! `dol`: command-line driver for the dissipative-optical-lattice toolkit.
//!
//! Every subcommand reads one JSON config (see `RunConfig`), writes
//! machine-readable artifacts into `--out`, and records a manifest
//! (config echo, seed, version, wall time) so runs are reproducible from
//! the artifact directory alone. No environment-variable configuration.

mod bin_support;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bin_support::config::{Manifest, RunConfig};
use bin_support::output::{write_csv, write_json, write_sweep_csv};
use dol::lattice::DerivedLattice;
use dol::observables::{self, NoiseSweepSetup};
use dol::specfit::{self, CenterSeeds, FitOptions, FreqUnit};
use dol::{fields, SimConfig};

#[derive(Parser)]
#[command(
    name = "dol",
    version,
    about = "Semiclassical Monte Carlo and analysis for probe-driven dissipative optical lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config's sim block.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 picks the core count.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Output directory for artifacts.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Derive all lattice quantities from the config and print them as JSON.
    Derive(CommonArgs),
    /// Tabulate the z-geometry bipotential and population shifts over one
    /// probe period (9 CSV files at phases 0, π/4, …, 2π).
    Snapshot {
        #[command(flatten)]
        common: CommonArgs,
        /// Grid points per file.
        #[arg(long, default_value_t = 256)]
        points: usize,
    },
    /// Run one ensemble and write a JSON summary.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Also write a trajectory subsample CSV (t, x).
        #[arg(long)]
        dump_samples: bool,
    },
    /// Sweep the probe detuning δ over the config's grid (ω_r units).
    SweepDelta(CommonArgs),
    /// Sweep Γ_S at fixed U₀ over the config's grid (ω_r units).
    SweepNoise(CommonArgs),
    /// Fit transmission spectra and aggregate Brillouin amplitudes.
    Fit {
        /// Input spectrum CSV files (delta, transmission).
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Unit of the detuning column.
        #[arg(long, value_enum, default_value_t = UnitArg::Khz)]
        units: UnitArg,
        /// Derived-lattice JSON (from `dol derive`) for physics-based
        /// initialization of the fit.
        #[arg(long)]
        lattice: Option<PathBuf>,
        /// ω_r/2π in kHz, used to express lattice frequencies in the data
        /// unit when it is kHz.
        #[arg(long, default_value_t = 3.86)]
        omega_r_khz: f64,
        /// Γ_S value (ω_r) per input scan, for the aggregate CSV.
        #[arg(long, value_delimiter = ',')]
        gamma_s: Vec<f64>,
        /// Give the negative-side Brillouin Gaussian its own width.
        #[arg(long)]
        separate_sigma_b2: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum UnitArg {
    Khz,
    Omegar,
}

impl From<UnitArg> for FreqUnit {
    fn from(u: UnitArg) -> Self {
        match u {
            UnitArg::Khz => FreqUnit::Khz,
            UnitArg::Omegar => FreqUnit::OmegaR,
        }
    }
}

#[derive(Serialize)]
struct StructuredError {
    error: String,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        let payload = StructuredError {
            error: e.to_string(),
        };
        eprintln!("{}", serde_json::to_string(&payload).unwrap());
        std::process::exit(1);
    }
}

type AnyError = Box<dyn std::error::Error>;

fn init_threads(threads: usize) -> Result<(), AnyError> {
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), AnyError> {
    match cli.command {
        Command::Derive(common) => derive_cmd(&common),
        Command::Snapshot { common, points } => snapshot_cmd(&common, points),
        Command::Simulate {
            common,
            dump_samples,
        } => simulate_cmd(&common, dump_samples),
        Command::SweepDelta(common) => sweep_delta_cmd(&common),
        Command::SweepNoise(common) => sweep_noise_cmd(&common),
        Command::Fit {
            inputs,
            units,
            lattice,
            omega_r_khz,
            gamma_s,
            separate_sigma_b2,
            out,
        } => fit_cmd(
            &inputs,
            units.into(),
            lattice.as_deref(),
            omega_r_khz,
            &gamma_s,
            separate_sigma_b2,
            &out,
        ),
    }
}

fn finish(
    command: &str,
    common: &CommonArgs,
    config: RunConfig,
    started: Instant,
) -> Result<(), AnyError> {
    let manifest = Manifest::new(
        command,
        config,
        common.seed,
        started.elapsed().as_secs_f64(),
    );
    write_json(&common.out, "manifest.json", &manifest)?;
    Ok(())
}

fn derive_cmd(common: &CommonArgs) -> Result<(), AnyError> {
    let started = Instant::now();
    let cfg = RunConfig::load(&common.config)?;
    let species = cfg.species.resolve()?;
    let lat = cfg.lattice()?.derive(&species)?;
    println!("{}", serde_json::to_string_pretty(&lat)?);
    write_json(&common.out, "derived.json", &lat)?;
    finish("derive", common, cfg, started)
}

fn snapshot_cmd(common: &CommonArgs, points: usize) -> Result<(), AnyError> {
    let started = Instant::now();
    let cfg = RunConfig::load(&common.config)?;
    let species = cfg.species.resolve()?;
    let lat = cfg.lattice()?.derive(&species)?;
    // Raw field-amplitude ratio ℰ_p/ℰ_0 = 4·ε_p for ε_p = ℰ_p/4ℰ_0.
    let amp_ratio = 4.0 * cfg.drive()?.eps_p;
    // One wavelength of z in internal units (k_L = 1 ⇒ λ = 2π).
    let grid: Vec<f64> = (0..points)
        .map(|i| 2.0 * std::f64::consts::PI * i as f64 / points as f64)
        .collect();
    let mut phase_files = Vec::new();
    for i in 0..=8 {
        let phase = std::f64::consts::PI / 4.0 * i as f64;
        let rows = fields::snapshot_z_geometry(lat.u0, amp_ratio, phase, &grid)?;
        let name = format!("snapshot_{i}_of_8.csv");
        write_csv(
            &common.out,
            &name,
            "z_over_lambda,U_plus,U_minus,dRho_plus,dRho_minus",
            rows.iter().map(|r| {
                format!(
                    "{},{},{},{},{}",
                    r.z_over_lambda, r.u_plus, r.u_minus, r.d_rho_plus, r.d_rho_minus
                )
            }),
        )?;
        phase_files.push(serde_json::json!({ "phase": phase, "file": name }));
    }
    write_json(
        &common.out,
        "snapshot_index.json",
        &serde_json::json!({ "u0": lat.u0, "amp_ratio": amp_ratio, "phases": phase_files }),
    )?;
    finish("snapshot", common, cfg, started)
}

fn sim_inputs(
    cfg: &RunConfig,
    seed_override: Option<u64>,
) -> Result<(dol::AtomicSpecies, DerivedLattice<f64>, SimConfig), AnyError> {
    let species = cfg.species.resolve()?;
    let lat = cfg.lattice()?.derive(&species)?;
    let drive = cfg.drive()?.to_drive(&species);
    let sim = cfg.sim()?.to_sim_config(&lat, &drive, seed_override)?;
    Ok((species, lat, sim))
}

fn simulate_cmd(common: &CommonArgs, dump_samples: bool) -> Result<(), AnyError> {
    let started = Instant::now();
    init_threads(common.threads)?;
    let cfg = RunConfig::load(&common.config)?;
    let (species, lat, sim) = sim_inputs(&cfg, common.seed)?;
    let drive = cfg.drive()?.to_drive(&species);
    let stats = dol::dynamics::simulate_ensemble(&sim, &lat, &drive)?;
    let summary = serde_json::json!({
        "mean_velocity": stats.mean_velocity,
        "stderr": stats.stderr,
        "realized_jump_rate": stats.realized_jump_rate,
        "n_traj": stats.n_traj,
        "wall_time": started.elapsed().as_secs_f64(),
    });
    write_json(&common.out, "summary.json", &summary)?;
    if dump_samples {
        write_csv(
            &common.out,
            "samples.csv",
            "t,x",
            stats.samples.iter().map(|(x, t)| format!("{t},{x}")),
        )?;
    }
    finish("simulate", common, cfg, started)
}

fn sweep_delta_cmd(common: &CommonArgs) -> Result<(), AnyError> {
    let started = Instant::now();
    init_threads(common.threads)?;
    let cfg = RunConfig::load(&common.config)?;
    let (species, lat, sim) = sim_inputs(&cfg, common.seed)?;
    let drive = cfg.drive()?.to_drive(&species);
    let grid = cfg.sweep()?.grid.values()?;
    let sweep = observables::delta_sweep(&sim, &lat, drive.eps_p, drive.mode, &grid)?;
    write_sweep_csv(&common.out, "sweep_delta.csv", &sweep)?;
    let summary = serde_json::json!({
        "peak_location": sweep.peak.location,
        "peak_uncertainty": sweep.peak.uncertainty,
        "bracketed": sweep.peak.bracketed,
        "tie_broken_low": sweep.peak.tie_broken_low,
        "omega_x": lat.omega_x,
        "gamma_s_sr_prediction": lat.gamma_s_sr,
    });
    write_json(&common.out, "sweep_delta_summary.json", &summary)?;
    finish("sweep-delta", common, cfg, started)
}

fn sweep_noise_cmd(common: &CommonArgs) -> Result<(), AnyError> {
    let started = Instant::now();
    init_threads(common.threads)?;
    let cfg = RunConfig::load(&common.config)?;
    let (species, lat, sim) = sim_inputs(&cfg, common.seed)?;
    let lattice_block = cfg.lattice()?;
    let drive_block = cfg.drive()?;
    let sweep_block = cfg.sweep()?;
    let setup = NoiseSweepSetup {
        target_u0: lat.u0,
        theta_x: lattice_block.theta_x_deg.to_radians(),
        theta_y: lattice_block
            .theta_y_deg
            .unwrap_or(lattice_block.theta_x_deg)
            .to_radians(),
        geometry: lattice_block.geometry,
        eps_p: drive_block.eps_p,
        mode: drive_block.mode,
        delta_policy: sweep_block.delta_policy,
    };
    let grid = sweep_block.grid.values()?;
    let sweep = observables::noise_sweep(&sim, &species, &setup, &grid)?;
    write_sweep_csv(&common.out, "sweep_noise.csv", &sweep)?;
    let summary = serde_json::json!({
        "peak_location": sweep.peak.location,
        "peak_uncertainty": sweep.peak.uncertainty,
        "bracketed": sweep.peak.bracketed,
        "tie_broken_low": sweep.peak.tie_broken_low,
        "gamma_s_sr_prediction": lat.gamma_s_sr,
        "omega_x": lat.omega_x,
    });
    write_json(&common.out, "sweep_noise_summary.json", &summary)?;
    finish("sweep-noise", common, cfg, started)
}

#[allow(clippy::too_many_arguments)]
fn fit_cmd(
    inputs: &[PathBuf],
    unit: FreqUnit,
    lattice: Option<&Path>,
    omega_r_khz: f64,
    gamma_s: &[f64],
    separate_sigma_b2: bool,
    out: &Path,
) -> Result<(), AnyError> {
    let started = Instant::now();
    if !gamma_s.is_empty() && gamma_s.len() != inputs.len() {
        return Err(format!(
            "--gamma-s got {} values for {} inputs",
            gamma_s.len(),
            inputs.len()
        )
        .into());
    }
    let seeds = match lattice {
        Some(path) => {
            let lat: DerivedLattice<f64> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            // Brillouin features sit near Ω_X, vibrational ones near Ω_Z.
            let scale = match unit {
                FreqUnit::OmegaR => 1.0,
                FreqUnit::Khz => omega_r_khz,
            };
            Some(CenterSeeds {
                omega_z: lat.omega_z * scale,
                omega_b: lat.omega_x * scale,
            })
        }
        None => None,
    };
    let options = FitOptions {
        separate_sigma_b2,
        ..FitOptions::default()
    };
    let mut aggregate = Vec::new();
    for (i, path) in inputs.iter().enumerate() {
        let data = specfit::load_spectrum_csv::<f64>(path, unit)?;
        let fit = specfit::fit_spectrum(&data, None, seeds, &options)
            .map_err(|e| format!("{}: {e}", path.display()))?;
        let scan_id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| format!("scan{i}"));
        let per_scan = serde_json::json!({
            "params": fit.params,
            "covariance_diag": fit.covariance_diag,
            "residual_rms": fit.residual_rms,
            "converged": fit.converged,
            "n_iterations": fit.n_iterations,
            "A": fit.brillouin_amplitude_a,
            "A_neg": fit.brillouin_amplitude_a_neg,
        });
        write_json(out, &format!("fit_{scan_id}.json"), &per_scan)?;
        let gs = gamma_s.get(i).copied().unwrap_or(f64::NAN);
        aggregate.push(format!("{scan_id},{gs},{}", fit.brillouin_amplitude_a));
    }
    write_csv(out, "fit_aggregate.csv", "scan_id,Gamma_S,A", aggregate)?;
    let manifest = serde_json::json!({
        "command": "fit",
        "inputs": inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "units": match unit { FreqUnit::Khz => "khz", FreqUnit::OmegaR => "omegar" },
        "version": env!("CARGO_PKG_VERSION"),
        "wall_time_s": started.elapsed().as_secs_f64(),
    });
    write_json(out, "manifest.json", &manifest)?;
    Ok(())
}
