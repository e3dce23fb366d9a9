//! Semiclassical trajectory integration.
//!
//! Each atom carries (x, p, spin). Between pumping events the motion is
//! Hamiltonian on the spin's potential, integrated with velocity Verlet
//! (time-dependent probe force evaluated at the sub-step times). Pumping is
//! an inhomogeneous Poisson process handled by thinning against the exact
//! global bound γ_max = 16Γ_S/9: a candidate event fires with probability
//! 1 − exp(−γ_max·dt) and is accepted with probability γ_spin(x)/γ_max.
//! On acceptance the spin flips, the potential energy changes
//! discontinuously (the Sisyphus loss/gain) and recoil kicks are applied.
//!
//! Recoil model: each accepted flip applies `recoil_kicks_per_jump`
//! independent momentum kicks of magnitude ħk_x with random sign
//! (default 2: absorption + emission). Spin-preserving elastic scattering
//! events at rate κ·Γ_S add identical kicks (κ = 0 by default). These knobs
//! are the largest modeling freedom in the crate; the defaults tie heating
//! to Γ_S with no extra parameters and can be recalibrated from the config
//! alone.
//!
//! Position is never wrapped; folding into a lattice period happens only in
//! the observables layer.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fields::{
    force_on, pump_modulation, pump_modulation_bound, pump_rate, pump_rate_bound, DriveMode,
    ProbeDrive, Spin,
};
use crate::lattice::DerivedLattice;
use crate::numeric::{Real, SimScalar};

/// Atom mass in internal units (ħ = k_L = ω_r = 1).
pub const MASS: f64 = 0.5;

/// Phase-space and internal state of one atom, in recoil units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomState<R> {
    pub x: R,
    pub p: R,
    pub spin: Spin,
    pub t: R,
}

/// Ensemble simulation parameters (times in 1/ω_r, energies in ħω_r).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig<R> {
    pub n_traj: usize,
    pub dt: R,
    pub burn_in: R,
    pub measure_time: R,
    pub init_temperature: R,
    pub recoil_kicks_per_jump: u32,
    /// Elastic (spin-preserving) scattering rate as a fraction κ of Γ_S.
    pub elastic_scatter_fraction: R,
    pub seed: u64,
    /// Record one (x, t) sample every this many steps during measurement;
    /// 0 disables sample collection.
    pub sample_stride: usize,
}

impl<R: Real> SimConfig<R> {
    /// Baseline configuration; `init_temperature` is set to U₀/10 once the
    /// lattice is known via [`SimConfig::for_lattice`].
    pub fn new(n_traj: usize, dt: R, burn_in: R, measure_time: R, seed: u64) -> Self {
        SimConfig {
            n_traj,
            dt,
            burn_in,
            measure_time,
            init_temperature: R::one(),
            recoil_kicks_per_jump: 2,
            elastic_scatter_fraction: R::zero(),
            seed,
            sample_stride: 64,
        }
    }

    pub fn for_lattice(mut self, lat: &DerivedLattice<R>) -> Self {
        self.init_temperature = lat.u0 / R::of(10.0);
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

/// Checks the step-size and burn-in resolution contracts.
pub fn validate_config<R: Real>(
    cfg: &SimConfig<R>,
    lat: &DerivedLattice<R>,
    drive: &ProbeDrive<R>,
) -> Result<(), DynamicsError> {
    if cfg.n_traj == 0 {
        return Err(DynamicsError::InvalidConfig("n_traj must be > 0".into()));
    }
    if !(cfg.dt > R::zero()) || !(cfg.measure_time > R::zero()) || cfg.burn_in < R::zero() {
        return Err(DynamicsError::InvalidConfig(
            "dt and measure_time must be > 0, burn_in >= 0".into(),
        ));
    }
    let osc_limit = R::of(2.0) * R::PI() / lat.omega_x / R::of(50.0);
    if cfg.dt > osc_limit {
        return Err(DynamicsError::InvalidConfig(format!(
            "dt = {} does not resolve the oscillation period (max {})",
            cfg.dt, osc_limit
        )));
    }
    let gamma_max = pump_rate_bound(lat) * pump_modulation_bound(drive);
    if cfg.dt * gamma_max > R::of(0.1) {
        return Err(DynamicsError::InvalidConfig(format!(
            "dt*gamma_max = {} exceeds 0.1",
            cfg.dt * gamma_max
        )));
    }
    if drive.mode != DriveMode::Off && drive.delta > R::zero() {
        let min_burn = R::of(20.0) * R::of(2.0) * R::PI() / drive.delta;
        if cfg.burn_in < min_burn {
            return Err(DynamicsError::InvalidConfig(format!(
                "burn_in = {} is below 20 probe periods ({})",
                cfg.burn_in, min_burn
            )));
        }
    }
    Ok(())
}

/// Largest step size satisfying both resolution contracts, rounded down a
/// little so the limits hold strictly.
pub fn max_stable_dt<R: Real>(lat: &DerivedLattice<R>, drive: &ProbeDrive<R>) -> R {
    let osc = R::of(2.0) * R::PI() / lat.omega_x / R::of(50.0);
    let jump = R::of(0.1) / (pump_rate_bound(lat) * pump_modulation_bound(drive));
    osc.min(jump) * R::of(0.999)
}

/// Independent per-trajectory RNG stream, a pure function of
/// (master seed, trajectory index).
pub fn trajectory_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(
        master_seed ^ (index.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15),
    ))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn init_atom<R: SimScalar>(
    cfg: &SimConfig<R>,
    lat: &DerivedLattice<R>,
    rng: &mut ChaCha8Rng,
) -> AtomState<R> {
    let period = R::of(2.0) * R::PI() / lat.k_x;
    let x = R::unit_uniform(rng) * period;
    // σ_p = √(m·k_B T), m = 1/2.
    let sigma_p = (R::of(MASS) * cfg.init_temperature).sqrt();
    let p = R::standard_normal(rng) * sigma_p;
    let spin = if R::unit_uniform(rng) < R::of(0.5) {
        Spin::Plus
    } else {
        Spin::Minus
    };
    AtomState {
        x,
        p,
        spin,
        t: R::zero(),
    }
}

/// Draws the initial ensemble: positions uniform over one spatial period,
/// momenta Gaussian at `init_temperature`, spins equiprobable. Trajectory i
/// uses its own RNG stream, so the ensemble is bitwise reproducible and
/// matches what [`simulate_ensemble`] starts from.
pub fn init_ensemble<R: SimScalar>(
    cfg: &SimConfig<R>,
    lat: &DerivedLattice<R>,
) -> Vec<AtomState<R>> {
    (0..cfg.n_traj)
        .map(|i| {
            let mut rng = trajectory_rng(cfg.seed, i as u64);
            init_atom(cfg, lat, &mut rng)
        })
        .collect()
}

/// What happened during one step besides the deterministic motion.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepEvents {
    pub jumped: bool,
    pub elastic: bool,
}

/// Precomputed per-run constants for the stepping kernel.
pub struct Stepper<'a, R> {
    lat: &'a DerivedLattice<R>,
    drive: &'a ProbeDrive<R>,
    dt: R,
    gamma_max: R,
    /// 1 − exp(−γ_max·dt), an exact per-step candidate probability.
    p_candidate: R,
    p_elastic: R,
    kicks: u32,
    kick: R,
}

impl<'a, R: SimScalar> Stepper<'a, R> {
    pub fn new(cfg: &SimConfig<R>, lat: &'a DerivedLattice<R>, drive: &'a ProbeDrive<R>) -> Self {
        let gamma_max = pump_rate_bound(lat) * pump_modulation_bound(drive);
        // Bound rate for the thinned position-dependent elastic channel:
        // profile (1 − s·cos u)² ≤ 4, normalised so the spatial mean over a
        // period is (3/2)·(2/3) = 1 in units of κ·Γ_S.
        let elastic_rate =
            cfg.elastic_scatter_fraction * lat.gamma_s * R::of(4.0) * R::of(2.0) / R::of(3.0);
        Stepper {
            lat,
            drive,
            dt: cfg.dt,
            gamma_max,
            p_candidate: R::one() - (-gamma_max * cfg.dt).exp(),
            p_elastic: if elastic_rate > R::zero() {
                R::one() - (-elastic_rate * cfg.dt).exp()
            } else {
                R::zero()
            },
            kicks: cfg.recoil_kicks_per_jump,
            kick: lat.k_x,
        }
    }

    fn apply_kicks(&self, p: &mut R, rng: &mut ChaCha8Rng) {
        for _ in 0..self.kicks {
            if R::unit_uniform(rng) < R::of(0.5) {
                *p += self.kick;
            } else {
                *p -= self.kick;
            }
        }
    }

    /// Advances one step in place. `f_curr` caches the force at the current
    /// (x, t, spin) and is updated to the new state's force.
    #[inline]
    pub fn advance(
        &self,
        state: &mut AtomState<R>,
        f_curr: &mut R,
        rng: &mut ChaCha8Rng,
    ) -> StepEvents {
        let dt = self.dt;
        let two = R::of(2.0);
        // m = 1/2: x' = x + 2p·dt + F·dt², p' = p + (F + F')·dt/2.
        let x1 = state.x + two * state.p * dt + *f_curr * dt * dt;
        let t1 = state.t + dt;
        let mut f1 = force_on(self.lat, self.drive, state.spin, x1, t1);
        let mut p1 = state.p + (*f_curr + f1) * dt / two;

        let mut events = StepEvents::default();
        if R::unit_uniform(rng) < self.p_candidate {
            let gamma = pump_rate(self.lat, state.spin, x1)
                * pump_modulation(self.drive, state.spin, self.lat.k_x * x1, t1);
            if R::unit_uniform(rng) * self.gamma_max < gamma {
                state.spin = state.spin.flipped();
                self.apply_kicks(&mut p1, rng);
                f1 = force_on(self.lat, self.drive, state.spin, x1, t1);
                events.jumped = true;
            }
        }
        if self.p_elastic > R::zero() && R::unit_uniform(rng) < self.p_elastic {
            // Spin-preserving (Rayleigh) scattering follows the intensity of
            // the spin's own pumping light: maximal at that spin's well
            // bottoms, where spin-changing transitions die out. Profile
            // (1 − s·cos u)² with spatial mean 3/2, bound 4.
            let c = (self.lat.k_x * x1).cos();
            let q = match state.spin {
                Spin::Plus => R::one() - c,
                Spin::Minus => R::one() + c,
            };
            if R::unit_uniform(rng) * R::of(4.0) < q * q {
                self.apply_kicks(&mut p1, rng);
                events.elastic = true;
            }
        }

        state.x = x1;
        state.p = p1;
        state.t = t1;
        *f_curr = f1;
        debug_assert!(
            state.x.is_finite() && state.p.is_finite(),
            "non-finite atom state"
        );
        events
    }
}

/// Advances one atom by one step; convenience wrapper over [`Stepper`].
pub fn step<R: SimScalar>(
    state: &AtomState<R>,
    lat: &DerivedLattice<R>,
    drive: &ProbeDrive<R>,
    dt: R,
    cfg: &SimConfig<R>,
    rng: &mut ChaCha8Rng,
) -> (AtomState<R>, StepEvents) {
    let mut cfg = *cfg;
    cfg.dt = dt;
    let stepper = Stepper::new(&cfg, lat, drive);
    let mut s = *state;
    let mut f = force_on(lat, drive, s.spin, s.x, s.t);
    let events = stepper.advance(&mut s, &mut f, rng);
    (s, events)
}

/// Aggregated ensemble results.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleStats<R> {
    /// ⟨v⟩ = mean over trajectories of (x(T_end) − x(T_burn))/measure_time.
    pub mean_velocity: R,
    pub stderr: R,
    /// Accepted spin-flip rate per atom actually realized during measurement.
    pub realized_jump_rate: R,
    pub n_traj: usize,
    /// (x, t) samples collected during measurement, in trajectory order.
    #[serde(skip)]
    pub samples: Vec<(R, R)>,
}

struct TrajOutcome<R> {
    velocity: R,
    jumps: u64,
    samples: Vec<(R, R)>,
}

fn run_trajectory<R: SimScalar>(
    cfg: &SimConfig<R>,
    lat: &DerivedLattice<R>,
    drive: &ProbeDrive<R>,
    index: u64,
) -> TrajOutcome<R> {
    let mut rng = trajectory_rng(cfg.seed, index);
    let mut state = init_atom(cfg, lat, &mut rng);
    let stepper = Stepper::new(cfg, lat, drive);
    let mut f = force_on(lat, drive, state.spin, state.x, state.t);

    let n_burn = (cfg.burn_in / cfg.dt).ceil().to_usize().unwrap_or(0);
    let n_measure = (cfg.measure_time / cfg.dt).ceil().to_usize().unwrap_or(1).max(1);

    for _ in 0..n_burn {
        stepper.advance(&mut state, &mut f, &mut rng);
    }
    let x_burn = state.x;
    let t_burn = state.t;
    let mut jumps = 0u64;
    let mut samples = Vec::new();
    if cfg.sample_stride > 0 {
        samples.reserve(n_measure / cfg.sample_stride + 1);
    }
    for k in 0..n_measure {
        let events = stepper.advance(&mut state, &mut f, &mut rng);
        if events.jumped {
            jumps += 1;
        }
        if cfg.sample_stride > 0 && (k + 1) % cfg.sample_stride == 0 {
            samples.push((state.x, state.t));
        }
    }
    let elapsed = state.t - t_burn;
    TrajOutcome {
        velocity: (state.x - x_burn) / elapsed,
        jumps,
        samples,
    }
}

/// Runs the full ensemble: burn-in, then measurement, for every trajectory.
///
/// Trajectories are independent and dispatched in parallel; per-trajectory
/// RNG streams and the fixed-order reduction make the result a pure
/// function of (cfg, lat, drive) regardless of thread count.
pub fn simulate_ensemble<R: SimScalar>(
    cfg: &SimConfig<R>,
    lat: &DerivedLattice<R>,
    drive: &ProbeDrive<R>,
) -> Result<EnsembleStats<R>, DynamicsError> {
    validate_config(cfg, lat, drive)?;
    let outcomes: Vec<TrajOutcome<R>> = (0..cfg.n_traj as u64)
        .into_par_iter()
        .map(|i| run_trajectory(cfg, lat, drive, i))
        .collect();

    let n = R::of(cfg.n_traj as f64);
    let mean = outcomes.iter().map(|o| o.velocity).sum::<R>() / n;
    let var = if cfg.n_traj > 1 {
        outcomes
            .iter()
            .map(|o| {
                let d = o.velocity - mean;
                d * d
            })
            .sum::<R>()
            / (n - R::one())
    } else {
        R::zero()
    };
    let stderr = (var / n).sqrt();
    let total_jumps: u64 = outcomes.iter().map(|o| o.jumps).sum();
    let n_measure = (cfg.measure_time / cfg.dt).ceil().to_usize().unwrap_or(1).max(1);
    let measure_span = cfg.dt * R::of(n_measure as f64);
    let realized_jump_rate = R::of(total_jumps as f64) / (n * measure_span);
    let samples = outcomes.into_iter().flat_map(|o| o.samples).collect();

    Ok(EnsembleStats {
        mean_velocity: mean,
        stderr,
        realized_jump_rate,
        n_traj: cfg.n_traj,
        samples,
    })
}
