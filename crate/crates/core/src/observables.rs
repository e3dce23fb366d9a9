//! Density-wave mode spectra, parameter sweeps and peak location.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{max_stable_dt, simulate_ensemble, DynamicsError, SimConfig};
use crate::fields::{DriveMode, ProbeDrive};
use crate::lattice::{derive_from_targets, AtomicSpecies, DerivedLattice, Geometry, LatticeError};
use crate::numeric::{Real, SimScalar};

/// Default harmonic window: all modes up to the third temporal and spatial
/// harmonics, which covers every non-negligibly excited density wave.
pub const DEFAULT_L_MAX: usize = 3;
pub const DEFAULT_N_MAX: usize = 3;

/// Complex density-wave amplitudes ρ[l, n] for temporal harmonics
/// l = 0..=l_max and spatial harmonics n = −n_max..=n_max.
///
/// Only the l ≥ 0 half-plane is stored; the real density fixes
/// ρ[−l, −n] = conj(ρ[l, n]).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum<R> {
    pub l_max: usize,
    pub n_max: usize,
    amplitudes: Vec<Complex<R>>,
    pub delta: R,
    pub sample_count: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObservablesError {
    #[error("too few samples for a mode spectrum: {0} < 1000")]
    TooFewSamples(usize),
    #[error("sweep grid must be strictly increasing and positive")]
    BadGrid,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

impl<R: Real> ModeSpectrum<R> {
    fn index(&self, l: usize, n: isize) -> usize {
        debug_assert!(l <= self.l_max && n.unsigned_abs() <= self.n_max);
        l * (2 * self.n_max + 1) + (n + self.n_max as isize) as usize
    }

    /// ρ[l, n] for l in 0..=l_max, |n| <= n_max.
    pub fn get(&self, l: usize, n: isize) -> Complex<R> {
        self.amplitudes[self.index(l, n)]
    }

    /// Iterates (l, n, amplitude) over the stored half-plane.
    pub fn iter(&self) -> impl Iterator<Item = (usize, isize, Complex<R>)> + '_ {
        (0..=self.l_max).flat_map(move |l| {
            (-(self.n_max as isize)..=self.n_max as isize)
                .map(move |n| (l, n, self.get(l, n)))
        })
    }
}

/// Unbiased direct estimator of the density-wave amplitudes:
/// ρ[l, n] = (1/M)·Σ_s exp(−i(n·k_x·x_s − l·δ·t_s)). No binning.
pub fn mode_spectrum<R: Real>(
    samples: &[(R, R)],
    lat: &DerivedLattice<R>,
    delta: R,
    l_max: usize,
    n_max: usize,
) -> Result<ModeSpectrum<R>, ObservablesError> {
    if samples.len() < 1000 {
        return Err(ObservablesError::TooFewSamples(samples.len()));
    }
    let m = R::of(samples.len() as f64);
    let mut amplitudes = vec![Complex::new(R::zero(), R::zero()); (l_max + 1) * (2 * n_max + 1)];
    for &(x, t) in samples {
        let kx = lat.k_x * x;
        let dt = delta * t;
        // exp(−i(n·kx − l·δt)) built from the n = ±1 and l = 1 factors.
        let en = Complex::from_polar(R::one(), -kx);
        let el = Complex::from_polar(R::one(), dt);
        let mut lphase = Complex::new(R::one(), R::zero());
        for l in 0..=l_max {
            // Start at n = −n_max: exp(+i·n_max·k_x·x).
            let mut nphase = Complex::from_polar(R::one(), kx * R::of(n_max as f64));
            for n in 0..(2 * n_max + 1) {
                amplitudes[l * (2 * n_max + 1) + n] += lphase * nphase;
                nphase *= en;
            }
            lphase *= el;
        }
    }
    for a in &mut amplitudes {
        *a = *a / m;
    }
    Ok(ModeSpectrum {
        l_max,
        n_max,
        amplitudes,
        delta,
        sample_count: samples.len(),
    })
}

/// Status of one sweep grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "detail")]
pub enum PointStatus {
    Ok,
    Failed(String),
}

/// Interpolated peak of a sweep curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakEstimate<R> {
    pub location: R,
    pub uncertainty: R,
    /// False when the grid maximum sits on the boundary (NotBracketed).
    pub bracketed: bool,
    /// Set when two grid maxima were equal within stderr; the lower axis
    /// value was chosen.
    pub tie_broken_low: bool,
}

/// One sweep over δ or Γ_S.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult<R> {
    pub axis_values: Vec<R>,
    pub mean_velocity: Vec<R>,
    pub stderr: Vec<R>,
    pub mode_11_magnitude: Vec<R>,
    /// Realized optical-pumping flip rate per trajectory per unit time.
    pub realized_jump_rate: Vec<R>,
    pub statuses: Vec<PointStatus>,
    pub peak: PeakEstimate<R>,
}

/// Policy for choosing the probe detuning at each noise-sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaPolicy {
    FixedAtOmegaX,
    /// Coarse 7-point δ scan per Γ_S, then the final run at the
    /// interpolated scan peak (default; the optimum drifts slightly below
    /// Ω_X with anharmonicity).
    PeakOfDeltaSweep,
}

/// Vertex of the parabola through three points; exact for parabolic data.
pub fn parabola_vertex<R: Real>(x: [R; 3], y: [R; 3]) -> R {
    let d21 = x[1] - x[0];
    let d23 = x[1] - x[2];
    let num = d21 * d21 * (y[1] - y[2]) - d23 * d23 * (y[1] - y[0]);
    let den = d21 * (y[1] - y[2]) - d23 * (y[1] - y[0]);
    if den == R::zero() {
        x[1]
    } else {
        x[1] - num / (R::of(2.0) * den)
    }
}

/// Quadratic-interpolation peak of a sampled curve with per-point errors.
///
/// Uses the grid argmax and its neighbors; tie-breaks toward the lower axis
/// value when two grid maxima agree within their combined stderr.
pub fn locate_peak<R: Real>(axis: &[R], y: &[R], stderr: &[R]) -> PeakEstimate<R> {
    assert!(axis.len() == y.len() && y.len() == stderr.len() && !y.is_empty());
    let mut best = 0usize;
    for i in 1..y.len() {
        if y[i] > y[best] {
            best = i;
        }
    }
    // Tie handling: any other local maximum within combined stderr of the
    // best one pulls the choice toward the lower axis value.
    let mut tie = false;
    for i in 0..y.len() {
        if i != best && (y[best] - y[i]).abs() <= (stderr[best] + stderr[i]) && i + 1 != best && i != best + 1
        {
            tie = true;
            if axis[i] < axis[best] && y[i] + stderr[i] >= y[best] - stderr[best] {
                best = i;
            }
        }
    }
    if best == 0 || best == y.len() - 1 {
        return PeakEstimate {
            location: axis[best],
            uncertainty: R::nan(),
            bracketed: false,
            tie_broken_low: tie,
        };
    }
    let xs = [axis[best - 1], axis[best], axis[best + 1]];
    let ys = [y[best - 1], y[best], y[best + 1]];
    let location = parabola_vertex(xs, ys);
    // Propagate point errors through the vertex by one-sided perturbation.
    let mut var = R::zero();
    for j in 0..3 {
        let mut yp = ys;
        yp[j] += stderr[best - 1 + j];
        let shifted = parabola_vertex(xs, yp);
        let d = shifted - location;
        var += d * d;
    }
    PeakEstimate {
        location,
        uncertainty: var.sqrt(),
        bracketed: true,
        tie_broken_low: tie,
    }
}

fn point_seed(master: u64, index: u64) -> u64 {
    // Distinct mixing constant from the trajectory-stream derivation.
    let mut z = master ^ (index.wrapping_add(1)).wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 33)).wrapping_mul(0xFF51_AFD7_ED55_8CCD);
    z ^ (z >> 33)
}

fn checked_grid<R: Real>(grid: &[R]) -> Result<(), ObservablesError> {
    if grid.is_empty() || grid[0] <= R::zero() {
        return Err(ObservablesError::BadGrid);
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ObservablesError::BadGrid);
    }
    Ok(())
}

/// Runs one simulation point, auto-tightening dt and burn-in to the
/// resolution contracts, and returns (⟨v⟩, stderr, |ρ[1,1]|).
fn run_point<R: SimScalar>(
    cfg: &SimConfig<R>,
    lat: &DerivedLattice<R>,
    drive: &ProbeDrive<R>,
) -> Result<(R, R, R, R), ObservablesError> {
    let mut cfg = *cfg;
    cfg.dt = cfg.dt.min(max_stable_dt(lat, drive));
    if drive.mode != DriveMode::Off && drive.delta > R::zero() {
        let min_burn = R::of(20.0) * R::of(2.0) * R::PI() / drive.delta * R::of(1.001);
        cfg.burn_in = cfg.burn_in.max(min_burn);
    }
    let stats = simulate_ensemble(&cfg, lat, drive)?;
    let rho11 = if cfg.sample_stride > 0 && drive.delta > R::zero() {
        let spec = mode_spectrum(&stats.samples, lat, drive.delta, 1, 1)?;
        spec.get(1, 1).norm()
    } else {
        R::zero()
    };
    Ok((
        stats.mean_velocity,
        stats.stderr,
        rho11,
        stats.realized_jump_rate,
    ))
}

/// Sweeps the probe detuning δ at fixed lattice parameters.
pub fn delta_sweep<R: SimScalar>(
    cfg: &SimConfig<R>,
    lat: &DerivedLattice<R>,
    eps_p: R,
    mode: DriveMode,
    delta_grid: &[R],
) -> Result<SweepResult<R>, ObservablesError> {
    checked_grid(delta_grid)?;
    let mut result = SweepResult {
        axis_values: delta_grid.to_vec(),
        mean_velocity: Vec::with_capacity(delta_grid.len()),
        stderr: Vec::with_capacity(delta_grid.len()),
        mode_11_magnitude: Vec::with_capacity(delta_grid.len()),
        realized_jump_rate: Vec::with_capacity(delta_grid.len()),
        statuses: Vec::with_capacity(delta_grid.len()),
        peak: PeakEstimate {
            location: R::nan(),
            uncertainty: R::nan(),
            bracketed: false,
            tie_broken_low: false,
        },
    };
    for (i, &delta) in delta_grid.iter().enumerate() {
        let mut point_cfg = *cfg;
        point_cfg.seed = point_seed(cfg.seed, i as u64);
        let drive = ProbeDrive { eps_p, delta, mode };
        match run_point(&point_cfg, lat, &drive) {
            Ok((v, se, rho, rate)) => {
                result.mean_velocity.push(v);
                result.stderr.push(se);
                result.mode_11_magnitude.push(rho);
                result.realized_jump_rate.push(rate);
                result.statuses.push(PointStatus::Ok);
            }
            Err(e) => {
                result.mean_velocity.push(R::nan());
                result.stderr.push(R::nan());
                result.mode_11_magnitude.push(R::nan());
                result.realized_jump_rate.push(R::nan());
                result.statuses.push(PointStatus::Failed(e.to_string()));
            }
        }
    }
    result.peak = peak_over_ok(&result);
    Ok(result)
}

fn peak_over_ok<R: Real>(res: &SweepResult<R>) -> PeakEstimate<R> {
    let mut axis = Vec::new();
    let mut y = Vec::new();
    let mut se = Vec::new();
    for i in 0..res.axis_values.len() {
        if res.statuses[i] == PointStatus::Ok {
            axis.push(res.axis_values[i]);
            y.push(res.mean_velocity[i]);
            se.push(res.stderr[i]);
        }
    }
    if y.is_empty() {
        return PeakEstimate {
            location: R::nan(),
            uncertainty: R::nan(),
            bracketed: false,
            tie_broken_low: false,
        };
    }
    locate_peak(&axis, &y, &se)
}

/// Parameters shared by all points of a noise sweep.
#[derive(Debug, Clone, Copy)]
pub struct NoiseSweepSetup<R> {
    pub target_u0: R,
    pub theta_x: R,
    pub theta_y: R,
    pub geometry: Geometry,
    pub eps_p: R,
    pub mode: DriveMode,
    pub delta_policy: DeltaPolicy,
}

/// Sweeps the photon-scattering rate Γ_S at fixed well depth U₀.
///
/// Each grid point rebuilds the lattice from the (U₀, Γ_S) target (the
/// constant-well-depth noise tuning), picks δ per the policy, and measures
/// ⟨v⟩ and |ρ[1,1]|.
pub fn noise_sweep<R: SimScalar>(
    cfg: &SimConfig<R>,
    species: &AtomicSpecies<R>,
    setup: &NoiseSweepSetup<R>,
    gamma_s_grid: &[R],
) -> Result<SweepResult<R>, ObservablesError> {
    checked_grid(gamma_s_grid)?;
    let mut result = SweepResult {
        axis_values: gamma_s_grid.to_vec(),
        mean_velocity: Vec::new(),
        stderr: Vec::new(),
        mode_11_magnitude: Vec::new(),
        realized_jump_rate: Vec::new(),
        statuses: Vec::new(),
        peak: PeakEstimate {
            location: R::nan(),
            uncertainty: R::nan(),
            bracketed: false,
            tie_broken_low: false,
        },
    };
    for (i, &gamma_s) in gamma_s_grid.iter().enumerate() {
        let point = noise_point(cfg, species, setup, gamma_s, i as u64);
        match point {
            Ok((v, se, rho, rate)) => {
                result.mean_velocity.push(v);
                result.stderr.push(se);
                result.mode_11_magnitude.push(rho);
                result.realized_jump_rate.push(rate);
                result.statuses.push(PointStatus::Ok);
            }
            Err(e) => {
                result.mean_velocity.push(R::nan());
                result.stderr.push(R::nan());
                result.mode_11_magnitude.push(R::nan());
                result.realized_jump_rate.push(R::nan());
                result.statuses.push(PointStatus::Failed(e.to_string()));
            }
        }
    }
    result.peak = peak_over_ok(&result);
    Ok(result)
}

fn noise_point<R: SimScalar>(
    cfg: &SimConfig<R>,
    species: &AtomicSpecies<R>,
    setup: &NoiseSweepSetup<R>,
    gamma_s: R,
    index: u64,
) -> Result<(R, R, R, R), ObservablesError> {
    let lat = derive_from_targets(
        species,
        setup.target_u0,
        gamma_s,
        setup.theta_x,
        setup.theta_y,
        setup.geometry,
    )?;
    let mut point_cfg = *cfg;
    point_cfg.seed = point_seed(cfg.seed, index);
    let delta = match setup.delta_policy {
        DeltaPolicy::FixedAtOmegaX => lat.omega_x,
        DeltaPolicy::PeakOfDeltaSweep => {
            let mut scan_cfg = point_cfg;
            scan_cfg.n_traj = (point_cfg.n_traj / 4).max(128);
            scan_cfg.seed = point_seed(point_cfg.seed, 0xC0A5);
            scan_cfg.sample_stride = 0;
            let lo = R::of(0.5) * lat.omega_x;
            let hi = R::of(1.1) * lat.omega_x;
            let grid: Vec<R> = (0..7)
                .map(|k| lo + (hi - lo) * R::of(k as f64) / R::of(6.0))
                .collect();
            let scan = delta_sweep(&scan_cfg, &lat, setup.eps_p, setup.mode, &grid)?;
            let loc = scan.peak.location;
            if loc.is_finite() {
                loc.max(lo).min(hi)
            } else {
                lat.omega_x
            }
        }
    };
    let drive = ProbeDrive {
        eps_p: setup.eps_p,
        delta,
        mode: setup.mode,
    };
    run_point(&point_cfg, &lat, &drive)
}

/// Linear fit through the origin; returns (slope, R²). Used for the
/// (Γ_S)_SR vs √|Δ₀′| scaling check.
pub fn fit_through_origin<R: Real>(x: &[R], y: &[R]) -> (R, R) {
    assert_eq!(x.len(), y.len());
    let sxy = x.iter().zip(y).map(|(&a, &b)| a * b).sum::<R>();
    let sxx = x.iter().map(|&a| a * a).sum::<R>();
    let slope = sxy / sxx;
    let n = R::of(y.len() as f64);
    let mean_y = y.iter().copied().sum::<R>() / n;
    let ss_tot = y.iter().map(|&b| (b - mean_y) * (b - mean_y)).sum::<R>();
    let ss_res = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let r = b - slope * a;
            r * r
        })
        .sum::<R>();
    (slope, R::one() - ss_res / ss_tot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{derive_from_targets, AtomicSpecies, Geometry};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::Rng;

    fn lat() -> DerivedLattice<f64> {
        derive_from_targets(
            &AtomicSpecies::rb85(),
            400.0,
            5.7,
            25f64.to_radians(),
            25f64.to_radians(),
            Geometry::ThreeDTetrahedral,
        )
        .unwrap()
    }

    /// Draws samples from density ∝ 1 + a·cos(k_x·x − δ·t) by rejection.
    fn modulated_stream(
        lat: &DerivedLattice<f64>,
        a: f64,
        delta: f64,
        m: usize,
        seed: u64,
    ) -> Vec<(f64, f64)> {
        let mut rng = crate::dynamics::trajectory_rng(seed, 0);
        let period = 2.0 * std::f64::consts::PI / lat.k_x;
        let t_period = 2.0 * std::f64::consts::PI / delta;
        let mut out = Vec::with_capacity(m);
        while out.len() < m {
            let x: f64 = rng.random_range(0.0..period);
            let t: f64 = rng.random_range(0.0..t_period);
            let density = 1.0 + a * (lat.k_x * x - delta * t).cos();
            if rng.random_range(0.0..(1.0 + a)) < density {
                out.push((x, t));
            }
        }
        out
    }

    /// Brute-force quadrature oracle for the [1,1] Fourier amplitude of the
    /// synthetic density 1 + a·cos(k_x·x − δ·t) over one space-time period.
    fn quadrature_rho11(lat: &DerivedLattice<f64>, a: f64, delta: f64) -> num_complex::Complex64 {
        let nx = 400;
        let nt = 400;
        let period = 2.0 * std::f64::consts::PI / lat.k_x;
        let t_period = 2.0 * std::f64::consts::PI / delta;
        let mut num = num_complex::Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for i in 0..nx {
            let x = (i as f64 + 0.5) / nx as f64 * period;
            for j in 0..nt {
                let t = (j as f64 + 0.5) / nt as f64 * t_period;
                let density = 1.0 + a * (lat.k_x * x - delta * t).cos();
                let phase = num_complex::Complex64::from_polar(1.0, -(lat.k_x * x - delta * t));
                num += density * phase;
                den += density;
            }
        }
        num / den
    }

    #[test]
    fn synthetic_density_mode_amplitude() {
        let lat = lat();
        let delta = 13.0;
        let a = 0.1;
        let oracle = quadrature_rho11(&lat, a, delta);
        // Independent quadrature confirms the analytic value a/2 = 0.05.
        assert_abs_diff_eq!(oracle.re, 0.05, epsilon = 1e-6);
        assert_abs_diff_eq!(oracle.im, 0.0, epsilon = 1e-6);

        let m = 200_000;
        let samples = modulated_stream(&lat, a, delta, m, 17);
        let spec = mode_spectrum(&samples, &lat, delta, 3, 3).unwrap();
        let tol = 5.0 / (m as f64).sqrt();
        let rho11 = spec.get(1, 1);
        assert_abs_diff_eq!(rho11.re, oracle.re, epsilon = tol);
        assert_abs_diff_eq!(rho11.im, oracle.im, epsilon = tol);
        // Normalization and absent modes.
        assert_abs_diff_eq!(spec.get(0, 0).re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.get(0, 0).im, 0.0, epsilon = 1e-12);
        assert!(spec.get(2, 2).norm() < tol);
        assert!(spec.get(1, -1).norm() < tol);
    }

    #[test]
    fn uniform_stream_has_no_structure() {
        let lat = lat();
        let delta = 10.0;
        let mut rng = crate::dynamics::trajectory_rng(3, 0);
        let m = 100_000;
        let period = 2.0 * std::f64::consts::PI / lat.k_x;
        let samples: Vec<(f64, f64)> = (0..m)
            .map(|_| (rng.random_range(0.0..period), rng.random_range(0.0..100.0)))
            .collect();
        let spec = mode_spectrum(&samples, &lat, delta, 3, 3).unwrap();
        let tol = 5.0 / (m as f64).sqrt();
        for (l, n, amp) in spec.iter() {
            if l == 0 && n == 0 {
                continue;
            }
            assert!(amp.norm() < tol, "rho[{l},{n}] = {}", amp.norm());
        }
    }

    #[test]
    fn mode_estimator_is_linear() {
        let lat = lat();
        let delta = 13.0;
        let s1 = modulated_stream(&lat, 0.1, delta, 60_000, 5);
        let s2 = modulated_stream(&lat, 0.0, delta, 60_000, 6);
        let mut joined = s1.clone();
        joined.extend_from_slice(&s2);
        let a1 = mode_spectrum(&s1, &lat, delta, 2, 2).unwrap();
        let a2 = mode_spectrum(&s2, &lat, delta, 2, 2).unwrap();
        let aj = mode_spectrum(&joined, &lat, delta, 2, 2).unwrap();
        for (l, n, amp) in aj.iter() {
            let expect = (a1.get(l, n) + a2.get(l, n)) / 2.0;
            assert!((amp - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn too_few_samples_rejected() {
        let lat = lat();
        let samples = vec![(0.0, 0.0); 999];
        assert!(matches!(
            mode_spectrum(&samples, &lat, 1.0, 1, 1),
            Err(ObservablesError::TooFewSamples(999))
        ));
    }

    #[test]
    fn parabola_vertex_exact() {
        // y = 3 − 2(x − 1.37)², sampled at arbitrary points.
        let f = |x: f64| 3.0 - 2.0 * (x - 1.37).powi(2);
        let xs = [0.2, 1.1, 2.9];
        let v = parabola_vertex(xs, [f(xs[0]), f(xs[1]), f(xs[2])]);
        assert_relative_eq!(v, 1.37, max_relative = 1e-12);
    }

    #[test]
    fn locate_peak_interior_and_boundary() {
        let axis: Vec<f64> = (0..9).map(|i| 1.0 + i as f64).collect();
        let y: Vec<f64> = axis.iter().map(|&x| 10.0 - (x - 4.3).powi(2)).collect();
        let se = vec![1e-6; 9];
        let peak = locate_peak(&axis, &y, &se);
        assert!(peak.bracketed);
        assert_relative_eq!(peak.location, 4.3, max_relative = 1e-10);
        assert!(peak.uncertainty < 1e-4);

        let rising: Vec<f64> = axis.iter().map(|&x| x).collect();
        let peak = locate_peak(&axis, &rising, &se);
        assert!(!peak.bracketed);
        assert_relative_eq!(peak.location, 9.0);
    }

    #[test]
    fn bad_grids_rejected() {
        let lat = lat();
        let cfg = SimConfig::new(8, 0.005, 10.0, 10.0, 1);
        assert!(matches!(
            delta_sweep(&cfg, &lat, 0.1, DriveMode::TravelingPlus, &[2.0, 1.0]),
            Err(ObservablesError::BadGrid)
        ));
        assert!(matches!(
            delta_sweep(&cfg, &lat, 0.1, DriveMode::TravelingPlus, &[-1.0, 1.0]),
            Err(ObservablesError::BadGrid)
        ));
    }

    #[test]
    fn fit_through_origin_recovers_slope() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|&v| 2.5 * v).collect();
        let (slope, r2) = fit_through_origin(&x, &y);
        assert_relative_eq!(slope, 2.5, max_relative = 1e-12);
        assert_relative_eq!(r2, 1.0, max_relative = 1e-12);
    }
}
