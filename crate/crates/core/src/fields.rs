//! Optical bipotentials, forces, pumping rates and probe perturbations.
//!
//! The x-geometry model: spin-dependent potentials
//! U_±(x) = (U₀/4)[−3 − cos(2k_x x) ± 2cos(k_x x)] with pumping rates
//! γ_±(x) = (2Γ_S/9)[3 + cos(2k_x x) ± 4cos(k_x x)]. The probe adds a
//! spin-independent modulation to U_± only; the rates are untouched (the
//! rate modulation exists solely in the z-geometry snapshot view below).
//!
//! Convention: γ_± is the rate of *leaving* state ± for state ∓; γ_+ peaks
//! where U_+ peaks (x = 0), which is the Sisyphus picture.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::DerivedLattice;
use crate::numeric::Real;

/// Probe perturbation descriptor. `eps_p` is ℰ_p/4ℰ_0 (main-text
/// convention); `delta` is the pump-probe detuning in ω_r.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeDrive<R> {
    pub eps_p: R,
    pub delta: R,
    pub mode: DriveMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveMode {
    Off,
    Standing,
    TravelingPlus,
    TravelingMinus,
}

impl<R: Real> ProbeDrive<R> {
    pub fn off() -> Self {
        ProbeDrive {
            eps_p: R::zero(),
            delta: R::zero(),
            mode: DriveMode::Off,
        }
    }

    /// ε_p ≪ 1 is assumed by the perturbative probe treatment.
    pub fn amplitude_suspect(&self) -> bool {
        self.eps_p > R::of(0.3)
    }
}

/// Potentials, forces and pumping rates at one (x, t), in recoil units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample<R> {
    pub u_plus: R,
    pub u_minus: R,
    pub f_plus: R,
    pub f_minus: R,
    pub gamma_plus: R,
    pub gamma_minus: R,
}

/// Spin label of the internal ground state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spin {
    Plus,
    Minus,
}

impl Spin {
    pub fn flipped(self) -> Spin {
        match self {
            Spin::Plus => Spin::Minus,
            Spin::Minus => Spin::Plus,
        }
    }
}

/// Probe contribution to the potential (identical for both spins).
fn probe_potential<R: Real>(u0: R, drive: &ProbeDrive<R>, kx_x: R, t: R) -> R {
    match drive.mode {
        DriveMode::Off => R::zero(),
        DriveMode::Standing => {
            -R::of(2.0) * u0 * drive.eps_p * kx_x.cos() * (drive.delta * t).cos()
        }
        DriveMode::TravelingPlus => -u0 * drive.eps_p * (kx_x - drive.delta * t).cos(),
        DriveMode::TravelingMinus => -u0 * drive.eps_p * (kx_x + drive.delta * t).cos(),
    }
}

/// Probe force −∂U_p/∂x.
fn probe_force<R: Real>(u0: R, k_x: R, drive: &ProbeDrive<R>, kx_x: R, t: R) -> R {
    match drive.mode {
        DriveMode::Off => R::zero(),
        DriveMode::Standing => {
            -R::of(2.0) * u0 * drive.eps_p * k_x * kx_x.sin() * (drive.delta * t).cos()
        }
        DriveMode::TravelingPlus => -u0 * drive.eps_p * k_x * (kx_x - drive.delta * t).sin(),
        DriveMode::TravelingMinus => -u0 * drive.eps_p * k_x * (kx_x + drive.delta * t).sin(),
    }
}

/// Evaluates potentials, analytic forces and pumping rates at (x, t).
pub fn eval_fields<R: Real>(
    lat: &DerivedLattice<R>,
    drive: &ProbeDrive<R>,
    x: R,
    t: R,
) -> FieldSample<R> {
    let u = lat.k_x * x;
    let (s, c) = u.sin_cos();
    let cos2u = R::of(2.0) * c * c - R::one();
    let sin2u = R::of(2.0) * s * c;
    let quarter_u0 = lat.u0 / R::of(4.0);
    let base = -R::of(3.0) - cos2u;
    let up = probe_potential(lat.u0, drive, u, t);
    let fp = probe_force(lat.u0, lat.k_x, drive, u, t);
    // −∂/∂x of the lattice part.
    let f_base = -lat.u0 * lat.k_x / R::of(2.0) * sin2u;
    let f_spin = lat.u0 * lat.k_x / R::of(2.0) * s;
    let rate = R::of(2.0) / R::of(9.0) * lat.gamma_s;
    FieldSample {
        u_plus: quarter_u0 * (base + R::of(2.0) * c) + up,
        u_minus: quarter_u0 * (base - R::of(2.0) * c) + up,
        f_plus: f_base + f_spin + fp,
        f_minus: f_base - f_spin + fp,
        gamma_plus: rate * (R::of(3.0) + cos2u + R::of(4.0) * c),
        gamma_minus: rate * (R::of(3.0) + cos2u - R::of(4.0) * c),
    }
}

/// Force on the given spin only; the integrator's hot path.
#[inline]
pub fn force_on<R: Real>(lat: &DerivedLattice<R>, drive: &ProbeDrive<R>, spin: Spin, x: R, t: R) -> R {
    let u = lat.k_x * x;
    let (s, c) = u.sin_cos();
    let sin2u = R::of(2.0) * s * c;
    let half = lat.u0 * lat.k_x / R::of(2.0);
    let f_base = -half * sin2u;
    let f_spin = match spin {
        Spin::Plus => half * s,
        Spin::Minus => -half * s,
    };
    f_base + f_spin + probe_force(lat.u0, lat.k_x, drive, u, t)
}

/// Pumping rate for leaving the given spin state, γ_spin(x).
#[inline]
pub fn pump_rate<R: Real>(lat: &DerivedLattice<R>, spin: Spin, x: R) -> R {
    let c = (lat.k_x * x).cos();
    let signed = match spin {
        Spin::Plus => c,
        Spin::Minus => -c,
    };
    // 3 + cos2u ± 4cos u = 2(cos u ± 1)², nonnegative by construction.
    let q = signed + R::one();
    R::of(4.0) / R::of(9.0) * lat.gamma_s * q * q
}

/// Probe-induced modulation of the pumping rates, antisymmetric in spin.
///
/// The probe-lattice interference redistributes the ground-state populations
/// (Δρ₊ + Δρ₋ = 0): transfer out of spin s picks up the factor
/// 1 + s·χ(x,t) with χ = 2ε_p·sin(k_x x)·sin(k_x x ∓ δt) per traveling
/// component. Clamped at zero so strong modulation never yields a negative
/// rate.
#[inline]
pub fn pump_modulation<R: Real>(drive: &ProbeDrive<R>, spin: Spin, kx_x: R, t: R) -> R {
    let two_eps = R::of(2.0) * drive.eps_p;
    let chi = match drive.mode {
        DriveMode::Off => R::zero(),
        DriveMode::TravelingPlus => two_eps * kx_x.sin() * (kx_x - drive.delta * t).sin(),
        DriveMode::TravelingMinus => two_eps * kx_x.sin() * (kx_x + drive.delta * t).sin(),
        DriveMode::Standing => {
            two_eps
                * kx_x.sin()
                * ((kx_x - drive.delta * t).sin() + (kx_x + drive.delta * t).sin())
        }
    };
    let raw = match spin {
        Spin::Plus => R::one() + chi,
        Spin::Minus => R::one() - chi,
    };
    raw.max(R::zero())
}

/// Global upper bound on [`pump_modulation`] for thinning.
#[inline]
pub fn pump_modulation_bound<R: Real>(drive: &ProbeDrive<R>) -> R {
    let two_eps = R::of(2.0) * drive.eps_p;
    match drive.mode {
        DriveMode::Off => R::one(),
        DriveMode::TravelingPlus | DriveMode::TravelingMinus => R::one() + two_eps,
        DriveMode::Standing => R::one() + R::of(2.0) * two_eps,
    }
}

/// Global upper bound on γ_±, attained at the respective potential maxima.
#[inline]
pub fn pump_rate_bound<R: Real>(lat: &DerivedLattice<R>) -> R {
    R::of(16.0) / R::of(9.0) * lat.gamma_s
}

/// One row of the z-geometry snapshot table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnapshotRow<R> {
    /// z in units of the laser wavelength λ.
    pub z_over_lambda: R,
    pub u_plus: R,
    pub u_minus: R,
    pub d_rho_plus: R,
    pub d_rho_minus: R,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldsError {
    #[error("probe amplitude ratio |E_p/E_0| = {0} must be < 1")]
    AmplitudeTooLarge(String),
}

/// Probe-modified z-geometry bipotential and steady-state population shifts.
///
/// Evaluates, on the given grid of z positions (units 1/k_L) at probe phase
/// δt = `phase`:
///   U_± = (U₀/2)[(−2 ± cos2z) + r(−2cos(2z − δt) ± cosδt)]
///   Δρ_± = ∓(r/2)·sin2z·sin(2z − δt)/(1 + r·cos(2z − δt))
/// with r = ℰ_p/ℰ_0 the raw field-amplitude ratio.
pub fn snapshot_z_geometry<R: Real>(
    u0: R,
    amp_ratio: R,
    phase: R,
    grid: &[R],
) -> Result<Vec<SnapshotRow<R>>, FieldsError> {
    if amp_ratio.abs() >= R::one() {
        return Err(FieldsError::AmplitudeTooLarge(format!("{}", amp_ratio)));
    }
    let two_pi = R::of(2.0) * R::PI();
    let half_u0 = u0 / R::of(2.0);
    let cos_phase = phase.cos();
    Ok(grid
        .iter()
        .map(|&z| {
            let two_z = R::of(2.0) * z;
            let cos2z = two_z.cos();
            let sin2z = two_z.sin();
            let arg = two_z - phase;
            let probe_common = -R::of(2.0) * arg.cos();
            let u_plus = half_u0 * (-R::of(2.0) + cos2z + amp_ratio * (probe_common + cos_phase));
            let u_minus = half_u0 * (-R::of(2.0) - cos2z + amp_ratio * (probe_common - cos_phase));
            let d_rho = amp_ratio / R::of(2.0) * sin2z * arg.sin()
                / (R::one() + amp_ratio * arg.cos());
            SnapshotRow {
                z_over_lambda: z / two_pi,
                u_plus,
                u_minus,
                d_rho_plus: -d_rho,
                d_rho_minus: d_rho,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{derive_from_targets, AtomicSpecies, Geometry};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reference_lattice() -> DerivedLattice<f64> {
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

    fn drive(mode: DriveMode) -> ProbeDrive<f64> {
        ProbeDrive {
            eps_p: 0.1,
            delta: 13.0,
            mode,
        }
    }

    #[test]
    fn values_at_origin() {
        let lat = reference_lattice();
        let s = eval_fields(&lat, &ProbeDrive::off(), 0.0, 0.0);
        assert_relative_eq!(s.u_plus, -lat.u0 / 2.0, max_relative = 1e-14);
        assert_relative_eq!(s.u_minus, -1.5 * lat.u0, max_relative = 1e-14);
        assert_relative_eq!(s.gamma_plus, 16.0 * lat.gamma_s / 9.0, max_relative = 1e-14);
        assert_abs_diff_eq!(s.gamma_minus, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn standing_is_sum_of_traveling_parts() {
        // The standing perturbation decomposes into the two
        // counter-traveling parts: −2U0ε·cos(kx)cos(δt)
        //   = −U0ε·cos(kx − δt) − U0ε·cos(kx + δt).
        let lat = reference_lattice();
        let off = ProbeDrive::off();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let x: f64 = rng.random_range(-20.0..20.0);
            let t: f64 = rng.random_range(0.0..10.0);
            let base = eval_fields(&lat, &off, x, t);
            let st = eval_fields(&lat, &drive(DriveMode::Standing), x, t);
            let tp = eval_fields(&lat, &drive(DriveMode::TravelingPlus), x, t);
            let tm = eval_fields(&lat, &drive(DriveMode::TravelingMinus), x, t);
            let pert_st = st.u_plus - base.u_plus;
            let pert_tp = tp.u_plus - base.u_plus;
            let pert_tm = tm.u_plus - base.u_plus;
            assert_abs_diff_eq!(pert_st, pert_tp + pert_tm, epsilon = 1e-10);
        }
    }

    #[test]
    fn spatial_average_of_rates() {
        // ⟨γ_±⟩ over one period is 2Γ_S/3; midpoint rule on the smooth
        // periodic integrand is spectrally accurate.
        let lat = reference_lattice();
        let n = 4096;
        let period = 2.0 * std::f64::consts::PI / lat.k_x;
        let mut sum_p = 0.0;
        let mut sum_m = 0.0;
        for i in 0..n {
            let x = (i as f64 + 0.5) / n as f64 * period;
            let s = eval_fields(&lat, &ProbeDrive::off(), x, 0.0);
            sum_p += s.gamma_plus;
            sum_m += s.gamma_minus;
        }
        assert_relative_eq!(sum_p / n as f64, lat.gamma0, max_relative = 1e-12);
        assert_relative_eq!(sum_m / n as f64, lat.gamma0, max_relative = 1e-12);
    }

    #[test]
    fn periodicity_and_sublattice_shift() {
        let lat = reference_lattice();
        let period = 2.0 * std::f64::consts::PI / lat.k_x;
        let half = period / 2.0;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let x: f64 = rng.random_range(-30.0..30.0);
            let a = eval_fields(&lat, &ProbeDrive::off(), x, 0.0);
            let b = eval_fields(&lat, &ProbeDrive::off(), x + period, 0.0);
            assert_abs_diff_eq!(a.u_plus, b.u_plus, epsilon = 1e-9);
            assert_abs_diff_eq!(a.gamma_minus, b.gamma_minus, epsilon = 1e-9);
            let c = eval_fields(&lat, &ProbeDrive::off(), x + half, 0.0);
            assert_abs_diff_eq!(a.u_plus, c.u_minus, epsilon = 1e-9);
            assert_abs_diff_eq!(a.gamma_plus, c.gamma_minus, epsilon = 1e-9);
        }
    }

    #[test]
    fn analytic_force_matches_finite_difference() {
        let lat = reference_lattice();
        let h = 1e-6 / lat.k_x;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for mode in [
            DriveMode::Off,
            DriveMode::Standing,
            DriveMode::TravelingPlus,
            DriveMode::TravelingMinus,
        ] {
            let d = drive(mode);
            for _ in 0..250 {
                let x: f64 = rng.random_range(-10.0..10.0);
                let t: f64 = rng.random_range(0.0..5.0);
                let s = eval_fields(&lat, &d, x, t);
                let up = eval_fields(&lat, &d, x + h, t);
                let dn = eval_fields(&lat, &d, x - h, t);
                let fd_plus = -(up.u_plus - dn.u_plus) / (2.0 * h);
                let fd_minus = -(up.u_minus - dn.u_minus) / (2.0 * h);
                let scale = lat.u0 * lat.k_x;
                assert_abs_diff_eq!(s.f_plus, fd_plus, epsilon = 1e-6 * scale);
                assert_abs_diff_eq!(s.f_minus, fd_minus, epsilon = 1e-6 * scale);
            }
        }
    }

    #[test]
    fn mirror_property_traveling_drives() {
        let lat = reference_lattice();
        let tp = drive(DriveMode::TravelingPlus);
        let tm = drive(DriveMode::TravelingMinus);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let x: f64 = rng.random_range(-20.0..20.0);
            let t: f64 = rng.random_range(0.0..8.0);
            let a = eval_fields(&lat, &tm, x, t);
            let b = eval_fields(&lat, &tp, -x, t);
            assert_abs_diff_eq!(a.u_plus, b.u_plus, epsilon = 1e-10);
            assert_abs_diff_eq!(a.u_minus, b.u_minus, epsilon = 1e-10);
            assert_abs_diff_eq!(a.f_plus, -b.f_plus, epsilon = 1e-10);
            assert_abs_diff_eq!(a.gamma_plus, b.gamma_plus, epsilon = 1e-10);
        }
    }

    #[test]
    fn rates_nonnegative_on_dense_grid() {
        let lat = reference_lattice();
        let period = 2.0 * std::f64::consts::PI / lat.k_x;
        for i in 0..100_000 {
            let x = i as f64 / 100_000.0 * period;
            let s = eval_fields(&lat, &ProbeDrive::off(), x, 0.0);
            assert!(s.gamma_plus >= 0.0);
            assert!(s.gamma_minus >= 0.0);
            assert_abs_diff_eq!(s.gamma_plus, pump_rate(&lat, Spin::Plus, x), epsilon = 1e-11);
            assert_abs_diff_eq!(s.gamma_minus, pump_rate(&lat, Spin::Minus, x), epsilon = 1e-11);
        }
    }

    #[test]
    fn off_mode_ignores_amplitude() {
        let lat = reference_lattice();
        let off_with_amp = ProbeDrive {
            eps_p: 0.2,
            delta: 10.0,
            mode: DriveMode::Off,
        };
        let a = eval_fields(&lat, &off_with_amp, 1.3, 2.0);
        let b = eval_fields(&lat, &ProbeDrive::off(), 1.3, 2.0);
        assert_eq!(a, b);
    }

    #[test]
    fn snapshot_probe_off_reduces_to_bare_lattice() {
        let u0 = 100.0f64;
        let grid: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let rows = snapshot_z_geometry(u0, 0.0, 1.0, &grid).unwrap();
        for (row, &z) in rows.iter().zip(&grid) {
            assert_abs_diff_eq!(row.d_rho_plus, 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(row.d_rho_minus, 0.0, epsilon = 1e-15);
            let expect_plus = u0 / 2.0 * (-2.0 + (2.0 * z).cos());
            assert_abs_diff_eq!(row.u_plus, expect_plus, epsilon = 1e-10);
        }
    }

    #[test]
    fn snapshot_population_shifts_cancel() {
        let grid: Vec<f64> = (0..500).map(|i| i as f64 * 0.02 - 3.0).collect();
        for k in 0..9 {
            let phase = k as f64 * std::f64::consts::FRAC_PI_4;
            let rows = snapshot_z_geometry(100.0f64, 0.2, phase, &grid).unwrap();
            for row in rows {
                assert_abs_diff_eq!(row.d_rho_plus + row.d_rho_minus, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn snapshot_point_value_against_independent_evaluation() {
        // r = 0.2, δt = π/2, k_L z = π/4, evaluated symbolically:
        // sin(2z) = 1, sin(2z − δt) = 0 ⇒ Δρ_± = 0 exactly, and
        // U_+ = (U0/2)[−2 + 0 + 0.2(−2·1 + 0)] = (U0/2)(−2.4).
        let rows =
            snapshot_z_geometry(100.0f64, 0.2, std::f64::consts::FRAC_PI_2, &[std::f64::consts::FRAC_PI_4])
                .unwrap();
        let row = rows[0];
        assert_abs_diff_eq!(row.d_rho_plus, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(row.u_plus, 50.0 * (-2.0 + 0.0 + 0.2 * (-2.0 + 0.0)), epsilon = 1e-10);
        assert_abs_diff_eq!(row.u_minus, 50.0 * (-2.0 - 0.0 + 0.2 * (-2.0 - 0.0)), epsilon = 1e-10);

        // A second, asymmetric point: r = 0.2, δt = π/3, z = 0.4.
        let (r, phase, z) = (0.2f64, std::f64::consts::FRAC_PI_3, 0.4f64);
        let rows = snapshot_z_geometry(100.0f64, r, phase, &[z]).unwrap();
        let arg = 2.0 * z - phase;
        let expected = -(r / 2.0) * (2.0 * z).sin() * arg.sin() / (1.0 + r * arg.cos());
        assert_relative_eq!(rows[0].d_rho_plus, expected, max_relative = 1e-12);
    }

    #[test]
    fn snapshot_rejects_large_amplitude() {
        assert!(matches!(
            snapshot_z_geometry(100.0f64, 1.0, 0.0, &[0.0]),
            Err(FieldsError::AmplitudeTooLarge(_))
        ));
    }
}
