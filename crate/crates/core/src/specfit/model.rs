//! The composite probe-transmission line-shape model.
//!
//! Four Gaussians (vibrational pair at ±Ω_Z, Brillouin pair at ±Ω_B, the
//! second Brillouin Gaussian reusing σ_B1 as printed), a constant and
//! linear background, and a Lorentzian plus dispersive pair for the central
//! Rayleigh feature.

use serde::{Deserialize, Serialize};

use crate::numeric::Real;

/// Model parameters in natural units. Widths must be positive; the solver
/// enforces this by optimizing their logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitModel<R> {
    pub a_z1: R,
    pub omega_z1: R,
    pub sigma_z1: R,
    pub a_z2: R,
    pub omega_z2: R,
    pub sigma_z2: R,
    pub a_b1: R,
    pub omega_b1: R,
    pub sigma_b1: R,
    pub a_b2: R,
    pub omega_b2: R,
    /// Own width for the second Brillouin Gaussian; `None` shares σ_B1
    /// (the printed form, and the default).
    pub sigma_b2: Option<R>,
    /// Constant background.
    pub a1: R,
    /// Linear background slope.
    pub a2: R,
    /// Lorentzian amplitude.
    pub a3: R,
    /// Dispersive amplitude.
    pub a4: R,
    /// Center offset of the Rayleigh feature.
    pub x0: R,
    /// Lorentzian half-width γ.
    pub gamma_width: R,
}

fn gaussian<R: Real>(a: R, center: R, sigma: R, delta: R) -> R {
    let z = (delta - center) / sigma;
    a * (-z * z / R::of(2.0)).exp()
}

impl<R: Real> FitModel<R> {
    pub fn sigma_b2_effective(&self) -> R {
        self.sigma_b2.unwrap_or(self.sigma_b1)
    }

    /// Evaluates the model at one detuning value.
    pub fn eval(&self, delta: R) -> R {
        let g = gaussian(self.a_z1, self.omega_z1, self.sigma_z1, delta)
            + gaussian(self.a_z2, self.omega_z2, self.sigma_z2, delta)
            + gaussian(self.a_b1, self.omega_b1, self.sigma_b1, delta)
            + gaussian(self.a_b2, self.omega_b2, self.sigma_b2_effective(), delta);
        let u = delta + self.x0;
        let den = u * u + self.gamma_width * self.gamma_width;
        g + self.a1 + self.a2 * delta + self.a3 / den + self.a4 * u / den
    }

    /// The model under δ → −δ: Gaussian pairs swap with negated centers,
    /// the slope, offset and dispersive amplitude negate. For every δ,
    /// `m.mirrored().eval(-δ) == m.eval(δ)`.
    pub fn mirrored(&self) -> Self {
        FitModel {
            a_z1: self.a_z2,
            omega_z1: -self.omega_z2,
            sigma_z1: self.sigma_z2,
            a_z2: self.a_z1,
            omega_z2: -self.omega_z1,
            sigma_z2: self.sigma_z1,
            a_b1: self.a_b2,
            omega_b1: -self.omega_b2,
            sigma_b1: self.sigma_b2_effective(),
            a_b2: self.a_b1,
            omega_b2: -self.omega_b1,
            sigma_b2: Some(self.sigma_b1),
            a1: self.a1,
            a2: -self.a2,
            a3: self.a3,
            a4: -self.a4,
            x0: -self.x0,
            gamma_width: self.gamma_width,
        }
    }

    /// Number of free parameters in the packed vector.
    pub fn param_count(separate_sigma_b2: bool) -> usize {
        if separate_sigma_b2 {
            18
        } else {
            17
        }
    }

    /// Names of the packed parameters, in packing order (widths packed as
    /// logarithms but named by their natural parameter).
    pub fn param_names(separate_sigma_b2: bool) -> Vec<&'static str> {
        let mut names = vec![
            "a_z1", "omega_z1", "sigma_z1", "a_z2", "omega_z2", "sigma_z2", "a_b1", "omega_b1",
            "sigma_b1", "a_b2", "omega_b2",
        ];
        if separate_sigma_b2 {
            names.push("sigma_b2");
        }
        names.extend_from_slice(&["a1", "a2", "a3", "a4", "x0", "gamma_width"]);
        names
    }

    /// Packs into the solver vector (widths as logarithms).
    pub fn to_params(&self, separate_sigma_b2: bool) -> Vec<R> {
        let mut p = vec![
            self.a_z1,
            self.omega_z1,
            self.sigma_z1.ln(),
            self.a_z2,
            self.omega_z2,
            self.sigma_z2.ln(),
            self.a_b1,
            self.omega_b1,
            self.sigma_b1.ln(),
            self.a_b2,
            self.omega_b2,
        ];
        if separate_sigma_b2 {
            p.push(self.sigma_b2_effective().ln());
        }
        p.extend_from_slice(&[
            self.a1,
            self.a2,
            self.a3,
            self.a4,
            self.x0,
            self.gamma_width.ln(),
        ]);
        p
    }

    pub fn from_params(p: &[R], separate_sigma_b2: bool) -> Self {
        assert_eq!(p.len(), Self::param_count(separate_sigma_b2));
        let (sigma_b2, rest) = if separate_sigma_b2 {
            (Some(p[11].exp()), 12)
        } else {
            (None, 11)
        };
        FitModel {
            a_z1: p[0],
            omega_z1: p[1],
            sigma_z1: p[2].exp(),
            a_z2: p[3],
            omega_z2: p[4],
            sigma_z2: p[5].exp(),
            a_b1: p[6],
            omega_b1: p[7],
            sigma_b1: p[8].exp(),
            a_b2: p[9],
            omega_b2: p[10],
            sigma_b2,
            a1: p[rest],
            a2: p[rest + 1],
            a3: p[rest + 2],
            a4: p[rest + 3],
            x0: p[rest + 4],
            gamma_width: p[rest + 5].exp(),
        }
    }

    /// Analytic gradient of the model value at `delta` with respect to the
    /// packed parameters; written into `out`.
    pub fn gradient(&self, delta: R, separate_sigma_b2: bool, out: &mut [R]) {
        assert_eq!(out.len(), Self::param_count(separate_sigma_b2));
        let two = R::of(2.0);
        let mut k = 0usize;
        let mut push_gaussian = |k: &mut usize, a: R, center: R, sigma: R, with_width: bool| {
            let z = (delta - center) / sigma;
            let e = (-z * z / two).exp();
            out[*k] = e;
            out[*k + 1] = a * e * z / sigma;
            if with_width {
                // d/d(lnσ) = A·e·z²
                out[*k + 2] = a * e * z * z;
                *k += 3;
            } else {
                *k += 2;
            }
        };
        push_gaussian(&mut k, self.a_z1, self.omega_z1, self.sigma_z1, true);
        push_gaussian(&mut k, self.a_z2, self.omega_z2, self.sigma_z2, true);
        push_gaussian(&mut k, self.a_b1, self.omega_b1, self.sigma_b1, true);
        let sb2 = self.sigma_b2_effective();
        push_gaussian(&mut k, self.a_b2, self.omega_b2, sb2, separate_sigma_b2);
        if !separate_sigma_b2 {
            // Shared width: the B2 Gaussian also contributes to d/d(lnσ_B1).
            let z = (delta - self.omega_b2) / sb2;
            let e = (-z * z / two).exp();
            out[8] += self.a_b2 * e * z * z;
        }
        let u = delta + self.x0;
        let g = self.gamma_width;
        let den = u * u + g * g;
        let den2 = den * den;
        out[k] = R::one(); // a1
        out[k + 1] = delta; // a2
        out[k + 2] = R::one() / den; // a3
        out[k + 3] = u / den; // a4
        // x0 enters both Rayleigh terms.
        out[k + 4] = -self.a3 * two * u / den2 + self.a4 * (g * g - u * u) / den2;
        // d/d(lnγ) = γ·d/dγ with d/dγ = −2γ·(a3 + a4·u)/den².
        out[k + 5] = -two * g * g * (self.a3 + self.a4 * u) / den2;
    }
}
