//! Spectral-plane quantities: the branched square root `mu(k) = (1+k^2)^{1/2}`,
//! the dispersion ratio `omega(k) = k/mu(k)`, and the four kernel functions
//! that are even in `mu` and therefore single-valued across the branch cut.
//!
//! `mu` is cut along the vertical segment from `-i` to `i` and normalized so
//! that `mu(k) ~ k` for large `|k|`; consequently `mu(-k) = -mu(k)` and
//! `omega(-k) = omega(k)`. On the cut itself the value is the limit from the
//! right half-plane.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

/// Distance from `k` to `+-i` below which dispersion quantities are rejected
/// instead of returning huge values. All integration paths used by the solver
/// stay much farther from the poles than this.
pub const POLE_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpectralError {
    #[error("wavenumber {k} is within {POLE_GUARD:e} of the dispersion pole at +-i")]
    NearPole { k: Complex64 },
}

/// Argument of `z` with the discontinuity moved to the downward vertical ray,
/// returning an angle in `[-pi/2, 3pi/2)`. Points exactly on the negative
/// imaginary axis get `-pi/2`, which realizes the right-hand limit convention
/// for points on the branch cut.
fn cut_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a < -FRAC_PI_2 {
        a + 2.0 * PI
    } else {
        a
    }
}

/// The branch of `(1 + k^2)^{1/2}` cut along the segment `i[-1,1]`, with
/// `branch_sqrt(k) ~ k` as `|k| -> inf`. On the cut the right-hand limit is
/// returned; at `k = +-i` the value is 0, which downstream kernel evaluation
/// must guard against.
pub fn branch_sqrt(k: Complex64) -> Complex64 {
    let modulus = (Complex64::new(1.0, 0.0) + k * k).norm().sqrt();
    let half_phase = 0.5 * (cut_arg(k - Complex64::I) + cut_arg(k + Complex64::I));
    Complex64::from_polar(modulus, half_phase)
}

/// A wavenumber bundled with its branch root and dispersion value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub k: Complex64,
    /// `(1 + k^2)^{1/2}` on the branch of [`branch_sqrt`].
    pub mu: Complex64,
    /// `omega = k / mu`.
    pub omega: Complex64,
}

/// Computes `mu(k)` and `omega(k) = k/mu(k)`, rejecting wavenumbers within
/// [`POLE_GUARD`] of the poles at `+-i`.
pub fn dispersion(k: Complex64) -> Result<SpectralPoint, SpectralError> {
    if (k - Complex64::I).norm() < POLE_GUARD || (k + Complex64::I).norm() < POLE_GUARD {
        return Err(SpectralError::NearPole { k });
    }
    let mu = branch_sqrt(k);
    Ok(SpectralPoint { k, mu, omega: k / mu })
}

/// The four kernel combinations of `mu`, `omega` and a time lag `s` from which
/// every solution integrand is assembled. Each is invariant under the branch
/// flip `mu -> -mu` (which also flips `omega`), hence continuous across the
/// cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernels {
    /// `cos(omega s)`
    pub kc: Complex64,
    /// `sin(omega s) / mu`
    pub ks: Complex64,
    /// `mu sin(omega s)`
    pub kms: Complex64,
    /// `omega sin(omega s)`
    pub kos: Complex64,
}

impl SpectralPoint {
    /// Kernel values at time lag `s`.
    pub fn kernels(&self, s: f64) -> Kernels {
        let arg = self.omega * s;
        let kc = arg.cos();
        let sin = arg.sin();
        Kernels {
            kc,
            ks: sin / self.mu,
            kms: self.mu * sin,
            kos: self.omega * sin,
        }
    }

    /// The same wavenumber on the opposite sheet (`mu -> -mu`). Used by tests
    /// to confirm branch-flip invariance of assembled integrands.
    pub fn flipped(&self) -> SpectralPoint {
        SpectralPoint {
            k: self.k,
            mu: -self.mu,
            omega: -self.omega,
        }
    }
}

/// Convenience wrapper: dispersion plus kernel evaluation in one call.
pub fn kernels(k: Complex64, s: f64) -> Result<Kernels, SpectralError> {
    Ok(dispersion(k)?.kernels(s))
}
