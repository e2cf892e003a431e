//! Solver for the linearized classical Boussinesq system on the half-line,
//!
//! ```text
//!     r_t + q_x = 0,            x > 0, t > 0,
//!     q_t + r_x - q_xxt = 0,
//! ```
//!
//! with initial data `r(x,0) = r0(x)`, `q(x,0) = q0(x)` and the Dirichlet
//! boundary condition `q(0,t) = g0(t)`.
//!
//! The solution is evaluated from its explicit contour-integral representation
//! obtained by the unified transform method: a Fourier-type integral
//! over the real wavenumber line plus integrals over a closed contour
//! encircling the dispersion pole at `k = i`. The representation is exact;
//! the only errors are quadrature errors, which are controlled and reported.
//!
//! Module layout:
//!
//! * [`spectral`]: the branched root `mu(k) = (1+k^2)^{1/2}`, the dispersion
//!   ratio `omega(k) = k/mu(k)`, and the even kernel functions.
//! * [`quad`]: Gauss-Legendre and adaptive Gauss-Kronrod quadrature plumbing.
//! * [`transforms`]: data profiles, half-line Fourier transforms, and the
//!   finite-time cosine/sine transforms of boundary data.
//! * [`contours`]: integration over the truncated real line and over the
//!   circle about `k = i`, plus exact residue reference values.
//! * [`solver`]: assembly and evaluation of the solution formulae at points
//!   and grids; the global-relation identity check.
//! * [`oracle`]: an independent finite-difference solver used as ground truth.
//! * [`verify`]: residue identities, PDE residuals, initial/boundary checks,
//!   and trace compatibility.
//! * [`cli`]: config parsing and the `solve`/`verify`/`fig3`/`oracle-compare`
//!   command modes.

pub mod cli;
pub mod contours;
pub mod oracle;
pub mod quad;
pub mod solver;
pub mod spectral;
pub mod transforms;
pub mod verify;
