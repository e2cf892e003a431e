//! The two integration paths of the solution representation: the real
//! wavenumber line (truncated to `[-K, K]`) and a closed counterclockwise
//! circle around `k = i` onto which the boundary-term integrals are deformed.
//!
//! The circle uses the periodic trapezoid rule, which is spectrally accurate
//! for integrands analytic in an annulus around the path; node counts double
//! until the estimate stabilizes. The real line uses globally adaptive
//! Gauss-Kronrod panels seeded on a geometric grid, plus an empirical
//! `C/|k|^2` tail bound beyond the truncation.

use crate::quad::{self, Panel, QuadError};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

/// Center of the deformed contour: the dispersion pole at `k = i`.
pub const CIRCLE_CENTER: Complex64 = Complex64::new(0.0, 1.0);

/// Closed circular contour `k = i + rho e^{i theta}`, traversed
/// counterclockwise. The radius must keep `-i` outside, so `0 < rho < 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleSpec {
    pub radius: f64,
    /// Nodes for the first trapezoid pass; doubled until converged.
    pub start_nodes: usize,
    pub max_nodes: usize,
    pub tol: f64,
}

impl Default for CircleSpec {
    fn default() -> Self {
        CircleSpec {
            radius: 0.5,
            start_nodes: 32,
            max_nodes: 512,
            tol: 1e-9,
        }
    }
}

impl CircleSpec {
    pub fn with_radius(radius: f64) -> Self {
        CircleSpec {
            radius,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ContourError> {
        if !(self.radius > 0.0 && self.radius < 2.0) {
            return Err(ContourError::InvalidSpec {
                reason: format!(
                    "circle radius {} must lie in (0, 2) to enclose i but not -i",
                    self.radius
                ),
            });
        }
        if self.start_nodes < 16 || self.start_nodes % 2 != 0 {
            return Err(ContourError::InvalidSpec {
                reason: format!("node count {} must be even and >= 16", self.start_nodes),
            });
        }
        if self.max_nodes < self.start_nodes {
            return Err(ContourError::InvalidSpec {
                reason: format!(
                    "node budget {} is below the starting count {}",
                    self.max_nodes, self.start_nodes
                ),
            });
        }
        if !(self.tol > 0.0) {
            return Err(ContourError::InvalidSpec {
                reason: format!("tolerance {} must be positive", self.tol),
            });
        }
        Ok(())
    }
}

/// Truncated real line `[-K, K]` with adaptive panel quadrature. Assumes the
/// integrand decays at least like `|k|^-2`; violation is detected empirically.
#[derive(Debug, Clone, PartialEq)]
pub struct RealLineSpec {
    /// Truncation half-width `K`.
    pub half_width: f64,
    pub tol: f64,
    pub max_evals: usize,
}

impl Default for RealLineSpec {
    fn default() -> Self {
        RealLineSpec {
            half_width: 2000.0,
            tol: 1e-8,
            max_evals: 4_000_000,
        }
    }
}

impl RealLineSpec {
    pub fn validate(&self) -> Result<(), ContourError> {
        if !(self.half_width > 0.0) {
            return Err(ContourError::InvalidSpec {
                reason: format!("half-width {} must be positive", self.half_width),
            });
        }
        if !(self.tol > 0.0) {
            return Err(ContourError::InvalidSpec {
                reason: format!("tolerance {} must be positive", self.tol),
            });
        }
        Ok(())
    }
}

/// One of the two integration paths.
#[derive(Debug, Clone, PartialEq)]
pub enum ContourSpec {
    CircleAboutI(CircleSpec),
    RealLine(RealLineSpec),
}

impl ContourSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ContourSpec::CircleAboutI(_) => "circle-about-i",
            ContourSpec::RealLine(_) => "real-line",
        }
    }

    pub fn validate(&self) -> Result<(), ContourError> {
        match self {
            ContourSpec::CircleAboutI(c) => c.validate(),
            ContourSpec::RealLine(r) => r.validate(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub err_estimate: f64,
    pub nodes_used: usize,
}

#[derive(Debug, Error)]
pub enum ContourError {
    #[error("invalid contour parameters: {reason}")]
    InvalidSpec { reason: String },
    #[error(
        "node budget exhausted: error estimate {err:e} > tolerance {tol} after {n} nodes",
        err = .best.err_estimate,
        n = .best.nodes_used
    )]
    BudgetExhausted { best: QuadratureResult, tol: f64 },
    #[error("integrand decays like |k|^{power:.2} on [{lo:.0}, {hi:.0}], slower than the required |k|^-3/2")]
    DecayViolation { lo: f64, hi: f64, power: f64 },
    #[error("integrand returned a non-finite value at k = {at}")]
    NonFinite { at: Complex64 },
}

/// Integrates `f` over the counterclockwise circle of `spec` around `k = i`
/// by the periodic trapezoid rule, doubling the node count until two passes
/// agree within `spec.tol`.
pub fn integrate_circle<F: Fn(Complex64) -> Complex64>(
    f: F,
    spec: &CircleSpec,
) -> Result<QuadratureResult, ContourError> {
    spec.validate()?;
    let rho = spec.radius;
    // vals[j] holds f(k_j) * dk/dtheta at theta_j = 2 pi j / n, so the
    // trapezoid value is (2 pi / n) * sum(vals).
    let eval = |j: usize, n: usize| -> Result<Complex64, ContourError> {
        let theta = 2.0 * PI * j as f64 / n as f64;
        let dir = Complex64::from_polar(1.0, theta);
        let k = CIRCLE_CENTER + rho * dir;
        let v = f(k);
        if !v.is_finite() {
            return Err(ContourError::NonFinite { at: k });
        }
        Ok(v * Complex64::I * rho * dir)
    };
    let sum_to_value = |vals: &[Complex64]| -> Complex64 {
        let s: Complex64 = vals.iter().sum();
        2.0 * PI / vals.len() as f64 * s
    };

    let mut n = spec.start_nodes;
    let mut vals: Vec<Complex64> = (0..n).map(|j| eval(j, n)).collect::<Result<_, _>>()?;
    let mut value = sum_to_value(&vals);
    let mut err = f64::INFINITY;
    while 2 * n <= spec.max_nodes {
        let n2 = 2 * n;
        let mut vals2 = Vec::with_capacity(n2);
        for j in 0..n {
            vals2.push(vals[j]);
            vals2.push(eval(2 * j + 1, n2)?);
        }
        let value2 = sum_to_value(&vals2);
        err = (value2 - value).norm();
        n = n2;
        vals = vals2;
        value = value2;
        if err < spec.tol {
            return Ok(QuadratureResult {
                value,
                err_estimate: err,
                nodes_used: n,
            });
        }
    }
    Err(ContourError::BudgetExhausted {
        best: QuadratureResult {
            value,
            err_estimate: err,
            nodes_used: n,
        },
        tol: spec.tol,
    })
}

/// Panel decomposition of the truncated real line together with the tail
/// bound for `|k| > K`. Shared by [`integrate_realline`] and the solver's
/// grid cache, which reuses the panels across evaluation points.
pub(crate) struct ReallineDecomposition {
    pub panels: Vec<Panel>,
    pub tail_bound: f64,
    pub evals: usize,
}

pub(crate) fn realline_decompose<F: Fn(f64) -> Complex64>(
    f: &F,
    spec: &RealLineSpec,
) -> Result<ReallineDecomposition, ContourError> {
    spec.validate()?;
    let big_k = spec.half_width;

    // Empirical decay check and tail bound: sample |f| on [K/2, K] (both
    // signs), fit a power law, and bound the tail by int_K^inf C/k^2.
    let multipliers = [0.5, 0.55, 0.62, 0.68, 0.75, 0.82, 0.9, 1.0];
    let mut lnk = Vec::new();
    let mut lns = Vec::new();
    let mut coef = 0.0_f64;
    for m in multipliers {
        let k = m * big_k;
        let (vp, vm) = (f(k), f(-k));
        if !vp.is_finite() || !vm.is_finite() {
            let at = if vp.is_finite() { -k } else { k };
            return Err(ContourError::NonFinite {
                at: Complex64::new(at, 0.0),
            });
        }
        let s = vp.norm().max(vm.norm());
        coef = coef.max(s * k * k);
        if s > 1e-280 {
            lnk.push(k.ln());
            lns.push(s.ln());
        }
    }
    // A fit needs enough live samples; all-negligible tails trivially pass.
    if lnk.len() >= 4 {
        let n = lnk.len() as f64;
        let (mu, mv) = (
            lnk.iter().sum::<f64>() / n,
            lns.iter().sum::<f64>() / n,
        );
        let cov: f64 = lnk.iter().zip(&lns).map(|(u, v)| (u - mu) * (v - mv)).sum();
        let var: f64 = lnk.iter().map(|u| (u - mu) * (u - mu)).sum();
        let power = -cov / var;
        if power < 1.5 {
            return Err(ContourError::DecayViolation {
                lo: 0.5 * big_k,
                hi: big_k,
                power,
            });
        }
    }
    // The sampled coefficient can slightly undershoot the asymptotic constant
    // (|f| k^2 may still be climbing at K), so pad the bound.
    let tail_bound = 1.25 * 2.0 * coef / big_k;

    // Geometric seed panels: fine near the origin where transforms peak,
    // coarse in the oscillatory far field where the refinement loop takes
    // over.
    let mut pos = Vec::new();
    let mut v = 0.5_f64.min(big_k);
    while v < big_k {
        pos.push(v);
        v *= 2.0;
    }
    pos.push(big_k);
    let mut edges = Vec::with_capacity(2 * pos.len() + 1);
    for &p in pos.iter().rev() {
        edges.push(-p);
    }
    edges.push(0.0);
    edges.extend(&pos);

    match quad::adaptive(f, &edges, spec.tol, spec.max_evals) {
        Ok(out) => Ok(ReallineDecomposition {
            panels: out.panels,
            tail_bound,
            evals: out.evals + 2 * multipliers.len(),
        }),
        Err(QuadError::Budget { partial, tol, .. }) => Err(ContourError::BudgetExhausted {
            best: QuadratureResult {
                value: partial.value,
                err_estimate: partial.error + tail_bound,
                nodes_used: partial.evals,
            },
            tol,
        }),
        Err(QuadError::NonFinite { at }) => Err(ContourError::NonFinite {
            at: Complex64::new(at, 0.0),
        }),
    }
}

/// Integrates `f` over `[-K, K]` adaptively. The error estimate includes the
/// truncation tail bound, so slowly converging truncations are reported
/// honestly rather than hidden.
pub fn integrate_realline<F: Fn(f64) -> Complex64>(
    f: F,
    spec: &RealLineSpec,
) -> Result<QuadratureResult, ContourError> {
    let dec = realline_decompose(&f, spec)?;
    let value = dec.panels.iter().map(|p| p.value).sum();
    let err_estimate = dec.panels.iter().map(|p| p.error).sum::<f64>() + dec.tail_bound;
    Ok(QuadratureResult {
        value,
        err_estimate,
        nodes_used: dec.evals,
    })
}

/// The three families of closed-contour monomial integrals that arise from
/// expanding the trigonometric kernels in uniformly convergent series. Each
/// family member has a closed-form value by the residue theorem, which
/// [`residue_reference`] returns and the verification suite reproduces
/// numerically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidueFamily {
    /// `k^{2j-1} / (1+k^2)^j`, the series terms of `cos(omega t)/k`:
    /// integral `i pi` for `j >= 1`, `0` for `j = 0` (no pole inside).
    CosOverK,
    /// `k^{2j+1} / (1+k^2)^{j+2}`, the series terms of `sin(omega s)/mu^3`:
    /// integral `0` for every `j` (the residue at `i` vanishes).
    SinOverMuCubed,
    /// `k^{2j+1} / (1+k^2)^{j+1}`, the series terms of
    /// `k cos(omega t)/(1+k^2)`: integral `i pi` for every `j`.
    KCosOverMuSquared,
}

/// Exact value of the family-`family` integral with index `j` over the
/// counterclockwise circle around `i`.
pub fn residue_reference(j: u32, family: ResidueFamily) -> Complex64 {
    let i_pi = Complex64::new(0.0, PI);
    match family {
        ResidueFamily::CosOverK => {
            if j == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                i_pi
            }
        }
        ResidueFamily::SinOverMuCubed => Complex64::new(0.0, 0.0),
        ResidueFamily::KCosOverMuSquared => i_pi,
    }
}

/// The monomial integrand belonging to `residue_reference(j, family)`.
pub fn residue_family_integrand(
    j: u32,
    family: ResidueFamily,
) -> impl Fn(Complex64) -> Complex64 {
    move |k: Complex64| {
        let denom = Complex64::new(1.0, 0.0) + k * k;
        match family {
            ResidueFamily::CosOverK => k.powi(2 * j as i32 - 1) * denom.powi(-(j as i32)),
            ResidueFamily::SinOverMuCubed => {
                k.powi(2 * j as i32 + 1) * denom.powi(-(j as i32 + 2))
            }
            ResidueFamily::KCosOverMuSquared => {
                k.powi(2 * j as i32 + 1) * denom.powi(-(j as i32 + 1))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::dispersion;
    use crate::transforms::{halfline_ft, DataProfile};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spec_validation() {
        assert!(CircleSpec::default().validate().is_ok());
        assert!(CircleSpec::with_radius(2.5).validate().is_err());
        assert!(CircleSpec::with_radius(0.0).validate().is_err());
        let odd = CircleSpec {
            start_nodes: 17,
            ..CircleSpec::default()
        };
        assert!(odd.validate().is_err());
        let tiny = CircleSpec {
            start_nodes: 8,
            ..CircleSpec::default()
        };
        assert!(tiny.validate().is_err());
        let shrunk = CircleSpec {
            max_nodes: 16,
            ..CircleSpec::default()
        };
        assert!(shrunk.validate().is_err());

        assert!(RealLineSpec::default().validate().is_ok());
        let bad = RealLineSpec {
            half_width: -1.0,
            ..RealLineSpec::default()
        };
        assert!(bad.validate().is_err());

        assert_eq!(
            ContourSpec::CircleAboutI(CircleSpec::default()).kind(),
            "circle-about-i"
        );
        assert_eq!(
            ContourSpec::RealLine(RealLineSpec::default()).kind(),
            "real-line"
        );
    }

    #[test]
    fn circle_half_residue_at_pole_pair() {
        // k/(1+k^2) has residue 1/2 at k = i; only that pole is enclosed.
        let out = integrate_circle(|k| k / (1.0 + k * k), &CircleSpec::default()).unwrap();
        assert!((out.value - c(0.0, PI)).norm() < 1e-10);
        assert!(out.nodes_used <= 512);
    }

    #[test]
    fn circle_exponential_residue() {
        // e^{ikx} ik/(1+k^2) integrates to -pi e^{-x}.
        for x in [0.5, 1.0, 2.0] {
            let out = integrate_circle(
                |k| (Complex64::I * k * x).exp() * Complex64::I * k / (1.0 + k * k),
                &CircleSpec::default(),
            )
            .unwrap();
            assert!(
                (out.value - c(-PI * (-x).exp(), 0.0)).norm() < 1e-10,
                "x = {x}"
            );
        }
    }

    #[test]
    fn circle_entire_integrands_vanish() {
        for f in [
            (|_k: Complex64| c(1.0, 0.0)) as fn(Complex64) -> Complex64,
            |k: Complex64| k * k,
            |k: Complex64| (Complex64::I * k).exp(),
        ] {
            let out = integrate_circle(f, &CircleSpec::default()).unwrap();
            assert!(out.value.norm() < 1e-12);
        }
    }

    #[test]
    fn residue_families_match_references() {
        let spec = CircleSpec::default();
        for family in [
            ResidueFamily::CosOverK,
            ResidueFamily::SinOverMuCubed,
            ResidueFamily::KCosOverMuSquared,
        ] {
            for j in 0..=5 {
                let out = integrate_circle(residue_family_integrand(j, family), &spec).unwrap();
                let want = residue_reference(j, family);
                assert!(
                    (out.value - want).norm() < 1e-10,
                    "{family:?} j = {j}: {} vs {want}",
                    out.value
                );
            }
        }
        // Spot values of the reference itself.
        assert_eq!(residue_reference(0, ResidueFamily::CosOverK), c(0.0, 0.0));
        assert_eq!(residue_reference(3, ResidueFamily::CosOverK), c(0.0, PI));
        assert_eq!(
            residue_reference(4, ResidueFamily::SinOverMuCubed),
            c(0.0, 0.0)
        );
        assert_eq!(
            residue_reference(2, ResidueFamily::KCosOverMuSquared),
            c(0.0, PI)
        );
    }

    #[test]
    fn circle_radius_invariance() {
        // A kernel-type integrand (entire apart from the enclosed essential
        // singularity at i and the pole at -i, both shared by all radii).
        let f = |k: Complex64| {
            let pt = dispersion(k).unwrap();
            (Complex64::I * k * 0.7).exp() * (pt.omega * 0.9).cos() * k / (1.0 + k * k)
        };
        let values: Vec<Complex64> = [0.25, 0.5, 1.0]
            .iter()
            .map(|&rho| integrate_circle(f, &CircleSpec::with_radius(rho)).unwrap().value)
            .collect();
        for v in &values[1..] {
            assert!((v - values[0]).norm() < 1e-8, "{values:?}");
        }
    }

    #[test]
    fn circle_analytic_vanishing_of_reflected_transform() {
        // e^{ikx} qhat(-k) is analytic in the upper half-plane (the transform
        // is analytic for Im(-k) <= 0), so its closed-contour integral is 0.
        let q0 = DataProfile::x2_exp();
        let f = |k: Complex64| {
            (Complex64::I * k * 1.3).exp() * halfline_ft(&q0, -k).unwrap()
        };
        let out = integrate_circle(f, &CircleSpec::default()).unwrap();
        assert!(out.value.norm() < 1e-8, "{}", out.value);
    }

    #[test]
    fn circle_budget_exhaustion_reported() {
        // A pole hugging the contour from outside slows trapezoid convergence
        // enough to blow a tiny budget; a larger budget resolves it.
        let pole = CIRCLE_CENTER + c(0.505, 0.0);
        let f = |k: Complex64| (k - pole).finv();
        let starved = CircleSpec {
            max_nodes: 64,
            tol: 1e-12,
            ..CircleSpec::default()
        };
        match integrate_circle(f, &starved) {
            Err(ContourError::BudgetExhausted { best, tol }) => {
                assert_eq!(tol, 1e-12);
                assert!(best.nodes_used == 64);
            }
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
        let roomy = CircleSpec {
            max_nodes: 8192,
            tol: 1e-12,
            ..CircleSpec::default()
        };
        let out = integrate_circle(f, &roomy).unwrap();
        // No singularity enclosed: exact value 0.
        assert!(out.value.norm() < 1e-10);
    }

    #[test]
    fn circle_nonfinite_integrand_detected() {
        let f = |k: Complex64| {
            if k.re > 1e-12 {
                c(f64::NAN, 0.0)
            } else {
                c(1.0, 0.0)
            }
        };
        assert!(matches!(
            integrate_circle(f, &CircleSpec::default()),
            Err(ContourError::NonFinite { .. })
        ));
    }

    #[test]
    fn realline_gaussian() {
        let out = integrate_realline(
            |k| c((-k * k).exp(), 0.0),
            &RealLineSpec::default(),
        )
        .unwrap();
        assert_relative_eq!(out.value.re, PI.sqrt(), epsilon = 1e-10);
        assert!(out.value.im.abs() < 1e-14);
    }

    #[test]
    fn realline_lorentzian_with_honest_tail() {
        // int 1/(1+k^2) = pi, truncation error ~ 2/K; the estimate must
        // cover the actual error.
        let spec = RealLineSpec::default();
        let out = integrate_realline(|k| c(1.0 / (1.0 + k * k), 0.0), &spec).unwrap();
        let actual = (out.value.re - PI).abs();
        assert!(actual < 2.1 / spec.half_width);
        assert!(actual <= out.err_estimate);
    }

    #[test]
    fn realline_inverts_a_transform() {
        // (1/2pi) int e^{ikx} qhat(k) dk recovers q0(x) for x > 0; here
        // checked at x = 1 without the prefactor.
        let q0 = DataProfile::x2_exp();
        let out = integrate_realline(
            |k| (Complex64::I * k).exp() * halfline_ft(&q0, c(k, 0.0)).unwrap(),
            &RealLineSpec::default(),
        )
        .unwrap();
        let want = 2.0 * PI * (-1.0_f64).exp();
        assert!((out.value - c(want, 0.0)).norm() < 1e-5);
    }

    #[test]
    fn realline_slow_decay_rejected() {
        let f = |k: f64| c(1.0 / (1.0 + k * k).sqrt(), 0.0);
        match integrate_realline(f, &RealLineSpec::default()) {
            Err(ContourError::DecayViolation { power, .. }) => {
                assert!((power - 1.0).abs() < 0.1, "fitted power {power}");
            }
            other => panic!("expected decay violation, got {other:?}"),
        }
    }

    #[test]
    fn realline_budget_exhaustion_reported() {
        // Heavy oscillation with a starving budget.
        let f = |k: f64| (Complex64::new(0.0, 40.0 * k)).exp() / (1.0 + k * k);
        let spec = RealLineSpec {
            tol: 1e-14,
            max_evals: 2_000,
            ..RealLineSpec::default()
        };
        assert!(matches!(
            integrate_realline(f, &spec),
            Err(ContourError::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn trapezoid_error_collapses_under_doubling() {
        // Spectral accuracy: doubling the nodes shrinks the error by orders
        // of magnitude. The pole at i + 0.7 (outside the path) slows
        // convergence just enough to keep both errors above the 1e-16 noise
        // floor; the exact value is 0 since nothing is enclosed.
        let pole = CIRCLE_CENTER + c(0.7, 0.0);
        let run = |start: usize| {
            let spec = CircleSpec {
                start_nodes: start,
                max_nodes: 2 * start,
                tol: f64::INFINITY,
                ..CircleSpec::default()
            };
            // tol = inf accepts immediately after the first doubling, making
            // the returned value the 2*start-node trapezoid result.
            integrate_circle(|k| (k - pole).finv(), &spec)
                .unwrap()
                .value
        };
        let err32 = run(16).norm();
        let err64 = run(32).norm();
        assert!(err32 > 1e-13, "test integrand converged too fast: {err32:e}");
        assert!(err64 < 1e-2 * err32, "{err64:e} vs {err32:e}");
    }
}
