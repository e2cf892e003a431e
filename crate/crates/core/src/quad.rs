//! Quadrature plumbing shared by the transform and contour modules: a
//! Gauss-Legendre rule generator, fixed-panel integration for smooth complex
//! integrands, and a globally adaptive Gauss-Kronrod 7/15 scheme with the
//! usual embedded-rule error rescaling.

use num_complex::Complex64;
use std::collections::BinaryHeap;
use std::sync::OnceLock;
use thiserror::Error;

/// Nodes (in `(-1,1)`) and weights of the `n`-point Gauss-Legendre rule,
/// computed by Newton iteration on the Legendre polynomial.
pub fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_eval(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (p2, d2) = legendre_eval(n, x);
                dp = d2;
                x -= p2 / d2;
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// Value and derivative of the Legendre polynomial `P_n` at `x`.
fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The cached 12-point Gauss-Legendre rule used for all fixed-panel work.
pub fn gl12() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(12))
}

/// Integrates a smooth complex integrand over `[a, b]` with 12-point
/// Gauss-Legendre panels no wider than `max_panel`.
pub fn gl_panels<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, max_panel: f64) -> Complex64 {
    if b <= a {
        return Complex64::new(0.0, 0.0);
    }
    let n = ((b - a) / max_panel).ceil().max(1.0) as usize;
    let width = (b - a) / n as f64;
    let (nodes, weights) = gl12();
    let mut total = Complex64::new(0.0, 0.0);
    for p in 0..n {
        let lo = a + p as f64 * width;
        let mid = lo + 0.5 * width;
        let half = 0.5 * width;
        for (x, w) in nodes.iter().zip(weights) {
            total += w * half * f(mid + half * x);
        }
    }
    total
}

// 15-point Kronrod extension of the 7-point Gauss rule; standard abscissas
// and weights for [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// Downscales the raw Kronrod-minus-Gauss difference into a realistic error
/// estimate, as in the classic QUADPACK rule.
fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    let min_err = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && min_err > err {
        err = min_err;
    }
    err
}

/// One Gauss-Kronrod 7/15 application on `[a, b]`. Returns the Kronrod value
/// and the rescaled error estimate, or `None` if the integrand produced a
/// non-finite value.
pub fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Option<(Complex64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut fv1 = [Complex64::new(0.0, 0.0); 7];
    let mut fv2 = [Complex64::new(0.0, 0.0); 7];
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut resabs = WGK[7] * fc.norm();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = kronrod * 0.5;
    let mut resasc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }

    let value = kronrod * half;
    if !value.re.is_finite() || !value.im.is_finite() {
        return None;
    }
    let err = rescale_error(
        ((kronrod - gauss) * half).norm(),
        resabs * half.abs(),
        resasc * half.abs(),
    );
    Some((value, err))
}

/// The 15 Gauss-Kronrod evaluation points on `[a, b]` in ascending order as
/// `(x, kronrod_weight, gauss_weight)` triples, with weights scaled to the
/// interval (the embedded Gauss rule has weight 0 at its missing nodes).
/// Summing `wk * f(x)` reproduces the `gk15` value; the magnitude of the
/// difference between the two weighted sums is the raw error indicator.
pub(crate) fn gk15_points(a: f64, b: f64) -> [(f64, f64, f64); 15] {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [(0.0, 0.0, 0.0); 15];
    for j in 0..7 {
        let wg = if j % 2 == 1 { WG[j / 2] * half } else { 0.0 };
        out[j] = (center - half * XGK[j], WGK[j] * half, wg);
        out[14 - j] = (center + half * XGK[j], WGK[j] * half, wg);
    }
    out[7] = (center, WGK[7] * half, WG[3] * half);
    out
}

/// A converged subinterval from the adaptive scheme.
#[derive(Debug, Clone, Copy)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub value: Complex64,
    pub error: f64,
}

/// Result of an adaptive integration: total value, total error estimate,
/// integrand evaluation count, and the final panel decomposition (sorted by
/// left endpoint).
#[derive(Debug, Clone)]
pub struct AdaptiveOutcome {
    pub value: Complex64,
    pub error: f64,
    pub evals: usize,
    pub panels: Vec<Panel>,
}

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("adaptive quadrature used {evals} evaluations without reaching tolerance (error estimate {error:e}, target {tol:e})")]
    Budget {
        error: f64,
        tol: f64,
        evals: usize,
        partial: AdaptiveOutcome,
    },
    #[error("integrand returned a non-finite value near {at}")]
    NonFinite { at: f64 },
}

// Heap entry ordered by error estimate; ties broken by insertion sequence so
// subdivision order (and hence the result, bit for bit) is deterministic.
struct HeapItem {
    error: f64,
    seq: u64,
    idx: usize,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.seq == other.seq
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Globally adaptive Gauss-Kronrod integration over the union of the
/// intervals delimited by `edges` (ascending). The worst panel is bisected
/// until the summed error estimate drops below `abs_tol` or the evaluation
/// budget is exhausted.
pub fn adaptive<F: Fn(f64) -> Complex64>(
    f: &F,
    edges: &[f64],
    abs_tol: f64,
    max_evals: usize,
) -> Result<AdaptiveOutcome, QuadError> {
    assert!(edges.len() >= 2, "need at least one interval");
    let mut panels: Vec<Panel> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut seq: u64 = 0;
    let mut evals = 0usize;

    let push = |a: f64,
                    b: f64,
                    panels: &mut Vec<Panel>,
                    heap: &mut BinaryHeap<HeapItem>,
                    seq: &mut u64,
                    evals: &mut usize|
     -> Result<(), QuadError> {
        let (value, error) = gk15(f, a, b).ok_or(QuadError::NonFinite { at: 0.5 * (a + b) })?;
        *evals += 15;
        let idx = panels.len();
        panels.push(Panel { a, b, value, error });
        // Panels too narrow to split further stay out of the heap; their
        // error estimate still counts toward the total.
        if (b - a) > 1e-14 * (a.abs() + b.abs() + 1.0) {
            heap.push(HeapItem {
                error,
                seq: *seq,
                idx,
            });
            *seq += 1;
        }
        Ok(())
    };

    for w in edges.windows(2) {
        push(w[0], w[1], &mut panels, &mut heap, &mut seq, &mut evals)?;
    }

    loop {
        let total_err: f64 = panels.iter().map(|p| p.error).sum();
        if total_err <= abs_tol {
            break;
        }
        let Some(worst) = heap.pop() else {
            break; // nothing left to refine
        };
        if evals + 30 > max_evals {
            let outcome = finish(panels, evals);
            return Err(QuadError::Budget {
                error: outcome.error,
                tol: abs_tol,
                evals,
                partial: outcome,
            });
        }
        let Panel { a, b, .. } = panels[worst.idx];
        let mid = 0.5 * (a + b);
        // Replace the split panel in place with its left half, append the
        // right half, and requeue both.
        let (lv, le) = gk15(f, a, mid).ok_or(QuadError::NonFinite { at: 0.5 * (a + mid) })?;
        let (rv, re) = gk15(f, mid, b).ok_or(QuadError::NonFinite { at: 0.5 * (mid + b) })?;
        evals += 30;
        panels[worst.idx] = Panel {
            a,
            b: mid,
            value: lv,
            error: le,
        };
        if (mid - a) > 1e-14 * (a.abs() + mid.abs() + 1.0) {
            heap.push(HeapItem {
                error: le,
                seq,
                idx: worst.idx,
            });
            seq += 1;
        }
        let idx = panels.len();
        panels.push(Panel {
            a: mid,
            b,
            value: rv,
            error: re,
        });
        if (b - mid) > 1e-14 * (mid.abs() + b.abs() + 1.0) {
            heap.push(HeapItem {
                error: re,
                seq,
                idx,
            });
            seq += 1;
        }
    }

    let outcome = finish(panels, evals);
    if outcome.error > abs_tol {
        return Err(QuadError::Budget {
            error: outcome.error,
            tol: abs_tol,
            evals,
            partial: outcome,
        });
    }
    Ok(outcome)
}

// Sums panels in spatial order so the result does not depend on refinement
// history beyond the panel set itself.
fn finish(mut panels: Vec<Panel>, evals: usize) -> AdaptiveOutcome {
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.value).sum();
    let error = panels.iter().map(|p| p.error).sum();
    AdaptiveOutcome {
        value,
        error,
        evals,
        panels,
    }
}
