//! Adaptive Gauss-Kronrod (7/15) quadrature on intervals, plus a dyadic-shell
//! driver for integrands with a power-type singularity at `t = 0`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Number of dyadic shells `[2^{-k-1}, 2^{-k}]` used toward a singular endpoint.
pub const SHELLS: usize = 64;
/// Number of deepest shells inspected by the divergence detector.
pub const DETECTOR_SHELLS: usize = 8;
/// Asymptotic shell ratio at or above which an integral is declared divergent.
/// A pure power `t^gamma` has shell ratio `2^{-(gamma+1)}`, which reaches 1
/// exactly at the integrability threshold `gamma = -1`.
pub const DIVERGENCE_RATIO: f64 = 0.999;
/// Values above this are treated as overflow.
pub const OVERFLOW_GUARD: f64 = 1e300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

/// One 15-point Kronrod panel: `(value, error estimate)`.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let err = (res_k - res_g) * half;
    let value = res_k * half;
    (
        value,
        rescale_error(err, res_abs * half.abs(), res_asc * half.abs()),
    )
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive integration of `f` over `[a, b]`, initially split at
/// the `breakpoints` that fall inside the interval. The worst panel is
/// bisected until the summed error meets `max(abs_tol, rel_tol |I|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if !(a < b) {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            intervals: 0,
        });
    }
    let mut cuts = vec![a];
    cuts.extend(breakpoints.iter().copied().filter(|x| *x > a && *x < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut heap = BinaryHeap::new();
    let mut settled_value = 0.0;
    let mut settled_err = 0.0;
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in cuts.windows(2) {
        let (v, e) = gk15(&f, w[0], w[1]);
        if !v.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite integrand on [{}, {}]",
                w[0], w[1]
            )));
        }
        total += v;
        total_err += e;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            err: e,
        });
    }
    let mut count = heap.len();
    while total_err > cfg.abs_tol.max(cfg.rel_tol * total.abs()) && count < cfg.max_intervals {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) <= 4.0 * f64::EPSILON * worst.b.abs()
        {
            // cannot refine further in double precision
            settled_value += worst.value;
            settled_err += worst.err;
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite integrand near t = {mid}"
            )));
        }
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
        count += 1;
    }
    // re-sum to shed accumulated update error
    let value = settled_value + heap.iter().map(|p| p.value).sum::<f64>();
    let abs_error = settled_err + heap.iter().map(|p| p.err).sum::<f64>();
    Ok(QuadResult {
        value,
        abs_error,
        intervals: count,
    })
}

/// Integral over `(0, 1]` for integrands with a possible power singularity
/// at `0`, computed shell by shell on `[2^{-k-1}, 2^{-k}]`.
///
/// The ratio of consecutive shell integrals deep in the singular zone
/// estimates `2^{-(gamma+1)}` for an integrand `~ t^gamma`; the integral is
/// declared divergent when the deepest [`DETECTOR_SHELLS`] ratios are all
/// `>= DIVERGENCE_RATIO`. Otherwise the remainder below the last shell is
/// added as a geometric tail.
pub fn integrate_singular_at_zero<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let shell_cfg = QuadConfig {
        abs_tol: cfg.abs_tol / SHELLS as f64,
        ..*cfg
    };
    let mut shells = Vec::with_capacity(SHELLS);
    let mut total = 0.0;
    let mut err = 0.0;
    let mut intervals = 0;
    for k in 0..SHELLS {
        let hi = 0.5f64.powi(k as i32);
        let lo = 0.5 * hi;
        let r = match integrate(&f, lo, hi, breakpoints, &shell_cfg) {
            Ok(r) => r,
            Err(Error::Numerical(_)) => {
                return Err(Error::Divergent {
                    shell_ratio: f64::INFINITY,
                })
            }
            Err(e) => return Err(e),
        };
        if !r.value.is_finite() || r.value.abs() > OVERFLOW_GUARD {
            return Err(Error::Divergent {
                shell_ratio: f64::INFINITY,
            });
        }
        total += r.value;
        err += r.abs_error;
        intervals += r.intervals;
        shells.push(r.value);
    }
    let ratios: Vec<f64> = shells
        .windows(2)
        .skip(SHELLS - 1 - DETECTOR_SHELLS)
        .map(|w| {
            if w[0] != 0.0 {
                (w[1] / w[0]).abs()
            } else {
                0.0
            }
        })
        .collect();
    let last_ratio = *ratios.last().unwrap_or(&0.0);
    if ratios.iter().all(|r| *r >= DIVERGENCE_RATIO) {
        return Err(Error::Divergent {
            shell_ratio: last_ratio,
        });
    }
    if last_ratio > 0.0 && last_ratio < 1.0 {
        let last = *shells.last().unwrap();
        let tail = last * last_ratio / (1.0 - last_ratio);
        let prev_ratio = ratios[ratios.len() - 2];
        total += tail;
        err += (tail * (last_ratio - prev_ratio) / (1.0 - last_ratio)).abs();
    }
    Ok(QuadResult {
        value: total,
        abs_error: err,
        intervals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact_on_one_panel() {
        let r = integrate(
            |x| x.powi(5) - 3.0 * x * x,
            0.0,
            2.0,
            &[],
            &QuadConfig::default(),
        )
        .unwrap();
        assert!((r.value - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn steep_layer_with_hints() {
        // derivative of atan((x - c)/w) integrates to the jump
        let c = 0.3;
        let w = 1e-7;
        let f = |x: f64| (w / ((x - c).powi(2) + w * w)) / std::f64::consts::PI;
        let exact = (((1.0 - c) / w).atan() - ((0.0 - c) / w).atan()) / std::f64::consts::PI;
        let hints = [c - 10.0 * w, c, c + 10.0 * w];
        let r = integrate(f, 0.0, 1.0, &hints, &QuadConfig::default()).unwrap();
        assert!((r.value - exact).abs() < 1e-9, "{} vs {exact}", r.value);
    }

    #[test]
    fn integrable_singularity_and_tail() {
        // int_0^1 t^{-0.9} dt = 10
        let r = integrate_singular_at_zero(|t| t.powf(-0.9), &[], &QuadConfig::default()).unwrap();
        assert!((r.value - 10.0).abs() < 1e-8, "{}", r.value);
        // int_0^1 t^{-1/2} dt = 2
        let r = integrate_singular_at_zero(|t| t.powf(-0.5), &[], &QuadConfig::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn detects_divergence_at_and_beyond_threshold() {
        for g in [-1.0, -1.2, -2.0] {
            let r = integrate_singular_at_zero(|t: f64| t.powf(g), &[], &QuadConfig::default());
            assert!(
                matches!(r, Err(Error::Divergent { .. })),
                "gamma = {g}: {r:?}"
            );
        }
        assert!(
            integrate_singular_at_zero(|t: f64| t.powf(-0.99), &[], &QuadConfig::default()).is_ok()
        );
    }
}
