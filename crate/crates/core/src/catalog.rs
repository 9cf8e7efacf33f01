//! Test functions on the unit ball of C^n.
//!
//! Radial members are written as `u(z) = g(|z|^2)` through a [`RadialProfile`];
//! max-type members (truncated fundamental solutions) carry both the exact
//! piecewise form and a smoothed form built from
//! `max_eps(a, b) = (a + b + sqrt((a - b)^2 + eps^2)) / 2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{eigenvalues, HermitianMatrix, Spectrum, FD_HERMITIAN_TOL};

/// Default finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

pub const CATALOG_NAMES: [&str; 8] = [
    "quadratic_exhaustion",
    "fundamental_solution",
    "ex1_family",
    "ex2_family",
    "ex3_family",
    "smooth_radial_polynomial",
    "pluriharmonic_probe",
    "anisotropic_quadratic",
];

/// `max_eps(a, b)`, evaluated without cancellation when `a << b`.
pub fn smooth_max(a: f64, b: f64, eps: f64) -> f64 {
    b + soft_plus(a - b, eps)
}

// (d + sqrt(d^2 + eps^2)) / 2
fn soft_plus(d: f64, eps: f64) -> f64 {
    let s = d.hypot(eps);
    if d >= 0.0 {
        0.5 * (d + s)
    } else {
        0.5 * eps * eps / (s - d)
    }
}

/// `n * (n-1) * ... * 1` as a float.
pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Exponent `a = n/m - 1` of the fundamental solution `1 - t^{-a}`.
pub fn fundamental_exponent(n: usize, m: usize) -> Result<f64> {
    if m == 0 || m > n {
        return Err(Error::InvalidParameters(format!(
            "need 1 <= m <= n, got n={n}, m={m}"
        )));
    }
    if m == n {
        return Err(Error::InvalidParameters(format!(
            "m = n = {n}: the exponent 2 - 2n/m vanishes, there is no singular fundamental solution; need m < n"
        )));
    }
    Ok(n as f64 / m as f64 - 1.0)
}

/// Total `H_m` mass of any truncation `max(1 - |z|^{2-2n/m}, -M)` of the
/// fundamental solution: `(4 pi)^n (n/m - 1)^m`, independent of `M`.
pub fn truncated_mass(n: usize, m: usize) -> Result<f64> {
    let a = fundamental_exponent(n, m)?;
    Ok((4.0 * PI).powi(n as i32) * a.powi(m as i32))
}

/// The literature constant `2 pi^n (n/m - 1)^m / (m! (n-m)!)` quoted for the
/// same mass under a different operator normalization.
///
/// It equals [`truncated_mass`] divided by `4^n m! (n-m)! / 2`.
pub fn quoted_mass_constant(n: usize, m: usize) -> Result<f64> {
    let a = fundamental_exponent(n, m)?;
    Ok(2.0 * PI.powi(n as i32) * a.powi(m as i32) / (factorial(m) * factorial(n - m)))
}

/// Shape of a radial profile `g(t)`, `t = |z|^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// `sum_i coeffs[i] t^i`.
    Polynomial { coeffs: Vec<f64> },
    /// `1 - t^{-exponent}`.
    Fundamental { exponent: f64 },
    /// `scale * max(1 - t^{-exponent}, floor)`; with `smoothing = Some(eps)`
    /// the max is replaced by `max_eps` and the boundary value is subtracted
    /// so that `g(1) = 0`.
    Truncated {
        exponent: f64,
        floor: f64,
        scale: f64,
        smoothing: Option<f64>,
    },
    /// `sum coef * shape`.
    Combination { terms: Vec<(f64, Shape)> },
}

impl Shape {
    fn value(&self, t: f64) -> f64 {
        match self {
            Shape::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
            Shape::Fundamental { exponent } => 1.0 - t.powf(-exponent),
            Shape::Truncated {
                exponent,
                floor,
                scale,
                smoothing,
            } => {
                let f = 1.0 - t.powf(-exponent);
                match smoothing {
                    None => scale * f.max(*floor),
                    Some(eps) => {
                        let d = if f.is_finite() {
                            f - floor
                        } else {
                            f64::NEG_INFINITY
                        };
                        let v = if d == f64::NEG_INFINITY {
                            0.0
                        } else {
                            soft_plus(d, *eps)
                        };
                        scale * (v - soft_plus(-floor, *eps))
                    }
                }
            }
            Shape::Combination { terms } => terms.iter().map(|(c, s)| c * s.value(t)).sum(),
        }
    }

    /// `(g, g', g'')` at `t`.
    fn jet(&self, t: f64) -> Result<[f64; 3]> {
        Ok(match self {
            Shape::Polynomial { coeffs } => {
                let mut v = [0.0; 3];
                for (i, c) in coeffs.iter().enumerate() {
                    let i_f = i as f64;
                    v[0] += c * t.powi(i as i32);
                    if i >= 1 {
                        v[1] += c * i_f * t.powi(i as i32 - 1);
                    }
                    if i >= 2 {
                        v[2] += c * i_f * (i_f - 1.0) * t.powi(i as i32 - 2);
                    }
                }
                v
            }
            Shape::Fundamental { exponent: a } => {
                let x = t.powf(-a);
                [1.0 - x, a * x / t, -a * (a + 1.0) * x / (t * t)]
            }
            Shape::Truncated {
                exponent: a,
                floor,
                scale,
                smoothing,
            } => {
                let x = t.powf(-a);
                match smoothing {
                    None => {
                        let t0 = (1.0 - floor).powf(-1.0 / a);
                        if (t - t0).abs() <= 1e-12 * t0 {
                            return Err(Error::AtKink { t: t0 });
                        }
                        if t < t0 {
                            [scale * floor, 0.0, 0.0]
                        } else {
                            [
                                scale * (1.0 - x),
                                scale * a * x / t,
                                -scale * a * (a + 1.0) * x / (t * t),
                            ]
                        }
                    }
                    Some(eps) => {
                        let eps = *eps;
                        let base = soft_plus(-floor, eps);
                        if !x.is_finite() {
                            return Ok([scale * (0.0 - base), 0.0, 0.0]);
                        }
                        let d = 1.0 - x - floor;
                        let s = d.hypot(eps);
                        let x_over_s = x / s;
                        // w = (1 + d/s) / 2, written to avoid cancellation for d < 0
                        let w = if d >= 0.0 {
                            0.5 * (1.0 + d / s)
                        } else {
                            0.5 * eps * eps / (s * (s - d))
                        };
                        let f1 = a * x / t;
                        let f2 = -a * (a + 1.0) * x / (t * t);
                        let g1 = if d >= 0.0 {
                            f1 * w
                        } else {
                            (a / t) * x_over_s * 0.5 * eps * eps / (s - d)
                        };
                        let g2 = if d >= 0.0 {
                            f2 * w
                        } else {
                            -a * (a + 1.0) / (t * t) * x_over_s * 0.5 * eps * eps / (s - d)
                        };
                        // f'^2 * eps^2 / (2 s^3) = (a/t)^2 (x/s)^2 eps^2 / (2 s)
                        let curv = (a / t).powi(2) * x_over_s * x_over_s * eps * eps / (2.0 * s);
                        [
                            scale * (soft_plus(d, eps) - base),
                            scale * g1,
                            scale * (g2 + curv),
                        ]
                    }
                }
            }
            Shape::Combination { terms } => {
                let mut v = [0.0; 3];
                for (c, s) in terms {
                    let j = s.jet(t)?;
                    for k in 0..3 {
                        v[k] += c * j[k];
                    }
                }
                v
            }
        })
    }

    fn singular_at_zero(&self) -> bool {
        match self {
            Shape::Fundamental { .. } => true,
            Shape::Combination { terms } => terms.iter().any(|(_, s)| s.singular_at_zero()),
            _ => false,
        }
    }

    fn value_at_origin(&self) -> f64 {
        match self {
            Shape::Polynomial { coeffs } => coeffs.first().copied().unwrap_or(0.0),
            Shape::Fundamental { .. } => f64::NEG_INFINITY,
            Shape::Truncated {
                floor,
                scale,
                smoothing,
                ..
            } => match smoothing {
                None => scale * floor,
                Some(eps) => scale * (floor - smooth_max(0.0, *floor, *eps)),
            },
            Shape::Combination { terms } => {
                terms.iter().map(|(c, s)| c * s.value_at_origin()).sum()
            }
        }
    }

    fn has_kink(&self) -> bool {
        match self {
            Shape::Truncated { smoothing, .. } => smoothing.is_none(),
            Shape::Combination { terms } => terms.iter().any(|(_, s)| s.has_kink()),
            _ => false,
        }
    }

    fn smoothed(&self, eps: f64) -> Shape {
        match self {
            Shape::Truncated {
                exponent,
                floor,
                scale,
                smoothing: None,
            } => Shape::Truncated {
                exponent: *exponent,
                floor: *floor,
                scale: *scale,
                smoothing: Some(eps),
            },
            Shape::Combination { terms } => Shape::Combination {
                terms: terms.iter().map(|(c, s)| (*c, s.smoothed(eps))).collect(),
            },
            other => other.clone(),
        }
    }

    fn hints(&self, out: &mut Vec<f64>) {
        match self {
            Shape::Truncated {
                exponent: a,
                floor,
                smoothing,
                ..
            } => {
                let t0 = (1.0 - floor).powf(-1.0 / a);
                if t0 > 0.0 && t0 < 1.0 {
                    out.push(t0);
                    if let Some(eps) = smoothing {
                        // width of the smoothing layer in t
                        let slope = a * t0.powf(-a) / t0;
                        let w = eps / slope;
                        let mut k = 0.25;
                        while k <= 4096.0 {
                            for cand in [t0 - k * w, t0 + k * w] {
                                if cand > 0.0 && cand < 1.0 {
                                    out.push(cand);
                                }
                            }
                            k *= 2.0;
                        }
                    }
                }
            }
            Shape::Combination { terms } => terms.iter().for_each(|(_, s)| s.hints(out)),
            _ => {}
        }
    }
}

/// A radial profile `g` with `u(z) = g(|z|^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub shape: Shape,
    pub label: String,
}

impl RadialProfile {
    pub fn new(shape: Shape, label: impl Into<String>) -> Self {
        Self {
            shape,
            label: label.into(),
        }
    }

    pub fn g(&self, t: f64) -> f64 {
        if t == 0.0 {
            return self.value_at_origin();
        }
        self.shape.value(t)
    }

    pub fn g1(&self, t: f64) -> Result<f64> {
        Ok(self.shape.jet(t)?[1])
    }

    pub fn g2(&self, t: f64) -> Result<f64> {
        Ok(self.shape.jet(t)?[2])
    }

    /// `(g, g', g'')` in one evaluation.
    pub fn jet(&self, t: f64) -> Result<[f64; 3]> {
        self.shape.jet(t)
    }

    pub fn singular_at_zero(&self) -> bool {
        self.shape.singular_at_zero()
    }

    /// Limit of `g(t)` as `t -> 0+` (may be `-inf`).
    pub fn value_at_origin(&self) -> f64 {
        self.shape.value_at_origin()
    }

    /// True when the profile contains an unsmoothed max.
    pub fn has_kink(&self) -> bool {
        self.shape.has_kink()
    }

    pub fn smoothed(&self, eps: f64) -> RadialProfile {
        RadialProfile::new(
            self.shape.smoothed(eps),
            format!("{} [eps={eps:e}]", self.label),
        )
    }

    /// Switching radii and smoothing-layer edges, sorted, in `(0, 1)`.
    pub fn quadrature_hints(&self) -> Vec<f64> {
        let mut v = Vec::new();
        self.shape.hints(&mut v);
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// `sup |g|` on `(0, 1]` for a nondecreasing profile.
    pub fn sup_norm(&self) -> f64 {
        self.value_at_origin().abs().max(self.g(1.0).abs())
    }

    /// Eigenvalues of the complex Hessian at `|z|^2 = t`, in the common radial
    /// eigenbasis: `n - 1` tangential values `g'` followed by the radial
    /// value `g' + t g''`.
    pub fn basis_eigenvalues(&self, n: usize, t: f64) -> Result<Vec<f64>> {
        let [_, g1, g2] = self.jet(t)?;
        let mut v = vec![g1; n];
        v[n - 1] = g1 + t * g2;
        Ok(v)
    }

    pub fn scaled(&self, c: f64) -> RadialProfile {
        RadialProfile::new(
            Shape::Combination {
                terms: vec![(c, self.shape.clone())],
            },
            format!("{c}*({})", self.label),
        )
    }

    pub fn plus(&self, other: &RadialProfile) -> RadialProfile {
        RadialProfile::new(
            Shape::Combination {
                terms: vec![(1.0, self.shape.clone()), (1.0, other.shape.clone())],
            },
            format!("({})+({})", self.label, other.label),
        )
    }
}

/// Sorted spectrum of the complex Hessian of `g(|z|^2)` on the sphere `|z|^2 = t`.
pub fn radial_hessian_spectrum(profile: &RadialProfile, n: usize, t: f64) -> Result<Spectrum> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidParameters(format!("t = {t} outside (0, 1]")));
    }
    Ok(Spectrum::from_unsorted(profile.basis_eigenvalues(n, t)?))
}

/// Parameters of the truncated counterexample families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub j: u32,
    pub alpha: f64,
    pub beta: f64,
    /// Smoothing width for the max.
    pub eps: f64,
}

impl Default for FamilyParams {
    fn default() -> Self {
        Self {
            j: 2,
            alpha: 1.0,
            beta: 3.0,
            eps: 1e-2,
        }
    }
}

/// Everything needed to build a catalog member by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogParams {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    #[serde(default)]
    pub family: FamilyParams,
    /// Coefficients `c_1, c_2, ...` of `sum c_i (t^i - 1)`.
    #[serde(default)]
    pub coeffs: Option<Vec<f64>>,
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub shift: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl CatalogParams {
    pub fn new(n: usize, m: usize, p: f64) -> Self {
        Self {
            n,
            m,
            p,
            family: FamilyParams::default(),
            coeffs: None,
            weights: None,
            shift: None,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Radial(RadialProfile),
    /// `sum w_j |z_j|^2 + shift`
    Quadratic {
        weights: Vec<f64>,
        shift: f64,
    },
    /// `scale * Re(z_1^2)`
    Pluriharmonic {
        scale: f64,
    },
}

/// An evaluable function on the unit ball of C^n.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    label: String,
    dim: usize,
    kind: Kind,
}

impl TestFunction {
    pub fn radial(dim: usize, profile: RadialProfile) -> Self {
        Self {
            label: profile.label.clone(),
            dim,
            kind: Kind::Radial(profile),
        }
    }

    pub fn quadratic(weights: Vec<f64>, shift: f64) -> Self {
        Self {
            label: format!("quadratic{weights:?}{shift:+}"),
            dim: weights.len(),
            kind: Kind::Quadratic { weights, shift },
        }
    }

    pub fn pluriharmonic(dim: usize, scale: f64) -> Self {
        Self {
            label: format!("{scale}*Re(z1^2)"),
            dim,
            kind: Kind::Pluriharmonic { scale },
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radial_profile(&self) -> Option<&RadialProfile> {
        match &self.kind {
            Kind::Radial(p) => Some(p),
            _ => None,
        }
    }

    pub fn require_radial(&self) -> Result<&RadialProfile> {
        self.radial_profile()
            .ok_or_else(|| Error::NonRadial(self.label.clone()))
    }

    pub fn is_max_type(&self) -> bool {
        self.radial_profile().is_some_and(|p| p.has_kink())
    }

    pub fn singular_at_zero(&self) -> bool {
        self.radial_profile().is_some_and(|p| p.singular_at_zero())
    }

    /// The smoothed form for max-type members; other members are returned unchanged.
    pub fn smoothed(&self, eps: f64) -> TestFunction {
        match &self.kind {
            Kind::Radial(p) if p.has_kink() => TestFunction::radial(self.dim, p.smoothed(eps)),
            _ => self.clone(),
        }
    }

    pub fn scaled(&self, c: f64) -> TestFunction {
        match &self.kind {
            Kind::Radial(p) => TestFunction::radial(self.dim, p.scaled(c)),
            Kind::Quadratic { weights, shift } => {
                TestFunction::quadratic(weights.iter().map(|w| c * w).collect(), c * shift)
            }
            Kind::Pluriharmonic { scale } => TestFunction::pluriharmonic(self.dim, c * scale),
        }
    }

    pub fn value(&self, z: &[Complex64]) -> f64 {
        match &self.kind {
            Kind::Radial(p) => p.g(norm_sqr(z)),
            Kind::Quadratic { weights, shift } => {
                weights
                    .iter()
                    .zip(z)
                    .map(|(w, zj)| w * zj.norm_sqr())
                    .sum::<f64>()
                    + shift
            }
            Kind::Pluriharmonic { scale } => scale * (z[0] * z[0]).re,
        }
    }

    /// Closed-form complex Hessian `[d^2 u / dz_j dzbar_k]`.
    pub fn analytic_hessian(&self, z: &[Complex64]) -> Result<HermitianMatrix> {
        let n = self.dim;
        if z.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: z.len(),
            });
        }
        match &self.kind {
            Kind::Radial(p) => {
                let t = norm_sqr(z);
                let [_, g1, g2] = p.jet(t)?;
                let mut e = vec![Complex64::new(0.0, 0.0); n * n];
                for j in 0..n {
                    for k in 0..n {
                        let mut v = z[j].conj() * z[k] * g2;
                        if j == k {
                            v += g1;
                            v.im = 0.0;
                        }
                        e[j * n + k] = v;
                    }
                }
                HermitianMatrix::new(n, e, FD_HERMITIAN_TOL * (1.0 + g1.abs() + g2.abs() * t))
            }
            Kind::Quadratic { weights, .. } => Ok(HermitianMatrix::diagonal(weights)),
            Kind::Pluriharmonic { .. } => Ok(HermitianMatrix::diagonal(&vec![0.0; n])),
        }
    }
}

fn norm_sqr(z: &[Complex64]) -> f64 {
    z.iter().map(|w| w.norm_sqr()).sum()
}

/// Builds a catalog member by name.
pub fn catalog_function(name: &str, params: &CatalogParams) -> Result<TestFunction> {
    let n = params.n;
    if n < 1 {
        return Err(Error::InvalidParameters("n must be >= 1".into()));
    }
    let fam = &params.family;
    let family_guard = |which: &str| -> Result<f64> {
        if fam.j == 0 {
            return Err(Error::InvalidParameters(format!(
                "{which}: j must be a positive integer"
            )));
        }
        if !(fam.eps > 0.0) {
            return Err(Error::InvalidParameters(format!(
                "{which}: eps must be > 0"
            )));
        }
        fundamental_exponent(n, params.m)
    };
    let m = params.m;
    let p = params.p;
    let j = fam.j as f64;
    Ok(match name {
        "quadratic_exhaustion" => TestFunction::radial(
            n,
            RadialProfile::new(
                Shape::Polynomial {
                    coeffs: vec![-1.0, 1.0],
                },
                "|z|^2-1",
            ),
        ),
        "fundamental_solution" => {
            let a = fundamental_exponent(n, m)?;
            TestFunction::radial(
                n,
                RadialProfile::new(
                    Shape::Fundamental { exponent: a },
                    format!("1-|z|^(2-2*{n}/{m})"),
                ),
            )
        }
        "ex1_family" => {
            let a = family_guard(name)?;
            if !(fam.alpha >= 0.0) || !(fam.beta > 0.0) {
                return Err(Error::InvalidParameters(
                    "ex1_family: need alpha >= 0, beta > 0".into(),
                ));
            }
            if p > 0.0 && !(fam.beta > fam.alpha * (p + m as f64) / p) {
                return Err(Error::InvalidParameters(format!(
                    "ex1_family regime requires beta > alpha*(p+m)/p = {} (got beta = {})",
                    fam.alpha * (p + m as f64) / p,
                    fam.beta
                )));
            }
            TestFunction::radial(
                n,
                RadialProfile::new(
                    Shape::Truncated {
                        exponent: a,
                        floor: 1.0 - j.powf(fam.beta),
                        scale: j.powf(-fam.alpha),
                        smoothing: None,
                    },
                    format!("ex1[j={},alpha={},beta={}]", fam.j, fam.alpha, fam.beta),
                ),
            )
        }
        "ex2_family" => {
            let a = family_guard(name)?;
            if p < 0.0 {
                return Err(Error::InvalidParameters("p must be >= 0".into()));
            }
            TestFunction::radial(
                n,
                RadialProfile::new(
                    Shape::Truncated {
                        exponent: a,
                        floor: -j,
                        scale: j.powf(-p / (m as f64 + p)),
                        smoothing: None,
                    },
                    format!("ex2[j={},p={p}]", fam.j),
                ),
            )
        }
        "ex3_family" => {
            let a = family_guard(name)?;
            TestFunction::radial(
                n,
                RadialProfile::new(
                    Shape::Truncated {
                        exponent: a,
                        floor: -1.0 / j,
                        scale: j,
                        smoothing: None,
                    },
                    format!("ex3[j={}]", fam.j),
                ),
            )
        }
        "smooth_radial_polynomial" => {
            let coeffs = match (&params.coeffs, params.seed) {
                (Some(c), _) => c.clone(),
                (None, Some(seed)) => seeded_polynomial_coeffs(seed),
                (None, None) => vec![0.0, 1.0],
            };
            TestFunction::radial(n, vanishing_polynomial(&coeffs)?)
        }
        "pluriharmonic_probe" => TestFunction::pluriharmonic(n, 1.0),
        "anisotropic_quadratic" => {
            let weights = params.weights.clone().unwrap_or_else(|| {
                let mut w = vec![1.0; n];
                w[0] = 2.0;
                w
            });
            if weights.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: weights.len(),
                });
            }
            TestFunction::quadratic(weights, params.shift.unwrap_or(0.0))
        }
        other => return Err(Error::UnknownFunction(other.to_string())),
    })
}

/// `g(t) = sum_i c_i (t^i - 1)` for coefficients `c_1, c_2, ...` (all `>= 0`),
/// which vanishes at `t = 1` and is plurisubharmonic.
pub fn vanishing_polynomial(coeffs: &[f64]) -> Result<RadialProfile> {
    if coeffs.is_empty() || coeffs.iter().any(|c| *c < 0.0) || coeffs.iter().all(|c| *c == 0.0) {
        return Err(Error::InvalidParameters(
            "polynomial coefficients must be nonnegative and not all zero".into(),
        ));
    }
    let mut full = vec![-coeffs.iter().sum::<f64>()];
    full.extend_from_slice(coeffs);
    let label = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(i, c)| format!("{c}*(t^{}-1)", i + 1))
        .collect::<Vec<_>>()
        .join("+");
    Ok(RadialProfile::new(
        Shape::Polynomial { coeffs: full },
        label,
    ))
}

/// Reproducible nonnegative coefficients for `smooth_radial_polynomial`.
pub fn seeded_polynomial_coeffs(seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let degree = rng.random_range(1..=4usize);
    let mut c: Vec<f64> = (0..degree).map(|_| rng.random_range(0.0..1.0)).collect();
    // keep the top coefficient away from zero so the degree is genuine
    c[degree - 1] += 0.25;
    c
}

/// Complex Hessian at one point together with its spectrum.
#[derive(Debug, Clone)]
pub struct PointHessian {
    pub point: Vec<Complex64>,
    pub matrix: HermitianMatrix,
    pub spectrum: Spectrum,
    /// Max asymmetry of the raw finite-difference matrix before symmetrization.
    pub asymmetry: f64,
}

/// Complex Hessian by central differences in the real coordinates and the
/// Wirtinger identity
/// `d^2/dz_j dzbar_k = ((u_xjxk + u_yjyk) + i (u_xjyk - u_yjxk)) / 4`.
pub fn fd_hessian(u: &TestFunction, z: &[Complex64], h: f64) -> Result<PointHessian> {
    let n = u.dim();
    if z.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: z.len(),
        });
    }
    if !(h > 0.0) {
        return Err(Error::InvalidParameters(format!(
            "step h = {h} must be > 0"
        )));
    }
    let radius = norm_sqr(z).sqrt();
    if radius + 4.0 * h >= 1.0 {
        return Err(Error::StencilOutsideBall {
            radius,
            reach: 4.0 * h,
        });
    }
    if u.singular_at_zero() && radius <= 4.0 * h {
        return Err(Error::Numerical(format!(
            "stencil around |z| = {radius} reaches the singularity at the origin"
        )));
    }

    // real coordinates: 2j -> x_j, 2j+1 -> y_j
    let dim = 2 * n;
    let eval = |shifts: &[(usize, f64)]| -> f64 {
        let mut w = z.to_vec();
        for &(a, s) in shifts {
            if a % 2 == 0 {
                w[a / 2].re += s;
            } else {
                w[a / 2].im += s;
            }
        }
        u.value(&w)
    };
    let center = u.value(z);
    let mut real = vec![0.0; dim * dim];
    for a in 0..dim {
        real[a * dim + a] = (eval(&[(a, h)]) - 2.0 * center + eval(&[(a, -h)])) / (h * h);
        for b in (a + 1)..dim {
            let v = (eval(&[(a, h), (b, h)]) - eval(&[(a, h), (b, -h)]) - eval(&[(a, -h), (b, h)])
                + eval(&[(a, -h), (b, -h)]))
                / (4.0 * h * h);
            real[a * dim + b] = v;
            real[b * dim + a] = v;
        }
    }
    let r = |a: usize, b: usize| real[a * dim + b];
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for k in 0..n {
            let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            entries[j * n + k] =
                Complex64::new(r(xj, xk) + r(yj, yk), r(xj, yk) - r(yj, xk)) * 0.25;
        }
    }
    let (matrix, asymmetry) = HermitianMatrix::symmetrize(n, entries)?;
    let spectrum = eigenvalues(&matrix)?;
    Ok(PointHessian {
        point: z.to_vec(),
        matrix,
        spectrum,
        asymmetry,
    })
}

/// Seeded points uniformly distributed in the ball of radius `r_max` in C^n,
/// rejecting points closer than `r_min` to the origin.
pub fn sample_points(
    n: usize,
    count: usize,
    r_min: f64,
    r_max: f64,
    seed: u64,
) -> Vec<Vec<Complex64>> {
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g: Vec<f64> = (0..2 * n)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        let u: f64 = rng.random_range(0.0..1.0);
        let r = r_max * u.powf(1.0 / (2 * n) as f64);
        if r < r_min {
            continue;
        }
        out.push(
            (0..n)
                .map(|j| Complex64::new(g[2 * j], g[2 * j + 1]) * (r / norm))
                .collect(),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn point_with_t(n: usize, t: f64) -> Vec<Complex64> {
        // spread the norm over all coordinates with some phases
        let r = (t / n as f64).sqrt();
        (0..n)
            .map(|j| Complex64::from_polar(r, 0.7 * j as f64 + 0.3))
            .collect()
    }

    #[test]
    fn pointwise_examples() {
        let u = catalog_function("quadratic_exhaustion", &CatalogParams::new(3, 1, 0.0)).unwrap();
        assert_eq!(u.value(&[c(0.0, 0.0); 3]), -1.0);

        let fs = catalog_function("fundamental_solution", &CatalogParams::new(2, 1, 0.0)).unwrap();
        assert!((fs.value(&point_with_t(2, 0.25)) + 3.0).abs() < 1e-12);

        for j in [2u32, 4, 8] {
            let mut params = CatalogParams::new(2, 1, 1.0);
            params.family.j = j;
            let e2 = catalog_function("ex2_family", &params).unwrap();
            let at0 = e2.value(&[c(0.0, 0.0); 2]);
            assert!((at0 + (j as f64).powf(0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_exponent_and_unknown_name() {
        let err =
            catalog_function("fundamental_solution", &CatalogParams::new(2, 2, 0.0)).unwrap_err();
        assert!(err.to_string().contains("m < n"), "{err}");
        assert!(catalog_function("ex3_family", &CatalogParams::new(3, 3, 0.0)).is_err());
        assert!(matches!(
            catalog_function("nope", &CatalogParams::new(2, 1, 0.0)),
            Err(Error::UnknownFunction(_))
        ));
    }

    #[test]
    fn ex1_regime_is_enforced() {
        let mut params = CatalogParams::new(2, 1, 1.0);
        params.family.alpha = 1.0;
        params.family.beta = 1.5; // needs beta > 2
        let err = catalog_function("ex1_family", &params).unwrap_err();
        assert!(err.to_string().contains("beta > alpha*(p+m)/p"));
    }

    #[test]
    fn radial_spectrum_examples() {
        let id = RadialProfile::new(
            Shape::Polynomial {
                coeffs: vec![0.0, 1.0],
            },
            "t",
        );
        for t in [0.1, 0.5, 1.0] {
            assert_eq!(
                radial_hessian_spectrum(&id, 3, t).unwrap().values(),
                &[1.0, 1.0, 1.0]
            );
        }
        let sq = RadialProfile::new(
            Shape::Polynomial {
                coeffs: vec![0.0, 0.0, 1.0],
            },
            "t^2",
        );
        assert_eq!(
            radial_hessian_spectrum(&sq, 2, 0.5).unwrap().values(),
            &[1.0, 2.0]
        );

        let fs = RadialProfile::new(Shape::Fundamental { exponent: 1.0 }, "fs");
        let s = radial_hessian_spectrum(&fs, 2, 0.25).unwrap();
        assert!((s.values()[0] + 16.0).abs() < 1e-12 && (s.values()[1] - 16.0).abs() < 1e-12);
    }

    #[test]
    fn kink_requires_smoothing() {
        let mut params = CatalogParams::new(2, 1, 0.0);
        params.family.j = 3;
        let u = catalog_function("ex3_family", &params).unwrap();
        let prof = u.radial_profile().unwrap();
        let t0 = (1.0f64 + 1.0 / 3.0).powf(-1.0);
        assert!(matches!(
            radial_hessian_spectrum(prof, 2, t0),
            Err(Error::AtKink { .. })
        ));
        assert!(radial_hessian_spectrum(&prof.smoothed(1e-3), 2, t0).is_ok());
    }

    #[test]
    fn profile_derivatives_converge_at_second_order() {
        let mut params = CatalogParams::new(3, 2, 1.0);
        params.family.j = 4;
        let smoothed = catalog_function("ex2_family", &params)
            .unwrap()
            .smoothed(0.05);
        let profiles = vec![
            vanishing_polynomial(&[0.3, 0.0, 1.2]).unwrap(),
            RadialProfile::new(Shape::Fundamental { exponent: 0.5 }, "fs"),
            smoothed.radial_profile().unwrap().clone(),
        ];
        for prof in &profiles {
            for t in [0.3, 0.55, 0.9] {
                let [_, g1, g2] = prof.jet(t).unwrap();
                let errs: Vec<(f64, f64)> = [1e-2, 5e-3]
                    .iter()
                    .map(|&h| {
                        let d1 = (prof.g(t + h) - prof.g(t - h)) / (2.0 * h);
                        let d2 = (prof.g(t + h) - 2.0 * prof.g(t) + prof.g(t - h)) / (h * h);
                        ((d1 - g1).abs(), (d2 - g2).abs())
                    })
                    .collect();
                if errs[0].0 > 1e-9 {
                    let order = (errs[0].0 / errs[1].0).log2();
                    assert!((order - 2.0).abs() < 0.1, "{}: order {order}", prof.label);
                }
                if errs[0].1 > 1e-7 {
                    let order = (errs[0].1 / errs[1].1).log2();
                    assert!(
                        (order - 2.0).abs() < 0.15,
                        "{}: g'' order {order}",
                        prof.label
                    );
                }
            }
        }
    }

    #[test]
    fn smoothed_max_bounds_and_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let a: f64 = rng.random_range(-5.0..5.0);
            let b: f64 = rng.random_range(-5.0..5.0);
            let e1: f64 = rng.random_range(1e-4..1.0);
            let e2 = e1 * rng.random_range(1.0..3.0);
            let exact = a.max(b);
            let s1 = smooth_max(a, b, e1);
            let s2 = smooth_max(a, b, e2);
            assert!(s1 >= exact - 1e-15 && s1 <= exact + e1 / 2.0 + 1e-15);
            assert!(s2 >= s1 - 1e-15, "not monotone in eps");
        }
    }

    #[test]
    fn family_formulas_at_seeded_points() {
        let n = 3;
        let m = 1;
        let p = 2.0;
        let fam = FamilyParams {
            j: 5,
            alpha: 0.5,
            beta: 2.0,
            eps: 1e-2,
        };
        let mut params = CatalogParams::new(n, m, p);
        params.family = fam;
        let ex1 = catalog_function("ex1_family", &params).unwrap();
        let ex2 = catalog_function("ex2_family", &params).unwrap();
        let ex3 = catalog_function("ex3_family", &params).unwrap();
        let j = 5.0f64;
        for z in sample_points(n, 20, 0.01, 0.99, 3) {
            let t: f64 = z.iter().map(|w| w.norm_sqr()).sum();
            let base = 1.0 - t.sqrt().powf(2.0 - 2.0 * n as f64 / m as f64);
            let e1 = j.powf(-0.5) * base.max(1.0 - j.powf(2.0));
            let e2 = j.powf(-p / (m as f64 + p)) * base.max(-j);
            let e3 = j * base.max(-1.0 / j);
            assert!((ex1.value(&z) - e1).abs() <= 1e-12 * (1.0 + e1.abs()));
            assert!((ex2.value(&z) - e2).abs() <= 1e-12 * (1.0 + e2.abs()));
            assert!((ex3.value(&z) - e3).abs() <= 1e-12 * (1.0 + e3.abs()));
        }
    }

    #[test]
    fn fd_examples() {
        let u = TestFunction::quadratic(vec![1.0, 0.0], 0.0);
        let z = [c(0.2, -0.1), c(0.3, 0.4)];
        let h = fd_hessian(&u, &z, DEFAULT_FD_STEP).unwrap();
        assert!((h.matrix.get(0, 0).re - 1.0).abs() < 1e-6);
        assert!(h.matrix.get(1, 1).norm() < 1e-6 && h.matrix.get(0, 1).norm() < 1e-6);

        let ph = TestFunction::pluriharmonic(2, 1.0);
        let h = fd_hessian(&ph, &z, DEFAULT_FD_STEP).unwrap();
        assert!(h.matrix.frobenius_norm() < 1e-6);

        let quartic = TestFunction::radial(
            2,
            RadialProfile::new(
                Shape::Polynomial {
                    coeffs: vec![0.0, 0.0, 1.0],
                },
                "t^2",
            ),
        );
        let h = fd_hessian(&quartic, &point_with_t(2, 0.5), DEFAULT_FD_STEP).unwrap();
        let s = h.spectrum.values();
        assert!(
            (s[0] - 1.0).abs() < 1e-6 && (s[1] - 2.0).abs() < 1e-6,
            "{s:?}"
        );
    }

    #[test]
    fn fd_rejects_boundary_stencil() {
        let u = catalog_function("quadratic_exhaustion", &CatalogParams::new(2, 1, 0.0)).unwrap();
        let z = [c(0.99995, 0.0), c(0.0, 0.0)];
        assert!(matches!(
            fd_hessian(&u, &z, 1e-4),
            Err(Error::StencilOutsideBall { .. })
        ));
    }

    #[test]
    fn mass_constants_differ_by_normalization_factor() {
        for (n, m) in [(2usize, 1usize), (3, 1), (3, 2), (4, 3)] {
            let ratio = truncated_mass(n, m).unwrap() / quoted_mass_constant(n, m).unwrap();
            let expected = 4f64.powi(n as i32) * factorial(m) * factorial(n - m) / 2.0;
            assert!((ratio / expected - 1.0).abs() < 1e-14);
        }
    }
}
