//! Energies, L^q norms, mixed energies and sublevel volumes on the unit ball.
//!
//! Radial integrands use `int_B F(|z|^2) dV = pi^n/(n-1)! int_0^1 F(t) t^{n-1} dt`.
//! Max-type members are integrated through their smoothed forms on an
//! `eps`-ladder and extrapolated to `eps -> 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::catalog::{factorial, RadialProfile, Shape, TestFunction};
use crate::error::{Error, Result};
use crate::operator::{hessian_density, mixed_density, radial_density, Parameters};
use crate::quadrature::{integrate, integrate_singular_at_zero, QuadConfig};

/// Default smoothing ladder for max-type members.
pub const DEFAULT_EPS_LADDER: [f64; 4] = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
/// Default Monte Carlo sample count.
pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    RadialQuadrature,
    MonteCarlo,
    EpsExtrapolation,
}

/// An integral value with an error estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyValue {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_ladder: Option<Vec<(f64, f64)>>,
}

impl EnergyValue {
    fn quadrature(value: f64, err: f64) -> Self {
        Self {
            value,
            abs_error_estimate: err,
            method: Method::RadialQuadrature,
            eps_ladder: None,
        }
    }
}

/// `V_{2n}(B) = pi^n / n!`.
pub fn ball_volume(n: usize) -> f64 {
    PI.powi(n as i32) / factorial(n)
}

/// Integration options for [`radial_integral`].
#[derive(Debug, Clone, Default)]
pub struct RadialOptions {
    pub singular_at_zero: bool,
    pub hints: Vec<f64>,
    pub upper: Option<f64>,
}

/// `int_{|z|^2 < upper} F(|z|^2) dV_{2n}` (upper defaults to 1).
pub fn radial_integral<F: Fn(f64) -> f64>(
    f: F,
    n: usize,
    opts: &RadialOptions,
) -> Result<EnergyValue> {
    let c = PI.powi(n as i32) / factorial(n - 1);
    let cfg = QuadConfig::default();
    let upper = opts.upper.unwrap_or(1.0);
    let weighted = |t: f64| f(t) * t.powi(n as i32 - 1);
    let r = if opts.singular_at_zero {
        if upper != 1.0 {
            let s = upper;
            let hints: Vec<f64> = opts.hints.iter().map(|h| h / s).collect();
            integrate_singular_at_zero(|x| weighted(s * x) * s, &hints, &cfg)?
        } else {
            integrate_singular_at_zero(weighted, &opts.hints, &cfg)?
        }
    } else {
        integrate(weighted, 0.0, upper, &opts.hints, &cfg)?
    };
    Ok(EnergyValue::quadrature(c * r.value, c * r.abs_error))
}

fn check_dim(u: &TestFunction, params: &Parameters) -> Result<()> {
    params.validate()?;
    if u.dim() != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            got: u.dim(),
        });
    }
    Ok(())
}

/// `e_{p,m}` of a smooth (or already smoothed) radial profile.
pub fn smooth_energy(profile: &RadialProfile, n: usize, m: usize, p: f64) -> Result<EnergyValue> {
    if profile.has_kink() {
        return Err(Error::AtKink {
            t: profile
                .quadrature_hints()
                .first()
                .copied()
                .unwrap_or(f64::NAN),
        });
    }
    let opts = RadialOptions {
        singular_at_zero: profile.singular_at_zero(),
        hints: profile.quadrature_hints(),
        upper: None,
    };
    let density_err = std::cell::Cell::new(None);
    let r = radial_integral(
        |t| match radial_density(profile, n, m, t) {
            Ok(d) => (-profile.g(t)).max(0.0).powf(p) * d,
            Err(e) => {
                density_err.set(Some(e));
                0.0
            }
        },
        n,
        &opts,
    )?;
    if let Some(e) = density_err.take() {
        return Err(e);
    }
    Ok(r)
}

/// First-order Richardson extrapolation over an `eps`-ladder.
///
/// `values[i]` is the quantity at `ladder[i]`; consecutive rungs must halve
/// `eps`. The error estimate is the spread between the extrapolants of the
/// last two rung pairs.
pub fn richardson(ladder: &[f64], values: &[f64]) -> Result<EnergyValue> {
    if ladder.len() != values.len() || ladder.len() < 2 {
        return Err(Error::InvalidParameters(
            "eps ladder needs at least two rungs".into(),
        ));
    }
    let extrap = |i: usize| {
        let r = ladder[i] / ladder[i + 1];
        (r * values[i + 1] - values[i]) / (r - 1.0)
    };
    let k = ladder.len() - 2;
    let last = extrap(k);
    let err = if k > 0 {
        (last - extrap(k - 1)).abs()
    } else {
        (values[k + 1] - values[k]).abs()
    };
    Ok(EnergyValue {
        value: last,
        abs_error_estimate: err,
        method: Method::EpsExtrapolation,
        eps_ladder: Some(ladder.iter().copied().zip(values.iter().copied()).collect()),
    })
}

/// `e_{p,m}` of a max-type profile through the smoothing ladder.
pub fn ladder_energy(
    profile: &RadialProfile,
    n: usize,
    m: usize,
    p: f64,
    ladder: &[f64],
) -> Result<EnergyValue> {
    let values = ladder
        .iter()
        .map(|&eps| smooth_energy(&profile.smoothed(eps), n, m, p).map(|e| e.value))
        .collect::<Result<Vec<_>>>()?;
    let mut out = richardson(ladder, &values)?;
    out.value = out.value.max(0.0);
    Ok(out)
}

/// `e_{p,m}(u) = int (-u)^p H_m(u)`.
///
/// The pure fundamental solution has its whole `H_m` mass at the origin,
/// so its energy is finite only for `p = 0` (computed through a truncation,
/// whose mass does not depend on the truncation level).
pub fn energy(u: &TestFunction, params: &Parameters) -> Result<EnergyValue> {
    check_dim(u, params)?;
    let profile = u.require_radial()?;
    let (n, m, p) = (params.n, params.m, params.p);
    if let Shape::Fundamental { exponent } = profile.shape {
        if p > 0.0 {
            return Err(Error::Divergent {
                shell_ratio: f64::INFINITY,
            });
        }
        let truncated = RadialProfile::new(
            Shape::Truncated {
                exponent,
                floor: -1.0,
                scale: 1.0,
                smoothing: None,
            },
            "fundamental solution truncated at -1",
        );
        return ladder_energy(&truncated, n, m, 0.0, &DEFAULT_EPS_LADDER);
    }
    if profile.has_kink() {
        ladder_energy(profile, n, m, p, &DEFAULT_EPS_LADDER)
    } else {
        smooth_energy(profile, n, m, p)
    }
}

/// `e_{p,m}(u)` by Monte Carlo, for non-radial smooth members.
pub fn energy_monte_carlo(
    u: &TestFunction,
    params: &Parameters,
    seed: u64,
    samples: usize,
) -> Result<EnergyValue> {
    check_dim(u, params)?;
    let err = std::cell::Cell::new(None);
    let r = monte_carlo_integral(
        |z| match hessian_density(u, params, z) {
            Ok(d) => (-u.value(z)).max(0.0).powf(params.p) * d.value,
            Err(e) => {
                err.set(Some(e));
                0.0
            }
        },
        params.n,
        seed,
        samples,
    );
    match err.take() {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

/// `||u||_{L^q(B)}`; divergent integrals surface as [`Error::Divergent`].
pub fn lq_norm(u: &TestFunction, q: f64, params: &Parameters) -> Result<EnergyValue> {
    check_dim(u, params)?;
    if !(q > 0.0) {
        return Err(Error::InvalidParameters(format!("need q > 0, got {q}")));
    }
    let profile = u.require_radial()?;
    let opts = RadialOptions {
        singular_at_zero: profile.singular_at_zero(),
        hints: profile.quadrature_hints(),
        upper: None,
    };
    let r = radial_integral(|t| profile.g(t).abs().powf(q), params.n, &opts)?;
    let norm = r.value.powf(1.0 / q);
    // d(I^{1/q}) = I^{1/q - 1} dI / q
    let err = if r.value > 0.0 {
        norm / (q * r.value) * r.abs_error_estimate
    } else {
        0.0
    };
    Ok(EnergyValue::quadrature(norm, err))
}

/// `||u||_{L^q}` by Monte Carlo (any member).
pub fn lq_norm_monte_carlo(u: &TestFunction, q: f64, seed: u64, samples: usize) -> EnergyValue {
    let r = monte_carlo_integral(|z| u.value(z).abs().powf(q), u.dim(), seed, samples);
    let norm = r.value.powf(1.0 / q);
    let err = if r.value > 0.0 {
        norm / (q * r.value) * r.abs_error_estimate
    } else {
        0.0
    };
    EnergyValue {
        value: norm,
        abs_error_estimate: err,
        method: Method::MonteCarlo,
        eps_ladder: None,
    }
}

fn smooth_mixed_energy(
    u0: &RadialProfile,
    us: &[&RadialProfile],
    n: usize,
    p: f64,
) -> Result<EnergyValue> {
    let mut hints = u0.quadrature_hints();
    let mut singular = u0.singular_at_zero();
    for u in us {
        hints.extend(u.quadrature_hints());
        singular |= u.singular_at_zero();
    }
    hints.sort_by(f64::total_cmp);
    let opts = RadialOptions {
        singular_at_zero: singular,
        hints,
        upper: None,
    };
    let fail = std::cell::Cell::new(None);
    let r = radial_integral(
        |t| match mixed_density(us, n, t) {
            Ok(d) => (-u0.g(t)).max(0.0).powf(p) * d,
            Err(e) => {
                fail.set(Some(e));
                0.0
            }
        },
        n,
        &opts,
    )?;
    match fail.take() {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

/// `int (-u_0)^p dd^c u_1 ^ ... ^ dd^c u_m ^ (dd^c |z|^2)^{n-m}` for radial inputs.
pub fn mixed_energy(
    u0: &TestFunction,
    us: &[&TestFunction],
    params: &Parameters,
) -> Result<EnergyValue> {
    check_dim(u0, params)?;
    if us.len() != params.m {
        return Err(Error::InvalidParameters(format!(
            "expected m = {} inputs, got {}",
            params.m,
            us.len()
        )));
    }
    let p0 = u0.require_radial()?;
    let ps = us
        .iter()
        .map(|u| u.require_radial())
        .collect::<Result<Vec<_>>>()?;
    let kinked = p0.has_kink() || ps.iter().any(|p| p.has_kink());
    if !kinked {
        return smooth_mixed_energy(p0, &ps, params.n, params.p);
    }
    let values = DEFAULT_EPS_LADDER
        .iter()
        .map(|&eps| {
            let s0 = p0.smoothed(eps);
            let ss: Vec<RadialProfile> = ps.iter().map(|p| p.smoothed(eps)).collect();
            let refs: Vec<&RadialProfile> = ss.iter().collect();
            smooth_mixed_energy(&s0, &refs, params.n, params.p).map(|e| e.value)
        })
        .collect::<Result<Vec<_>>>()?;
    richardson(&DEFAULT_EPS_LADDER, &values)
}

/// Uniform point in the unit ball of C^n = R^{2n}: Gaussian direction,
/// radius `U^{1/(2n)}`.
pub fn sample_ball<R: Rng>(n: usize, rng: &mut R, out: &mut [Complex64]) {
    let mut norm2 = 0.0;
    for w in out.iter_mut() {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        *w = Complex64::new(re, im);
        norm2 += re * re + im * im;
    }
    let u: f64 = rng.random();
    let r = u.powf(1.0 / (2 * n) as f64) / norm2.sqrt();
    out.iter_mut().for_each(|w| *w *= r);
}

/// Sample-mean estimate of `int_B f dV` with its standard error.
pub fn monte_carlo_integral<F: Fn(&[Complex64]) -> f64>(
    f: F,
    n: usize,
    seed: u64,
    samples: usize,
) -> EnergyValue {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 0..samples {
        sample_ball(n, &mut rng, &mut z);
        let v = f(&z);
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (v - mean);
    }
    let vol = ball_volume(n);
    let var = if samples > 1 {
        m2 / (samples - 1) as f64
    } else {
        0.0
    };
    EnergyValue {
        value: vol * mean,
        abs_error_estimate: vol * (var / samples as f64).sqrt(),
        method: Method::MonteCarlo,
        eps_ladder: None,
    }
}

/// `lambda(s) = V_{2n}({u < -s})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SublevelVolume {
    pub s: f64,
    pub volume: f64,
    /// Squared radius of the sublevel ball.
    pub radius_sq: f64,
}

/// Squared radius `t_s` of the ball `{g(|z|^2) < -s}` for a nondecreasing profile.
pub fn sublevel_radius_sq(profile: &RadialProfile, s: f64) -> f64 {
    if profile.value_at_origin() >= -s {
        return 0.0;
    }
    if profile.g(1.0) < -s {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if profile.g(mid) < -s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Volume of `{u < -s}` for a radial member.
pub fn sublevel_volume(u: &TestFunction, s: f64) -> Result<SublevelVolume> {
    let profile = u.require_radial()?;
    let t = sublevel_radius_sq(profile, s);
    Ok(SublevelVolume {
        s,
        volume: ball_volume(u.dim()) * t.powi(u.dim() as i32),
        radius_sq: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog_function, truncated_mass, vanishing_polynomial, CatalogParams};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn quad_exh(n: usize) -> TestFunction {
        catalog_function("quadratic_exhaustion", &CatalogParams::new(n, 1, 0.0)).unwrap()
    }

    #[test]
    fn radial_integral_examples() {
        let o = RadialOptions::default();
        let pi2 = PI * PI;
        assert!(rel(radial_integral(|_| 1.0, 2, &o).unwrap().value, pi2 / 2.0) < 1e-13);
        assert!(
            rel(
                radial_integral(|t| 1.0 - t, 2, &o).unwrap().value,
                pi2 / 6.0
            ) < 1e-13
        );
        let sing = RadialOptions {
            singular_at_zero: true,
            ..Default::default()
        };
        assert!(rel(radial_integral(|t| 1.0 / t, 2, &sing).unwrap().value, pi2) < 1e-10);
    }

    #[test]
    fn energy_examples() {
        for n in [2usize, 3] {
            for m in 1..=n {
                let e0 = energy(&quad_exh(n), &Parameters::new(n, m, 0.0).unwrap()).unwrap();
                assert!(rel(e0.value, (4.0 * PI).powi(n as i32)) < 1e-10);
                let e1 = energy(&quad_exh(n), &Parameters::new(n, m, 1.0).unwrap()).unwrap();
                assert!(rel(e1.value, (4.0 * PI).powi(n as i32) / (n as f64 + 1.0)) < 1e-10);
            }
        }
        assert!(matches!(
            Parameters::new(2, 1, -1.0),
            Err(Error::InvalidParameters(_))
        ));
    }

    #[test]
    fn ex2_energy_is_the_truncated_mass() {
        for j in [2u32, 8] {
            let mut cp = CatalogParams::new(2, 1, 1.0);
            cp.family.j = j;
            let u = catalog_function("ex2_family", &cp).unwrap();
            let e = energy(&u, &Parameters::new(2, 1, 1.0).unwrap()).unwrap();
            assert!(
                rel(e.value, truncated_mass(2, 1).unwrap()) < 1e-3,
                "j={j}: {}",
                e.value
            );
        }
    }

    #[test]
    fn lq_examples() {
        let p = Parameters::new(2, 1, 0.0).unwrap();
        let v = lq_norm(&quad_exh(2), 1.0, &p).unwrap();
        assert!(rel(v.value, PI * PI / 6.0) < 1e-12);
        let fs = catalog_function("fundamental_solution", &CatalogParams::new(2, 1, 0.0)).unwrap();
        let v = lq_norm(&fs, 1.0, &p).unwrap();
        assert!(rel(v.value, PI * PI / 2.0) < 1e-8, "{}", v.value);
        assert!(matches!(
            lq_norm(&fs, 2.0, &p),
            Err(Error::Divergent { .. })
        ));
        assert!(lq_norm(&fs, 0.0, &p).is_err());
    }

    #[test]
    fn mixed_energy_examples() {
        let n = 2;
        let sq = TestFunction::radial(
            n,
            RadialProfile::new(
                Shape::Polynomial {
                    coeffs: vec![0.0, 1.0],
                },
                "|z|^2",
            ),
        );
        let quart = TestFunction::radial(
            n,
            RadialProfile::new(
                Shape::Polynomial {
                    coeffs: vec![0.0, 0.0, 1.0],
                },
                "|z|^4",
            ),
        );
        let u0 = quad_exh(2);
        let p = Parameters::new(2, 2, 0.0).unwrap();
        // density 96 t, so the integral is pi^2 int 96 t^2 dt = 32 pi^2
        let e = mixed_energy(&u0, &[&sq, &quart], &p).unwrap();
        assert!(rel(e.value, 32.0 * PI * PI) < 1e-12);

        let p1 = Parameters::new(2, 2, 1.0).unwrap();
        let a = mixed_energy(&u0, &[&u0, &u0], &p1).unwrap().value;
        let b = energy(&u0, &p1).unwrap().value;
        assert!(rel(a, b) < 1e-12);
    }

    #[test]
    fn mixed_energy_matches_grid_oracle() {
        // brute-force midpoint sum over a tensor grid of [-1,1]^4, independent of
        // the radial reduction
        let density = |x: &[f64; 4]| {
            let t: f64 = x.iter().map(|v| v * v).sum();
            if t < 1.0 {
                96.0 * t
            } else {
                0.0
            }
        };
        let k = 60usize;
        let h = 2.0 / k as f64;
        let mut sum = 0.0;
        for i0 in 0..k {
            for i1 in 0..k {
                for i2 in 0..k {
                    for i3 in 0..k {
                        let x = [i0, i1, i2, i3].map(|i| -1.0 + (i as f64 + 0.5) * h);
                        sum += density(&x);
                    }
                }
            }
        }
        let oracle = sum * h.powi(4);
        let n = 2;
        let sq = TestFunction::radial(
            n,
            RadialProfile::new(
                Shape::Polynomial {
                    coeffs: vec![0.0, 1.0],
                },
                "|z|^2",
            ),
        );
        let quart = TestFunction::radial(
            n,
            RadialProfile::new(
                Shape::Polynomial {
                    coeffs: vec![0.0, 0.0, 1.0],
                },
                "|z|^4",
            ),
        );
        let e = mixed_energy(
            &quad_exh(2),
            &[&sq, &quart],
            &Parameters::new(2, 2, 0.0).unwrap(),
        )
        .unwrap();
        assert!(rel(e.value, oracle) < 1e-2, "{} vs grid {oracle}", e.value);
    }

    #[test]
    fn monte_carlo_examples() {
        let v = monte_carlo_integral(|_| 1.0, 2, 1, 10_000);
        assert!(rel(v.value, PI * PI / 2.0) < 1e-14);
        let p = Parameters::new(2, 1, 0.0).unwrap();
        let sq = TestFunction::radial(
            2,
            RadialProfile::new(
                Shape::Polynomial {
                    coeffs: vec![0.0, 1.0],
                },
                "|z|^2",
            ),
        );
        let v = monte_carlo_integral(|z| hessian_density(&sq, &p, z).unwrap().value, 2, 2, 20_000);
        assert!(rel(v.value, 16.0 * PI * PI) < 1e-12);
        let v = monte_carlo_integral(
            |z| 1.0 - z.iter().map(|w| w.norm_sqr()).sum::<f64>(),
            2,
            3,
            200_000,
        );
        assert!((v.value - PI * PI / 6.0).abs() <= 3.0 * v.abs_error_estimate);
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let f = |z: &[Complex64]| z[0].re.powi(2);
        let a = monte_carlo_integral(f, 3, 42, 5000);
        let b = monte_carlo_integral(f, 3, 42, 5000);
        assert_eq!(a, b);
    }

    #[test]
    fn sublevel_examples() {
        let u = quad_exh(2);
        assert!(rel(sublevel_volume(&u, 0.5).unwrap().volume, PI * PI / 8.0) < 1e-12);
        assert_eq!(sublevel_volume(&u, 1.0).unwrap().volume, 0.0);
        let fs = catalog_function("fundamental_solution", &CatalogParams::new(2, 1, 0.0)).unwrap();
        assert!(rel(sublevel_volume(&fs, 3.0).unwrap().volume, PI * PI / 32.0) < 1e-12);
    }

    #[test]
    fn sublevel_volume_is_nonincreasing_and_layer_cake_holds() {
        let u = quad_exh(2);
        let mut last = f64::INFINITY;
        for i in 0..50 {
            let v = sublevel_volume(&u, i as f64 / 50.0).unwrap().volume;
            assert!(v <= last);
            last = v;
        }
        for q in [0.5, 1.0, 2.5] {
            let direct = lq_norm(&u, q, &Parameters::new(2, 1, 0.0).unwrap())
                .unwrap()
                .value
                .powf(q);
            let layer = integrate(
                |s| q * s.powf(q - 1.0) * sublevel_volume(&u, s).unwrap().volume,
                0.0,
                1.0,
                &[],
                &QuadConfig::default(),
            )
            .unwrap()
            .value;
            assert!(rel(layer, direct) < 1e-6, "q={q}: {layer} vs {direct}");
        }
    }

    #[test]
    fn homogeneity_of_energy() {
        for seed in 0..5u64 {
            let prof =
                vanishing_polynomial(&crate::catalog::seeded_polynomial_coeffs(seed)).unwrap();
            let u = TestFunction::radial(3, prof);
            for (m, p) in [(1usize, 0.0f64), (2, 1.0), (3, 2.5)] {
                let params = Parameters::new(3, m, p).unwrap();
                let base = energy(&u, &params).unwrap().value;
                for c in [2.0, 0.5, 10.0] {
                    let scaled = energy(&u.scaled(c), &params).unwrap().value;
                    let expect = c.powf(p + m as f64) * base;
                    assert!(rel(scaled, expect) < 1e-8, "seed {seed} c {c}");
                }
            }
        }
    }
}
