//! Pointwise complex m-Hessian densities and the C^2 m-subharmonicity test.
//!
//! With `d^c = i (dbar - d)` the operator is
//! `H_m(u) = (dd^c u)^m ^ (dd^c |z|^2)^{n-m} = 4^n m! (n-m)! sigma_m(lambda) dV`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::catalog::{factorial, RadialProfile, TestFunction};
use crate::error::{Error, Result};
use crate::hermitian::{eigenvalues, elementary_symmetric, polarized_sigma};

/// Sign tolerance for `sigma_k` after Frobenius normalization of the Hessian.
pub const SIGN_TOL: f64 = 1e-9;

/// The tuple `(n, m, p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    #[serde(default)]
    pub q: Option<f64>,
}

impl Parameters {
    pub fn new(n: usize, m: usize, p: f64) -> Result<Self> {
        let out = Self { n, m, p, q: None };
        out.validate()?;
        Ok(out)
    }

    pub fn with_q(mut self, q: f64) -> Result<Self> {
        self.q = Some(q);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameters(format!(
                "need n >= 2, got {}",
                self.n
            )));
        }
        if self.m < 1 || self.m > self.n {
            return Err(Error::InvalidParameters(format!(
                "need 1 <= m <= n, got m = {}, n = {}",
                self.m, self.n
            )));
        }
        if !(self.p >= 0.0) {
            return Err(Error::InvalidParameters(format!(
                "need p >= 0, got {}",
                self.p
            )));
        }
        if let Some(q) = self.q {
            if !(q > 0.0) {
                return Err(Error::InvalidParameters(format!("need q > 0, got {q}")));
            }
        }
        Ok(())
    }

    /// Same tuple with a different `m` (used for Poincare pairs).
    pub fn with_m(&self, m: usize) -> Result<Self> {
        let out = Self { m, ..*self };
        out.validate()?;
        Ok(out)
    }
}

/// `4^n m! (n-m)!`.
pub fn density_constant(n: usize, m: usize) -> f64 {
    4f64.powi(n as i32) * factorial(m) * factorial(n - m)
}

/// Mass per unit Lebesgue volume `dV_{2n}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityValue {
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum MshClass {
    MSubharmonic {
        min_sigma: f64,
    },
    NotMSubharmonic {
        point: Vec<(f64, f64)>,
        k: usize,
        sigma: f64,
    },
    BoundaryCase {
        min_sigma: f64,
    },
}

/// Classifies `u` on the sample by the signs of `sigma_1..sigma_m` of the
/// Frobenius-normalized Hessian spectrum.
pub fn msh_check(
    u: &TestFunction,
    params: &Parameters,
    sample: &[Vec<Complex64>],
) -> Result<MshClass> {
    params.validate()?;
    if u.dim() != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            got: u.dim(),
        });
    }
    let mut min_sigma = f64::INFINITY;
    for z in sample {
        let h = u.analytic_hessian(z)?;
        let spec = eigenvalues(&h)?;
        let norm = h.frobenius_norm();
        let scaled: Vec<f64> = if norm > 0.0 {
            spec.values().iter().map(|x| x / norm).collect()
        } else {
            vec![0.0; params.n]
        };
        let e = elementary_symmetric(&scaled);
        for (k, &s) in e.iter().enumerate().take(params.m + 1).skip(1) {
            if s < -SIGN_TOL {
                return Ok(MshClass::NotMSubharmonic {
                    point: z.iter().map(|w| (w.re, w.im)).collect(),
                    k,
                    sigma: s,
                });
            }
            min_sigma = min_sigma.min(s);
        }
    }
    Ok(if min_sigma <= SIGN_TOL {
        MshClass::BoundaryCase { min_sigma }
    } else {
        MshClass::MSubharmonic { min_sigma }
    })
}

/// `H_m(u)` density at `z`.
pub fn hessian_density(
    u: &TestFunction,
    params: &Parameters,
    z: &[Complex64],
) -> Result<DensityValue> {
    params.validate()?;
    let spec = eigenvalues(&u.analytic_hessian(z)?)?;
    Ok(DensityValue {
        value: density_constant(params.n, params.m) * elementary_symmetric(spec.values())[params.m],
    })
}

/// `H_m` density of a radial profile at `|z|^2 = t`.
pub fn radial_density(profile: &RadialProfile, n: usize, m: usize, t: f64) -> Result<f64> {
    let ev = profile.basis_eigenvalues(n, t)?;
    Ok(density_constant(n, m) * elementary_symmetric(&ev)[m])
}

/// Density of `dd^c u_1 ^ ... ^ dd^c u_m ^ (dd^c |z|^2)^{n-m}` for radial
/// inputs at `|z|^2 = t`.
pub fn mixed_density(us: &[&RadialProfile], n: usize, t: f64) -> Result<f64> {
    let m = us.len();
    if m == 0 || m > n {
        return Err(Error::InvalidParameters(format!(
            "need 1 <= m <= n, got {m} inputs for n = {n}"
        )));
    }
    let vecs = us
        .iter()
        .map(|u| u.basis_eigenvalues(n, t))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&[f64]> = vecs.iter().map(|v| v.as_slice()).collect();
    Ok(density_constant(n, m) * polarized_sigma(&refs)?)
}

/// Like [`mixed_density`] but taking catalog handles; rejects non-radial inputs.
pub fn mixed_density_of(us: &[&TestFunction], n: usize, t: f64) -> Result<f64> {
    let profiles = us
        .iter()
        .map(|u| u.require_radial())
        .collect::<Result<Vec<_>>>()?;
    mixed_density(&profiles, n, t)
}

/// `max |sigma_m|` of the radial spectrum over `grid`.
pub fn mharmonicity_residual(
    profile: &RadialProfile,
    n: usize,
    m: usize,
    grid: &[f64],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for &t in grid {
        let ev = profile.basis_eigenvalues(n, t)?;
        worst = worst.max(elementary_symmetric(&ev)[m].abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog_function, sample_points, CatalogParams, Shape};

    fn params(n: usize, m: usize) -> Parameters {
        Parameters::new(n, m, 0.0).unwrap()
    }

    fn poly(coeffs: &[f64]) -> RadialProfile {
        RadialProfile::new(
            Shape::Polynomial {
                coeffs: coeffs.to_vec(),
            },
            "poly",
        )
    }

    #[test]
    fn parameter_validation() {
        assert!(Parameters::new(1, 1, 0.0).is_err());
        assert!(Parameters::new(2, 3, 0.0).is_err());
        assert!(Parameters::new(2, 1, -0.5).is_err());
        assert!(Parameters::new(2, 1, 0.0).unwrap().with_q(0.0).is_err());
    }

    #[test]
    fn msh_examples() {
        let sample = sample_points(2, 25, 0.05, 0.95, 1);
        let exh = catalog_function("quadratic_exhaustion", &CatalogParams::new(2, 2, 0.0)).unwrap();
        assert!(matches!(
            msh_check(&exh, &params(2, 2), &sample).unwrap(),
            MshClass::MSubharmonic { .. }
        ));

        let aniso = TestFunction::quadratic(vec![2.0, -1.0], 0.0);
        assert!(matches!(
            msh_check(&aniso, &params(2, 1), &sample).unwrap(),
            MshClass::MSubharmonic { .. }
        ));
        match msh_check(&aniso, &params(2, 2), &sample).unwrap() {
            MshClass::NotMSubharmonic { k, sigma, .. } => {
                assert_eq!(k, 2);
                assert!((sigma + 2.0 / 5.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }

        let ph = catalog_function("pluriharmonic_probe", &CatalogParams::new(2, 1, 0.0)).unwrap();
        assert!(matches!(
            msh_check(&ph, &params(2, 2), &sample).unwrap(),
            MshClass::BoundaryCase { .. }
        ));
    }

    #[test]
    fn density_examples() {
        let z = [Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4)];
        let sq = TestFunction::radial(2, poly(&[0.0, 1.0]));
        for m in [1, 2] {
            assert!((hessian_density(&sq, &params(2, m), &z).unwrap().value - 32.0).abs() < 1e-12);
        }
        let fs = catalog_function("fundamental_solution", &CatalogParams::new(2, 1, 0.0)).unwrap();
        assert!(hessian_density(&fs, &params(2, 1), &z).unwrap().value.abs() < 1e-9);
        let ph = TestFunction::pluriharmonic(2, 1.0);
        assert_eq!(hessian_density(&ph, &params(2, 1), &z).unwrap().value, 0.0);
    }

    #[test]
    fn mixed_examples() {
        let a = poly(&[0.0, 1.0]);
        let b = poly(&[0.0, 0.0, 1.0]);
        assert!((mixed_density(&[&a, &a], 2, 0.3).unwrap() - 32.0).abs() < 1e-12);
        assert!((mixed_density(&[&a, &b], 2, 0.5).unwrap() - 48.0).abs() < 1e-12);
        let ph = TestFunction::pluriharmonic(2, 1.0);
        let sq = TestFunction::radial(2, a.clone());
        assert!(matches!(
            mixed_density_of(&[&sq, &ph], 2, 0.5),
            Err(Error::NonRadial(_))
        ));
    }

    #[test]
    fn residual_examples() {
        let grid: Vec<f64> = (0..=80).map(|i| 0.1 + 0.01 * i as f64).collect();
        for (n, m) in [(2, 1), (3, 2)] {
            let fs =
                catalog_function("fundamental_solution", &CatalogParams::new(n, m, 0.0)).unwrap();
            let r = mharmonicity_residual(fs.radial_profile().unwrap(), n, m, &grid).unwrap();
            assert!(r <= 1e-10, "({n},{m}) residual {r}");
        }
        let r = mharmonicity_residual(&poly(&[-1.0, 1.0]), 3, 1, &grid).unwrap();
        assert_eq!(r, 3.0);
    }

    #[test]
    fn diagonal_mixed_density_matches_density_and_is_symmetric() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for case in 0..50 {
            let n = rng.random_range(2..=4usize);
            let m = rng.random_range(1..=n);
            let c1: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..1.0)).collect();
            let prof = crate::catalog::vanishing_polynomial(&c1).unwrap();
            let t: f64 = rng.random_range(0.05..1.0);
            let d = radial_density(&prof, n, m, t).unwrap();
            let copies: Vec<&RadialProfile> = vec![&prof; m];
            let md = mixed_density(&copies, n, t).unwrap();
            assert!((d - md).abs() <= 1e-10 * d.abs().max(1.0), "case {case}");

            if m >= 2 {
                let other =
                    crate::catalog::vanishing_polynomial(&[rng.random_range(0.1..1.0), 0.5])
                        .unwrap();
                let mut v: Vec<&RadialProfile> = vec![&prof; m];
                v[0] = &other;
                let x = mixed_density(&v, n, t).unwrap();
                v.swap(0, m - 1);
                let y = mixed_density(&v, n, t).unwrap();
                assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0));
            }
        }
    }

    #[test]
    fn msh_members_have_nonnegative_density() {
        let sample = sample_points(3, 20, 0.1, 0.9, 4);
        for seed in 0..8u64 {
            let mut cp = CatalogParams::new(3, 2, 0.0);
            cp.seed = Some(seed);
            let u = catalog_function("smooth_radial_polynomial", &cp).unwrap();
            let p = params(3, 2);
            if let MshClass::MSubharmonic { .. } = msh_check(&u, &p, &sample).unwrap() {
                for z in &sample {
                    assert!(hessian_density(&u, &p, z).unwrap().value >= -1e-10);
                }
            }
        }
    }
}
