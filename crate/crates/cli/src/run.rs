use mhessian::battery::suite_document;
use mhessian::capacity::{
    capacity_ball, geometric_s_ladder, verify_sublevel_capacity, verify_volume_capacity,
    DEFAULT_RADIUS_SQ_LADDER,
};
use mhessian::catalog::{
    catalog_function, sample_points, CatalogParams, FamilyParams, TestFunction,
};
use mhessian::hermitian::{eigenvalues, elementary_symmetric};
use mhessian::inequality::{
    basic_radial_family, counterexample_family, hoelder_suite, integrability_probe,
    quasinorm_properties, seeded_radial_family, sobolev_family_sweep, verify_poincare,
    verify_sobolev, Example,
};
use mhessian::integration::{
    energy, energy_monte_carlo, lq_norm, lq_norm_monte_carlo, sublevel_radius_sq,
};
use mhessian::operator::{hessian_density, msh_check, MshClass, Parameters};
use mhessian::report::{
    EntryBody, HessianSummary, NamedValue, ReportBuilder, ReportDocument, RunConfig,
};
use mhessian::{Error, Result};
use num_complex::Complex64;

use crate::cli::{Command, Dims, FunctionArgs, Verify};

const DEFAULT_J_SWEEP: [u32; 4] = [2, 4, 8, 16];
const LQ_MC_SAMPLES: usize = 200_000;

fn params(d: &Dims) -> Result<Parameters> {
    Parameters::new(d.n, d.m, d.p)
}

fn family(f: &FunctionArgs) -> FamilyParams {
    FamilyParams {
        j: f.j,
        alpha: f.alpha,
        beta: f.beta,
        eps: f.eps,
    }
}

fn build(d: &Dims, f: &FunctionArgs, seed: u64) -> Result<TestFunction> {
    let cp = CatalogParams {
        family: family(f),
        coeffs: f.coeffs.clone(),
        weights: f.weights.clone(),
        shift: f.shift,
        seed: Some(seed),
        ..CatalogParams::new(d.n, d.m, d.p)
    };
    catalog_function(&f.function, &cp)
}

fn config(command: &str, d: &Dims, f: Option<&FunctionArgs>, seed: u64) -> Result<RunConfig> {
    let mut c = RunConfig::new(command, params(d)?);
    c.seed = seed;
    if let Some(f) = f {
        c.function = Some(f.function.clone());
        c.family = family(f);
    }
    Ok(c)
}

fn point(n: usize, coords: Option<&[f64]>, seed: u64) -> Result<Vec<Complex64>> {
    match coords {
        Some(xs) => {
            if xs.len() != 2 * n {
                return Err(Error::DimensionMismatch {
                    expected: 2 * n,
                    got: xs.len(),
                });
            }
            let z: Vec<Complex64> = xs.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
            if z.iter().map(|w| w.norm_sqr()).sum::<f64>() >= 1.0 {
                return Err(Error::InvalidParameters(
                    "point must lie in the open unit ball".into(),
                ));
            }
            Ok(z)
        }
        None => Ok(sample_points(n, 1, 0.2, 0.8, seed).remove(0)),
    }
}

/// Runs one subcommand and returns its finished report.
pub fn execute(command: &Command, seed: u64) -> Result<ReportDocument> {
    match command {
        Command::Hessian {
            dims,
            function,
            point: coords,
        } => {
            let mut cfg = config("hessian", dims, Some(function), seed)?;
            cfg.point = coords.clone();
            let prm = cfg.params;
            let u = build(dims, function, seed)?;
            let z = point(dims.n, coords.as_deref(), seed)?;
            let mut b = ReportBuilder::new(cfg);
            b.run("hessian", || {
                let spec = eigenvalues(&u.analytic_hessian(&z)?)?;
                let sigma = elementary_symmetric(spec.values());
                let class = msh_check(&u, &prm, std::slice::from_ref(&z))?;
                Ok(EntryBody::Hessian(HessianSummary {
                    label: u.label().to_string(),
                    point: z.iter().map(|w| (w.re, w.im)).collect(),
                    eigenvalues: spec.values().to_vec(),
                    sigma,
                    density: hessian_density(&u, &prm, &z)?.value,
                    m_subharmonic: !matches!(class, MshClass::NotMSubharmonic { .. }),
                }))
            })?;
            b.finish()
        }
        Command::Energy {
            dims,
            function,
            monte_carlo,
            samples,
        } => {
            let cfg = config("energy", dims, Some(function), seed)?;
            let prm = cfg.params;
            let u = build(dims, function, seed)?;
            let mut b = ReportBuilder::new(cfg);
            b.run("energy", || {
                let value = if u.radial_profile().is_some() && !monte_carlo {
                    energy(&u, &prm)?
                } else {
                    energy_monte_carlo(&u, &prm, seed, *samples)?
                };
                Ok(EntryBody::Value(NamedValue {
                    label: u.label().to_string(),
                    params: prm,
                    quantity: "energy".into(),
                    value,
                }))
            })?;
            b.finish()
        }
        Command::Lqnorm { dims, function, q } => {
            let mut cfg = config("lqnorm", dims, Some(function), seed)?;
            cfg.params = cfg.params.with_q(*q)?;
            let prm = cfg.params;
            let u = build(dims, function, seed)?;
            let mut b = ReportBuilder::new(cfg);
            b.run("lqnorm", || {
                let value = if u.radial_profile().is_some() {
                    lq_norm(&u, *q, &prm)?
                } else {
                    lq_norm_monte_carlo(&u, *q, seed, LQ_MC_SAMPLES)
                };
                Ok(EntryBody::Value(NamedValue {
                    label: u.label().to_string(),
                    params: prm,
                    quantity: format!("L^{q} norm"),
                    value,
                }))
            })?;
            b.finish()
        }
        Command::Verify { which } => verify(which, seed),
        Command::Examples {
            which,
            dims,
            j,
            alpha,
            beta,
            q,
        } => {
            let example: Example = which.parse()?;
            let mut cfg = RunConfig::new(format!("examples {which}"), params(dims)?);
            cfg.seed = seed;
            cfg.function = Some(example.catalog_name().to_string());
            cfg.family = FamilyParams {
                j: j.unwrap_or(DEFAULT_J_SWEEP[0]),
                alpha: *alpha,
                beta: *beta,
                ..FamilyParams::default()
            };
            if let Some(q) = q {
                cfg.params = cfg.params.with_q(*q)?;
            }
            let js: Vec<u32> = match j {
                Some(j) => vec![*j],
                None => DEFAULT_J_SWEEP.to_vec(),
            };
            cfg.sweep = Some(js.iter().map(|&j| j as f64).collect());
            let (prm, fam) = (cfg.params, cfg.family);
            let mut b = ReportBuilder::new(cfg);
            b.run(which.as_str(), || {
                counterexample_family(example, &prm, fam, &js).map(EntryBody::Counterexample)
            })?;
            b.finish()
        }
        Command::Integrability {
            dims,
            function,
            span,
            points,
        } => {
            if dims.m >= dims.n {
                return Err(Error::InvalidParameters(format!(
                    "integrability needs m < n, got m = {}, n = {}",
                    dims.m, dims.n
                )));
            }
            if *points < 2 || !(*span > 0.0) {
                return Err(Error::InvalidParameters(
                    "need --points >= 2 and --span > 0".into(),
                ));
            }
            let mut cfg = config("integrability", dims, Some(function), seed)?;
            let threshold = (dims.n * dims.m) as f64 / (dims.n - dims.m) as f64;
            let grid: Vec<f64> = (1..=*points)
                .map(|i| span * threshold * i as f64 / *points as f64)
                .collect();
            cfg.sweep = Some(grid.clone());
            let prm = cfg.params;
            let u = build(dims, function, seed)?;
            let mut b = ReportBuilder::new(cfg);
            b.run("integrability", || {
                integrability_probe(&u, &grid, &prm).map(EntryBody::Integrability)
            })?;
            b.finish()
        }
        Command::Suite => {
            let mut cfg = RunConfig::new("suite", Parameters::new(2, 1, 0.0)?);
            cfg.seed = seed;
            suite_document(cfg)
        }
    }
}

fn verify(which: &Verify, seed: u64) -> Result<ReportDocument> {
    match which {
        Verify::Poincare {
            dims,
            function,
            l,
            k,
        } => {
            let mut cfg = config("verify poincare", dims, Some(function), seed)?;
            cfg.l = Some(*l);
            cfg.k = Some(*k);
            let prm = cfg.params;
            let u = build(dims, function, seed)?;
            let mut b = ReportBuilder::new(cfg);
            b.run("poincare", || {
                verify_poincare(&u, &prm, *l, *k).map(EntryBody::Inequality)
            })?;
            b.finish()
        }
        Verify::Sobolev {
            dims,
            function,
            q,
            family,
        } => {
            let mut cfg = config("verify sobolev", dims, Some(function), seed)?;
            cfg.params = cfg.params.with_q(*q)?;
            let prm = cfg.params;
            let u = build(dims, function, seed)?;
            let mut b = ReportBuilder::new(cfg);
            match family {
                Some(count) => {
                    let mut members = vec![u];
                    members.extend(seeded_radial_family(dims.n, *count, seed)?);
                    b.run("sobolev", || {
                        sobolev_family_sweep(&members, &prm).map(EntryBody::SobolevSweep)
                    })?;
                }
                None => b.run("sobolev", || {
                    verify_sobolev(&u, &prm, None).map(EntryBody::Inequality)
                })?,
            }
            b.finish()
        }
        Verify::Hoelder { dims } => {
            let cfg = config("verify hoelder", dims, None, seed)?;
            let prm = cfg.params;
            let mut b = ReportBuilder::new(cfg);
            b.run("hoelder", || {
                hoelder_suite(&basic_radial_family(dims.n), &prm).map(EntryBody::Hoelder)
            })?;
            b.finish()
        }
        Verify::Capacity { dims, r, alpha } => {
            let mut cfg = config("verify capacity", dims, None, seed)?;
            cfg.radius = Some(*r);
            cfg.alpha = *alpha;
            let prm = cfg.params;
            let mut b = ReportBuilder::new(cfg);
            b.run("capacity", || {
                capacity_ball(*r, &prm).map(EntryBody::Capacity)
            })?;
            if let Some(alpha) = alpha {
                b.run("volume-capacity", || {
                    verify_volume_capacity(&prm, *alpha, &DEFAULT_RADIUS_SQ_LADDER)
                        .map(EntryBody::VolumeCapacity)
                })?;
            }
            b.finish()
        }
        Verify::Sublevel {
            dims,
            function,
            rungs,
        } => {
            let mut cfg = config("verify sublevel", dims, Some(function), seed)?;
            let prm = cfg.params;
            let u = build(dims, function, seed)?;
            let profile = u.require_radial()?;
            // start halfway to the deepest level the function reaches
            let depth = -profile.value_at_origin();
            let s_top = if depth.is_infinite() {
                1.0
            } else {
                0.5 * depth
            };
            if !(s_top > 0.0) || sublevel_radius_sq(profile, s_top) <= 0.0 {
                return Err(Error::InvalidParameters(format!(
                    "`{}` has no nonempty sublevel set {{u < -s}} with s > 0",
                    u.label()
                )));
            }
            let ladder = geometric_s_ladder(s_top, *rungs);
            cfg.sweep = Some(ladder.clone());
            let mut b = ReportBuilder::new(cfg);
            b.run("sublevel-capacity", || {
                verify_sublevel_capacity(&u, &prm, &ladder).map(EntryBody::SublevelCapacity)
            })?;
            b.finish()
        }
        Verify::Quasinorm { dims, triples } => {
            let cfg = config("verify quasinorm", dims, None, seed)?;
            let prm = cfg.params;
            let mut members = basic_radial_family(dims.n);
            members.extend(seeded_radial_family(dims.n, 4, seed)?);
            let mut b = ReportBuilder::new(cfg);
            b.run("quasinorm", || {
                quasinorm_properties(&members, &prm, seed, *triples).map(EntryBody::Quasinorm)
            })?;
            b.finish()
        }
    }
}
