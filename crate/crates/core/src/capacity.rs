//! m-capacity of balls and of sublevel sets of radial functions.
//!
//! The relative extremal function of the closed ball `{|z|^2 <= T}` is the
//! rescaled truncated fundamental solution
//! `max(1 - t^{-a}, 1 - T^{-a}) / (T^{-a} - 1)`, whose whole `H_m` mass sits
//! on the sphere `t = T`.

use serde::{Deserialize, Serialize};

use crate::catalog::{fundamental_exponent, truncated_mass, RadialProfile, Shape, TestFunction};
use crate::error::{Error, Result};
use crate::inequality::{loglog_fit, InequalityReport, PowerFit, Verdict, Witness};
use crate::integration::{
    ball_volume, energy, ladder_energy, sublevel_radius_sq, DEFAULT_EPS_LADDER,
};
use crate::operator::Parameters;

/// Relative inward shift of the admissible candidate used for lower bounds.
pub const CANDIDATE_SHRINK: f64 = 1e-4;
/// Squared radii of the default ball ladder.
pub const DEFAULT_RADIUS_SQ_LADDER: [f64; 5] = [0.8, 0.4, 0.2, 0.1, 0.05];
pub const DEFAULT_S_RUNGS: usize = 6;
/// Number of smallest balls used for the small-radius trend.
pub const TAIL_RUNGS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CapacitySet {
    Ball { radius: f64 },
    Sublevel { s: f64, radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityEstimate {
    pub set: CapacitySet,
    pub lower_bound: f64,
    pub exact: Option<f64>,
    pub method: String,
}

/// Closed-form `cap_m` of the closed ball of squared radius `radius_sq`.
pub fn ball_capacity_closed_form(n: usize, m: usize, radius_sq: f64) -> Result<f64> {
    let a = fundamental_exponent(n, m)?;
    if !(radius_sq > 0.0 && radius_sq < 1.0) {
        return Err(Error::InvalidParameters(format!(
            "need 0 < r < 1, got r^2 = {radius_sq}"
        )));
    }
    Ok(truncated_mass(n, m)? / (radius_sq.powf(-a) - 1.0).powi(m as i32))
}

/// Extremal profile of the ball `{t <= radius_sq}`.
pub fn extremal_profile(n: usize, m: usize, radius_sq: f64) -> Result<RadialProfile> {
    let a = fundamental_exponent(n, m)?;
    let level = radius_sq.powf(-a) - 1.0;
    Ok(RadialProfile::new(
        Shape::Truncated {
            exponent: a,
            floor: -level,
            scale: 1.0 / level,
            smoothing: None,
        },
        format!("extremal(r^2={radius_sq})"),
    ))
}

/// `cap_m` of the closed ball of radius `radius`.
///
/// The lower bound is the `eps`-extrapolated `H_m` mass of the extremal
/// function of a slightly smaller ball, an admissible candidate whose mass
/// lies inside the set.
pub fn capacity_ball(radius: f64, params: &Parameters) -> Result<CapacityEstimate> {
    params.validate()?;
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::InvalidParameters(format!(
            "need 0 < r < 1, got r = {radius}"
        )));
    }
    let t = radius * radius;
    let exact = ball_capacity_closed_form(params.n, params.m, t)?;
    let candidate = extremal_profile(params.n, params.m, t * (1.0 - CANDIDATE_SHRINK))?;
    let lower = ladder_energy(&candidate, params.n, params.m, 0.0, &DEFAULT_EPS_LADDER)?.value;
    Ok(CapacityEstimate {
        set: CapacitySet::Ball { radius },
        lower_bound: lower,
        exact: Some(exact),
        method: "extremal candidate mass, eps-extrapolated".into(),
    })
}

/// `s_k = s_max 2^{-k}` for `k = 0..rungs`.
pub fn geometric_s_ladder(s_max: f64, rungs: usize) -> Vec<f64> {
    (0..rungs).map(|k| s_max * 0.5f64.powi(k as i32)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SublevelCapacityRow {
    pub s: f64,
    pub capacity: CapacityEstimate,
    pub report: InequalityReport,
}

/// `cap_m({u < -s}) <= 2^{m+p} s^{-m-p} e_{p,m}(u)` along `s_ladder`.
pub fn verify_sublevel_capacity(
    u: &TestFunction,
    params: &Parameters,
    s_ladder: &[f64],
) -> Result<Vec<SublevelCapacityRow>> {
    let profile = u.require_radial()?;
    let e = energy(u, params)?.value;
    let mp = params.m as f64 + params.p;
    s_ladder
        .iter()
        .map(|&s| {
            if !(s > 0.0) {
                return Err(Error::InvalidParameters(format!("need s > 0, got {s}")));
            }
            let t = sublevel_radius_sq(profile, s);
            let capacity = if t <= 0.0 {
                CapacityEstimate {
                    set: CapacitySet::Sublevel { s, radius: 0.0 },
                    lower_bound: 0.0,
                    exact: Some(0.0),
                    method: "empty set".into(),
                }
            } else {
                let mut c = capacity_ball(t.sqrt(), params)?;
                c.set = CapacitySet::Sublevel {
                    s,
                    radius: t.sqrt(),
                };
                c
            };
            let lhs = capacity.exact.unwrap_or(capacity.lower_bound);
            let report = InequalityReport::new(
                format!("sublevel-capacity(s={s})"),
                *params,
                lhs,
                2f64.powf(mp) * s.powf(-mp) * e,
                Some(1.0),
                Some(Witness::of(u)),
            );
            Ok(SublevelCapacityRow {
                s,
                capacity,
                report,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeCapacityRow {
    pub radius: f64,
    pub volume: f64,
    pub capacity: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeCapacityReport {
    pub params: Parameters,
    pub alpha: f64,
    /// `n / (n - m)`.
    pub threshold: f64,
    pub rows: Vec<VolumeCapacityRow>,
    /// Fit of `ln(V / cap^alpha)` against `ln r` over the whole ladder.
    pub fit: PowerFit,
    /// Same fit over the [`TAIL_RUNGS`] smallest balls, which decides the verdict.
    pub tail_fit: PowerFit,
    /// Small-ball slope `2n - alpha (2n - 2m)`.
    pub asymptotic_slope: f64,
    pub verdict: Verdict,
}

/// `V_{2n}(B_r) / cap_m(B_r)^alpha` along shrinking balls. Below the
/// threshold the ratio must stay bounded (nonnegative slope in `r`); above
/// it the ratio blows up as `r -> 0`, recorded as a sharpness witness.
pub fn verify_volume_capacity(
    params: &Parameters,
    alpha: f64,
    radius_sq_ladder: &[f64],
) -> Result<VolumeCapacityReport> {
    params.validate()?;
    if !(alpha > 1.0) {
        return Err(Error::InvalidParameters(format!(
            "need alpha > 1, got {alpha}"
        )));
    }
    let (n, m) = (params.n, params.m);
    fundamental_exponent(n, m)?;
    let rows = radius_sq_ladder
        .iter()
        .map(|&t| {
            let capacity = ball_capacity_closed_form(n, m, t)?;
            let volume = ball_volume(n) * t.powi(n as i32);
            Ok(VolumeCapacityRow {
                radius: t.sqrt(),
                volume,
                capacity,
                ratio: volume / capacity.powf(alpha),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rs: Vec<f64> = rows.iter().map(|r| r.radius).collect();
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let fit = loglog_fit(&rs, &ratios)?;
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&i, &j| rs[i].total_cmp(&rs[j]));
    order.truncate(TAIL_RUNGS.max(2));
    let tail_fit = loglog_fit(
        &order.iter().map(|&i| rs[i]).collect::<Vec<_>>(),
        &order.iter().map(|&i| ratios[i]).collect::<Vec<_>>(),
    )?;
    let threshold = n as f64 / (n - m) as f64;
    let verdict = if alpha < threshold {
        if tail_fit.slope >= 0.0 {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    } else if tail_fit.slope < 0.0 {
        Verdict::SharpnessWitness
    } else {
        Verdict::Violated
    };
    Ok(VolumeCapacityReport {
        params: *params,
        alpha,
        threshold,
        rows,
        fit,
        tail_fit,
        asymptotic_slope: 2.0 * n as f64 - alpha * (2 * (n - m)) as f64,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::catalog::{catalog_function, CatalogParams};

    #[test]
    fn half_ball_capacity() {
        let p = Parameters::new(2, 1, 0.0).unwrap();
        let c = capacity_ball(0.5f64.sqrt(), &p).unwrap();
        let exact = c.exact.unwrap();
        assert!((exact - 16.0 * PI * PI).abs() < 1e-9);
        assert!(c.lower_bound <= exact * (1.0 + 1e-6));
        assert!((c.lower_bound - exact).abs() / exact < 1e-2);
    }

    #[test]
    fn capacity_grows_toward_the_boundary_and_scales_for_small_balls() {
        let p = Parameters::new(2, 1, 0.0).unwrap();
        let caps: Vec<f64> = [0.3, 0.5, 0.7, 0.9, 0.99]
            .iter()
            .map(|r| capacity_ball(*r, &p).unwrap().exact.unwrap())
            .collect();
        assert!(caps.windows(2).all(|w| w[1] > w[0]));
        let rs = [1e-3, 2e-3, 4e-3];
        let small: Vec<f64> = rs
            .iter()
            .map(|r| ball_capacity_closed_form(2, 1, r * r).unwrap())
            .collect();
        let fit = loglog_fit(&rs, &small).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-3);
    }

    #[test]
    fn rejects_full_rank_and_bad_radius() {
        assert!(capacity_ball(0.5, &Parameters::new(2, 2, 0.0).unwrap()).is_err());
        assert!(capacity_ball(1.0, &Parameters::new(2, 1, 0.0).unwrap()).is_err());
    }

    #[test]
    fn sublevel_bound_for_quadratic() {
        let p = Parameters::new(2, 1, 0.0).unwrap();
        let u = catalog_function("quadratic_exhaustion", &CatalogParams::new(2, 1, 0.0)).unwrap();
        let rows = verify_sublevel_capacity(&u, &p, &[0.5, 1.0, 2.0]).unwrap();
        assert!((rows[0].report.lhs - 16.0 * PI * PI).abs() < 1e-9);
        assert!((rows[0].report.rhs - 4.0 * 16.0 * PI * PI).abs() < 1e-6);
        assert_eq!(rows[1].report.lhs, 0.0);
        assert_eq!(rows[2].report.lhs, 0.0);
        assert!(rows.iter().all(|r| r.report.verdict == Verdict::Holds));
    }

    #[test]
    fn volume_capacity_threshold() {
        let p = Parameters::new(2, 1, 0.0).unwrap();
        let below = verify_volume_capacity(&p, 1.5, &DEFAULT_RADIUS_SQ_LADDER).unwrap();
        assert_eq!(below.threshold, 2.0);
        assert_eq!(below.verdict, Verdict::Holds);
        let above = verify_volume_capacity(&p, 2.5, &DEFAULT_RADIUS_SQ_LADDER).unwrap();
        assert_eq!(above.verdict, Verdict::SharpnessWitness);
        assert!((above.asymptotic_slope + 1.0).abs() < 1e-12);
    }
}
