//! Executable checks of energy inequalities on the unit ball.
//!
//! Every check produces an [`InequalityReport`] with `margin = rhs - lhs`;
//! a report holds when `margin >= -VERDICT_TOL * (1 + |rhs|)`. Where only the
//! existence of a constant is known, the constant is estimated as an
//! empirical supremum over a declared family.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{
    catalog_function, fundamental_exponent, quoted_mass_constant, seeded_polynomial_coeffs,
    truncated_mass, vanishing_polynomial, CatalogParams, FamilyParams, RadialProfile, Shape,
    TestFunction,
};
use crate::error::{Error, Result};
use crate::integration::{energy, lq_norm, mixed_energy};
use crate::operator::Parameters;

/// Relative slack used by every verdict.
pub const VERDICT_TOL: f64 = 1e-6;
/// Acceptance band for fitted exponents.
pub const EXPONENT_BAND: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
    SharpnessWitness,
}

impl Verdict {
    pub fn from_margin(margin: f64, rhs: f64) -> Self {
        if margin >= -VERDICT_TOL * (1.0 + rhs.abs()) {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    }

    pub fn is_ok(self) -> bool {
        !matches!(self, Verdict::Violated)
    }
}

/// The function (and its parameters) a report was computed for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<CatalogParams>,
}

impl Witness {
    pub fn of(u: &TestFunction) -> Self {
        Self {
            label: u.label().to_string(),
            params: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub params: Parameters,
    pub lhs: f64,
    pub rhs: f64,
    /// `None` when only the raw ratio is reported.
    pub constant_used: Option<f64>,
    /// `lhs / (rhs / constant)`: the smallest constant that would make this instance hold.
    pub ratio: f64,
    pub margin: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl InequalityReport {
    /// `lhs <= constant * raw_rhs`. Without a constant, `rhs = raw_rhs` and the
    /// verdict records only that both sides are finite.
    pub fn new(
        name: impl Into<String>,
        params: Parameters,
        lhs: f64,
        raw_rhs: f64,
        constant: Option<f64>,
        witness: Option<Witness>,
    ) -> Self {
        let rhs = constant.map_or(raw_rhs, |c| c * raw_rhs);
        let margin = rhs - lhs;
        let verdict = match constant {
            Some(_) => Verdict::from_margin(margin, rhs),
            None if lhs.is_finite() && raw_rhs.is_finite() => Verdict::Holds,
            None => Verdict::Violated,
        };
        Self {
            name: name.into(),
            params,
            lhs,
            rhs,
            constant_used: constant,
            ratio: lhs / raw_rhs,
            margin,
            verdict,
            witness,
        }
    }

    /// Same instance re-judged against `constant`.
    pub fn with_constant(&self, constant: f64) -> Self {
        let raw = self.lhs / self.ratio;
        Self::new(
            self.name.clone(),
            self.params,
            self.lhs,
            raw,
            Some(constant),
            self.witness.clone(),
        )
    }
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<PowerFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidParameters(
            "a log-log fit needs at least two points".into(),
        ));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParameters(
            "a log-log fit needs positive data".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameters(
            "a log-log fit needs distinct abscissae".into(),
        ));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(PowerFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// `|fitted - expected| <= EXPONENT_BAND * max(1, |expected|)`.
pub fn exponent_matches(fitted: f64, expected: f64) -> bool {
    (fitted - expected).abs() <= EXPONENT_BAND * expected.abs().max(1.0)
}

/// `e_{p,m}(u)^{1/(p+m)}`.
pub fn quasi_norm(u: &TestFunction, params: &Parameters) -> Result<f64> {
    Ok(energy(u, params)?
        .value
        .powf(1.0 / (params.p + params.m as f64)))
}

/// Optimal ball constant of the Poincare-type inequality between `e_{p,l}`
/// and `e_{p,k}`, known for `p = 0` and `p = 1`.
pub fn poincare_ball_constant(n: usize, l: usize, k: usize, p: f64) -> Option<f64> {
    let four_pi_n = (4.0 * PI).powi(n as i32);
    let (l, k) = (l as f64, k as f64);
    if p == 0.0 {
        Some(four_pi_n.powf(1.0 / l - 1.0 / k))
    } else if p == 1.0 {
        Some((four_pi_n / (n as f64 + 1.0)).powf(1.0 / l - 1.0 / k))
    } else {
        None
    }
}

/// `e_{p,l}(u)^{1/(p+l)} <= C e_{p,k}(u)^{1/(p+k)}` for `l < k`.
pub fn verify_poincare(
    u: &TestFunction,
    params: &Parameters,
    l: usize,
    k: usize,
) -> Result<InequalityReport> {
    if !(1 <= l && l < k && k <= params.n) {
        return Err(Error::InvalidParameters(format!(
            "need 1 <= l < k <= n, got l = {l}, k = {k}, n = {}",
            params.n
        )));
    }
    let p = params.p;
    let el = energy(u, &params.with_m(l)?)?.value;
    let ek = energy(u, &params.with_m(k)?)?.value;
    let lhs = el.powf(1.0 / (p + l as f64));
    let raw = ek.powf(1.0 / (p + k as f64));
    Ok(InequalityReport::new(
        format!("poincare(l={l},k={k})"),
        *params,
        lhs,
        raw,
        poincare_ball_constant(params.n, l, k, p),
        Some(Witness::of(u)),
    ))
}

/// Largest admissible Sobolev exponent `(m+p) n / (n-m)`; unbounded for `m = n`.
pub fn sobolev_threshold(n: usize, m: usize, p: f64) -> Option<f64> {
    (m < n).then(|| (m as f64 + p) * n as f64 / (n - m) as f64)
}

fn required_q(params: &Parameters) -> Result<f64> {
    params
        .q
        .ok_or_else(|| Error::InvalidParameters("this check needs an exponent q".into()))
}

/// `||u||_{L^q} <= C e_{p,m}(u)^{1/(m+p)}`; `params.q` must be set.
pub fn verify_sobolev(
    u: &TestFunction,
    params: &Parameters,
    constant: Option<f64>,
) -> Result<InequalityReport> {
    let q = required_q(params)?;
    let lhs = lq_norm(u, q, params)?.value;
    let raw = energy(u, params)?
        .value
        .powf(1.0 / (params.m as f64 + params.p));
    Ok(InequalityReport::new(
        format!("sobolev(q={q})"),
        *params,
        lhs,
        raw,
        constant,
        Some(Witness::of(u)),
    ))
}

/// Sobolev ratios over a family, judged against their empirical supremum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevSweep {
    pub q: f64,
    pub threshold: Option<f64>,
    pub empirical_constant: f64,
    pub reports: Vec<InequalityReport>,
}

pub fn sobolev_family_sweep(family: &[TestFunction], params: &Parameters) -> Result<SobolevSweep> {
    let q = required_q(params)?;
    let raw = family
        .iter()
        .map(|u| verify_sobolev(u, params, None))
        .collect::<Result<Vec<_>>>()?;
    let sup = raw.iter().map(|r| r.ratio).fold(0.0, f64::max);
    if !sup.is_finite() {
        return Err(Error::Numerical("Sobolev ratio is not finite".into()));
    }
    Ok(SobolevSweep {
        q,
        threshold: sobolev_threshold(params.n, params.m, params.p),
        empirical_constant: sup,
        reports: raw.iter().map(|r| r.with_constant(sup)).collect(),
    })
}

/// A quantity tracked along `j` with its fitted log-log slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trend {
    pub name: String,
    pub js: Vec<u32>,
    pub values: Vec<f64>,
    pub fit: PowerFit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_slope: Option<f64>,
    pub monotone_increasing: bool,
    pub monotone_decreasing: bool,
}

impl Trend {
    pub fn new(
        name: impl Into<String>,
        js: &[u32],
        values: Vec<f64>,
        expected_slope: Option<f64>,
    ) -> Result<Self> {
        let xs: Vec<f64> = js.iter().map(|j| *j as f64).collect();
        let fit = loglog_fit(&xs, &values)?;
        Ok(Self {
            name: name.into(),
            js: js.to_vec(),
            monotone_increasing: values.windows(2).all(|w| w[1] > w[0]),
            monotone_decreasing: values.windows(2).all(|w| w[1] < w[0]),
            values,
            fit,
            expected_slope,
        })
    }
}

fn family_member(
    name: &str,
    params: &Parameters,
    family: FamilyParams,
    j: u32,
) -> Result<TestFunction> {
    let mut cp = CatalogParams::new(params.n, params.m, params.p);
    cp.family = FamilyParams { j, ..family };
    catalog_function(name, &cp)
}

/// Sobolev ratio `||u_j||_q / e(u_j)^{1/(m+p)}` along the bounded-energy
/// truncation ladder `j^{-p/(m+p)} max(fundamental, -j)`.
///
/// The energy is constant along the ladder, so the ratio scales like
/// `j^{m/(m+p) - n/(a q)}` when `a q > n` (`a = n/m - 1`) and like
/// `j^{-p/(m+p)}` otherwise; the sign flips at the threshold exponent.
pub fn sobolev_truncation_ladder(params: &Parameters, js: &[u32]) -> Result<Trend> {
    let q = required_q(params)?;
    let (n, m, p) = (params.n as f64, params.m as f64, params.p);
    let a = fundamental_exponent(params.n, params.m)?;
    let ratios = js
        .iter()
        .map(|&j| {
            let u = family_member("ex2_family", params, FamilyParams::default(), j)?;
            verify_sobolev(&u, params, None).map(|r| r.ratio)
        })
        .collect::<Result<Vec<_>>>()?;
    let expected = -p / (m + p) + (1.0 - n / (a * q)).max(0.0);
    Trend::new(
        format!("sobolev ratio along truncation ladder (q={q})"),
        js,
        ratios,
        Some(expected),
    )
}

/// One of the three impossible reverse inequalities, witnessed by a
/// counterexample ladder whose ratio diverges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpossibilityWitness {
    pub statement: String,
    pub family: String,
    pub trend: Trend,
    pub verdict: Verdict,
}

/// Ratios that must diverge along the counterexample ladders:
/// `e^{1/(m+p)} / ||u||_q` (first family), `||u||_inf / e^{1/(m+p)}` (second)
/// and `e^{1/(n+p)} / ||u||_inf` (third).
pub fn impossibility_witnesses(
    params: &Parameters,
    family: FamilyParams,
    js: &[u32],
) -> Result<Vec<ImpossibilityWitness>> {
    let q = required_q(params)?;
    let (n, m, p) = (params.n as f64, params.m as f64, params.p);
    let mut out = Vec::new();
    let mut push =
        |statement: &str, name: &str, f: &dyn Fn(&TestFunction) -> Result<f64>| -> Result<()> {
            let values = js
                .iter()
                .map(|&j| f(&family_member(name, params, family, j)?))
                .collect::<Result<Vec<_>>>()?;
            let trend = Trend::new(statement, js, values, None)?;
            let verdict = if trend.monotone_increasing && trend.fit.slope > 0.0 {
                Verdict::SharpnessWitness
            } else {
                Verdict::Violated
            };
            out.push(ImpossibilityWitness {
                statement: statement.to_string(),
                family: name.to_string(),
                trend,
                verdict,
            });
            Ok(())
        };
    push(
        &format!("e^(1/(m+p)) / ||u||_L^{q} unbounded"),
        "ex1_family",
        &|u| Ok(energy(u, params)?.value.powf(1.0 / (m + p)) / lq_norm(u, q, params)?.value),
    )?;
    push("||u||_inf / e^(1/(m+p)) unbounded", "ex2_family", &|u| {
        Ok(u.require_radial()?.sup_norm() / energy(u, params)?.value.powf(1.0 / (m + p)))
    })?;
    push("e^(1/(n+p)) / ||u||_inf unbounded", "ex3_family", &|u| {
        Ok(energy(u, params)?.value.powf(1.0 / (n + p)) / u.require_radial()?.sup_norm())
    })?;
    Ok(out)
}

/// `int (-u_0)^p dd^c u_1 ^ ... ^ dd^c u_m ^ beta^{n-m}
///   <= C e_p(u_0)^{p/(p+m)} e_p(u_1)^{1/(p+m)} ... e_p(u_m)^{1/(p+m)}`.
pub fn verify_hoelder(
    u0: &TestFunction,
    us: &[&TestFunction],
    params: &Parameters,
    constant: Option<f64>,
) -> Result<InequalityReport> {
    if !(params.p > 0.0) {
        return Err(Error::InvalidParameters(format!(
            "need p > 0, got {}",
            params.p
        )));
    }
    let pm = params.p + params.m as f64;
    let lhs = mixed_energy(u0, us, params)?.value;
    let mut raw = energy(u0, params)?.value.powf(params.p / pm);
    for u in us {
        raw *= energy(u, params)?.value.powf(1.0 / pm);
    }
    let label = std::iter::once(u0.label())
        .chain(us.iter().map(|u| u.label()))
        .collect::<Vec<_>>()
        .join("; ");
    Ok(InequalityReport::new(
        "hoelder",
        *params,
        lhs,
        raw,
        constant,
        Some(Witness {
            label,
            params: None,
        }),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoelderSuite {
    pub params: Parameters,
    /// Largest ratio over all tuples.
    pub empirical_constant: f64,
    /// `max |ratio - 1|` over tuples with all entries equal.
    pub identity_deviation: f64,
    pub reports: Vec<InequalityReport>,
}

/// All `(m+1)`-tuples drawn from `family`.
pub fn hoelder_suite(family: &[TestFunction], params: &Parameters) -> Result<HoelderSuite> {
    let k = family.len();
    let m = params.m;
    let total = k.pow(m as u32 + 1);
    let mut raw = Vec::with_capacity(total);
    let mut identity_deviation = 0.0f64;
    for code in 0..total {
        let idx: Vec<usize> = (0..=m).map(|d| (code / k.pow(d as u32)) % k).collect();
        let us: Vec<&TestFunction> = idx[1..].iter().map(|&i| &family[i]).collect();
        let r = verify_hoelder(&family[idx[0]], &us, params, None)?;
        if idx.iter().all(|&i| i == idx[0]) {
            identity_deviation = identity_deviation.max((r.ratio - 1.0).abs());
        }
        raw.push(r);
    }
    let sup = raw.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(HoelderSuite {
        params: *params,
        empirical_constant: sup,
        identity_deviation,
        reports: raw.iter().map(|r| r.with_constant(sup)).collect(),
    })
}

/// Sum of radial members.
pub fn radial_sum(us: &[&TestFunction]) -> Result<TestFunction> {
    let first = us
        .first()
        .ok_or_else(|| Error::InvalidParameters("empty sum".into()))?;
    let mut acc: RadialProfile = first.require_radial()?.clone();
    for u in &us[1..] {
        if u.dim() != first.dim() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                got: u.dim(),
            });
        }
        acc = acc.plus(u.require_radial()?);
    }
    Ok(TestFunction::radial(first.dim(), acc))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRatio {
    pub first: String,
    pub second: String,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainCheck {
    pub members: Vec<String>,
    pub lhs: f64,
    pub rhs: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasinormReport {
    pub params: Parameters,
    pub homogeneity_max_rel_err: f64,
    /// Empirical modulus of concavity.
    pub modulus: f64,
    pub pairs: Vec<PairRatio>,
    pub chains: Vec<ChainCheck>,
    pub verdict: Verdict,
}

pub const HOMOGENEITY_SCALES: [f64; 3] = [2.0, 0.5, 3.0];

/// Homogeneity of `||u||_0 = e_{p,m}(u)^{1/(p+m)}`, the empirical modulus of
/// concavity over all pairs, and `||x_1 + ... + x_k|| <= sum C^j ||x_j||`
/// on `triples` seeded triples.
pub fn quasinorm_properties(
    family: &[TestFunction],
    params: &Parameters,
    seed: u64,
    triples: usize,
) -> Result<QuasinormReport> {
    let norms = family
        .iter()
        .map(|u| quasi_norm(u, params))
        .collect::<Result<Vec<_>>>()?;
    let mut homogeneity = 0.0f64;
    for (u, nu) in family.iter().zip(&norms) {
        for t in HOMOGENEITY_SCALES {
            let scaled = quasi_norm(&u.scaled(t), params)?;
            homogeneity = homogeneity.max((scaled - t * nu).abs() / (t * nu));
        }
    }
    let mut pairs = Vec::new();
    for i in 0..family.len() {
        for j in i..family.len() {
            let s = radial_sum(&[&family[i], &family[j]])?;
            pairs.push(PairRatio {
                first: family[i].label().to_string(),
                second: family[j].label().to_string(),
                ratio: quasi_norm(&s, params)? / (norms[i] + norms[j]),
            });
        }
    }
    let modulus = pairs.iter().map(|p| p.ratio).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chains = Vec::with_capacity(triples);
    for _ in 0..triples {
        let idx: Vec<usize> = (0..3).map(|_| rng.random_range(0..family.len())).collect();
        let members: Vec<&TestFunction> = idx.iter().map(|&i| &family[i]).collect();
        let lhs = quasi_norm(&radial_sum(&members)?, params)?;
        let rhs: f64 = idx
            .iter()
            .enumerate()
            .map(|(k, &i)| modulus.powi(k as i32 + 1) * norms[i])
            .sum();
        chains.push(ChainCheck {
            members: members.iter().map(|u| u.label().to_string()).collect(),
            lhs,
            rhs,
            verdict: Verdict::from_margin(rhs - lhs, rhs),
        });
    }
    let ok = homogeneity <= 1e-10
        && modulus >= 1.0 - VERDICT_TOL
        && chains.iter().all(|c| c.verdict.is_ok());
    Ok(QuasinormReport {
        params: *params,
        homogeneity_max_rel_err: homogeneity,
        modulus,
        pairs,
        chains,
        verdict: if ok {
            Verdict::Holds
        } else {
            Verdict::Violated
        },
    })
}

/// Which truncated counterexample ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Example {
    Ex1,
    Ex2,
    Ex3,
}

impl Example {
    pub fn catalog_name(self) -> &'static str {
        match self {
            Example::Ex1 => "ex1_family",
            Example::Ex2 => "ex2_family",
            Example::Ex3 => "ex3_family",
        }
    }
}

impl std::str::FromStr for Example {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ex1" => Ok(Example::Ex1),
            "ex2" => Ok(Example::Ex2),
            "ex3" => Ok(Example::Ex3),
            other => Err(Error::UnknownFunction(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRow {
    pub j: u32,
    pub energy: f64,
    pub energy_error: f64,
    /// Closed form built on the quoted mass constant.
    pub expected_energy: f64,
    pub sup_norm: f64,
    pub expected_sup_norm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lq_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub quantity: String,
    pub fitted: f64,
    pub expected: f64,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub example: Example,
    pub params: Parameters,
    pub family: FamilyParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    pub quoted_mass_constant: f64,
    /// `H_m` mass of a unit truncation under the operator normalization used here.
    pub truncated_mass: f64,
    pub rows: Vec<CounterexampleRow>,
    pub fits: Vec<ExponentFit>,
    pub verdict: Verdict,
}

/// Default `j` ladder.
pub const DEFAULT_J_SWEEP: [u32; 4] = [2, 4, 8, 16];

/// Energies, sup-norms (and `L^q` norms for the first family when `params.q`
/// is set) along `js`, with fitted exponents compared to the closed forms.
/// With fewer than two members no exponents are fitted.
pub fn counterexample_family(
    which: Example,
    params: &Parameters,
    family: FamilyParams,
    js: &[u32],
) -> Result<CounterexampleReport> {
    let (n, m, p) = (params.n, params.m as f64, params.p);
    if params.m >= n {
        return Err(Error::InvalidParameters(format!(
            "need 1 <= m < n, got m = {}, n = {n}",
            params.m
        )));
    }
    let c = quoted_mass_constant(n, params.m)?;
    let (alpha, beta) = (family.alpha, family.beta);
    let expected_energy = |j: f64| match which {
        Example::Ex1 => c * j.powf(-alpha * (m + p)) * (j.powf(beta) - 1.0).powf(p),
        Example::Ex2 => c,
        Example::Ex3 => c * j.powf(m),
    };
    let expected_sup = |j: f64| match which {
        Example::Ex1 => j.powf(-alpha) * (j.powf(beta) - 1.0),
        Example::Ex2 => j.powf(m / (m + p)),
        Example::Ex3 => 1.0,
    };
    let q = if which == Example::Ex1 {
        params.q
    } else {
        None
    };
    let mut rows = Vec::with_capacity(js.len());
    for &j in js {
        let u = family_member(which.catalog_name(), params, family, j)?;
        let e = energy(&u, params)?;
        let lq = q
            .map(|q| lq_norm(&u, q, params).map(|v| v.value))
            .transpose()?;
        rows.push(CounterexampleRow {
            j,
            energy: e.value,
            energy_error: e.abs_error_estimate,
            expected_energy: expected_energy(j as f64),
            sup_norm: u.require_radial()?.sup_norm(),
            expected_sup_norm: expected_sup(j as f64),
            lq_norm: lq,
        });
    }
    if js.len() < 2 {
        // a single member carries no exponent claim
        return Ok(CounterexampleReport {
            example: which,
            params: *params,
            family,
            q,
            quoted_mass_constant: c,
            truncated_mass: truncated_mass(n, params.m)?,
            rows,
            fits: Vec::new(),
            verdict: Verdict::Holds,
        });
    }
    let xs: Vec<f64> = js.iter().map(|j| *j as f64).collect();
    let mut fits = Vec::new();
    let mut fit = |quantity: &str, measured: Vec<f64>, expected: f64| -> Result<()> {
        let fitted = loglog_fit(&xs, &measured)?.slope;
        fits.push(ExponentFit {
            quantity: quantity.to_string(),
            fitted,
            expected,
            matches: exponent_matches(fitted, expected),
        });
        Ok(())
    };
    let expected_e: Vec<f64> = xs.iter().map(|&j| expected_energy(j)).collect();
    let expected_s: Vec<f64> = xs.iter().map(|&j| expected_sup(j)).collect();
    fit(
        "energy",
        rows.iter().map(|r| r.energy).collect(),
        loglog_fit(&xs, &expected_e)?.slope,
    )?;
    fit(
        "sup_norm",
        rows.iter().map(|r| r.sup_norm).collect(),
        loglog_fit(&xs, &expected_s)?.slope,
    )?;
    if let Some(q) = q {
        let mn = m * n as f64;
        let expected = (beta * q - alpha * q + mn / (m - n as f64)) / q;
        fit(
            &format!("lq_norm(q={q})"),
            rows.iter().filter_map(|r| r.lq_norm).collect(),
            expected,
        )?;
    }
    let verdict = if fits.iter().all(|f| f.matches) {
        Verdict::SharpnessWitness
    } else {
        Verdict::Violated
    };
    Ok(CounterexampleReport {
        example: which,
        params: *params,
        family,
        q,
        quoted_mass_constant: c,
        truncated_mass: truncated_mass(n, params.m)?,
        rows,
        fits,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityRow {
    pub q: f64,
    pub finite: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityReport {
    pub params: Parameters,
    pub label: String,
    pub rows: Vec<IntegrabilityRow>,
    /// Bisected finite/divergent transition, if the grid brackets one.
    pub flip: Option<f64>,
    /// `n m / (n - m)`.
    pub conjectured_threshold: Option<f64>,
    /// `n / (n - m)`.
    pub basic_threshold: Option<f64>,
}

/// Bisection stops once the bracket is narrower than this.
pub const FLIP_BRACKET: f64 = 1e-4;

fn lq_finite(u: &TestFunction, q: f64, params: &Parameters) -> Result<Option<f64>> {
    match lq_norm(u, q, params) {
        Ok(v) => Ok(Some(v.value)),
        Err(Error::Divergent { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Finite/divergent classification of `||u||_{L^q}` on `q_grid`, with the
/// first finite-to-divergent transition refined by bisection.
pub fn integrability_probe(
    u: &TestFunction,
    q_grid: &[f64],
    params: &Parameters,
) -> Result<IntegrabilityReport> {
    let mut grid = q_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let rows = grid
        .iter()
        .map(|&q| {
            lq_finite(u, q, params).map(|norm| IntegrabilityRow {
                q,
                finite: norm.is_some(),
                norm,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut flip = None;
    if let Some(w) = rows.windows(2).find(|w| w[0].finite && !w[1].finite) {
        let (mut lo, mut hi) = (w[0].q, w[1].q);
        while hi - lo > FLIP_BRACKET {
            let mid = 0.5 * (lo + hi);
            if lq_finite(u, mid, params)?.is_some() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        flip = Some(0.5 * (lo + hi));
    }
    let (n, m) = (params.n as f64, params.m as f64);
    let below = params.m < params.n;
    Ok(IntegrabilityReport {
        params: *params,
        label: u.label().to_string(),
        rows,
        flip,
        conjectured_threshold: below.then(|| n * m / (n - m)),
        basic_threshold: below.then(|| n / (n - m)),
    })
}

/// `n` seeded members `sum c_i (t^i - 1)`.
pub fn seeded_radial_family(n: usize, count: usize, seed: u64) -> Result<Vec<TestFunction>> {
    (0..count as u64)
        .map(|i| {
            let coeffs = seeded_polynomial_coeffs(seed.wrapping_mul(1_000_003).wrapping_add(i));
            Ok(TestFunction::radial(n, vanishing_polynomial(&coeffs)?))
        })
        .collect()
}

/// `|z|^2 - 1`, `|z|^4 - 1` and a few of their positive combinations.
pub fn basic_radial_family(n: usize) -> Vec<TestFunction> {
    let poly = |coeffs: Vec<f64>, label: &str| {
        TestFunction::radial(n, RadialProfile::new(Shape::Polynomial { coeffs }, label))
    };
    vec![
        poly(vec![-1.0, 1.0], "|z|^2-1"),
        poly(vec![-1.0, 0.0, 1.0], "|z|^4-1"),
        poly(vec![-2.0, 1.0, 1.0], "(|z|^2-1)+(|z|^4-1)"),
        poly(vec![-1.0, 0.25, 0.75], "0.25(|z|^2-1)+0.75(|z|^4-1)"),
    ]
}
