//! Run configuration, report documents and their CSV projection.

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::capacity::{CapacityEstimate, SublevelCapacityRow, VolumeCapacityReport};
use crate::catalog::FamilyParams;
use crate::error::{Error, Result};
use crate::inequality::{
    CounterexampleReport, HoelderSuite, ImpossibilityWitness, InequalityReport,
    IntegrabilityReport, QuasinormReport, SobolevSweep, Trend, Verdict, EXPONENT_BAND, VERDICT_TOL,
};
use crate::integration::{EnergyValue, DEFAULT_EPS_LADDER};
use crate::operator::Parameters;
use crate::quadrature::QuadConfig;

pub const TOOL_NAME: &str = "mhessian";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "MHESSIAN_OUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub verdict: f64,
    pub exponent_band: f64,
    pub quad_abs: f64,
    pub quad_rel: f64,
    pub eps_ladder: Vec<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        let q = QuadConfig::default();
        Self {
            verdict: VERDICT_TOL,
            exponent_band: EXPONENT_BAND,
            quad_abs: q.abs_tol,
            quad_rel: q.rel_tol,
            eps_ladder: DEFAULT_EPS_LADDER.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    #[serde(default)]
    pub json: Option<String>,
    #[serde(default)]
    pub csv: Option<String>,
}

/// Everything a command needs to reproduce its report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub params: Parameters,
    #[serde(default)]
    pub function: Option<String>,
    #[serde(default)]
    pub family: FamilyParams,
    #[serde(default)]
    pub l: Option<usize>,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub sweep: Option<Vec<f64>>,
    #[serde(default)]
    pub point: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn new(command: impl Into<String>, params: Parameters) -> Self {
        Self {
            command: command.into(),
            params,
            function: None,
            family: FamilyParams::default(),
            l: None,
            k: None,
            radius: None,
            alpha: None,
            sweep: None,
            point: None,
            seed: 0,
            tolerances: Tolerances::default(),
            output: OutputConfig::default(),
        }
    }
}

/// Spectrum and density of the complex Hessian at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HessianSummary {
    pub label: String,
    pub point: Vec<(f64, f64)>,
    pub eigenvalues: Vec<f64>,
    pub sigma: Vec<f64>,
    pub density: f64,
    pub m_subharmonic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedValue {
    pub label: String,
    pub params: Parameters,
    pub quantity: String,
    pub value: EnergyValue,
}

/// One numeric comparison inside an acceptance criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub description: String,
    pub measured: f64,
    pub expected: f64,
    /// Allowed deviation, relative unless stated in the description.
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// `|measured - expected| <= tolerance * |expected|`.
    pub fn relative(
        description: impl Into<String>,
        measured: f64,
        expected: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            description: description.into(),
            measured,
            expected,
            tolerance,
            passed: (measured - expected).abs() <= tolerance * expected.abs(),
        }
    }

    /// `|measured - expected| <= tolerance`.
    pub fn absolute(
        description: impl Into<String>,
        measured: f64,
        expected: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            description: description.into(),
            measured,
            expected,
            tolerance,
            passed: (measured - expected).abs() <= tolerance,
        }
    }

    /// A yes/no property recorded as `1` (true) against `1`.
    pub fn flag(description: impl Into<String>, ok: bool) -> Self {
        Self {
            description: description.into(),
            measured: if ok { 1.0 } else { 0.0 },
            expected: 1.0,
            tolerance: 0.0,
            passed: ok,
        }
    }

    /// `measured <= bound`.
    pub fn at_most(description: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            description: description.into(),
            measured,
            expected: bound,
            tolerance: 0.0,
            passed: measured <= bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Runtime limits; excluded from the determinism hash.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub timing_checks: Vec<Check>,
    /// Extra context printed with the outcome.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CriterionOutcome {
    pub fn new(id: u8, title: impl Into<String>, checks: Vec<Check>, notes: Vec<String>) -> Self {
        let mut out = Self {
            id,
            title: title.into(),
            passed: false,
            checks,
            timing_checks: Vec::new(),
            notes,
        };
        out.update_passed();
        out
    }

    pub fn with_timing(mut self, timing: Vec<Check>) -> Self {
        self.timing_checks = timing;
        self.update_passed();
        self
    }

    fn update_passed(&mut self) {
        self.passed = !self.checks.is_empty()
            && self
                .checks
                .iter()
                .chain(&self.timing_checks)
                .all(|c| c.passed);
    }

    /// One line per failed check.
    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .chain(&self.timing_checks)
            .filter(|c| !c.passed)
            .map(|c| {
                format!(
                    "{}: measured {} expected {} (tol {})",
                    c.description, c.measured, c.expected, c.tolerance
                )
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "data", rename_all = "snake_case")]
pub enum EntryBody {
    Hessian(HessianSummary),
    Value(NamedValue),
    Inequality(InequalityReport),
    SobolevSweep(SobolevSweep),
    Trend(Trend),
    Impossibility(Vec<ImpossibilityWitness>),
    Hoelder(HoelderSuite),
    Quasinorm(QuasinormReport),
    Counterexample(CounterexampleReport),
    Capacity(CapacityEstimate),
    SublevelCapacity(Vec<SublevelCapacityRow>),
    VolumeCapacity(VolumeCapacityReport),
    Integrability(IntegrabilityReport),
    Criterion(CriterionOutcome),
}

impl EntryBody {
    /// Verdicts carried by this entry; informational entries carry none.
    pub fn verdicts(&self) -> Vec<Verdict> {
        let ok = |b: bool| if b { Verdict::Holds } else { Verdict::Violated };
        match self {
            EntryBody::Hessian(_)
            | EntryBody::Value(_)
            | EntryBody::Capacity(_)
            | EntryBody::Trend(_) => vec![],
            EntryBody::Inequality(r) => vec![r.verdict],
            EntryBody::SobolevSweep(s) => s.reports.iter().map(|r| r.verdict).collect(),
            EntryBody::Impossibility(ws) => ws.iter().map(|w| w.verdict).collect(),
            EntryBody::Hoelder(h) => h.reports.iter().map(|r| r.verdict).collect(),
            EntryBody::Quasinorm(q) => vec![q.verdict],
            EntryBody::Counterexample(c) => vec![c.verdict],
            EntryBody::SublevelCapacity(rows) => rows.iter().map(|r| r.report.verdict).collect(),
            EntryBody::VolumeCapacity(v) => vec![v.verdict],
            EntryBody::Integrability(_) => vec![],
            EntryBody::Criterion(c) => vec![ok(c.passed)],
        }
    }

    /// Sweep rows of this entry, in order.
    pub fn rows(&self, entry: &str) -> Vec<SweepRow> {
        let row =
            |x_name: &str, x: f64, quantity: &str, value: f64, expected: Option<f64>| SweepRow {
                entry: entry.to_string(),
                x_name: x_name.to_string(),
                x,
                quantity: quantity.to_string(),
                value,
                expected,
            };
        let mut out = Vec::new();
        match self {
            EntryBody::Counterexample(c) => {
                for r in &c.rows {
                    let j = r.j as f64;
                    out.push(row("j", j, "energy", r.energy, Some(r.expected_energy)));
                    out.push(row(
                        "j",
                        j,
                        "sup_norm",
                        r.sup_norm,
                        Some(r.expected_sup_norm),
                    ));
                    if let Some(v) = r.lq_norm {
                        out.push(row("j", j, "lq_norm", v, None));
                    }
                }
            }
            EntryBody::SobolevSweep(s) => {
                for (i, r) in s.reports.iter().enumerate() {
                    out.push(row("member", i as f64, "ratio", r.ratio, None));
                }
            }
            EntryBody::Trend(t) => {
                for (j, v) in t.js.iter().zip(&t.values) {
                    out.push(row("j", *j as f64, &t.name, *v, None));
                }
            }
            EntryBody::Impossibility(ws) => {
                for w in ws {
                    for (j, v) in w.trend.js.iter().zip(&w.trend.values) {
                        out.push(row("j", *j as f64, &w.statement, *v, None));
                    }
                }
            }
            EntryBody::Hoelder(h) => {
                for (i, r) in h.reports.iter().enumerate() {
                    out.push(row("tuple", i as f64, "ratio", r.ratio, None));
                }
            }
            EntryBody::SublevelCapacity(rows) => {
                for r in rows {
                    out.push(row("s", r.s, "capacity", r.report.lhs, Some(r.report.rhs)));
                }
            }
            EntryBody::VolumeCapacity(v) => {
                for r in &v.rows {
                    out.push(row("r", r.radius, "volume/capacity^alpha", r.ratio, None));
                }
            }
            EntryBody::Integrability(rep) => {
                for r in &rep.rows {
                    out.push(row(
                        "q",
                        r.q,
                        "finite",
                        if r.finite { 1.0 } else { 0.0 },
                        None,
                    ));
                    if let Some(v) = r.norm {
                        out.push(row("q", r.q, "lq_norm", v, None));
                    }
                }
            }
            EntryBody::Criterion(c) => {
                for (i, ch) in c.checks.iter().enumerate() {
                    out.push(row(
                        "check",
                        i as f64,
                        &ch.description,
                        ch.measured,
                        Some(ch.expected),
                    ));
                }
            }
            EntryBody::Hessian(_)
            | EntryBody::Value(_)
            | EntryBody::Inequality(_)
            | EntryBody::Quasinorm(_)
            | EntryBody::Capacity(_) => {}
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub key: String,
    pub wall_clock_s: f64,
    pub body: EntryBody,
}

/// One CSV line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub entry: String,
    pub x_name: String,
    pub x: f64,
    pub quantity: String,
    pub value: f64,
    pub expected: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub holds: usize,
    pub violated: usize,
    pub sharpness_witness: usize,
}

impl Summary {
    pub fn exit_code(&self) -> i32 {
        if self.violated > 0 {
            2
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub entries: Vec<ReportEntry>,
    pub rows: Vec<SweepRow>,
    pub summary: Summary,
    /// Seconds since the Unix epoch; excluded from the hash.
    pub timestamp: String,
    /// SHA-256 of the document without `timestamp`, wall-clock and timing
    /// fields and this hash.
    pub determinism_hash: String,
}

/// Collects timed entries into a [`ReportDocument`].
#[derive(Debug)]
pub struct ReportBuilder {
    config: RunConfig,
    entries: Vec<ReportEntry>,
}

impl ReportBuilder {
    pub fn new(config: RunConfig) -> Self {
        Self {
            config,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, key: impl Into<String>, wall_clock_s: f64, body: EntryBody) {
        self.entries.push(ReportEntry {
            key: key.into(),
            wall_clock_s,
            body,
        });
    }

    /// Runs `f`, timing it, and records its result.
    pub fn run<F: FnOnce() -> Result<EntryBody>>(
        &mut self,
        key: impl Into<String>,
        f: F,
    ) -> Result<()> {
        let start = std::time::Instant::now();
        let body = f()?;
        self.push(key, start.elapsed().as_secs_f64(), body);
        Ok(())
    }

    pub fn finish(self) -> Result<ReportDocument> {
        let mut summary = Summary::default();
        for v in self.entries.iter().flat_map(|e| e.body.verdicts()) {
            match v {
                Verdict::Holds => summary.holds += 1,
                Verdict::Violated => summary.violated += 1,
                Verdict::SharpnessWitness => summary.sharpness_witness += 1,
            }
        }
        let rows = self
            .entries
            .iter()
            .flat_map(|e| e.body.rows(&e.key))
            .collect();
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs().to_string())
            .unwrap_or_default();
        let mut doc = ReportDocument {
            tool: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
            config: self.config,
            entries: self.entries,
            rows,
            summary,
            timestamp,
            determinism_hash: String::new(),
        };
        doc.determinism_hash = doc.compute_hash()?;
        Ok(doc)
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Numerical(format!("serialization failed: {e}")))
}

impl ReportDocument {
    /// The document as JSON with the non-deterministic fields removed.
    pub fn canonical_json(&self) -> Result<String> {
        let mut v = to_value(self)?;
        if let Value::Object(map) = &mut v {
            map.remove("timestamp");
            map.remove("determinism_hash");
            // where the report is written does not change what it says
            if let Some(Value::Object(cfg)) = map.get_mut("config") {
                cfg.remove("output");
            }
            if let Some(Value::Array(entries)) = map.get_mut("entries") {
                for e in entries {
                    if let Value::Object(em) = e {
                        em.remove("wall_clock_s");
                        if let Some(Value::Object(body)) = em.get_mut("body") {
                            if let Some(Value::Object(data)) = body.get_mut("data") {
                                data.remove("timing_checks");
                            }
                        }
                    }
                }
            }
        }
        serde_json::to_string(&v)
            .map_err(|e| Error::Numerical(format!("serialization failed: {e}")))
    }

    pub fn compute_hash(&self) -> Result<String> {
        let digest = Sha256::digest(self.canonical_json()?.as_bytes());
        Ok(hex::encode(digest))
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::Numerical(format!("serialization failed: {e}")))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s)
            .map_err(|e| Error::InvalidParameters(format!("not a report document: {e}")))
    }

    pub fn exit_code(&self) -> i32 {
        self.summary.exit_code()
    }

    /// Writes [`ReportDocument::rows`] as CSV.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for r in &self.rows {
            wtr.serialize(r)
                .map_err(|e| Error::Numerical(format!("csv: {e}")))?;
        }
        wtr.flush()
            .map_err(|e| Error::Numerical(format!("csv: {e}")))?;
        Ok(())
    }
}

/// Reads rows back from CSV.
pub fn read_csv_rows<R: std::io::Read>(r: R) -> Result<Vec<SweepRow>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .collect::<std::result::Result<Vec<SweepRow>, _>>()
        .map_err(|e| Error::InvalidParameters(format!("csv: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc() -> ReportDocument {
        let params = Parameters::new(2, 1, 0.0).unwrap();
        let mut b = ReportBuilder::new(RunConfig::new("energy", params));
        b.push(
            "energy",
            0.25,
            EntryBody::Criterion(CriterionOutcome::new(
                1,
                "demo",
                vec![
                    Check::relative("value", 1.0, 1.0, 1e-9),
                    Check::at_most("bound", 0.5, 1.0),
                ],
                vec![],
            )),
        );
        b.finish().unwrap()
    }

    #[test]
    fn hash_ignores_timestamp_and_wall_clock() {
        let a = doc();
        let mut b = a.clone();
        b.timestamp = "0".into();
        b.entries[0].wall_clock_s = 99.0;
        assert_eq!(a.compute_hash().unwrap(), b.compute_hash().unwrap());
        b.entries[0].key = "other".into();
        assert_ne!(a.compute_hash().unwrap(), b.compute_hash().unwrap());
    }

    #[test]
    fn json_and_csv_round_trip() {
        let d = doc();
        let back = ReportDocument::from_json(&d.to_json_pretty().unwrap()).unwrap();
        assert_eq!(back, d);
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert_eq!(read_csv_rows(buf.as_slice()).unwrap(), d.rows);
        assert_eq!(d.rows.len(), 2);
        assert_eq!(
            d.summary,
            Summary {
                holds: 1,
                violated: 0,
                sharpness_witness: 0
            }
        );
        assert_eq!(d.exit_code(), 0);
    }

    #[test]
    fn run_config_defaults_seed_to_zero() {
        let c: RunConfig =
            serde_json::from_str(r#"{"command":"suite","params":{"n":2,"m":1,"p":0.0}}"#).unwrap();
        assert_eq!(c.seed, 0);
        assert_eq!(c.tolerances, Tolerances::default());
    }
}
