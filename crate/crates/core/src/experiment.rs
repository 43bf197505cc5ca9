//! Batch experiments: a JSON config in, a JSON report and a flat CSV out.
//!
//! The exit code is a function of the ledger alone: 0 when every entry
//! passes, 1 when some entry fails, 2 for a bad config and 3 when a
//! pipeline raises an error.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dilation::{is_positive_definite, stinespring, tilde};
use crate::error::Error;
use crate::groups::GroupMap;
use crate::instances::InstanceSpec;
use crate::matcore::CMatrix;
use crate::recovery::{
    dimension_adjust, kazhdan_snap, recover_trace99, recover_trace_c, recover_u2, stabilize, BoundLedger,
    RecoveryResult, Variant, SOUND_TOL,
};
use crate::seminorms::Seminorm;
use crate::suite::{run_suite, CriterionReport};
use crate::tolerance::ToleranceProfile;
use crate::uniformity::{self, naive, KernelOptions};

pub const DEFAULT_SUITE_SEED: u64 = 2024;

pub const CSV_HEADER: [&str; 6] = ["experiment_id", "bound_name", "value", "bound", "pass", "slack"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pipeline {
    Defects,
    U2,
    Dilate,
    Recover,
    Trace99,
    /// `None` uses the measured trace correlation as `c`.
    TraceC(Option<f64>),
    Stabilize,
    Snap,
    Adjust,
    Suite,
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Defects => write!(f, "defects"),
            Self::U2 => write!(f, "u2"),
            Self::Dilate => write!(f, "dilate"),
            Self::Recover => write!(f, "recover"),
            Self::Trace99 => write!(f, "trace99"),
            Self::TraceC(None) => write!(f, "trace_c"),
            Self::TraceC(Some(c)) => write!(f, "trace_c({c})"),
            Self::Stabilize => write!(f, "stabilize"),
            Self::Snap => write!(f, "snap"),
            Self::Adjust => write!(f, "adjust"),
            Self::Suite => write!(f, "suite"),
        }
    }
}

impl FromStr for Pipeline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if let Some(arg) = s.strip_prefix("trace_c(").and_then(|r| r.strip_suffix(')')) {
            let c: f64 = arg
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad constant in `{s}`")))?;
            return Ok(Self::TraceC(Some(c)));
        }
        Ok(match s {
            "defects" => Self::Defects,
            "u2" => Self::U2,
            "dilate" => Self::Dilate,
            "recover" => Self::Recover,
            "trace99" => Self::Trace99,
            "trace_c" => Self::TraceC(None),
            "stabilize" => Self::Stabilize,
            "snap" => Self::Snap,
            "adjust" => Self::Adjust,
            "suite" => Self::Suite,
            _ => return Err(Error::Parse(format!("unknown pipeline `{s}`"))),
        })
    }
}

impl Serialize for Pipeline {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Pipeline {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub herm_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eig_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tie_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psd_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pd_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dilation_rank_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ledger_slack: Option<f64>,
}

impl ToleranceOverrides {
    fn is_empty(&self) -> bool {
        *self == Self::default()
    }

    pub fn resolve(&self) -> Result<ToleranceProfile, Error> {
        let mut t = ToleranceProfile::named(self.profile.as_deref().unwrap_or("default"))?;
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut t.herm_tol, self.herm_tol);
        set(&mut t.eig_tol, self.eig_tol);
        set(&mut t.rank_tol, self.rank_tol);
        set(&mut t.tie_tol, self.tie_tol);
        set(&mut t.psd_tol, self.psd_tol);
        set(&mut t.pd_tol, self.pd_tol);
        set(&mut t.dilation_rank_tol, self.dilation_rank_tol);
        set(&mut t.map_tol, self.map_tol);
        set(&mut t.ledger_slack, self.ledger_slack);
        Ok(t)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for both files; the current directory if unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Report file name, `<id>.json` if unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    /// CSV file name, `<id>.csv` if unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
}

impl OutputConfig {
    fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceSpec>,
    /// `op`, `S<p>` or `S<p>:ref=<n>`; a missing `ref` means the map's dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seminorm: Option<String>,
    pub pipeline: Pipeline,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    /// Overrides the instance seed (and seeds the suite).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emit_matrices: Option<bool>,
    #[serde(default, skip_serializing_if = "ToleranceOverrides::is_empty")]
    pub tolerance: ToleranceOverrides,
    #[serde(default, skip_serializing_if = "OutputConfig::is_empty")]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn new(pipeline: Pipeline) -> Self {
        Self {
            id: None,
            instance: None,
            seminorm: None,
            pipeline,
            variant: None,
            seed: None,
            workers: None,
            emit_matrices: None,
            tolerance: ToleranceOverrides::default(),
            output: OutputConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// The experiment id, derived from pipeline and instance when unset.
    pub fn experiment_id(&self) -> String {
        let raw = match (&self.id, &self.instance) {
            (Some(id), _) => id.clone(),
            (None, Some(inst)) => format!("{}-{inst}", self.pipeline),
            (None, None) => self.pipeline.to_string(),
        };
        raw.chars()
            .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' })
            .collect()
    }

    fn instance(&self) -> Result<InstanceSpec, ExperimentError> {
        let inst = self
            .instance
            .clone()
            .ok_or_else(|| ExperimentError::Config(format!("pipeline `{}` needs an instance", self.pipeline)))?;
        Ok(match self.seed {
            Some(s) => inst.with_seed(s),
            None => inst,
        })
    }

    /// Parses the seminorm string, filling a missing `ref` with `n`.
    pub fn resolve_seminorm(&self, n: usize) -> Result<Seminorm, ExperimentError> {
        let default = if self.pipeline == Pipeline::Adjust { "S2" } else { "op" };
        let text = self.seminorm.as_deref().unwrap_or(default).trim();
        let mut s: Seminorm = text.parse().map_err(|e: Error| ExperimentError::Config(e.to_string()))?;
        if !s.is_operator() && !text.contains(":ref=") {
            s = s.with_ref_dim(n.max(1));
        }
        Ok(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error("pipeline error: {0}")]
    Pipeline(#[from] Error),
}

impl ExperimentError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Pipeline(_) => 3,
        }
    }

    /// One-line JSON diagnostic for the error stream.
    pub fn diagnostic(&self) -> String {
        let (class, kind, message) = match self {
            Self::Config(m) => ("config", "ConfigError".to_string(), m.clone()),
            Self::Pipeline(e) => {
                let dbg = format!("{e:?}");
                let kind = dbg
                    .split(|c: char| !c.is_alphanumeric())
                    .next()
                    .unwrap_or("Error")
                    .to_string();
                ("pipeline", kind, e.to_string())
            }
        };
        serde_json::json!({ "error": class, "kind": kind, "message": message }).to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment_id: String,
    pub pipeline: String,
    pub config: ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seminorm: Option<String>,
    pub status: Status,
    pub entries: usize,
    pub failures: usize,
    pub ledger: BoundLedger,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<Vec<CriterionReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrices: Option<BTreeMap<String, Vec<CMatrix>>>,
    /// Where [`Report::write`] puts the files; not part of the report.
    #[serde(skip)]
    pub output: OutputConfig,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per ledger entry, then one per info value with empty
    /// `bound`, `pass` and `slack`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for e in &self.ledger.entries {
            let slack = match e.relation {
                crate::recovery::Relation::Le => e.bound - e.value,
                crate::recovery::Relation::Ge => e.value - e.bound,
            };
            w.write_record([
                self.experiment_id.clone(),
                e.name.clone(),
                e.value.to_string(),
                e.bound.to_string(),
                e.pass.to_string(),
                slack.to_string(),
            ])
            .expect("in-memory write");
        }
        for i in &self.ledger.info {
            w.write_record([
                self.experiment_id.as_str(),
                i.name.as_str(),
                &i.value.to_string(),
                "",
                "",
                "",
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// Writes `<id>.json` and `<id>.csv` (or the configured names) into
    /// `dir`, falling back to the configured directory.
    pub fn write(&self, dir: Option<&Path>) -> std::io::Result<(PathBuf, PathBuf)> {
        let out = self.output.clone();
        let dir = dir
            .map(Path::to_path_buf)
            .or(out.dir)
            .unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&dir)?;
        let json = dir.join(out.report.unwrap_or_else(|| format!("{}.json", self.experiment_id)));
        let csv = dir.join(out.csv.unwrap_or_else(|| format!("{}.csv", self.experiment_id)));
        std::fs::write(&json, self.to_json() + "\n")?;
        std::fs::write(&csv, self.to_csv())?;
        Ok((json, csv))
    }
}

struct Outcome {
    ledger: BoundLedger,
    matrices: BTreeMap<String, Vec<CMatrix>>,
    seminorm: Option<Seminorm>,
    suite: Option<Vec<CriterionReport>>,
}

impl Outcome {
    fn new(ledger: BoundLedger, seminorm: Option<Seminorm>) -> Self {
        Self {
            ledger,
            matrices: BTreeMap::new(),
            seminorm,
            suite: None,
        }
    }

    fn matrix(&mut self, name: &str, m: &CMatrix) {
        self.matrices.insert(name.to_string(), vec![m.clone()]);
    }

    fn map(&mut self, name: &str, m: &GroupMap) {
        self.matrices.insert(name.to_string(), m.values().to_vec());
    }

    fn recovery(&mut self, r: &RecoveryResult) {
        self.matrix("p", &r.p);
        self.matrix("u", &r.u);
        self.matrix("v", &r.v);
        self.map("rho", &r.rho);
    }
}

/// Runs the experiment, inside a pool of `workers` threads when set.
pub fn run(config: &ExperimentConfig) -> Result<Report, ExperimentError> {
    match config.workers {
        Some(0) => Err(ExperimentError::Config("workers must be at least 1".into())),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| ExperimentError::Config(e.to_string()))?
            .install(|| run_inner(config)),
        None => run_inner(config),
    }
}

fn run_inner(config: &ExperimentConfig) -> Result<Report, ExperimentError> {
    let tol = config
        .tolerance
        .resolve()
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    if config.variant.is_some() && config.pipeline != Pipeline::Recover {
        return Err(ExperimentError::Config(format!(
            "`variant` only applies to the recover pipeline, not `{}`",
            config.pipeline
        )));
    }
    let (outcome, phi) = if config.pipeline == Pipeline::Suite {
        let seed = config.seed.unwrap_or(DEFAULT_SUITE_SEED);
        (suite_outcome(run_suite(seed, &tol), &tol), None)
    } else {
        let spec = config.instance()?;
        let phi = spec.build().map_err(|e| ExperimentError::Config(e.to_string()))?;
        let s = config.resolve_seminorm(phi.dim())?;
        (run_pipeline(config, &phi, s, &tol)?, Some(phi))
    };

    let mut matrices = outcome.matrices;
    if let Some(phi) = &phi {
        matrices.insert("phi".into(), phi.values().to_vec());
    }
    let ledger = outcome.ledger;
    let failures = ledger.failures().count();
    let mut recorded = config.clone();
    recorded.output = OutputConfig::default();
    Ok(Report {
        experiment_id: config.experiment_id(),
        pipeline: config.pipeline.to_string(),
        config: recorded,
        output: config.output.clone(),
        group: phi.as_ref().map(|p| p.group().label().to_string()),
        dim: phi.as_ref().map(GroupMap::dim),
        seminorm: outcome.seminorm.map(|s| s.to_string()),
        status: if failures == 0 { Status::Pass } else { Status::Fail },
        entries: ledger.entries.len(),
        failures,
        ledger,
        suite: outcome.suite,
        matrices: config.emit_matrices.unwrap_or(false).then_some(matrices),
    })
}

fn suite_outcome(rows: Vec<CriterionReport>, tol: &ToleranceProfile) -> Outcome {
    let mut ledger = BoundLedger::new(tol);
    for r in &rows {
        ledger.lower_bound(&format!("criterion_{}", r.id), if r.pass { 1.0 } else { 0.0 }, 1.0);
        for m in &r.metrics {
            ledger.info(&format!("criterion_{}.{}", r.id, m.name), m.value);
        }
    }
    let mut out = Outcome::new(ledger, None);
    out.suite = Some(rows);
    out
}

/// Upper size for cross-checking kernels against the naive loops.
const ORACLE_LIMIT: usize = 24 * 24 * 24 * 8;

fn run_pipeline(
    config: &ExperimentConfig,
    phi: &GroupMap,
    s: Seminorm,
    tol: &ToleranceProfile,
) -> Result<Outcome, ExperimentError> {
    let n = phi.dim();
    let k = phi.group().order();
    let with_oracle = k * k * k * n <= ORACLE_LIMIT;
    let opts = KernelOptions::default();
    Ok(match config.pipeline {
        Pipeline::Defects => {
            let mut l = BoundLedger::new(tol);
            let da = uniformity::defect_a_with(phi, &s, &opts);
            let db = uniformity::defect_b_with(phi, &s, &opts);
            let ca = uniformity::trace_corr_a_with(phi, &opts);
            let cb = uniformity::trace_corr_b_with(phi, &opts);
            let h = uniformity::mean_hom_defect_with(phi, &s, &opts);
            l.info("defect_a", da.value);
            l.info("defect_b", db.value);
            l.info("trace_corr_a", ca.value);
            l.info("trace_corr_b", cb.value);
            l.info("trace_corr_a_imag", ca.imag_residue);
            l.info("trace_corr_b_imag", cb.imag_residue);
            l.info("mean_hom_defect", h.mean);
            l.info("uniform_hom_defect", h.uniform);
            l.lower_step("trace_corr_a_nonnegative", ca.value, 0.0);
            l.lower_step("trace_corr_b_nonnegative", cb.value, 0.0);
            if s.is_schatten2() && s.ref_dim == n && phi.is_contractive(tol.map_tol) {
                l.step("defect_a_from_correlation", da.value, (2.0 * (1.0 - ca.value).max(0.0)).sqrt());
                l.step("defect_b_from_correlation", db.value, (2.0 * (1.0 - cb.value).max(0.0)).sqrt());
            }
            if with_oracle {
                l.sound("defect_a_oracle", (da.value - naive::defect_a(phi, &s).value).abs(), 1e-9);
                l.sound("defect_b_oracle", (db.value - naive::defect_b(phi, &s).value).abs(), 1e-9);
                l.sound("trace_corr_a_oracle", (ca.value - naive::trace_corr_a(phi).value).abs(), 1e-9);
                l.sound("trace_corr_b_oracle", (cb.value - naive::trace_corr_b(phi).value).abs(), 1e-9);
            }
            Outcome::new(l, Some(s))
        }
        Pipeline::U2 => {
            let mut l = BoundLedger::new(tol);
            let u = uniformity::u2_norm_with(phi, &opts);
            l.info("u2_norm", u.value);
            l.info("u2_norm_imag", u.imag_residue);
            if with_oracle {
                l.sound("u2_oracle", (u.value - naive::u2_norm(phi).value).abs(), 1e-9);
            }
            Outcome::new(l, None)
        }
        Pipeline::Dilate => {
            let mut l = BoundLedger::new(tol);
            let psi = tilde(phi);
            let pd = is_positive_definite(&psi, tol)?;
            l.info("min_gram_eigenvalue_right", pd.min_eigenvalue_right);
            l.lower_step("min_gram_eigenvalue", pd.min_eigenvalue, -tol.psd_tol);
            let d = stinespring(&psi, tol)?;
            let c = d.verify(&psi);
            l.info("dilation_rank", d.m as f64);
            l.sound("reconstruction", c.reconstruction, SOUND_TOL);
            l.sound("unitarity", c.unitarity, SOUND_TOL);
            l.sound("multiplicativity", c.multiplicativity, SOUND_TOL);
            l.sound("norm_identity", c.norm_identity, SOUND_TOL);
            let mut out = Outcome::new(l, None);
            out.map("pi", &d.pi);
            out.matrix("u", &d.u);
            out.map("psi", &psi);
            out
        }
        Pipeline::Recover => {
            let r = recover_u2(phi, &s, config.variant.unwrap_or(Variant::Full), tol)?;
            recovery_outcome(r, Some(s))
        }
        Pipeline::Trace99 => {
            let r = recover_trace99(phi, None, tol)?;
            recovery_outcome(r, None)
        }
        Pipeline::TraceC(c) => {
            let c = match c {
                Some(c) => c,
                None => uniformity::trace_corr_a(phi).value.min(1.0),
            };
            let r = recover_trace_c(phi, c, tol)?;
            recovery_outcome(r, None)
        }
        Pipeline::Stabilize => recovery_outcome(stabilize(phi, &s, tol)?, Some(s)),
        Pipeline::Snap => {
            let r = stabilize(phi, &s, tol)?;
            let snap = kazhdan_snap(&r, phi, tol)?;
            let mut l = snap.ledger.clone();
            l.absorb("stabilize", r.ledger.clone());
            let mut out = Outcome::new(l, Some(s));
            out.recovery(&r);
            out.map("snapped", &snap.rho);
            out.matrix("isometry", &snap.isometry);
            out
        }
        Pipeline::Adjust => {
            let r = stabilize(phi, &s, tol)?;
            let a = dimension_adjust(&r, phi, tol)?;
            let mut l = a.ledger.clone();
            l.info(
                "deficit_case",
                (a.case == crate::recovery::AdjustCase::Deficit) as u8 as f64,
            );
            l.absorb("stabilize", r.ledger.clone());
            let mut out = Outcome::new(l, Some(s));
            out.recovery(&r);
            out.matrix("q", &a.q);
            out.map("adjusted_rho", &a.rho);
            out.matrix("adjusted_u", &a.u);
            out
        }
        Pipeline::Suite => unreachable!("handled by the caller"),
    })
}

fn recovery_outcome(r: RecoveryResult, s: Option<Seminorm>) -> Outcome {
    let mut out = Outcome::new(r.ledger.clone(), s);
    out.recovery(&r);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(pipeline: &str, instance: &str) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(pipeline.parse().unwrap());
        c.instance = Some(instance.parse().unwrap());
        c
    }

    #[test]
    fn pipeline_names_round_trip() {
        for p in ["defects", "u2", "dilate", "recover", "trace99", "trace_c", "trace_c(0.5)", "stabilize", "snap", "adjust", "suite"] {
            let parsed: Pipeline = p.parse().unwrap();
            assert_eq!(parsed.to_string(), p);
        }
        assert!("trace_c(x)".parse::<Pipeline>().is_err());
    }

    #[test]
    fn config_round_trip() {
        let mut c = config("recover", "cutdown:r=4@regular@symmetric:3?seed=7");
        c.seminorm = Some("S2:ref=4".into());
        c.variant = Some(Variant::Early);
        c.tolerance.profile = Some("strict".into());
        c.tolerance.ledger_slack = Some(1e-6);
        c.output.dir = Some("out".into());
        let text = c.to_json();
        let back = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), text);
        assert!(matches!(
            ExperimentConfig::from_json(r#"{"pipeline":"u2","bogus":1}"#),
            Err(ExperimentError::Config(_))
        ));
    }

    #[test]
    fn defects_on_regular() {
        let r = run(&config("defects", "regular@cyclic:4")).unwrap();
        assert_eq!(r.exit_code(), 0);
        assert_eq!(r.ledger.info_value("defect_a"), Some(0.0));
        assert_eq!(r.ledger.info_value("defect_b"), Some(0.0));
        let csv = r.to_csv();
        assert!(csv.starts_with("experiment_id,bound_name,value,bound,pass,slack\n"));
        assert!(csv.contains(",defect_a,0,,,"));
        assert!(r.matrices.is_none());
    }

    #[test]
    fn seminorm_ref_defaults_to_dimension() {
        let mut c = config("stabilize", "perturb:d=0.005@regular@dihedral:3?seed=1");
        c.seminorm = Some("S2".into());
        assert_eq!(c.resolve_seminorm(6).unwrap(), Seminorm::hilbert_schmidt(6));
        let r = run(&c).unwrap();
        assert_eq!(r.exit_code(), 0, "{:?}", r.ledger.failures().collect::<Vec<_>>());
        assert!(r.ledger.get("uniform_distance").unwrap().pass);
    }

    #[test]
    fn error_exit_codes() {
        let c = ExperimentConfig::new(Pipeline::Recover);
        assert_eq!(run(&c).unwrap_err().exit_code(), 2);
        let e = run(&config("stabilize", "zero:2@cyclic:3")).unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert!(e.diagnostic().contains("NotUnitary"));
    }

    #[test]
    fn reports_are_deterministic_across_workers() {
        let mut c = config("recover", "perturb:d=0.01@regular@cyclic:4?seed=3");
        c.seminorm = Some("S2".into());
        c.emit_matrices = Some(true);
        c.workers = Some(1);
        let a = run(&c).unwrap();
        c.workers = Some(3);
        let b = run(&c).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.matrices, b.matrices);
    }
}
