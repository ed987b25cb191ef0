//! Command implementations behind the `surfcert` binary.

pub mod config;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use surfcert_core::certify::{certify, Certificate, CertifyOptions, Verdict};
use surfcert_core::checker::{check_certificate, CheckReport};
use surfcert_core::cover::{lift_curve, lift_orbits, FiniteCover, LiftedCurve, SubgroupSpec};
use surfcert_core::geometry::{
    enumerate_short_classes, lengths_csv, Completeness, FuchsianRep, GeodesicClass, MetricId,
    DEFAULT_NODE_LIMIT,
};
use surfcert_core::intersect::IntersectionOracle;
use surfcert_core::measure::{
    min_action_on_partition, periodic_measure_of_curve, shift_measure, PeriodicMeasure,
};
use surfcert_core::partition::{minimal_disjoint_partition, CurveClass, DisjointPartition};
use surfcert_core::{round_real, HomologyVector, SurfaceGroup, SurfcertError, Word};

pub use config::{parse_config, ConfigError, RunConfig};

pub const SCHEMA_VERSION: &str = "1.0";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Io { path: String, message: String },
    Core(SurfcertError),
    Usage(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Config(_) => "cli-io/config",
            CliError::Io { .. } => "cli-io/io",
            CliError::Core(e) => e.code(),
            CliError::Usage(_) => "cli-io/usage",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{}", e),
            CliError::Io { path, message } => write!(f, "{}: {}", path, message),
            CliError::Core(e) => write!(f, "{}", e),
            CliError::Usage(m) => write!(f, "{}", m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<SurfcertError> for CliError {
    fn from(e: SurfcertError) -> Self {
        CliError::Core(e)
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Lengths,
    Cover,
    Lift,
    PartitionMin,
    Measure,
    Certify,
}

/// Text produced by a command and the exit status it implies.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub body: String,
    /// Set when the result is valid but not conclusive (exit status 2).
    pub inconclusive: bool,
}

pub struct RunOptions {
    /// Omit the timestamp so repeated runs are byte-identical.
    pub reproducible: bool,
    /// Directory that relative matrix-file paths are resolved against.
    pub base_dir: PathBuf,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            reproducible: false,
            base_dir: PathBuf::from("."),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub schema_version: String,
    pub tool_version: String,
    /// Seconds since the Unix epoch; absent in reproducible runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub config: RunConfig,
    pub certificate: Certificate,
    pub completeness: Completeness,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftEntry {
    #[serde(flatten)]
    pub lifted: LiftedCurve,
    pub length: f64,
    pub simple: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    pub curve: GeodesicClass,
    pub cover: SubgroupSpec,
    pub index: usize,
    pub homology_rank: usize,
    pub lifts: Vec<LiftEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub homology: HomologyVector,
    /// Cutoff of the last search; nothing shorter was missed below it.
    pub cutoff: f64,
    pub partition: Option<DisjointPartition>,
    pub completeness: Completeness,
}

/// Serializes with every real rounded to 15 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut v = serde_json::to_value(value).map_err(|e| SurfcertError::Json(e.to_string()))?;
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| SurfcertError::Json(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn round_floats(v: &mut serde_json::Value) {
    use serde_json::Value;
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n
                .as_f64()
                .and_then(|x| serde_json::Number::from_f64(round_real(x)))
            {
                *n = x;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Builds the hyperbolic structure named by the configuration.
pub fn load_rep(cfg: &RunConfig, base_dir: &Path) -> Result<FuchsianRep, CliError> {
    match &cfg.metric {
        MetricId::RegularPolygon => Ok(FuchsianRep::regular_polygon(cfg.genus)?),
        MetricId::MatrixFile { path } => {
            let full = base_dir.join(path);
            let text = std::fs::read_to_string(&full).map_err(|e| CliError::Io {
                path: full.display().to_string(),
                message: format!("cannot read matrix file: {}", e),
            })?;
            Ok(FuchsianRep::parse_matrix_text(
                cfg.genus,
                &text,
                cfg.metric.clone(),
            )?)
        }
    }
}

fn need_curve(cfg: &RunConfig) -> Result<&Word, CliError> {
    cfg.curve.as_ref().ok_or_else(|| {
        CliError::Usage("this command needs a curve (--curve or `curve` in the config)".into())
    })
}

fn homology_target(cfg: &RunConfig, rep: &FuchsianRep) -> Result<HomologyVector, CliError> {
    let group = SurfaceGroup::new(rep.genus())?;
    match (&cfg.homology, &cfg.curve) {
        (Some(h), _) => Ok(HomologyVector::new(h.clone())),
        (None, Some(w)) => Ok(group.abelianize(w)),
        (None, None) => Err(CliError::Usage(
            "this command needs a homology vector or a curve".into(),
        )),
    }
}

fn default_cover(cfg: &RunConfig) -> SubgroupSpec {
    cfg.cover.clone().unwrap_or(SubgroupSpec::Lemma61 { m: 1 })
}

pub fn run_command(
    cfg: &RunConfig,
    command: Command,
    opts: &RunOptions,
) -> Result<Report, CliError> {
    cfg.validate().map_err(|(_, m)| {
        CliError::Config(ConfigError {
            file: None,
            position: None,
            message: m,
        })
    })?;
    let rep = load_rep(cfg, &opts.base_dir)?;
    let group = SurfaceGroup::new(rep.genus())?;
    match command {
        Command::Lengths => {
            let cutoff = cfg
                .length_cutoff
                .ok_or_else(|| CliError::Usage("lengths needs --length-cutoff".into()))?;
            let short = enumerate_short_classes(&rep, &group, cutoff, DEFAULT_NODE_LIMIT)?;
            Ok(Report {
                body: lengths_csv(&short.classes, rep.genus()),
                inconclusive: short.completeness == Completeness::Incomplete,
            })
        }
        Command::Cover => {
            let cover = FiniteCover::build(&group, &default_cover(cfg))?;
            Ok(Report {
                body: to_json(&cover)?,
                inconclusive: false,
            })
        }
        Command::Lift => {
            let w = need_curve(cfg)?;
            let class = GeodesicClass::new(&rep, &group, w)?;
            let cover = FiniteCover::build(&group, &default_cover(cfg))?;
            let hom = cover.homology(&group)?;
            let mut oracle = IntersectionOracle::new(&rep)?;
            let mut lifts = Vec::new();
            for orbit in lift_orbits(&cover, &class.form) {
                let lifted = lift_curve(&cover, &hom, &class.form, orbit[0])?;
                let simple = class.primitive
                    && oracle.cover_intersection(
                        &cover,
                        &class.form,
                        orbit[0],
                        &class.form,
                        orbit[0],
                    )? == 0;
                lifts.push(LiftEntry {
                    length: lifted.degree as f64 * class.length,
                    lifted,
                    simple,
                });
            }
            let report = LiftReport {
                curve: class,
                cover: cover.spec.clone(),
                index: cover.index,
                homology_rank: hom.rank,
                lifts,
            };
            Ok(Report {
                body: to_json(&report)?,
                inconclusive: false,
            })
        }
        Command::PartitionMin => {
            let h = homology_target(cfg, &rep)?;
            let mut oracle = IntersectionOracle::new(&rep)?;
            let hint = cfg.length_cutoff.unwrap_or(4.0).min(cfg.length_cutoff_max);
            let found = minimal_disjoint_partition(&mut oracle, &h, hint, cfg.length_cutoff_max)?;
            let report = match found {
                Some((p, search)) => PartitionReport {
                    homology: h,
                    cutoff: search.cutoff,
                    partition: Some(p),
                    completeness: search.completeness,
                },
                None => PartitionReport {
                    homology: h,
                    cutoff: cfg.length_cutoff_max,
                    partition: None,
                    completeness: rep.completeness(),
                },
            };
            Ok(Report {
                inconclusive: report.partition.is_none()
                    || report.completeness == Completeness::Incomplete,
                body: to_json(&report)?,
            })
        }
        Command::Measure => {
            let period = cfg.period.unwrap_or(1.0);
            let mut oracle = IntersectionOracle::new(&rep)?;
            let mu: PeriodicMeasure = match &cfg.curve {
                Some(w) => periodic_measure_of_curve(&CurveClass::new(&mut oracle, w)?, period)?,
                None => {
                    let h = homology_target(cfg, &rep)?;
                    let hint = cfg.length_cutoff.unwrap_or(4.0).min(cfg.length_cutoff_max);
                    let (p, _) =
                        minimal_disjoint_partition(&mut oracle, &h, hint, cfg.length_cutoff_max)?
                            .ok_or_else(|| {
                            SurfcertError::SearchIncomplete(format!(
                                "no disjoint partition of {} below {}",
                                h, cfg.length_cutoff_max
                            ))
                        })?;
                    min_action_on_partition(&p, &h, period)?
                }
            };
            let mu = match cfg.shift {
                Some(a) => shift_measure(&mu, a)?,
                None => mu,
            };
            Ok(Report {
                body: to_json(&mu)?,
                inconclusive: false,
            })
        }
        Command::Certify => {
            let w = need_curve(cfg)?;
            let length = rep.translation_length(w)?;
            if length > cfg.length_cutoff_max {
                return Err(SurfcertError::InvalidParameter(format!(
                    "curve length {} exceeds length_cutoff_max {}",
                    length, cfg.length_cutoff_max
                ))
                .into());
            }
            let mut oracle = IntersectionOracle::new(&rep)?;
            let cert = certify(&mut oracle, w, &CertifyOptions::default())?;
            let doc = CertificateDocument {
                schema_version: SCHEMA_VERSION.into(),
                tool_version: TOOL_VERSION.into(),
                timestamp: (!opts.reproducible).then(now),
                config: cfg.clone(),
                completeness: cert.flags.completeness,
                certificate: cert,
            };
            Ok(Report {
                inconclusive: doc.certificate.verdict != Verdict::Certified,
                body: to_json(&doc)?,
            })
        }
    }
}

fn now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Re-verifies a certificate document with the independent checker.
pub fn check_document(text: &str, base_dir: &Path) -> Result<(CheckReport, Verdict), CliError> {
    let doc: CertificateDocument =
        serde_json::from_str(text).map_err(|e| SurfcertError::Json(e.to_string()))?;
    let rep = load_rep(&doc.config, base_dir)?;
    let report = check_certificate(&rep, &doc.certificate)?;
    Ok((report, doc.certificate.verdict))
}
