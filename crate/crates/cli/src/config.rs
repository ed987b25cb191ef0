//! Run configuration: a TOML document plus command-line overrides.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use surfcert_core::cover::SubgroupSpec;
use surfcert_core::geometry::MetricId;
use surfcert_core::Word;
use toml::Spanned;

pub const DEFAULT_GENUS: usize = 2;
pub const DEFAULT_LENGTH_CUTOFF_MAX: f64 = 12.0;
pub const DEFAULT_WORD_CUTOFF_MAX: usize = 24;

/// A configuration problem, located in the source document when possible.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    /// File the document was read from, when there is one.
    pub file: Option<String>,
    /// 1-based line and column, if the problem comes from the document.
    pub position: Option<(usize, usize)>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let file = self.file.as_deref().unwrap_or("<config>");
        match self.position {
            Some((line, col)) => write!(f, "{}:{}:{}: {}", file, line, col, self.message),
            None => write!(f, "{}: {}", file, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub genus: usize,
    pub metric: MetricId,
    pub length_cutoff_max: f64,
    pub word_cutoff_max: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<Word>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homology: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length_cutoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<SubgroupSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            genus: DEFAULT_GENUS,
            metric: MetricId::RegularPolygon,
            length_cutoff_max: DEFAULT_LENGTH_CUTOFF_MAX,
            word_cutoff_max: DEFAULT_WORD_CUTOFF_MAX,
            curve: None,
            homology: None,
            period: None,
            shift: None,
            length_cutoff: None,
            cover: None,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    genus: Option<Spanned<i64>>,
    metric: Option<Spanned<String>>,
    matrix_file: Option<Spanned<String>>,
    length_cutoff_max: Option<Spanned<f64>>,
    word_cutoff_max: Option<Spanned<i64>>,
    curve: Option<Spanned<String>>,
    homology: Option<Spanned<Vec<i64>>>,
    period: Option<Spanned<f64>>,
    shift: Option<Spanned<f64>>,
    length_cutoff: Option<Spanned<f64>>,
    cover: Option<Spanned<SubgroupSpec>>,
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    (line, col)
}

fn at(text: &str, span: Range<usize>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        file: None,
        position: Some(position(text, span.start)),
        message: message.into(),
    }
}

fn positive(text: &str, name: &str, v: &Spanned<f64>) -> Result<f64, ConfigError> {
    let x = *v.get_ref();
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(at(
            text,
            v.span(),
            format!("{} must be positive, got {}", name, x),
        ))
    }
}

/// Parses and validates a configuration document, applying defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError {
        file: None,
        position: e.span().map(|s| position(text, s.start)),
        message: e.message().trim().to_string(),
    })?;
    let mut cfg = RunConfig::default();
    if let Some(g) = &raw.genus {
        if *g.get_ref() < 2 {
            return Err(at(
                text,
                g.span(),
                format!("genus must be at least 2, got {}", g.get_ref()),
            ));
        }
        cfg.genus = *g.get_ref() as usize;
    }
    let file = raw.matrix_file.as_ref();
    cfg.metric = match (raw.metric.as_ref(), file) {
        (None, None) => MetricId::RegularPolygon,
        (Some(m), f) if m.get_ref() == "regular-polygon" => {
            if let Some(f) = f {
                return Err(at(
                    text,
                    f.span(),
                    "matrix_file needs metric = \"matrix-file\"",
                ));
            }
            MetricId::RegularPolygon
        }
        (Some(m), None) if m.get_ref() == "matrix-file" => {
            return Err(at(
                text,
                m.span(),
                "metric \"matrix-file\" needs a matrix_file path",
            ));
        }
        (Some(m), Some(f)) if m.get_ref() == "matrix-file" => MetricId::MatrixFile {
            path: f.get_ref().clone(),
        },
        (None, Some(f)) => MetricId::MatrixFile {
            path: f.get_ref().clone(),
        },
        (Some(m), _) => {
            return Err(at(
                text,
                m.span(),
                format!(
                    "unknown metric {:?}; expected \"regular-polygon\" or \"matrix-file\"",
                    m.get_ref()
                ),
            ))
        }
    };
    if let Some(v) = &raw.length_cutoff_max {
        cfg.length_cutoff_max = positive(text, "length_cutoff_max", v)?;
    }
    if let Some(v) = &raw.word_cutoff_max {
        if *v.get_ref() <= 0 {
            return Err(at(
                text,
                v.span(),
                format!("word_cutoff_max must be positive, got {}", v.get_ref()),
            ));
        }
        cfg.word_cutoff_max = *v.get_ref() as usize;
    }
    if let Some(v) = &raw.curve {
        let w: Word = v
            .get_ref()
            .parse()
            .map_err(|e| at(text, v.span(), format!("curve: {}", e)))?;
        cfg.curve = Some(w);
    }
    if let Some(v) = &raw.homology {
        cfg.homology = Some(v.get_ref().clone());
    }
    if let Some(v) = &raw.period {
        cfg.period = Some(positive(text, "period", v)?);
    }
    if let Some(v) = &raw.shift {
        cfg.shift = Some(positive(text, "shift", v)?);
    }
    if let Some(v) = &raw.length_cutoff {
        cfg.length_cutoff = Some(positive(text, "length_cutoff", v)?);
    }
    if let Some(v) = &raw.cover {
        cfg.cover = Some(v.get_ref().clone());
    }
    // checks that involve several keys
    let locate = |span: Option<Range<usize>>, message: String| ConfigError {
        file: None,
        position: span.map(|s| position(text, s.start)),
        message,
    };
    cfg.validate().map_err(|(key, message)| {
        let span = match key {
            "curve" => raw.curve.as_ref().map(|v| v.span()),
            "homology" => raw.homology.as_ref().map(|v| v.span()),
            "length_cutoff" => raw.length_cutoff.as_ref().map(|v| v.span()),
            "cover" => raw.cover.as_ref().map(|v| v.span()),
            _ => None,
        };
        locate(span, message)
    })?;
    Ok(cfg)
}

impl RunConfig {
    /// Constraints between keys; the error names the offending key.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        if self.genus < 2 {
            return Err((
                "genus",
                format!("genus must be at least 2, got {}", self.genus),
            ));
        }
        if let Some(w) = &self.curve {
            if let Some(l) = w.letters().iter().find(|l| l.generator() >= 2 * self.genus) {
                return Err((
                    "curve",
                    format!(
                        "curve uses a{} but genus {} has {} generators",
                        l.generator() + 1,
                        self.genus,
                        2 * self.genus
                    ),
                ));
            }
            if w.len() > self.word_cutoff_max {
                return Err((
                    "curve",
                    format!(
                        "curve has {} letters, more than word_cutoff_max = {}",
                        w.len(),
                        self.word_cutoff_max
                    ),
                ));
            }
        }
        if let Some(h) = &self.homology {
            if h.len() != 2 * self.genus {
                return Err((
                    "homology",
                    format!(
                        "homology needs {} entries for genus {}, got {}",
                        2 * self.genus,
                        self.genus,
                        h.len()
                    ),
                ));
            }
        }
        if let Some(l) = self.length_cutoff {
            if !(l > 0.0) || l > self.length_cutoff_max {
                return Err((
                    "length_cutoff",
                    format!(
                        "length_cutoff {} must lie in (0, {}]",
                        l, self.length_cutoff_max
                    ),
                ));
            }
        }
        Ok(())
    }
}
