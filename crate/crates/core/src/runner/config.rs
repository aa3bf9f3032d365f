//! Experiment configuration: a flat `key = value` file whose keys can each be
//! overridden individually.

use std::path::PathBuf;

use crate::domain::{Grammar, SupersetRegistry};
use crate::error::{ensure, Error, Result};
use crate::iarc::GrowthKind;
use crate::learner::{LearnerKind, LearningRates};
use crate::num::Real;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DomainSource {
    Fixture,
    File(PathBuf),
}

impl std::fmt::Display for DomainSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DomainSource::Fixture => f.write_str("fixture"),
            DomainSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig<T> {
    pub domain: DomainSource,
    pub target: Grammar,
    pub learner: LearnerKind,
    pub aggressive_rate: T,
    pub conservative_rate: T,
    pub registry: SupersetRegistry,
    pub growth: GrowthKind,
    pub cohort_size: usize,
    pub total_utterances: u64,
    pub stride: u64,
    pub threshold: T,
    pub seed: Option<u64>,
    pub noise: bool,
    /// Utterance divisor; learning rates are multiplied by the same factor.
    pub scale: u64,
    pub record_all_weights: bool,
    /// Calendar override file.
    pub calendar: Option<PathBuf>,
    /// Emission trace output for the first child.
    pub trace: Option<PathBuf>,
}

impl<T: Real> Default for ExperimentConfig<T> {
    fn default() -> Self {
        ExperimentConfig {
            domain: DomainSource::Fixture,
            target: Grammar::COLAG_ENGLISH,
            learner: LearnerKind::Ssvl,
            aggressive_rate: T::lit(2e-4),
            conservative_rate: T::lit(5e-6),
            registry: SupersetRegistry::default(),
            growth: GrowthKind::Linear,
            cohort_size: 100,
            total_utterances: 10_054_267,
            stride: 10_000,
            threshold: T::lit(0.02),
            seed: None,
            noise: true,
            scale: 1,
            record_all_weights: false,
            calendar: None,
            trace: None,
        }
    }
}

pub const CONFIG_KEYS: &[&str] = &[
    "domain",
    "target",
    "learner",
    "aggressive_rate",
    "conservative_rate",
    "registry",
    "growth",
    "cohort_size",
    "total_utterances",
    "stride",
    "threshold",
    "seed",
    "noise",
    "scale",
    "record_all_weights",
    "calendar",
    "trace",
];

fn parse_bool(v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("expected a boolean, got {v:?}"))),
    }
}

fn parse_num<N: std::str::FromStr>(key: &str, v: &str) -> Result<N> {
    v.replace('_', "")
        .parse()
        .map_err(|_| Error::Config(format!("{key}: invalid number {v:?}")))
}

fn parse_target(v: &str) -> Result<Grammar> {
    match v.to_ascii_lowercase().as_str() {
        "english" => Ok(Grammar::COLAG_ENGLISH),
        "ns-english" => Ok(Grammar::NS_ENGLISH),
        _ => v.parse(),
    }
}

/// `none`, or comma-separated `param:superset_value` pairs such as `4:1`.
pub fn parse_registry(v: &str) -> Result<SupersetRegistry> {
    let v = v.trim();
    if v.is_empty() || v.eq_ignore_ascii_case("none") {
        return Ok(SupersetRegistry::empty());
    }
    let mut entries = Vec::new();
    for item in v.split(',') {
        let (p, val) = item
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("registry entry {item:?} is not param:value")))?;
        entries.push((
            parse_num("registry", p.trim())?,
            parse_num("registry", val.trim())?,
        ));
    }
    SupersetRegistry::new(entries)
}

fn format_registry(r: &SupersetRegistry) -> String {
    if r.is_empty() {
        return "none".into();
    }
    r.entries()
        .iter()
        .map(|(p, v)| format!("{p}:{v}"))
        .collect::<Vec<_>>()
        .join(",")
}

impl<T: Real> ExperimentConfig<T> {
    /// Parses a config file on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected key = value, got {line:?}"),
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })?;
        }
        Ok(cfg)
    }

    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "domain" => {
                self.domain = if value.eq_ignore_ascii_case("fixture") {
                    DomainSource::Fixture
                } else {
                    DomainSource::File(PathBuf::from(value))
                }
            }
            "target" => self.target = parse_target(value)?,
            "learner" => self.learner = value.parse()?,
            "aggressive_rate" => self.aggressive_rate = T::lit(parse_num(key, value)?),
            "conservative_rate" => self.conservative_rate = T::lit(parse_num(key, value)?),
            "registry" => self.registry = parse_registry(value)?,
            "growth" => self.growth = value.parse()?,
            "cohort_size" => self.cohort_size = parse_num(key, value)?,
            "total_utterances" => self.total_utterances = parse_num(key, value)?,
            "stride" => self.stride = parse_num(key, value)?,
            "threshold" => self.threshold = T::lit(parse_num(key, value)?),
            "seed" => self.seed = Some(parse_num(key, value)?),
            "noise" => self.noise = parse_bool(value)?,
            "scale" => self.scale = parse_num(key, value)?,
            "record_all_weights" => self.record_all_weights = parse_bool(value)?,
            "calendar" => {
                self.calendar =
                    (!value.eq_ignore_ascii_case("standard")).then(|| PathBuf::from(value))
            }
            "trace" => {
                self.trace = (!value.eq_ignore_ascii_case("none")).then(|| PathBuf::from(value))
            }
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Learning rates before scaling.
    pub fn rates(&self) -> Result<LearningRates<T>> {
        LearningRates::new(self.aggressive_rate, self.conservative_rate)
            .map_err(|e| Error::Config(e.to_string()))
    }

    /// Learning rates actually applied per simulated step.
    pub fn effective_rates(&self) -> Result<LearningRates<T>> {
        let k = T::from_u64(self.scale).expect("scale fits the scalar");
        self.rates()?
            .scaled(k)
            .map_err(|e| Error::Config(format!("scale {}: {e}", self.scale)))
    }

    /// Checks everything that does not need the domain or calendar.
    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.stride >= 1,
            Error::Config("stride must be at least 1".into())
        );
        ensure!(
            self.scale >= 1,
            Error::Config("scale must be at least 1".into())
        );
        ensure!(
            self.cohort_size >= 1,
            Error::Config("cohort_size must be at least 1".into())
        );
        ensure!(
            self.threshold > T::zero() && self.threshold < T::one(),
            Error::Config(format!("threshold {} outside (0, 1)", self.threshold))
        );
        self.effective_rates()?;
        Ok(())
    }

    /// The configuration in the file format, every key present.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        };
        put("domain", self.domain.to_string());
        put("target", self.target.to_string());
        put("learner", self.learner.to_string());
        put(
            "aggressive_rate",
            format!("{:e}", self.aggressive_rate.as_f64()),
        );
        put(
            "conservative_rate",
            format!("{:e}", self.conservative_rate.as_f64()),
        );
        put("registry", format_registry(&self.registry));
        put("growth", self.growth.to_string());
        put("cohort_size", self.cohort_size.to_string());
        put("total_utterances", self.total_utterances.to_string());
        put("stride", self.stride.to_string());
        put("threshold", self.threshold.to_string());
        if let Some(seed) = self.seed {
            put("seed", seed.to_string());
        }
        put("noise", self.noise.to_string());
        put("scale", self.scale.to_string());
        put("record_all_weights", self.record_all_weights.to_string());
        put(
            "calendar",
            self.calendar
                .as_ref()
                .map_or("standard".into(), |p| p.display().to_string()),
        );
        put(
            "trace",
            self.trace
                .as_ref()
                .map_or("none".into(), |p| p.display().to_string()),
        );
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = ExperimentConfig::<f64>::default();
        assert_eq!(c.total_utterances, 10_054_267);
        assert_eq!(c.stride, 10_000);
        assert_eq!(c.aggressive_rate, 2e-4);
        assert_eq!(c.conservative_rate, 5e-6);
        assert_eq!(c.registry.entries(), &[(4, 1)]);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn parse_and_print() {
        let text = "# desk run\nlearner = vl\ntarget = ns-english\nregistry = none\nscale = 10\nseed = 7\nnoise = off\n";
        let c = ExperimentConfig::<f64>::parse(text).unwrap();
        assert_eq!(c.learner, LearnerKind::Vl);
        assert_eq!(c.target, Grammar::NS_ENGLISH);
        assert!(c.registry.is_empty());
        assert_eq!(c.seed, Some(7));
        assert!(!c.noise);
        assert_eq!(ExperimentConfig::<f64>::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            ExperimentConfig::<f64>::parse("colour = red\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(ExperimentConfig::<f64>::parse("stride 3\n").is_err());
        let c = ExperimentConfig::<f64> {
            scale: 5000,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = ExperimentConfig::<f64> {
            stride: 0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        assert!(parse_registry("4:2").is_err());
        assert!(parse_registry("13:1").is_err());
    }
}
