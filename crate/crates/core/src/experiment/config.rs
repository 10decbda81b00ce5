use std::path::PathBuf;

use crate::fusion::ControllerConfig;

use super::{ExperimentError, Variant};

#[derive(Debug, Clone, PartialEq)]
pub enum InputSource {
    /// A simulated suite by preset name.
    Suite(String),
    /// A directory with one subdirectory per sequence holding
    /// `groundtruth.txt` and the tracker logs `tracker1.csv` and
    /// `tracker2.csv`.
    Dataset(PathBuf),
}

/// Everything needed to reproduce a run. Read from a line-oriented
/// `key = value` document; controller keys override the variant's switches.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub input: InputSource,
    pub variant: Variant,
    pub overrides: Vec<(String, String)>,
    pub seeds: Vec<u64>,
    /// Run only the first `n` sequences of the input.
    pub limit: Option<usize>,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn for_suite(suite: &str, variant: Variant) -> Self {
        Self {
            input: InputSource::Suite(suite.to_string()),
            variant,
            overrides: Vec::new(),
            seeds: vec![0],
            limit: None,
            output: None,
        }
    }

    pub fn for_dataset(dir: impl Into<PathBuf>, variant: Variant) -> Self {
        Self {
            input: InputSource::Dataset(dir.into()),
            variant,
            overrides: Vec::new(),
            seeds: vec![0],
            limit: None,
            output: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        let mut cfg = Self::for_suite("complementary", Variant::Full);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let at_line = |message: String| ExperimentError::ConfigLine { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at_line(format!("expected 'key = value', got '{line}'")))?;
            cfg.set(key.trim(), value.trim()).map_err(|e| at_line(e.to_string()))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ExperimentError> {
        match key {
            "suite" => self.input = InputSource::Suite(value.to_string()),
            "dataset" => self.input = InputSource::Dataset(PathBuf::from(value)),
            "variant" => self.variant = value.parse()?,
            "seed" | "seeds" => {
                let seeds = value
                    .split(',')
                    .map(|s| s.trim().parse::<u64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| ExperimentError::Config(format!("invalid seed list '{value}'")))?;
                if seeds.is_empty() {
                    return Err(ExperimentError::Config("empty seed list".into()));
                }
                self.seeds = seeds;
            }
            "limit" => {
                let n = value
                    .parse::<usize>()
                    .ok()
                    .filter(|&n| n > 0)
                    .ok_or_else(|| ExperimentError::Config(format!("invalid limit '{value}'")))?;
                self.limit = Some(n);
            }
            "out" => self.output = Some(PathBuf::from(value)),
            _ => {
                let mut probe = ControllerConfig::default();
                if !probe.set(key, value)? {
                    return Err(ExperimentError::Config(format!("unknown key '{key}'")));
                }
                self.overrides.retain(|(k, _)| k != key);
                self.overrides.push((key.to_string(), value.to_string()));
            }
        }
        Ok(())
    }

    /// Defaults, then the variant's switches, then explicit overrides.
    pub fn controller_config(&self) -> Result<ControllerConfig, ExperimentError> {
        let mut cfg = ControllerConfig::default();
        self.variant.configure(&mut cfg);
        for (k, v) in &self.overrides {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Rejects combinations that cannot run, before any work starts.
    pub fn validate(&self) -> Result<ControllerConfig, ExperimentError> {
        let cfg = self.controller_config()?;
        if matches!(self.input, InputSource::Dataset(_)) && self.variant.corrects(&cfg) {
            return Err(ExperimentError::ReplayCorrection(self.variant.id()));
        }
        Ok(cfg)
    }

    /// Resolved settings as `key = value` lines, readable by [`Self::parse`].
    pub fn echo(&self) -> Result<Vec<(String, String)>, ExperimentError> {
        let cfg = self.controller_config()?;
        let mut out = vec![match &self.input {
            InputSource::Suite(s) => ("suite".to_string(), s.clone()),
            InputSource::Dataset(p) => ("dataset".to_string(), p.display().to_string()),
        }];
        out.push(("variant".into(), self.variant.id()));
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        out.push(("seeds".into(), seeds.join(",")));
        if let Some(n) = self.limit {
            out.push(("limit".into(), n.to_string()));
        }
        out.extend(cfg.entries().into_iter().map(|(k, v)| (k.to_string(), v)));
        Ok(out)
    }
}
