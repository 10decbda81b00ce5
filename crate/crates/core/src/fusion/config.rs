use std::fmt;
use std::str::FromStr;

use super::FusionError;

/// How per-tracker presence is derived from confidences and verifier scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombinationMode {
    /// Verifier score alone; the tracker with the higher score is selected.
    VerifierOnly,
    /// Mean of confidence and verifier score, binarized per frame.
    Combined,
    /// Combined and binarized, then refined by the windowed vote.
    Windowed,
}

impl CombinationMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            CombinationMode::VerifierOnly => "verifier_only",
            CombinationMode::Combined => "combined",
            CombinationMode::Windowed => "windowed",
        }
    }
}

impl fmt::Display for CombinationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CombinationMode {
    type Err = FusionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "verifier_only" => Ok(CombinationMode::VerifierOnly),
            "combined" => Ok(CombinationMode::Combined),
            "windowed" => Ok(CombinationMode::Windowed),
            other => Err(FusionError::Config(format!("unknown combination_mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerConfig {
    /// Number of frames in the presence vote.
    pub window: usize,
    pub vote_fraction: f64,
    pub binarize_threshold: f64,
    pub enable_correction: bool,
    pub enable_search_scale_heuristic: bool,
    /// Factor applied to tracker 1's baseline search area while the fused
    /// output is present.
    pub search_scale_factor: f64,
    pub enable_aspect_penalty: bool,
    pub aspect_ratio_band: (f64, f64),
    pub verifier_update_interval: usize,
    pub combination_mode: CombinationMode,
    /// Step the two trackers of a frame on separate threads.
    pub parallel_trackers: bool,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            window: 5,
            vote_fraction: 0.75,
            binarize_threshold: 0.5,
            enable_correction: true,
            enable_search_scale_heuristic: true,
            search_scale_factor: 0.5,
            enable_aspect_penalty: true,
            aspect_ratio_band: (0.5, 2.0),
            verifier_update_interval: 10,
            combination_mode: CombinationMode::Windowed,
            parallel_trackers: false,
        }
    }
}

/// Every key accepted by [`ControllerConfig::set`], in echo order.
pub const CONTROLLER_KEYS: &[&str] = &[
    "window",
    "vote_fraction",
    "binarize_threshold",
    "enable_correction",
    "enable_search_scale_heuristic",
    "search_scale_factor",
    "enable_aspect_penalty",
    "aspect_ratio_low",
    "aspect_ratio_high",
    "verifier_update_interval",
    "combination_mode",
    "parallel_trackers",
];

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, FusionError> {
    value
        .parse()
        .map_err(|_| FusionError::Config(format!("invalid value `{value}` for `{key}`")))
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<(), FusionError> {
        if self.window < 1 {
            return Err(FusionError::Config("window must be at least 1".into()));
        }
        if !(self.vote_fraction > 0.0 && self.vote_fraction < 1.0) {
            return Err(FusionError::Config("vote_fraction must lie in (0, 1)".into()));
        }
        if !(0.0..=1.0).contains(&self.binarize_threshold) {
            return Err(FusionError::Config("binarize_threshold must lie in [0, 1]".into()));
        }
        let (lo, hi) = self.aspect_ratio_band;
        if !(lo > 0.0 && lo < 1.0 && hi > 1.0 && hi.is_finite()) {
            return Err(FusionError::Config(
                "aspect ratio band must satisfy 0 < low < 1 < high".into(),
            ));
        }
        if !(self.search_scale_factor > 0.0 && self.search_scale_factor.is_finite()) {
            return Err(FusionError::Config("search_scale_factor must be positive".into()));
        }
        if self.verifier_update_interval < 1 {
            return Err(FusionError::Config("verifier_update_interval must be at least 1".into()));
        }
        Ok(())
    }

    /// Applies one `key = value` setting. Returns `Ok(false)` for keys that
    /// do not belong to the controller.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool, FusionError> {
        match key {
            "window" => self.window = parse_value(key, value)?,
            "vote_fraction" => self.vote_fraction = parse_value(key, value)?,
            "binarize_threshold" => self.binarize_threshold = parse_value(key, value)?,
            "enable_correction" => self.enable_correction = parse_value(key, value)?,
            "enable_search_scale_heuristic" => {
                self.enable_search_scale_heuristic = parse_value(key, value)?
            }
            "search_scale_factor" => self.search_scale_factor = parse_value(key, value)?,
            "enable_aspect_penalty" => self.enable_aspect_penalty = parse_value(key, value)?,
            "aspect_ratio_low" => self.aspect_ratio_band.0 = parse_value(key, value)?,
            "aspect_ratio_high" => self.aspect_ratio_band.1 = parse_value(key, value)?,
            "verifier_update_interval" => {
                self.verifier_update_interval = parse_value(key, value)?
            }
            "combination_mode" => self.combination_mode = value.parse()?,
            "parallel_trackers" => self.parallel_trackers = parse_value(key, value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// Resolved settings as `(key, value)` pairs, one per key in
    /// [`CONTROLLER_KEYS`].
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("window", self.window.to_string()),
            ("vote_fraction", self.vote_fraction.to_string()),
            ("binarize_threshold", self.binarize_threshold.to_string()),
            ("enable_correction", self.enable_correction.to_string()),
            (
                "enable_search_scale_heuristic",
                self.enable_search_scale_heuristic.to_string(),
            ),
            ("search_scale_factor", self.search_scale_factor.to_string()),
            ("enable_aspect_penalty", self.enable_aspect_penalty.to_string()),
            ("aspect_ratio_low", self.aspect_ratio_band.0.to_string()),
            ("aspect_ratio_high", self.aspect_ratio_band.1.to_string()),
            ("verifier_update_interval", self.verifier_update_interval.to_string()),
            ("combination_mode", self.combination_mode.to_string()),
            ("parallel_trackers", self.parallel_trackers.to_string()),
        ]
    }
}
