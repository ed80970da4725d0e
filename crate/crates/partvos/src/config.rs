//! Run configuration: a flat `key = value` text format plus programmatic
//! overrides. Every tunable of the pipeline lives here so a run is fully
//! described by (sequence, config, seed).

use crate::error::{Error, Result};
use std::fmt;
use std::path::Path;

/// Part-aggregation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggMode {
    /// Plain per-pixel averaging of part segments.
    Ave,
    /// Similarity/confidence-weighted averaging.
    Seg,
}

impl fmt::Display for AggMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AggMode::Ave => write!(f, "ave"),
            AggMode::Seg => write!(f, "seg"),
        }
    }
}

/// Correlation engine for part tracking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NccEngine {
    Fft,
    Spatial,
}

/// Full pipeline configuration. Defaults are the canonical values listed in
/// the README table; a config file or CLI overrides change individual keys.
#[derive(Debug, Clone)]
pub struct RunConfig {
    // part generation
    pub parts_n_proposals: u32,
    pub parts_iou_min: f64,
    pub parts_purity_min: f64,
    pub parts_nms_overlap: f64,
    pub parts_max_count: usize,
    pub parts_min_count: usize,
    /// Compute the purity score against object pixels instead of the object
    /// box (alternative interpretation, off by default).
    pub parts_purity_pixel_level: bool,

    // part tracking
    pub track_search_factor: f64,
    pub track_peak_min: f64,
    pub track_patience: u32,
    pub track_template_blend: f64,
    pub track_engine: NccEngine,

    // ROI segmenter
    pub seg_patch_size: u32,
    pub seg_lr: f64,
    pub seg_epochs: u32,
    pub seg_batch: usize,
    pub seg_augment_copies: u32,
    pub seg_pixels_per_patch: usize,

    // aggregation
    pub agg_mode: AggMode,
    pub agg_strict_eq5: bool,
    pub agg_binarize_threshold: f64,
    pub agg_sigma_floor: f64,

    // refinement
    pub refine_gate: bool,
    pub refine_alpha: f64,
    pub refine_morph: bool,
    pub refine_radius: u32,

    // evaluation
    /// Boundary tolerance in pixels; 0 selects ceil(0.8% of frame diagonal).
    pub eval_boundary_tolerance: u32,

    pub rng_seed: u64,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            parts_n_proposals: 2000,
            parts_iou_min: 0.3,
            parts_purity_min: 0.7,
            parts_nms_overlap: 0.5,
            parts_max_count: 300,
            parts_min_count: 10,
            parts_purity_pixel_level: false,

            track_search_factor: 2.5,
            track_peak_min: 0.55,
            track_patience: 3,
            track_template_blend: 0.7,
            track_engine: NccEngine::Fft,

            seg_patch_size: 80,
            seg_lr: 0.1,
            seg_epochs: 500,
            seg_batch: 100,
            seg_augment_copies: 4,
            seg_pixels_per_patch: 200,

            agg_mode: AggMode::Seg,
            agg_strict_eq5: false,
            agg_binarize_threshold: 0.5,
            agg_sigma_floor: 1e-6,

            refine_gate: false,
            refine_alpha: 0.3,
            refine_morph: false,
            refine_radius: 2,

            eval_boundary_tolerance: 0,

            rng_seed: 0,
            workers: 1,
        }
    }
}

impl RunConfig {
    /// Parse a flat `key = value` file. Lines starting with `#` and blank
    /// lines are skipped; unknown keys are rejected.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "{}:{}: expected `key = value`, got `{line}`",
                    path.display(),
                    lineno + 1
                )));
            };
            config.set(key.trim(), value.trim())?;
        }
        config.validate()?;
        Ok(config)
    }

    /// Apply `key=value` overrides (e.g. from repeated `--set` flags).
    pub fn apply_overrides<'a>(&mut self, overrides: impl IntoIterator<Item = &'a str>) -> Result<()> {
        for entry in overrides {
            let Some((key, value)) = entry.split_once('=') else {
                return Err(Error::Config(format!("override `{entry}` is not key=value")));
            };
            self.set(key.trim(), value.trim())?;
        }
        self.validate()
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn f64_of(key: &str, v: &str) -> Result<f64> {
            v.parse()
                .map_err(|_| Error::Config(format!("{key}: `{v}` is not a number")))
        }
        fn int_of<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::Config(format!("{key}: `{v}` is not an integer")))
        }
        fn bool_of(key: &str, v: &str) -> Result<bool> {
            match v {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                _ => Err(Error::Config(format!("{key}: `{v}` is not a bool"))),
            }
        }

        match key {
            "parts.n_proposals" => self.parts_n_proposals = int_of(key, value)?,
            "parts.iou_min" => self.parts_iou_min = f64_of(key, value)?,
            "parts.purity_min" => self.parts_purity_min = f64_of(key, value)?,
            "parts.nms_overlap" => self.parts_nms_overlap = f64_of(key, value)?,
            "parts.max_count" => self.parts_max_count = int_of(key, value)?,
            "parts.min_count" => self.parts_min_count = int_of(key, value)?,
            "parts.purity_pixel_level" => self.parts_purity_pixel_level = bool_of(key, value)?,

            "track.search_factor" => self.track_search_factor = f64_of(key, value)?,
            "track.peak_min" => self.track_peak_min = f64_of(key, value)?,
            "track.patience" => self.track_patience = int_of(key, value)?,
            "track.template_blend" => self.track_template_blend = f64_of(key, value)?,
            "track.engine" => {
                self.track_engine = match value {
                    "fft" => NccEngine::Fft,
                    "spatial" => NccEngine::Spatial,
                    _ => return Err(Error::Config(format!("track.engine: `{value}` (want fft|spatial)"))),
                }
            }

            "seg.patch_size" => self.seg_patch_size = int_of(key, value)?,
            "seg.lr" => self.seg_lr = f64_of(key, value)?,
            "seg.epochs" => self.seg_epochs = int_of(key, value)?,
            "seg.batch" => self.seg_batch = int_of(key, value)?,
            "seg.augment_copies" => self.seg_augment_copies = int_of(key, value)?,
            "seg.pixels_per_patch" => self.seg_pixels_per_patch = int_of(key, value)?,

            "agg.mode" => {
                self.agg_mode = match value {
                    "ave" => AggMode::Ave,
                    "seg" => AggMode::Seg,
                    _ => return Err(Error::Config(format!("agg.mode: `{value}` (want ave|seg)"))),
                }
            }
            "agg.strict_eq5" => self.agg_strict_eq5 = bool_of(key, value)?,
            "agg.binarize_threshold" => self.agg_binarize_threshold = f64_of(key, value)?,
            "agg.sigma_floor" => self.agg_sigma_floor = f64_of(key, value)?,

            "refine.gate" => self.refine_gate = bool_of(key, value)?,
            "refine.alpha" => self.refine_alpha = f64_of(key, value)?,
            "refine.morph" => self.refine_morph = bool_of(key, value)?,
            "refine.radius" => self.refine_radius = int_of(key, value)?,

            "eval.boundary_tolerance" => self.eval_boundary_tolerance = int_of(key, value)?,

            "rng_seed" => self.rng_seed = int_of(key, value)?,
            "workers" => self.workers = int_of(key, value)?,

            _ => return Err(Error::Config(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        fn in_unit(name: &str, v: f64) -> Result<()> {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} = {v} outside [0, 1]")))
            }
        }
        in_unit("parts.iou_min", self.parts_iou_min)?;
        in_unit("parts.purity_min", self.parts_purity_min)?;
        in_unit("track.peak_min", self.track_peak_min)?;
        in_unit("track.template_blend", self.track_template_blend)?;
        in_unit("refine.alpha", self.refine_alpha)?;
        if !(self.parts_nms_overlap > 0.0 && self.parts_nms_overlap < 1.0) {
            return Err(Error::Config(format!(
                "parts.nms_overlap = {} outside (0, 1)",
                self.parts_nms_overlap
            )));
        }
        if !(self.agg_binarize_threshold > 0.0 && self.agg_binarize_threshold < 1.0) {
            return Err(Error::Config(format!(
                "agg.binarize_threshold = {} outside (0, 1)",
                self.agg_binarize_threshold
            )));
        }
        if self.track_search_factor < 1.0 {
            return Err(Error::Config("track.search_factor must be >= 1".into()));
        }
        if self.seg_patch_size < 16 {
            return Err(Error::Config("seg.patch_size must be >= 16".into()));
        }
        if self.seg_lr <= 0.0 || !self.seg_lr.is_finite() {
            return Err(Error::Config("seg.lr must be positive".into()));
        }
        if self.seg_batch == 0 || self.seg_epochs == 0 || self.seg_pixels_per_patch == 0 {
            return Err(Error::Config("seg.batch/epochs/pixels_per_patch must be >= 1".into()));
        }
        if self.parts_n_proposals == 0 {
            return Err(Error::Config("parts.n_proposals must be >= 1".into()));
        }
        if self.parts_min_count == 0 || self.parts_max_count < self.parts_min_count {
            return Err(Error::Config("parts.max_count must be >= parts.min_count >= 1".into()));
        }
        if self.track_patience == 0 {
            return Err(Error::Config("track.patience must be >= 1".into()));
        }
        if self.refine_radius == 0 {
            return Err(Error::Config("refine.radius must be >= 1".into()));
        }
        if self.agg_sigma_floor <= 0.0 {
            return Err(Error::Config("agg.sigma_floor must be > 0".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        Ok(())
    }

    /// Boundary tolerance for F-measure on a `w x h` frame.
    pub fn boundary_tolerance(&self, w: u32, h: u32) -> u32 {
        if self.eval_boundary_tolerance > 0 {
            self.eval_boundary_tolerance
        } else {
            let diag = ((w as f64).powi(2) + (h as f64).powi(2)).sqrt();
            (0.008 * diag).ceil() as u32
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn parse_file_and_overrides() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# comment\nparts.iou_min = 0.4\nagg.mode = ave\nrng_seed = 42").unwrap();
        let mut config = RunConfig::from_file(f.path()).unwrap();
        assert_eq!(config.parts_iou_min, 0.4);
        assert_eq!(config.agg_mode, AggMode::Ave);
        assert_eq!(config.rng_seed, 42);

        config.apply_overrides(["agg.mode=seg", "workers=8"]).unwrap();
        assert_eq!(config.agg_mode, AggMode::Seg);
        assert_eq!(config.workers, 8);
    }

    #[test]
    fn unknown_key_rejected() {
        let mut config = RunConfig::default();
        assert!(config.apply_overrides(["nope.key=1"]).is_err());
    }

    #[test]
    fn out_of_range_rejected() {
        let mut config = RunConfig::default();
        assert!(config.apply_overrides(["parts.nms_overlap=1.5"]).is_err());
        let mut config = RunConfig::default();
        assert!(config.apply_overrides(["track.peak_min=-0.1"]).is_err());
    }

    #[test]
    fn default_boundary_tolerance_tracks_diagonal() {
        let config = RunConfig::default();
        // 480x854 diagonal is ~979.8 px; 0.8% of that rounds up to 8.
        assert_eq!(config.boundary_tolerance(854, 480), 8);
        let mut fixed = config.clone();
        fixed.eval_boundary_tolerance = 3;
        assert_eq!(fixed.boundary_tolerance(854, 480), 3);
    }
}
