//! End-to-end segmentation with every intermediate product kept.

use std::fmt::Write as _;

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::boundary::{rasterize_labels, refine_boundaries, RefineParams, Segmentation};
use crate::color::{bilateral_filter, color_vector_magnitude, srgb_to_lab, BilateralParams, LabImage};
use crate::error::{Error, Result};
use crate::evaluation::{evaluate_with_base, EvalReport, DEFAULT_LOG_BASE};
use crate::features::{
    entropy_field, estimate_complexity, lhdsee_gradient, enhance_gradient, ComplexityEstimate, ComplexityParams,
    EntropyParams, GradientParams,
};
use crate::field::ScalarField;
use crate::grid::SerGrid;
use crate::growing::{grow_regions, GrowParams};
use crate::merging::{
    merge_by_importance, merge_mutual_most_similar, merge_small_regions, ImportanceOutcome, MergeEvent, MergeParams,
    MutualOutcome, RegionTable,
};
use crate::seeding::{detect_seeds, SeedLabeling, SeedParams};

/// Every tunable parameter. [`Default`] gives the reference settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Side of a square elemental region, in pixels.
    pub ser_side: usize,
    pub bilateral: BilateralParams,
    pub gradient: GradientParams,
    pub entropy: EntropyParams,
    pub complexity: ComplexityParams,
    pub seeds: SeedParams,
    pub growing: GrowParams,
    pub merging: MergeParams,
    pub refine: RefineParams,
    /// Replaces the desired region count estimated from the image.
    pub desired_regions: Option<usize>,
    pub eval_log_base: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            ser_side: 4,
            bilateral: BilateralParams::default(),
            gradient: GradientParams::default(),
            entropy: EntropyParams::default(),
            complexity: ComplexityParams::default(),
            seeds: SeedParams::default(),
            growing: GrowParams::default(),
            merging: MergeParams::default(),
            refine: RefineParams::default(),
            desired_regions: None,
            eval_log_base: DEFAULT_LOG_BASE,
        }
    }
}

/// Names accepted by [`PipelineConfig::set`], in the order
/// [`PipelineConfig::to_config_text`] writes them.
pub const CONFIG_KEYS: &[&str] = &[
    "ser_side",
    "bilateral_window",
    "bilateral_sigma_d",
    "bilateral_sigma_r",
    "bilateral_passes",
    "gradient_window",
    "gradient_bins",
    "delta",
    "gamma",
    "entropy_q",
    "entropy_bins",
    "entropy_window",
    "alpha",
    "kappa",
    "beta",
    "omega",
    "lambda1",
    "min_region_sers",
    "xi",
    "t_t",
    "zeta",
    "lambda2",
    "refine_passes",
    "desired_regions",
    "eval_log_base",
];

fn parse<T: std::str::FromStr>(value: &str) -> std::result::Result<T, String> {
    value.parse().map_err(|_| format!("cannot parse `{value}`"))
}

impl PipelineConfig {
    /// Set one parameter by name. `desired_regions` also accepts `auto`.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let v = value.trim();
        match key.trim() {
            "ser_side" => self.ser_side = parse(v)?,
            "bilateral_window" => self.bilateral.window_side = parse(v)?,
            "bilateral_sigma_d" => self.bilateral.sigma_d = parse(v)?,
            "bilateral_sigma_r" => self.bilateral.sigma_r = parse(v)?,
            "bilateral_passes" => self.bilateral.passes = parse(v)?,
            "gradient_window" => self.gradient.window_side = parse(v)?,
            "gradient_bins" => self.gradient.bins = parse(v)?,
            "delta" => self.gradient.delta = parse(v)?,
            "gamma" => self.gradient.gamma = parse(v)?,
            "entropy_q" => self.entropy.q = parse(v)?,
            "entropy_bins" => self.entropy.bins = parse(v)?,
            "entropy_window" => self.entropy.window_side = parse(v)?,
            "alpha" => self.complexity.alpha = parse(v)?,
            "kappa" => self.complexity.kappa = parse(v)?,
            "beta" => self.seeds.beta = parse(v)?,
            "omega" => self.growing.omega = parse(v)?,
            "lambda1" => self.growing.lambda1 = parse(v)?,
            "min_region_sers" => self.merging.min_region_sers = parse(v)?,
            "xi" => self.merging.xi = parse(v)?,
            "t_t" => self.merging.t_t = parse(v)?,
            "zeta" => self.merging.zeta = parse(v)?,
            "lambda2" => self.refine.lambda2 = parse(v)?,
            "refine_passes" => self.refine.passes = parse(v)?,
            "desired_regions" => {
                self.desired_regions = if v == "auto" { None } else { Some(parse(v)?) };
            }
            "eval_log_base" => self.eval_log_base = parse(v)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Apply `key=value` lines on top of `self`. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: n + 1,
                reason: "expected key=value".into(),
            })?;
            self.set(key, value).map_err(|reason| Error::Config { line: n + 1, reason })?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = Self::default();
        c.apply_text(text)?;
        Ok(c)
    }

    /// Apply a single `key=value` command-line override.
    pub fn apply_override(&mut self, arg: &str) -> Result<()> {
        let err = |reason: String| Error::Override {
            arg: arg.to_string(),
            reason,
        };
        let (key, value) = arg.split_once('=').ok_or_else(|| err("expected key=value".into()))?;
        self.set(key, value).map_err(err)
    }

    /// Serialize in the format read by [`PipelineConfig::from_text`].
    pub fn to_config_text(&self) -> String {
        let values: Vec<String> = vec![
            self.ser_side.to_string(),
            self.bilateral.window_side.to_string(),
            self.bilateral.sigma_d.to_string(),
            self.bilateral.sigma_r.to_string(),
            self.bilateral.passes.to_string(),
            self.gradient.window_side.to_string(),
            self.gradient.bins.to_string(),
            self.gradient.delta.to_string(),
            self.gradient.gamma.to_string(),
            self.entropy.q.to_string(),
            self.entropy.bins.to_string(),
            self.entropy.window_side.to_string(),
            self.complexity.alpha.to_string(),
            self.complexity.kappa.to_string(),
            self.seeds.beta.to_string(),
            self.growing.omega.to_string(),
            self.growing.lambda1.to_string(),
            self.merging.min_region_sers.to_string(),
            self.merging.xi.to_string(),
            self.merging.t_t.to_string(),
            self.merging.zeta.to_string(),
            self.refine.lambda2.to_string(),
            self.refine.passes.to_string(),
            self.desired_regions.map_or_else(|| "auto".to_string(), |n| n.to_string()),
            self.eval_log_base.to_string(),
        ];
        let mut s = String::new();
        for (k, v) in CONFIG_KEYS.iter().zip(values) {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.ser_side == 0 {
            return Err(Error::param("ser_side", "must be at least 1"));
        }
        self.bilateral.validate()?;
        self.gradient.validate()?;
        self.entropy.validate()?;
        if !(self.complexity.alpha > 0.0) || !(self.complexity.kappa > 0.0) {
            return Err(Error::param("alpha/kappa", "must be positive"));
        }
        if !(self.seeds.beta > 0.0) {
            return Err(Error::param("beta", "must be positive"));
        }
        if !(self.growing.omega >= 0.0) || !(self.growing.lambda1 >= 0.0) {
            return Err(Error::param("omega/lambda1", "must be non-negative"));
        }
        self.merging.validate()?;
        self.refine.validate()?;
        if self.desired_regions == Some(0) {
            return Err(Error::param("desired_regions", "must be at least 1"));
        }
        if !(self.eval_log_base > 1.0) {
            return Err(Error::param("eval_log_base", "must exceed 1"));
        }
        Ok(())
    }
}

/// Region counts after each stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounts {
    pub seeds: usize,
    /// Regions after growing.
    pub initial: usize,
    /// After absorbing small regions.
    pub pr1: usize,
    /// After merge-importance merging.
    pub pr2: usize,
    /// After mutual-similarity merging.
    pub fpr: usize,
    /// After boundary refinement (regions that kept at least one pixel).
    pub refined: usize,
}

/// Intermediate products of one run.
#[derive(Debug, Clone)]
pub struct StageArtifacts {
    pub filtered: LabImage,
    /// Normalized color-vector magnitude.
    pub cv: ScalarField,
    pub gradient: ScalarField,
    pub enhanced_gradient: ScalarField,
    pub entropy: ScalarField,
    pub complexity: ComplexityEstimate,
    /// Desired region count actually used (estimate or override).
    pub desired_regions: usize,
    pub grid: SerGrid,
    /// Image-wide mean enhanced gradient.
    pub eg_global: f64,
    pub seeds: SeedLabeling,
    pub initial: Segmentation,
    pub pr1: Segmentation,
    pub pr2: Segmentation,
    pub fpr: Segmentation,
    pub importance: ImportanceOutcome,
    pub mutual: MutualOutcome,
    pub merges: Vec<MergeEvent>,
    pub counts: StageCounts,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub segmentation: Segmentation,
    pub report: EvalReport,
    pub stages: StageArtifacts,
}

fn with_labels(grid: &SerGrid, labels: Vec<u32>) -> Segmentation {
    let mut g = grid.clone();
    g.labels = labels;
    rasterize_labels(&g)
}

/// Segment an sRGB image.
pub fn segment(image: &RgbImage, config: &PipelineConfig) -> Result<PipelineOutput> {
    config.validate()?;
    let (w, h) = (image.width() as usize, image.height() as usize);
    if w < config.ser_side || h < config.ser_side {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            side: config.ser_side,
        });
    }

    let filtered = bilateral_filter(&srgb_to_lab(image), &config.bilateral);
    let cv = color_vector_magnitude(&filtered);
    let gradient = lhdsee_gradient(&cv, &config.gradient);
    let enhanced_gradient = enhance_gradient(&gradient, &config.gradient);
    let entropy = entropy_field(&cv, &config.entropy);
    let complexity = estimate_complexity(&enhanced_gradient, &entropy, &config.complexity)?;
    let desired_regions = config.desired_regions.unwrap_or(complexity.desired_regions);

    let mut grid = SerGrid::new(w, h, config.ser_side)?;
    let eg_global = grid.compute_stats(&filtered, &enhanced_gradient)?;
    let seeds = detect_seeds(&grid, eg_global, &config.seeds)?;
    grow_regions(&mut grid, &seeds, &config.growing)?;
    let initial = rasterize_labels(&grid);

    let mut table = RegionTable::from_grid(&grid, &filtered, config.entropy.bins, config.entropy.q);
    merge_small_regions(&mut table, config.merging.min_region_sers);
    let pr1 = with_labels(&grid, table.relabel(&grid.labels));
    let importance = merge_by_importance(&mut table, desired_regions, &config.merging);
    let pr2 = with_labels(&grid, table.relabel(&grid.labels));
    let mutual = merge_mutual_most_similar(&mut table, config.merging.zeta, config.merging.xi);
    let fpr = with_labels(&grid, table.relabel(&grid.labels));

    let segmentation = refine_boundaries(&fpr, &filtered, &config.refine).compacted();
    let report = evaluate_with_base(&segmentation, image, config.eval_log_base)?;

    let counts = StageCounts {
        seeds: seeds.count,
        initial: initial.region_count,
        pr1: pr1.region_count,
        pr2: pr2.region_count,
        fpr: fpr.region_count,
        refined: segmentation.region_count,
    };
    Ok(PipelineOutput {
        segmentation,
        report,
        stages: StageArtifacts {
            filtered,
            cv,
            gradient,
            enhanced_gradient,
            entropy,
            complexity,
            desired_regions,
            grid,
            eg_global,
            seeds,
            initial,
            pr1,
            pr2,
            fpr,
            importance,
            mutual,
            merges: table.log().to_vec(),
            counts,
        },
    })
}
