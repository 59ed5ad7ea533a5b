//! The simulated per-frame runtime: plan, execute tiles against a stochastic
//! detector, merge detections, and score against the visible ground truth.
//!
//! Planning happens on the critical path, so its cost is charged against the
//! frame's latency. The charge comes from a deterministic cost model (a fixed
//! price per DP cell and per object-node pair) rather than wall-clock
//! measurement, keeping runs byte-reproducible across machines. The planner
//! itself is budgeted with the service objective *minus* a pre-computed
//! overhead allowance, so planning cost alone can never push a frame over
//! the objective.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distribution::{
    plan_estimated_accuracy, tile_contains_center, HistoryObject, ObjectHistory,
};
use crate::geometry::{localize, BBox, CameraIntrinsics, LocalizedBox, Pose, PoseDelta};
use crate::planner::{
    adaptive_plan, downsample_plan, elect, uniform_grid, uniform_plan_for_model, uniform_plans,
    PlanSource, RegionTree, TilePlan,
};
use crate::profile::{nearest_rank_percentile, Mode, ModelFamily, ModelProfile, SizeBinning};
use crate::seeding::{self, purpose};

/// Safety factor applied to the measured planning-time percentile when
/// reserving budget for planning.
pub const OVERHEAD_MARGIN: f64 = 1.1;

/// Fewest historical frames the overhead estimate may be based on.
pub const MIN_OVERHEAD_FRAMES: usize = 10;

/// `object_id` carried by synthetic false-positive detections.
pub const FALSE_POSITIVE_ID: usize = usize::MAX;

#[derive(Debug, Error, PartialEq)]
pub enum RuntimeError {
    #[error("invalid runtime configuration: {0}")]
    InvalidConfig(String),
    #[error("plan references unknown model {0:?}")]
    UnknownModel(String),
    #[error("history extraction requires at least one frame")]
    NoHistoryFrames,
}

/// Deterministic price of one planning pass, in place of wall-clock timing.
/// The dominant term prices each DP cell relaxation; the second prices
/// binning the known objects into every tree node's histogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanningCostModel {
    /// Fixed per-frame planning cost, milliseconds.
    pub base_ms: f64,
    /// Cost per (node, model, budget-unit) DP cell, nanoseconds.
    pub dp_cell_ns: f64,
    /// Cost per (object, node) histogram update, nanoseconds.
    pub obj_node_ns: f64,
}

impl Default for PlanningCostModel {
    fn default() -> Self {
        Self { base_ms: 0.15, dp_cell_ns: 1.3, obj_node_ns: 25.0 }
    }
}

impl PlanningCostModel {
    /// Planning cost in milliseconds for one pass over `nodes` tree nodes,
    /// `models` candidate models, `budget_units` DP columns, and `objects`
    /// known objects.
    pub fn planning_ms(&self, nodes: usize, models: usize, budget_units: u32, objects: usize) -> f64 {
        let dp_cells = nodes as f64 * models as f64 * f64::from(budget_units);
        let obj_nodes = objects as f64 * nodes as f64;
        self.base_ms + (self.dp_cell_ns * dp_cells + self.obj_node_ns * obj_nodes) * 1e-6
    }
}

/// Everything the per-frame runtime needs to know besides the inputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuntimeConfig {
    /// Hard per-frame latency objective, milliseconds.
    pub slo_ms: f64,
    /// Which latency estimate the planner budgets with.
    pub mode: Mode,
    /// Depth of the planning quad-tree.
    pub tree_depth: u8,
    /// Each tile edge is padded outward by this fraction of its side before
    /// inference, so objects straddling tile borders are still seen whole.
    /// At most 0.25: beyond that, neighbouring crops mostly re-see each other.
    pub padding_fraction: f64,
    /// Detections overlapping at least this much are merged as duplicates.
    /// Strictly between 0 and 1.
    pub nms_iou_threshold: f64,
    /// Minimum overlap for a detection to count as finding a true object.
    pub score_iou_threshold: f64,
    /// Milliseconds per DP budget unit.
    pub step_ms: f64,
    /// Re-projected objects less visible than this are dropped.
    pub min_visible_fraction: f64,
    /// Full frame side length in pixels (frames are square here).
    pub frame_side_px: u32,
    /// Seed for every stochastic draw made on this configuration's behalf.
    pub rng_seed: u64,
    pub intrinsics: CameraIntrinsics,
    pub cost_model: PlanningCostModel,
}

impl RuntimeConfig {
    pub fn new(slo_ms: f64, mode: Mode) -> Self {
        Self {
            slo_ms,
            mode,
            tree_depth: 3,
            padding_fraction: 0.05,
            nms_iou_threshold: 0.5,
            score_iou_threshold: 0.5,
            step_ms: 1.0,
            min_visible_fraction: 0.25,
            frame_side_px: 3840,
            rng_seed: 0,
            intrinsics: CameraIntrinsics::default(),
            cost_model: PlanningCostModel::default(),
        }
    }

    pub fn validate(&self) -> Result<(), RuntimeError> {
        let bad = |msg: String| Err(RuntimeError::InvalidConfig(msg));
        if !(self.slo_ms.is_finite() && self.slo_ms > 0.0) {
            return bad(format!("slo_ms must be positive, got {}", self.slo_ms));
        }
        if self.tree_depth > crate::planner::MAX_TREE_DEPTH {
            return bad(format!("tree_depth {} exceeds {}", self.tree_depth, crate::planner::MAX_TREE_DEPTH));
        }
        if !(0.0..=0.25).contains(&self.padding_fraction) {
            return bad(format!("padding_fraction must be in [0, 0.25], got {}", self.padding_fraction));
        }
        if !(self.nms_iou_threshold > 0.0 && self.nms_iou_threshold < 1.0) {
            return bad(format!("nms_iou_threshold must be in (0, 1), got {}", self.nms_iou_threshold));
        }
        for (name, v) in [
            ("score_iou_threshold", self.score_iou_threshold),
            ("min_visible_fraction", self.min_visible_fraction),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} must be in [0, 1], got {v}"));
            }
        }
        if !(self.step_ms.is_finite() && self.step_ms > 0.0) {
            return bad(format!("step_ms must be positive, got {}", self.step_ms));
        }
        if self.frame_side_px == 0 {
            return bad("frame_side_px must be at least 1".into());
        }
        Ok(())
    }
}

/// One detection emitted by the simulated detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Detection {
    pub bbox: BBox,
    /// Index of the true object this detection came from, or
    /// [`FALSE_POSITIVE_ID`] for a synthesized spurious box.
    pub object_id: usize,
    /// Index of the plan tile that produced it.
    pub source_tile: usize,
}

/// Expands a tile outward by `padding_fraction` of its side on every edge,
/// clipped to the frame.
pub fn pad_tile(region: &BBox, padding_fraction: f64) -> BBox {
    let px = padding_fraction * region.width();
    let py = padding_fraction * region.height();
    BBox::new(
        (region.x_min - px).max(0.0),
        (region.y_min - py).max(0.0),
        (region.x_max + px).min(1.0),
        (region.y_max + py).min(1.0),
    )
}

/// A stand-in for running a real detector on a tile crop: each visible true
/// object is detected with the probability the model's ground-truth profile
/// assigns to its relative size in this tile, and the tile's inference time
/// is drawn from the model's log-normal latency distribution.
///
/// Every draw is a pure hash of `(seed, frame, tile region, …)`, so runs are
/// reproducible and tiles are statistically independent of each other.
#[derive(Debug, Clone)]
pub struct SimulatedDetector {
    true_family: ModelFamily,
    binning: SizeBinning,
    seed: u64,
    /// Per-tile probability of emitting one spurious detection. Off (0) by
    /// default; the hook exists for robustness experiments.
    false_positive_rate: f64,
}

impl SimulatedDetector {
    pub fn new(true_family: ModelFamily, binning: SizeBinning, seed: u64) -> Self {
        Self { true_family, binning, seed, false_positive_rate: 0.0 }
    }

    /// Enables spurious detections at the given per-tile probability.
    pub fn with_false_positive_rate(mut self, rate: f64) -> Self {
        self.false_positive_rate = rate.clamp(0.0, 1.0);
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn family(&self) -> &ModelFamily {
        &self.true_family
    }

    pub fn binning(&self) -> &SizeBinning {
        &self.binning
    }

    /// One Bernoulli detection draw. Keyed by frame, object, and tile region
    /// so repeated queries of the same triple agree and distinct tiles stay
    /// independent.
    fn detect_draw(&self, frame: u64, object_index: usize, region_key: u64, p: f64) -> bool {
        let h = seeding::mix(&[self.seed, frame, object_index as u64, region_key, purpose::DETECT]);
        seeding::unit_f64(h) < p
    }

    /// Runs one tile: returns the detections and the drawn inference time.
    /// `tile` is the plan region (the basis for relative size and latency
    /// keying); `padded` is the actual crop that decides which objects are in
    /// view and clamps detection boxes.
    pub fn simulate_tile(
        &self,
        frame: u64,
        tile: &BBox,
        padded: &BBox,
        model_name: &str,
        true_objects: &[LocalizedBox],
        tile_index: usize,
    ) -> Result<(Vec<Detection>, f64), RuntimeError> {
        let profile = self
            .true_family
            .get(model_name)
            .ok_or_else(|| RuntimeError::UnknownModel(model_name.to_string()))?;
        let region_key = seeding::region_bits(tile);
        let model_key = seeding::hash_str(model_name);

        let (mu, sigma) = profile.lognormal_params();
        let h1 = seeding::mix(&[self.seed, frame, region_key, model_key, purpose::LATENCY, 1]);
        let h2 = seeding::mix(&[self.seed, frame, region_key, model_key, purpose::LATENCY, 2]);
        let latency_ms = (mu + sigma * seeding::gaussian(h1, h2)).exp();

        let tile_area = tile.area();
        let mut detections = Vec::new();
        for obj in true_objects {
            let (cx, cy) = obj.bbox.center();
            if !tile_contains_center(padded, (cx, cy)) {
                continue;
            }
            let rel = obj.bbox.area() / tile_area;
            let p = profile.accuracy[self.binning.bin_of(rel)];
            if self.detect_draw(frame, obj.source_index, region_key, p) {
                let bbox = obj.bbox.clip(padded).unwrap_or(obj.bbox);
                detections.push(Detection { bbox, object_id: obj.source_index, source_tile: tile_index });
            }
        }
        if self.false_positive_rate > 0.0 {
            let h = seeding::mix(&[self.seed, frame, region_key, model_key, purpose::FALSE_POS]);
            if seeding::unit_f64(h) < self.false_positive_rate {
                let hx = seeding::mix(&[self.seed, frame, region_key, model_key, purpose::FALSE_POS, 1]);
                let hy = seeding::mix(&[self.seed, frame, region_key, model_key, purpose::FALSE_POS, 2]);
                let cx = padded.x_min + seeding::unit_f64(hx) * padded.width();
                let cy = padded.y_min + seeding::unit_f64(hy) * padded.height();
                let half = 0.05 * padded.width().min(padded.height());
                let bbox = BBox::new(
                    (cx - half).max(padded.x_min),
                    (cy - half).max(padded.y_min),
                    (cx + half).min(padded.x_max),
                    (cy + half).min(padded.y_max),
                );
                detections.push(Detection { bbox, object_id: FALSE_POSITIVE_ID, source_tile: tile_index });
            }
        }
        Ok((detections, latency_ms))
    }
}

/// How remembered objects are gathered from the bootstrap frames.
#[derive(Debug, Clone, Copy)]
pub enum ExtractionStrategy<'a> {
    /// Keep the ground truth verbatim — the noise-free reference extractor.
    Oracle,
    /// Sweep the simulated detector over an `grid_n × grid_n` uniform
    /// partition of every frame, remembering what it reports.
    Stochastic { detector: &'a SimulatedDetector, model: &'a str, grid_n: u32 },
}

/// Collects the union of per-frame detections into the knowledge history.
///
/// Frames must be captured at the camera's identity pose, so detected boxes
/// are already global coordinates and are remembered verbatim (no clipping,
/// no padding). Each object belongs to exactly one partition tile — the one
/// holding its center — and is detected with that tile's relative-size
/// probability. Boxes identical to an earlier sighting collapse into it.
pub fn extract_history(
    frames: &[(u64, Vec<BBox>)],
    extractor: &ExtractionStrategy<'_>,
) -> Result<ObjectHistory, RuntimeError> {
    if frames.is_empty() {
        return Err(RuntimeError::NoHistoryFrames);
    }
    if let ExtractionStrategy::Stochastic { grid_n: 0, .. } = extractor {
        return Err(RuntimeError::InvalidConfig("extraction grid must be at least 1×1".into()));
    }
    let mut seen: BTreeSet<[u64; 4]> = BTreeSet::new();
    let mut objects = Vec::new();
    let mut remember = |bbox: BBox, frame_id: u64, objects: &mut Vec<HistoryObject>| {
        let key =
            [bbox.x_min.to_bits(), bbox.y_min.to_bits(), bbox.x_max.to_bits(), bbox.y_max.to_bits()];
        if seen.insert(key) {
            objects.push(HistoryObject { bbox, source_frame_id: frame_id });
        }
    };
    for (frame_id, truth) in frames {
        match extractor {
            ExtractionStrategy::Oracle => {
                for b in truth {
                    remember(*b, *frame_id, &mut objects);
                }
            }
            ExtractionStrategy::Stochastic { detector, model, grid_n } => {
                let profile = detector
                    .family()
                    .get(model)
                    .ok_or_else(|| RuntimeError::UnknownModel(model.to_string()))?;
                let tiles = uniform_grid(*grid_n);
                for (i, b) in truth.iter().enumerate() {
                    let Some(tile) = tiles.iter().find(|t| tile_contains_center(t, b.center()))
                    else {
                        continue;
                    };
                    let p = profile.accuracy[detector.binning().bin_of(b.area() / tile.area())];
                    if detector.detect_draw(*frame_id, i, seeding::region_bits(tile), p) {
                        remember(*b, *frame_id, &mut objects);
                    }
                }
            }
        }
    }
    Ok(ObjectHistory::new(objects))
}

/// Greedy non-maximum suppression: detections are visited largest-first (ties
/// broken by coordinates, then ids, so the order is total) and kept unless
/// they overlap an already-kept detection at or above the threshold.
pub fn nms_merge(mut detections: Vec<Detection>, iou_threshold: f64) -> Vec<Detection> {
    detections.sort_by(|a, b| {
        b.bbox
            .area()
            .total_cmp(&a.bbox.area())
            .then(a.bbox.x_min.total_cmp(&b.bbox.x_min))
            .then(a.bbox.y_min.total_cmp(&b.bbox.y_min))
            .then(a.bbox.x_max.total_cmp(&b.bbox.x_max))
            .then(a.bbox.y_max.total_cmp(&b.bbox.y_max))
            .then(a.object_id.cmp(&b.object_id))
            .then(a.source_tile.cmp(&b.source_tile))
    });
    let mut kept: Vec<Detection> = Vec::new();
    for det in detections {
        if kept.iter().all(|k| k.bbox.iou(&det.bbox) < iou_threshold) {
            kept.push(det);
        }
    }
    kept
}

/// Fraction of the visible ground truth matched by some detection at the
/// given overlap threshold. Matching is greedy in ground-truth order, each
/// detection usable once. No visible objects means nothing to miss: 1.0.
pub fn score_frame(
    detections: &[Detection],
    ground_truth: &[LocalizedBox],
    iou_threshold: f64,
) -> f64 {
    if ground_truth.is_empty() {
        return 1.0;
    }
    let mut used = vec![false; detections.len()];
    let mut matched = 0usize;
    for gt in ground_truth {
        let mut best: Option<(usize, f64)> = None;
        for (i, det) in detections.iter().enumerate() {
            if used[i] {
                continue;
            }
            let iou = det.bbox.iou(&gt.bbox);
            if iou >= iou_threshold && best.is_none_or(|(_, b)| iou > b) {
                best = Some((i, iou));
            }
        }
        if let Some((i, _)) = best {
            used[i] = true;
            matched += 1;
        }
    }
    matched as f64 / ground_truth.len() as f64
}

/// The planning-time allowance reserved out of every frame's budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverheadEstimate {
    /// 99th-percentile planning cost observed during profiling, ms.
    pub p99_ms: f64,
    /// The reserved allowance: `p99_ms` with the safety margin applied.
    pub overhead_ms: f64,
}

/// Folds per-frame planning-cost samples into the reserved allowance.
pub fn overhead_from_samples(samples: &[f64]) -> Option<OverheadEstimate> {
    let p99 = nearest_rank_percentile(samples, 99.0)?;
    Some(OverheadEstimate { p99_ms: p99, overhead_ms: OVERHEAD_MARGIN * p99 })
}

/// Prices a full planning pass for each historical frame's known objects —
/// at the *full* objective, the largest budget the runtime will ever plan
/// with — and reserves the 99th percentile plus margin. Frames with more
/// known objects cost more, so the frames should cover the busiest scenes.
pub fn estimate_plan_overhead(
    config: &RuntimeConfig,
    family: &ModelFamily,
    per_frame_objects: &[Vec<BBox>],
) -> Result<OverheadEstimate, RuntimeError> {
    config.validate()?;
    if family.is_empty() {
        return Err(RuntimeError::InvalidConfig("model family is empty".into()));
    }
    if per_frame_objects.len() < MIN_OVERHEAD_FRAMES {
        return Err(RuntimeError::InvalidConfig(format!(
            "overhead estimation needs at least {MIN_OVERHEAD_FRAMES} historical frames, got {}",
            per_frame_objects.len()
        )));
    }
    let tree = RegionTree::quad(config.tree_depth)
        .map_err(|e| RuntimeError::InvalidConfig(e.to_string()))?;
    let budget_units = units_for(config.slo_ms, config.step_ms);
    let samples: Vec<f64> = per_frame_objects
        .iter()
        .map(|objs| {
            config.cost_model.planning_ms(tree.len(), family.len(), budget_units, objs.len())
        })
        .collect();
    Ok(overhead_from_samples(&samples).expect("sample count checked above"))
}

fn units_for(budget_ms: f64, step_ms: f64) -> u32 {
    (budget_ms / step_ms).floor().max(0.0) as u32
}

/// How each frame's plan is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Re-plan every frame from re-projected knowledge, then elect among the
    /// adaptive and uniform candidates.
    Adaptive,
    /// Plan once on the first frame and reuse that tile layout verbatim.
    StaticFrozen,
    /// Always the given model's uniform grid, ignoring the budget.
    FixedUniform(usize),
    /// Always the given model's whole-frame plan, ignoring the budget.
    FixedDownsample(usize),
}

impl Strategy {
    /// Stable label for file layouts and reports.
    pub fn label(&self, family: &ModelFamily) -> String {
        match self {
            Strategy::Adaptive => "adaptive".into(),
            Strategy::StaticFrozen => "static".into(),
            Strategy::FixedUniform(i) => format!("uniform-{}", family.models[*i].name),
            Strategy::FixedDownsample(i) => format!("downsample-{}", family.models[*i].name),
        }
    }
}

/// One input frame: how the camera moves before capturing it, and what is
/// truly in the world while it is captured.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameInput {
    /// Actuation applied since the previous frame (identity when parked).
    pub pose_delta: PoseDelta,
    /// True object boxes in global coordinates.
    pub true_objects: Vec<BBox>,
}

/// Per-frame outcome row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameResult {
    pub frame_id: u64,
    /// The executed plan, with its estimates as of this frame.
    pub plan: TilePlan,
    pub plan_source: PlanSource,
    /// Detections surviving the merge, in local coordinates.
    pub detections: Vec<Detection>,
    pub sim_latency_ms: f64,
    pub slo_missed: bool,
    pub score: f64,
}

/// Aggregates over one simulated sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceMetrics {
    pub frames: usize,
    pub miss_rate_pct: f64,
    pub mean_latency_ms: f64,
    pub mean_score: f64,
    /// Fraction of frames executed under each plan kind; sums to 1.
    pub plan_source_breakdown: BTreeMap<String, f64>,
}

/// Folds per-frame rows into sequence aggregates.
pub fn aggregate_metrics(results: &[FrameResult]) -> SequenceMetrics {
    let n = results.len();
    if n == 0 {
        return SequenceMetrics {
            frames: 0,
            miss_rate_pct: 0.0,
            mean_latency_ms: 0.0,
            mean_score: 0.0,
            plan_source_breakdown: BTreeMap::new(),
        };
    }
    let nf = n as f64;
    let mut breakdown: BTreeMap<String, f64> = BTreeMap::new();
    for r in results {
        *breakdown.entry(r.plan_source.kind().to_string()).or_insert(0.0) += 1.0;
    }
    for v in breakdown.values_mut() {
        *v /= nf;
    }
    SequenceMetrics {
        frames: n,
        miss_rate_pct: 100.0 * results.iter().filter(|r| r.slo_missed).count() as f64 / nf,
        mean_latency_ms: results.iter().map(|r| r.sim_latency_ms).sum::<f64>() / nf,
        mean_score: results.iter().map(|r| r.score).sum::<f64>() / nf,
        plan_source_breakdown: breakdown,
    }
}

fn fallback_downsample(
    family: &ModelFamily,
    knowledge: &[BBox],
    mode: Mode,
    binning: &SizeBinning,
) -> Result<TilePlan, RuntimeError> {
    let idx = family
        .cheapest(mode)
        .ok_or_else(|| RuntimeError::InvalidConfig("model family is empty".into()))?;
    Ok(downsample_plan(family, idx, knowledge, mode, binning))
}

fn reestimate_accuracy(
    plan: &TilePlan,
    knowledge: &[BBox],
    family: &ModelFamily,
    binning: &SizeBinning,
) -> Result<f64, RuntimeError> {
    let tiles: Vec<(BBox, &ModelProfile)> = plan
        .tiles
        .iter()
        .map(|t| {
            family
                .get(&t.model)
                .map(|p| (t.region, p))
                .ok_or_else(|| RuntimeError::UnknownModel(t.model.clone()))
        })
        .collect::<Result<_, _>>()?;
    plan_estimated_accuracy(&tiles, knowledge, binning)
        .map_err(|e| RuntimeError::InvalidConfig(e.to_string()))
}

/// Mutable per-sequence state threaded through [`SequenceRunner::run_frame`]:
/// the accumulated camera pose, the next frame id, and (for the frozen
/// strategy) the plan locked in on the first frame.
#[derive(Debug, Clone)]
pub struct RunState {
    pose: Pose,
    next_frame_id: u64,
    frozen: Option<TilePlan>,
}

impl Default for RunState {
    fn default() -> Self {
        Self::new()
    }
}

impl RunState {
    pub fn new() -> Self {
        Self { pose: Pose::identity(), next_frame_id: 0, frozen: None }
    }

    /// The pose after the most recently run frame (identity before any).
    pub fn pose(&self) -> &Pose {
        &self.pose
    }

    pub fn frames_run(&self) -> u64 {
        self.next_frame_id
    }
}

/// Everything fixed across a sequence: configuration, the world's detector,
/// the planner's believed profiles, the knowledge history, the planning
/// allowance, and the plan-picking strategy.
pub struct SequenceRunner<'a> {
    config: &'a RuntimeConfig,
    detector: &'a SimulatedDetector,
    family: &'a ModelFamily,
    binning: &'a SizeBinning,
    history: &'a [BBox],
    overhead: &'a OverheadEstimate,
    strategy: Strategy,
    tree: RegionTree,
    budget_ms: f64,
    budget_units: u32,
    degenerate: bool,
}

impl<'a> SequenceRunner<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        config: &'a RuntimeConfig,
        detector: &'a SimulatedDetector,
        family: &'a ModelFamily,
        binning: &'a SizeBinning,
        history: &'a [BBox],
        overhead: &'a OverheadEstimate,
        strategy: Strategy,
    ) -> Result<Self, RuntimeError> {
        config.validate()?;
        if family.is_empty() {
            return Err(RuntimeError::InvalidConfig("model family is empty".into()));
        }
        if let Strategy::FixedUniform(i) | Strategy::FixedDownsample(i) = strategy {
            if i >= family.len() {
                return Err(RuntimeError::InvalidConfig(format!(
                    "fixed-model index {i} out of range for {} models",
                    family.len()
                )));
            }
        }
        let tree = RegionTree::quad(config.tree_depth)
            .map_err(|e| RuntimeError::InvalidConfig(e.to_string()))?;
        let budget_ms = config.slo_ms - overhead.overhead_ms;
        let degenerate = budget_ms <= 0.0;
        let budget_units = units_for(budget_ms.max(0.0), config.step_ms);
        Ok(Self {
            config,
            detector,
            family,
            binning,
            history,
            overhead,
            strategy,
            tree,
            budget_ms,
            budget_units,
            degenerate,
        })
    }

    /// The per-frame inference budget (objective minus planning allowance).
    pub fn budget_ms(&self) -> f64 {
        self.budget_ms
    }

    /// True when the planning allowance alone exceeds the objective, so every
    /// frame falls back to the cheapest whole-frame plan.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn overhead(&self) -> &OverheadEstimate {
        self.overhead
    }

    /// Advances the camera by `pose_delta`, plans under the remaining budget,
    /// simulates the plan's tiles against the frame's true objects, merges
    /// and scores the detections, and charges planning plus inference against
    /// the objective.
    pub fn run_frame(
        &self,
        state: &mut RunState,
        pose_delta: &PoseDelta,
        true_objects: &[BBox],
    ) -> Result<FrameResult, RuntimeError> {
        let config = self.config;
        let frame_id = state.next_frame_id;
        state.next_frame_id += 1;
        state.pose = state.pose.apply(pose_delta);

        let knowledge: Vec<BBox> =
            localize(self.history, &state.pose, &config.intrinsics, config.min_visible_fraction)
                .into_iter()
                .map(|l| l.bbox)
                .collect();
        let ground_truth =
            localize(true_objects, &state.pose, &config.intrinsics, config.min_visible_fraction);

        let plan_charge = || {
            config.cost_model.planning_ms(
                self.tree.len(),
                self.family.len(),
                self.budget_units,
                knowledge.len(),
            )
        };
        let (plan, planning_charge) = match self.strategy {
            Strategy::Adaptive => {
                if self.degenerate {
                    (fallback_downsample(self.family, &knowledge, config.mode, self.binning)?, 0.0)
                } else {
                    let adaptive = adaptive_plan(
                        &self.tree,
                        &knowledge,
                        self.family,
                        config.mode,
                        self.budget_ms,
                        config.step_ms,
                        self.binning,
                    );
                    let uniforms = uniform_plans(
                        self.family,
                        &knowledge,
                        config.frame_side_px,
                        self.budget_ms,
                        config.mode,
                        self.binning,
                    );
                    let elected = elect(Some(adaptive), uniforms);
                    let charge = plan_charge();
                    if elected.is_empty() {
                        (
                            fallback_downsample(self.family, &knowledge, config.mode, self.binning)?,
                            charge,
                        )
                    } else {
                        (elected, charge)
                    }
                }
            }
            Strategy::StaticFrozen => {
                let charge = if frame_id == 0 && !self.degenerate { plan_charge() } else { 0.0 };
                if state.frozen.is_none() {
                    let p = if self.degenerate {
                        TilePlan::empty()
                    } else {
                        adaptive_plan(
                            &self.tree,
                            &knowledge,
                            self.family,
                            config.mode,
                            self.budget_ms,
                            config.step_ms,
                            self.binning,
                        )
                    };
                    state.frozen = Some(p);
                }
                let mut p = state.frozen.clone().expect("frozen plan was just set");
                if p.is_empty() {
                    p = fallback_downsample(self.family, &knowledge, config.mode, self.binning)?;
                } else {
                    p.estimated_accuracy =
                        reestimate_accuracy(&p, &knowledge, self.family, self.binning)?;
                }
                (p, charge)
            }
            Strategy::FixedUniform(i) => (
                uniform_plan_for_model(
                    self.family,
                    i,
                    &knowledge,
                    config.frame_side_px,
                    config.mode,
                    self.binning,
                ),
                0.0,
            ),
            Strategy::FixedDownsample(i) => {
                (downsample_plan(self.family, i, &knowledge, config.mode, self.binning), 0.0)
            }
        };

        let mut detections = Vec::new();
        let mut sim_latency_ms = planning_charge;
        for (ti, tile) in plan.tiles.iter().enumerate() {
            let padded = pad_tile(&tile.region, config.padding_fraction);
            let (mut dets, lat) = self.detector.simulate_tile(
                frame_id,
                &tile.region,
                &padded,
                &tile.model,
                &ground_truth,
                ti,
            )?;
            detections.append(&mut dets);
            sim_latency_ms += lat;
        }
        let merged = nms_merge(detections, config.nms_iou_threshold);
        let score = score_frame(&merged, &ground_truth, config.score_iou_threshold);

        Ok(FrameResult {
            frame_id,
            plan_source: plan.source.clone(),
            plan,
            detections: merged,
            sim_latency_ms,
            slo_missed: sim_latency_ms > config.slo_ms,
            score,
        })
    }
}

/// Runs one strategy over a frame sequence.
///
/// `family` carries the profiles the *planner* believes (typically measured
/// during bootstrap); the detector carries the ground-truth profiles the
/// world actually follows. `history` is the global knowledge re-projected
/// into every frame to drive planning, and each frame's `pose_delta`
/// accumulates onto the camera pose starting from identity.
#[allow(clippy::too_many_arguments)]
pub fn run_sequence(
    config: &RuntimeConfig,
    detector: &SimulatedDetector,
    family: &ModelFamily,
    binning: &SizeBinning,
    history: &[BBox],
    frames: &[FrameInput],
    overhead: &OverheadEstimate,
    strategy: Strategy,
) -> Result<(Vec<FrameResult>, SequenceMetrics), RuntimeError> {
    let runner = SequenceRunner::new(config, detector, family, binning, history, overhead, strategy)?;
    let mut state = RunState::new();
    let mut results = Vec::with_capacity(frames.len());
    for frame in frames {
        results.push(runner.run_frame(&mut state, &frame.pose_delta, &frame.true_objects)?);
    }
    let metrics = aggregate_metrics(&results);
    Ok((results, metrics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::BIN_COUNT;
    use approx::assert_abs_diff_eq;

    fn family(specs: &[(&str, u32, f64, f64, f64)]) -> ModelFamily {
        ModelFamily::new(
            specs
                .iter()
                .map(|&(name, side, acc, mean, p99)| {
                    ModelProfile::new(name, side, vec![acc; BIN_COUNT], mean, p99).unwrap()
                })
                .collect(),
        )
    }

    fn localized(boxes: &[BBox]) -> Vec<LocalizedBox> {
        boxes
            .iter()
            .enumerate()
            .map(|(i, b)| LocalizedBox { source_index: i, bbox: *b, visible_fraction: 1.0 })
            .collect()
    }

    #[test]
    fn pad_tile_expands_and_clips() {
        let t = BBox::new(0.25, 0.25, 0.75, 0.75);
        let p = pad_tile(&t, 0.1);
        assert_abs_diff_eq!(p.x_min, 0.20, epsilon = 1e-12);
        assert_abs_diff_eq!(p.x_max, 0.80, epsilon = 1e-12);
        let corner = BBox::new(0.0, 0.0, 0.5, 0.5);
        let p = pad_tile(&corner, 0.1);
        assert_eq!(p.x_min, 0.0);
        assert_abs_diff_eq!(p.x_max, 0.55, epsilon = 1e-12);
        assert_eq!(pad_tile(&t, 0.0), t);
    }

    #[test]
    fn cost_model_formula_is_exact() {
        let m = PlanningCostModel { base_ms: 0.5, dp_cell_ns: 2.0, obj_node_ns: 10.0 };
        // 85 nodes × 7 models × 1000 units × 2 ns = 1.19 ms; 40 × 85 × 10 ns = 0.034 ms.
        let ms = m.planning_ms(85, 7, 1000, 40);
        assert_abs_diff_eq!(ms, 0.5 + 1.19 + 0.034, epsilon = 1e-12);
        assert_abs_diff_eq!(m.planning_ms(0, 0, 0, 0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn overhead_from_samples_uses_nearest_rank_p99() {
        let samples: Vec<f64> = (1..=100).map(f64::from).collect();
        let est = overhead_from_samples(&samples).unwrap();
        assert_eq!(est.p99_ms, 100.0);
        assert_abs_diff_eq!(est.overhead_ms, 110.0, epsilon = 1e-12);
        assert!(overhead_from_samples(&[]).is_none());
        let est = overhead_from_samples(&[4.0]).unwrap();
        assert_eq!(est.p99_ms, 4.0);
    }

    #[test]
    fn overhead_estimation_requires_enough_frames() {
        let config = RuntimeConfig::new(100.0, Mode::Conservative);
        let fam = family(&[("m", 640, 0.5, 10.0, 14.0)]);
        let objs = vec![BBox::new(0.1, 0.1, 0.2, 0.2)];
        let few = vec![objs.clone(); MIN_OVERHEAD_FRAMES - 1];
        assert!(estimate_plan_overhead(&config, &fam, &few).is_err());
        let enough = vec![objs; MIN_OVERHEAD_FRAMES];
        let est = estimate_plan_overhead(&config, &fam, &enough).unwrap();
        // Identical frames → p99 equals the common value.
        assert_abs_diff_eq!(est.overhead_ms, OVERHEAD_MARGIN * est.p99_ms, epsilon = 1e-12);
        assert!(est.p99_ms > 0.0);
    }

    #[test]
    fn simulated_detector_is_deterministic_and_respects_probabilities() {
        let binning = SizeBinning::standard();
        let always = SimulatedDetector::new(
            family(&[("hit", 640, 1.0, 20.0, 30.0)]),
            binning.clone(),
            7,
        );
        let never = SimulatedDetector::new(
            family(&[("miss", 640, 0.0, 20.0, 30.0)]),
            binning.clone(),
            7,
        );
        let tile = BBox::unit();
        let objs = localized(&[BBox::new(0.1, 0.1, 0.3, 0.3), BBox::new(0.6, 0.6, 0.7, 0.7)]);

        let (d1, l1) = always.simulate_tile(3, &tile, &tile, "hit", &objs, 0).unwrap();
        let (d2, l2) = always.simulate_tile(3, &tile, &tile, "hit", &objs, 0).unwrap();
        assert_eq!(d1, d2);
        assert_eq!(l1, l2);
        assert!(l1 > 0.0);
        assert_eq!(d1.len(), 2);

        let (d0, _) = never.simulate_tile(3, &tile, &tile, "miss", &objs, 0).unwrap();
        assert!(d0.is_empty());

        assert!(always.simulate_tile(0, &tile, &tile, "unknown", &objs, 0).is_err());
    }

    #[test]
    fn simulated_detector_only_sees_objects_in_the_padded_tile() {
        let binning = SizeBinning::standard();
        let det =
            SimulatedDetector::new(family(&[("m", 640, 1.0, 20.0, 30.0)]), binning, 1);
        let tile = BBox::new(0.0, 0.0, 0.5, 0.5);
        let padded = pad_tile(&tile, 0.1);
        // Centers: inside the tile, inside only the padding, and far outside.
        let objs = localized(&[
            BBox::new(0.2, 0.2, 0.3, 0.3),
            BBox::new(0.50, 0.20, 0.56, 0.26),
            BBox::new(0.8, 0.8, 0.9, 0.9),
        ]);
        let (dets, _) = det.simulate_tile(0, &tile, &padded, "m", &objs, 0).unwrap();
        let ids: Vec<usize> = dets.iter().map(|d| d.object_id).collect();
        assert_eq!(ids, vec![0, 1]);
        // Detection boxes are clamped into the padded crop.
        for d in &dets {
            assert!(d.bbox.x_max <= padded.x_max + 1e-12);
        }
    }

    #[test]
    fn false_positive_hook_is_off_by_default() {
        let binning = SizeBinning::standard();
        let fam = family(&[("m", 640, 1.0, 20.0, 30.0)]);
        let clean = SimulatedDetector::new(fam.clone(), binning.clone(), 5);
        let noisy = SimulatedDetector::new(fam, binning, 5).with_false_positive_rate(1.0);
        let tile = BBox::unit();
        let objs = localized(&[BBox::new(0.1, 0.1, 0.3, 0.3)]);
        let (d_clean, l_clean) = clean.simulate_tile(0, &tile, &tile, "m", &objs, 0).unwrap();
        assert!(d_clean.iter().all(|d| d.object_id != FALSE_POSITIVE_ID));
        let (d_noisy, l_noisy) = noisy.simulate_tile(0, &tile, &tile, "m", &objs, 0).unwrap();
        assert_eq!(l_clean, l_noisy);
        assert_eq!(d_noisy.len(), d_clean.len() + 1);
        let spurious = d_noisy.last().unwrap();
        assert_eq!(spurious.object_id, FALSE_POSITIVE_ID);
        assert!(spurious.bbox.area() > 0.0);
    }

    #[test]
    fn extract_history_oracle_unions_frames() {
        let a = BBox::new(0.1, 0.1, 0.2, 0.2);
        let b = BBox::new(0.4, 0.4, 0.5, 0.5);
        let c = BBox::new(0.7, 0.7, 0.8, 0.8);
        let frames = vec![(0u64, vec![a, b]), (1u64, vec![c]), (2u64, vec![a])];
        let history = extract_history(&frames, &ExtractionStrategy::Oracle).unwrap();
        // Union: the repeat sighting of `a` collapses into the first.
        assert_eq!(history.len(), 3);
        assert_eq!(history.boxes(), vec![a, b, c]);
        assert_eq!(
            history.objects.iter().map(|o| o.source_frame_id).collect::<Vec<_>>(),
            vec![0, 0, 1]
        );
        assert_eq!(
            extract_history(&[], &ExtractionStrategy::Oracle),
            Err(RuntimeError::NoHistoryFrames)
        );
    }

    #[test]
    fn extract_history_with_certain_detector_matches_oracle() {
        let binning = SizeBinning::standard();
        let det = SimulatedDetector::new(family(&[("best", 1280, 1.0, 10.0, 14.0)]), binning, 42);
        let frames: Vec<(u64, Vec<BBox>)> = (0..4)
            .map(|f| {
                let off = 0.001 * f as f64;
                (
                    f as u64,
                    vec![
                        BBox::new(0.1 + off, 0.1, 0.15 + off, 0.15),
                        BBox::new(0.6 + off, 0.7, 0.66 + off, 0.76),
                    ],
                )
            })
            .collect();
        let oracle = extract_history(&frames, &ExtractionStrategy::Oracle).unwrap();
        let stochastic = extract_history(
            &frames,
            &ExtractionStrategy::Stochastic { detector: &det, model: "best", grid_n: 3 },
        )
        .unwrap();
        assert_eq!(oracle, stochastic);

        // Unknown model and degenerate grid are rejected.
        assert!(extract_history(
            &frames,
            &ExtractionStrategy::Stochastic { detector: &det, model: "nope", grid_n: 3 },
        )
        .is_err());
        assert!(extract_history(
            &frames,
            &ExtractionStrategy::Stochastic { detector: &det, model: "best", grid_n: 0 },
        )
        .is_err());
    }

    #[test]
    fn extracted_history_localizes_back_to_itself_at_identity() {
        let frames = vec![(
            0u64,
            vec![BBox::new(0.2, 0.3, 0.25, 0.35), BBox::new(0.6, 0.1, 0.72, 0.22)],
        )];
        let history = extract_history(&frames, &ExtractionStrategy::Oracle).unwrap();
        let local = localize(&history.boxes(), &Pose::identity(), &CameraIntrinsics::default(), 0.25);
        assert_eq!(local.len(), history.len());
        for (l, o) in local.iter().zip(&history.objects) {
            assert_abs_diff_eq!(l.bbox.x_min, o.bbox.x_min, epsilon = 1e-9);
            assert_abs_diff_eq!(l.bbox.y_max, o.bbox.y_max, epsilon = 1e-9);
        }
    }

    #[test]
    fn nms_merges_duplicates_and_is_idempotent() {
        let b = BBox::new(0.1, 0.1, 0.3, 0.3);
        let shifted = BBox::new(0.12, 0.1, 0.32, 0.3); // IoU ≈ 0.82
        let far = BBox::new(0.6, 0.6, 0.8, 0.8);
        let dets = vec![
            Detection { bbox: b, object_id: 0, source_tile: 0 },
            Detection { bbox: shifted, object_id: 0, source_tile: 1 },
            Detection { bbox: far, object_id: 1, source_tile: 1 },
        ];
        let merged = nms_merge(dets.clone(), 0.5);
        assert_eq!(merged.len(), 2);
        let twice = nms_merge(merged.clone(), 0.5);
        assert_eq!(twice, merged);
        // Threshold above their IoU keeps all three.
        assert_eq!(nms_merge(dets, 0.9).len(), 3);
    }

    #[test]
    fn score_counts_matched_ground_truth() {
        let gt = localized(&[BBox::new(0.1, 0.1, 0.3, 0.3), BBox::new(0.6, 0.6, 0.8, 0.8)]);
        let hit = Detection { bbox: BBox::new(0.1, 0.1, 0.3, 0.3), object_id: 0, source_tile: 0 };
        assert_eq!(score_frame(&[hit], &gt, 0.5), 0.5);
        let both = [
            hit,
            Detection { bbox: BBox::new(0.61, 0.6, 0.81, 0.8), object_id: 1, source_tile: 0 },
        ];
        assert_eq!(score_frame(&both, &gt, 0.5), 1.0);
        // One detection cannot match two objects.
        let gt_twice = localized(&[BBox::new(0.1, 0.1, 0.3, 0.3), BBox::new(0.1, 0.1, 0.3, 0.3)]);
        assert_eq!(score_frame(&[hit], &gt_twice, 0.5), 0.5);
        assert_eq!(score_frame(&[], &[], 0.5), 1.0);
        assert_eq!(score_frame(&[], &gt, 0.5), 0.0);
    }

    fn test_setup() -> (RuntimeConfig, SimulatedDetector, ModelFamily, SizeBinning, Vec<BBox>) {
        let binning = SizeBinning::standard();
        let fam = family(&[
            ("small", 1280, 0.6, 10.0, 14.0),
            ("big", 1920, 0.9, 40.0, 55.0),
        ]);
        let det = SimulatedDetector::new(fam.clone(), binning.clone(), 99);
        let config = RuntimeConfig::new(200.0, Mode::NonConservative);
        let objects: Vec<BBox> = (0..6)
            .map(|i| {
                let x = 0.12 + 0.13 * f64::from(i);
                BBox::new(x, 0.4, x + 0.05, 0.45)
            })
            .collect();
        (config, det, fam, binning, objects)
    }

    fn still_frames(objects: &[BBox], n: usize) -> Vec<FrameInput> {
        (0..n)
            .map(|_| FrameInput { pose_delta: PoseDelta::none(), true_objects: objects.to_vec() })
            .collect()
    }

    #[test]
    fn run_sequence_produces_consistent_rows() {
        let (config, det, fam, binning, objects) = test_setup();
        let frames = still_frames(&objects, 5);
        let overhead = OverheadEstimate { p99_ms: 2.0, overhead_ms: 2.2 };

        for strategy in [
            Strategy::Adaptive,
            Strategy::StaticFrozen,
            Strategy::FixedUniform(0),
            Strategy::FixedDownsample(1),
        ] {
            let (rows, metrics) =
                run_sequence(&config, &det, &fam, &binning, &objects, &frames, &overhead, strategy)
                    .unwrap();
            assert_eq!(rows.len(), 5);
            assert_eq!(metrics.frames, 5);
            for (i, r) in rows.iter().enumerate() {
                assert_eq!(r.frame_id, i as u64);
                assert!(r.sim_latency_ms > 0.0);
                assert!((0.0..=1.0).contains(&r.score));
                assert_eq!(r.slo_missed, r.sim_latency_ms > config.slo_ms);
                assert_eq!(r.plan_source, r.plan.source);
            }
            let total: f64 = metrics.plan_source_breakdown.values().sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn run_frame_accumulates_pose_deltas() {
        let (config, det, fam, binning, objects) = test_setup();
        let overhead = OverheadEstimate { p99_ms: 1.0, overhead_ms: 1.1 };
        let runner = SequenceRunner::new(
            &config, &det, &fam, &binning, &objects, &overhead, Strategy::Adaptive,
        )
        .unwrap();
        let mut state = RunState::new();
        let delta = PoseDelta { pan_rad: 0.1, tilt_rad: 0.05, zoom_factor: 1.2 };
        runner.run_frame(&mut state, &delta, &objects).unwrap();
        runner.run_frame(&mut state, &delta, &objects).unwrap();
        let expected = Pose::identity().apply(&delta).apply(&delta);
        assert_eq!(state.pose(), &expected);
        assert_eq!(state.frames_run(), 2);
    }

    #[test]
    fn run_sequence_is_reproducible() {
        let (config, det, fam, binning, objects) = test_setup();
        let frames = still_frames(&objects, 4);
        let overhead = OverheadEstimate { p99_ms: 1.0, overhead_ms: 1.1 };
        let run = || {
            run_sequence(
                &config, &det, &fam, &binning, &objects, &frames, &overhead, Strategy::Adaptive,
            )
            .unwrap()
        };
        let (r1, m1) = run();
        let (r2, m2) = run();
        assert_eq!(r1, r2);
        assert_eq!(m1, m2);
    }

    #[test]
    fn fixed_strategies_pay_no_planning_charge() {
        let (config, det, fam, binning, objects) = test_setup();
        let frames = still_frames(&objects, 3);
        // Huge overhead: adaptive budget is degenerate, falls back without a
        // planning charge; fixed strategies never pay one anyway.
        let overhead = OverheadEstimate { p99_ms: 500.0, overhead_ms: 550.0 };
        let (rows, _) = run_sequence(
            &config, &det, &fam, &binning, &objects, &frames, &overhead, Strategy::Adaptive,
        )
        .unwrap();
        for r in &rows {
            assert_eq!(r.plan_source, PlanSource::Downsample("small".into()));
        }
        let (rows_fixed, _) = run_sequence(
            &config,
            &det,
            &fam,
            &binning,
            &objects,
            &frames,
            &overhead,
            Strategy::FixedDownsample(0),
        )
        .unwrap();
        // Same executed plan, same seed keys → identical simulated latency.
        for (a, b) in rows.iter().zip(&rows_fixed) {
            assert_eq!(a.sim_latency_ms, b.sim_latency_ms);
        }
    }

    #[test]
    fn static_plan_is_frozen_after_frame_zero() {
        let (config, det, fam, binning, objects) = test_setup();
        // Camera pans away after frame 0; the frozen layout must not change.
        let frames = vec![
            FrameInput { pose_delta: PoseDelta::none(), true_objects: objects.clone() },
            FrameInput {
                pose_delta: PoseDelta { pan_rad: 0.3, tilt_rad: 0.0, zoom_factor: 1.0 },
                true_objects: objects.clone(),
            },
        ];
        let overhead = OverheadEstimate { p99_ms: 1.0, overhead_ms: 1.1 };
        let (rows, _) = run_sequence(
            &config,
            &det,
            &fam,
            &binning,
            &objects,
            &frames,
            &overhead,
            Strategy::StaticFrozen,
        )
        .unwrap();
        assert_eq!(rows[0].plan_source, rows[1].plan_source);
        assert_eq!(rows[0].plan.estimated_latency_ms, rows[1].plan.estimated_latency_ms);
        let tiles_of = |r: &FrameResult| r.plan.tiles.clone();
        assert_eq!(tiles_of(&rows[0]), tiles_of(&rows[1]));
    }

    #[test]
    fn config_validation_rejects_bad_values() {
        let mut c = RuntimeConfig::new(100.0, Mode::Conservative);
        assert!(c.validate().is_ok());
        c.padding_fraction = 0.25;
        assert!(c.validate().is_ok());
        c.padding_fraction = 0.26;
        assert!(c.validate().is_err());
        c = RuntimeConfig::new(0.0, Mode::Conservative);
        assert!(c.validate().is_err());
        c = RuntimeConfig::new(100.0, Mode::Conservative);
        c.tree_depth = 9;
        assert!(c.validate().is_err());
        for bad_iou in [0.0, 1.0, 1.5] {
            c = RuntimeConfig::new(100.0, Mode::Conservative);
            c.nms_iou_threshold = bad_iou;
            assert!(c.validate().is_err(), "nms_iou_threshold {bad_iou} should be rejected");
        }
    }
}
