//! World and workload synthesis: clustered global scenes, scripted camera
//! actuation with view-boundary validation, the ground-truth model family the
//! simulated detector follows, and the bootstrap that measures model profiles
//! and seeds the planner's knowledge before a run.
//!
//! Everything here draws through [`crate::seeding`], so a `(spec, seed)` pair
//! reproduces the same world byte-for-byte.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distribution::{tile_contains_center, ObjectHistory};
use crate::geometry::{localize, BBox, CameraIntrinsics, Pose, PoseDelta, ViewTransform};
use crate::planner::uniform_grid;
use crate::profile::{build_profile, DetectionRecord, ModelFamily, ModelProfile, SizeBinning};
use crate::runtime::{
    estimate_plan_overhead, extract_history, pad_tile, ExtractionStrategy, FrameInput,
    OverheadEstimate, RuntimeConfig, RuntimeError, SimulatedDetector, MIN_OVERHEAD_FRAMES,
};
use crate::seeding::{self, purpose};

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("scenario needs at least {min} frames, got {got}")]
    TooShort { got: usize, min: usize },
    #[error("invalid actuation schedule: {0}")]
    InvalidActuation(String),
    #[error("camera view leaves the covered plane at frame {frame}")]
    OutOfView { frame: usize },
    #[error("invalid scene spec: {0}")]
    InvalidScene(String),
    #[error("invalid bootstrap config: {0}")]
    InvalidBootstrap(String),
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
}

// ---------------------------------------------------------------------------
// Scenes
// ---------------------------------------------------------------------------

/// One cluster of objects on the global plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSpec {
    /// Cluster center in global coordinates.
    pub center: (f64, f64),
    /// Standard deviation of object centers around the cluster center.
    pub spread: f64,
    pub object_count: usize,
    /// Median object area (objects are squares; areas are log-normal).
    pub median_area: f64,
    /// σ of the log-area distribution.
    pub sigma_ln: f64,
}

/// A scene recipe: clusters plus per-frame positional jitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub clusters: Vec<ClusterSpec>,
    /// Standard deviation of the per-frame drift of each object's center.
    pub jitter: f64,
}

impl SceneSpec {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.clusters.is_empty() {
            return Err(ScenarioError::InvalidScene("no clusters".into()));
        }
        for (i, c) in self.clusters.iter().enumerate() {
            if !(c.center.0.is_finite() && c.center.1.is_finite()) || c.spread < 0.0 {
                return Err(ScenarioError::InvalidScene(format!("cluster {i}: bad center/spread")));
            }
            if !(c.median_area > 0.0 && c.median_area <= 1.0) || c.sigma_ln < 0.0 {
                return Err(ScenarioError::InvalidScene(format!("cluster {i}: bad area params")));
            }
        }
        if !(self.jitter.is_finite() && self.jitter >= 0.0) {
            return Err(ScenarioError::InvalidScene("negative jitter".into()));
        }
        Ok(())
    }
}

/// A realized scene: base boxes plus the jitter law, replayable per frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalScene {
    /// Frame-0 object boxes in global coordinates.
    pub base: Vec<BBox>,
    pub jitter: f64,
    pub seed: u64,
}

/// Clamps a square of side `side` centered at `(cx, cy)` to fit in the plane.
fn fit_square(cx: f64, cy: f64, side: f64) -> BBox {
    let side = side.clamp(1e-4, 1.0);
    let h = side / 2.0;
    let cx = cx.clamp(h, 1.0 - h);
    let cy = cy.clamp(h, 1.0 - h);
    BBox::new(cx - h, cy - h, cx + h, cy + h)
}

/// Realizes a scene spec into concrete frame-0 boxes.
pub fn generate_scene(spec: &SceneSpec, seed: u64) -> Result<GlobalScene, ScenarioError> {
    spec.validate()?;
    let mut base = Vec::new();
    for (ci, cluster) in spec.clusters.iter().enumerate() {
        let ci = ci as u64;
        for oi in 0..cluster.object_count {
            let oi = oi as u64;
            let gx = seeding::gaussian(
                seeding::mix(&[seed, purpose::SCENE_CENTER, ci, oi, 1]),
                seeding::mix(&[seed, purpose::SCENE_CENTER, ci, oi, 2]),
            );
            let gy = seeding::gaussian(
                seeding::mix(&[seed, purpose::SCENE_CENTER, ci, oi, 3]),
                seeding::mix(&[seed, purpose::SCENE_CENTER, ci, oi, 4]),
            );
            let ga = seeding::gaussian(
                seeding::mix(&[seed, purpose::SCENE_AREA, ci, oi, 1]),
                seeding::mix(&[seed, purpose::SCENE_AREA, ci, oi, 2]),
            );
            let area = (cluster.median_area.ln() + cluster.sigma_ln * ga).exp();
            base.push(fit_square(
                cluster.center.0 + cluster.spread * gx,
                cluster.center.1 + cluster.spread * gy,
                area.sqrt(),
            ));
        }
    }
    Ok(GlobalScene { base, jitter: spec.jitter, seed })
}

impl GlobalScene {
    /// The scene at one frame: every object drifted by its deterministic
    /// per-frame jitter, still fitting the plane. Frame 0 is the base scene.
    pub fn frame_objects(&self, frame: u64) -> Vec<BBox> {
        if frame == 0 || self.jitter == 0.0 {
            return self.base.clone();
        }
        self.base
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let i = i as u64;
                let dx = seeding::gaussian(
                    seeding::mix(&[self.seed, purpose::SCENE_JITTER, frame, i, 1]),
                    seeding::mix(&[self.seed, purpose::SCENE_JITTER, frame, i, 2]),
                );
                let dy = seeding::gaussian(
                    seeding::mix(&[self.seed, purpose::SCENE_JITTER, frame, i, 3]),
                    seeding::mix(&[self.seed, purpose::SCENE_JITTER, frame, i, 4]),
                );
                let (cx, cy) = b.center();
                fit_square(cx + self.jitter * dx, cy + self.jitter * dy, b.width())
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Scenarios (camera actuation scripts)
// ---------------------------------------------------------------------------

/// Minimum scenario length: room for one actuation between idle stretches.
pub const MIN_SCENARIO_FRAMES: usize = 45;
/// Idle frames before, between, and after actuations.
pub const IDLE_GAP_FRAMES: usize = 15;
/// Actuation duration bounds, frames.
pub const MIN_ACTUATION_FRAMES: usize = 15;
pub const MAX_ACTUATION_FRAMES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActuationKind {
    Pan,
    Tilt,
    ZoomIn,
}

/// One camera movement spread uniformly over a frame range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Actuation {
    pub kind: ActuationKind,
    pub start_frame: usize,
    pub duration: usize,
    /// Total sweep: signed radians for pan/tilt, overall ratio (≥ 1) for zoom.
    pub magnitude: f64,
}

/// A full camera script over a frame sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub frame_count: usize,
    pub actuations: Vec<Actuation>,
    pub seed: u64,
}

impl ScenarioSpec {
    /// Per-frame pose deltas; identity on frames with no actuation.
    pub fn deltas(&self) -> Vec<PoseDelta> {
        let mut deltas = vec![PoseDelta::none(); self.frame_count];
        for act in &self.actuations {
            let per_frame_angle = act.magnitude / act.duration as f64;
            let per_frame_zoom = act.magnitude.powf(1.0 / act.duration as f64);
            let end = (act.start_frame + act.duration).min(self.frame_count);
            for delta in &mut deltas[act.start_frame..end] {
                match act.kind {
                    ActuationKind::Pan => delta.pan_rad += per_frame_angle,
                    ActuationKind::Tilt => delta.tilt_rad += per_frame_angle,
                    ActuationKind::ZoomIn => delta.zoom_factor *= per_frame_zoom,
                }
            }
        }
        deltas
    }

    /// The pose at each frame, starting from identity.
    pub fn poses(&self) -> Vec<Pose> {
        let mut pose = Pose::identity();
        self.deltas()
            .iter()
            .map(|d| {
                pose = pose.apply(d);
                pose
            })
            .collect()
    }

    /// Checks the script: length, a well-formed non-overlapping schedule,
    /// sane magnitudes, and — by replaying the poses — that the camera view
    /// never leaves the covered plane.
    pub fn validate(&self, intrinsics: &CameraIntrinsics) -> Result<(), ScenarioError> {
        if self.frame_count < MIN_SCENARIO_FRAMES {
            return Err(ScenarioError::TooShort {
                got: self.frame_count,
                min: MIN_SCENARIO_FRAMES,
            });
        }
        let mut prev_end = 0usize;
        for (i, act) in self.actuations.iter().enumerate() {
            if act.duration == 0 {
                return Err(ScenarioError::InvalidActuation(format!("actuation {i}: zero duration")));
            }
            if act.start_frame < prev_end {
                return Err(ScenarioError::InvalidActuation(format!(
                    "actuation {i} starts at {} before the previous one ends at {prev_end}",
                    act.start_frame
                )));
            }
            let end = act.start_frame + act.duration;
            if end > self.frame_count {
                return Err(ScenarioError::InvalidActuation(format!(
                    "actuation {i} ends at {end}, past frame {}",
                    self.frame_count
                )));
            }
            match act.kind {
                ActuationKind::ZoomIn => {
                    if !(act.magnitude.is_finite() && act.magnitude >= 1.0) {
                        return Err(ScenarioError::InvalidActuation(format!(
                            "actuation {i}: zoom ratio must be ≥ 1, got {}",
                            act.magnitude
                        )));
                    }
                }
                ActuationKind::Pan | ActuationKind::Tilt => {
                    if !(act.magnitude.is_finite()
                        && act.magnitude.abs() <= std::f64::consts::PI)
                    {
                        return Err(ScenarioError::InvalidActuation(format!(
                            "actuation {i}: sweep must be finite and |sweep| ≤ π, got {}",
                            act.magnitude
                        )));
                    }
                }
            }
            prev_end = end;
        }
        // Replay: sample the view border and require it to stay on the plane.
        const SAMPLES: [(f64, f64); 8] = [
            (0.0, 0.0),
            (1.0, 0.0),
            (0.0, 1.0),
            (1.0, 1.0),
            (0.5, 0.0),
            (0.5, 1.0),
            (0.0, 0.5),
            (1.0, 0.5),
        ];
        const EPS: f64 = 1e-9;
        for (frame, pose) in self.poses().iter().enumerate() {
            let view = ViewTransform::new(pose, intrinsics);
            for s in SAMPLES {
                match view.back_project_point(s) {
                    Some((x, y))
                        if (-EPS..=1.0 + EPS).contains(&x) && (-EPS..=1.0 + EPS).contains(&y) => {}
                    _ => return Err(ScenarioError::OutOfView { frame }),
                }
            }
        }
        Ok(())
    }
}

/// Generates a valid camera script: an initial idle stretch, then actuations
/// separated by idle gaps — the first always a zoom-in (which creates the
/// slack for later pans and tilts), the rest drawn from pan, tilt, and
/// zoom-in. Candidates whose replay would look off the covered plane are
/// rejected and redrawn; after 64 failed attempts a plain 2× zoom-in script
/// is returned.
pub fn generate_scenario(
    frame_count: usize,
    seed: u64,
    intrinsics: &CameraIntrinsics,
) -> Result<ScenarioSpec, ScenarioError> {
    if frame_count < MIN_SCENARIO_FRAMES {
        return Err(ScenarioError::TooShort { got: frame_count, min: MIN_SCENARIO_FRAMES });
    }
    for attempt in 0..64u64 {
        let mut k = 0u64;
        let mut draw = |tag: u64| {
            k += 1;
            seeding::unit_f64(seeding::mix(&[seed, purpose::SCENARIO, attempt, tag, k]))
        };
        let mut actuations = Vec::new();
        let mut cursor = IDLE_GAP_FRAMES;
        loop {
            let room = frame_count.saturating_sub(cursor + IDLE_GAP_FRAMES);
            if room < MIN_ACTUATION_FRAMES {
                break;
            }
            let max_dur = room.min(MAX_ACTUATION_FRAMES);
            let duration = MIN_ACTUATION_FRAMES
                + (draw(1) * (max_dur - MIN_ACTUATION_FRAMES + 1) as f64) as usize;
            let duration = duration.min(max_dur);
            let kind = if actuations.is_empty() {
                ActuationKind::ZoomIn
            } else {
                match (draw(2) * 3.0) as usize {
                    0 => ActuationKind::Pan,
                    1 => ActuationKind::Tilt,
                    _ => ActuationKind::ZoomIn,
                }
            };
            let magnitude = match kind {
                ActuationKind::ZoomIn => 1.5 + 1.5 * draw(3),
                ActuationKind::Pan | ActuationKind::Tilt => {
                    let sweep = (5.0 + 20.0 * draw(4)).to_radians();
                    if draw(5) < 0.5 {
                        -sweep
                    } else {
                        sweep
                    }
                }
            };
            actuations.push(Actuation { kind, start_frame: cursor, duration, magnitude });
            cursor += duration + IDLE_GAP_FRAMES;
        }
        let candidate = ScenarioSpec { frame_count, actuations, seed };
        if candidate.validate(intrinsics).is_ok() {
            return Ok(candidate);
        }
    }
    // Deterministic fallback: a pure zoom-in never looks off the plane.
    let duration =
        (frame_count - 2 * IDLE_GAP_FRAMES).clamp(MIN_ACTUATION_FRAMES, MAX_ACTUATION_FRAMES);
    let fallback = ScenarioSpec {
        frame_count,
        actuations: vec![Actuation {
            kind: ActuationKind::ZoomIn,
            start_frame: IDLE_GAP_FRAMES,
            duration,
            magnitude: 2.0,
        }],
        seed,
    };
    fallback.validate(intrinsics)?;
    Ok(fallback)
}

/// Realizes a scenario against a scene into runtime input frames: each frame
/// carries the actuation step since its predecessor, so replaying the inputs
/// from an identity pose reproduces [`ScenarioSpec::poses`].
pub fn scenario_frames(spec: &ScenarioSpec, scene: &GlobalScene) -> Vec<FrameInput> {
    spec.deltas()
        .into_iter()
        .enumerate()
        .map(|(f, pose_delta)| FrameInput { pose_delta, true_objects: scene.frame_objects(f as u64) })
        .collect()
}

// ---------------------------------------------------------------------------
// Ground-truth model family
// ---------------------------------------------------------------------------

/// The law one simulated detector model actually follows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrueModelSpec {
    pub name: String,
    pub input_side_px: u32,
    /// Peak recall of the model, before size effects.
    pub quality: f64,
    pub latency_mean_ms: f64,
    pub latency_p99_ms: f64,
}

impl TrueModelSpec {
    /// Detection probability for an object of the given size relative to its
    /// tile: the model's quality, discounted by how few input pixels the
    /// object spans and by how far its relative size sits from the sweet
    /// spot the model was trained around. Oversized objects (relative area
    /// above 1: the object is larger than the tile) fall off a cliff.
    pub fn true_accuracy(&self, rel_area: f64) -> f64 {
        let rel = rel_area.max(0.0);
        let pixel_side = f64::from(self.input_side_px) * rel.min(1.0).sqrt();
        let pixel_factor = ((pixel_side - 6.0) / 22.0).clamp(0.0, 1.0);
        let size_factor = if rel <= 1.0 {
            (1.0 - 0.45 * (rel / 0.26).ln().abs()).clamp(0.35, 1.0)
        } else {
            0.18
        };
        (self.quality * pixel_factor * size_factor).clamp(0.0, 1.0)
    }

    /// The exact per-bin profile of this law (accuracy at each bin's
    /// representative size).
    pub fn true_profile(&self, binning: &SizeBinning) -> ModelProfile {
        let accuracy = (0..binning.bin_count())
            .map(|b| self.true_accuracy(binning.representative(b)))
            .collect();
        ModelProfile::new(
            self.name.clone(),
            self.input_side_px,
            accuracy,
            self.latency_mean_ms,
            self.latency_p99_ms,
        )
        .expect("standard latency pairs are log-normal-fittable")
    }
}

/// The stock seven-model detector ladder used by the experiments: larger
/// inputs are more accurate and slower.
pub fn standard_true_specs() -> Vec<TrueModelSpec> {
    let rows: [(&str, u32, f64, f64, f64); 7] = [
        ("net-512", 512, 0.58, 11.0, 14.0),
        ("net-640", 640, 0.63, 16.0, 21.0),
        ("net-768", 768, 0.68, 24.0, 31.0),
        ("net-896", 896, 0.73, 34.0, 45.0),
        ("net-1024", 1024, 0.78, 48.0, 64.0),
        ("net-1280", 1280, 0.83, 72.0, 96.0),
        ("net-1280-xl", 1280, 0.88, 100.0, 135.0),
    ];
    rows.iter()
        .map(|&(name, side, q, mean, p99)| TrueModelSpec {
            name: name.into(),
            input_side_px: side,
            quality: q,
            latency_mean_ms: mean,
            latency_p99_ms: p99,
        })
        .collect()
}

/// The exact profiles of the stock family under a binning.
pub fn standard_true_family(binning: &SizeBinning) -> ModelFamily {
    ModelFamily::new(standard_true_specs().iter().map(|s| s.true_profile(binning)).collect())
}

// ---------------------------------------------------------------------------
// Bootstrap
// ---------------------------------------------------------------------------

/// How the pre-run measurement phase is sized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    /// Frames spent measuring each model's accuracy and latency.
    pub profiling_frames: usize,
    /// Fraction of the run length whose opening frames seed the knowledge
    /// history.
    pub history_fraction: f64,
    /// Minimum latency sample count per model; short measurements are topped
    /// up with extra draws from the same law.
    pub min_latency_samples: usize,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self { profiling_frames: 30, history_fraction: 0.2, min_latency_samples: 1000 }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.profiling_frames == 0 {
            return Err(ScenarioError::InvalidBootstrap("profiling_frames must be ≥ 1".into()));
        }
        if !(self.history_fraction > 0.0 && self.history_fraction <= 1.0) {
            return Err(ScenarioError::InvalidBootstrap(format!(
                "history_fraction must be in (0, 1], got {}",
                self.history_fraction
            )));
        }
        Ok(())
    }
}

/// Everything the runtime needs from the measurement phase.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BootstrapArtifacts {
    /// Measured model profiles — what the planner believes.
    pub profiles: ModelFamily,
    pub binning: SizeBinning,
    /// Seed knowledge: what the best model reported on the opening frames,
    /// in global coordinates.
    pub history: ObjectHistory,
    pub overhead: OverheadEstimate,
    /// True when the overhead allowance already exceeds the objective.
    pub degenerate: bool,
}

/// The uniform partitions a model is profiled under: its native grid plus
/// the power-of-two grids matching every planning-tree node size, so the
/// measured profile covers the relative-size bins the planner will query at
/// any tree depth.
fn profiling_grids(native_n: u32) -> Vec<u32> {
    let mut grids = vec![1, 2, 4, 8];
    if !grids.contains(&native_n) {
        grids.push(native_n);
        grids.sort_unstable();
    }
    grids
}

/// Measures every model of the true family by running the simulated detector
/// over uniform partitions of the opening frames, fits profiles from the
/// observed detections and latencies, extracts the knowledge history with
/// the most accurate model, and prices the planning overhead against that
/// history.
pub fn bootstrap(
    config: &RuntimeConfig,
    boot: &BootstrapConfig,
    scene: &GlobalScene,
    detector: &SimulatedDetector,
    run_frames: usize,
) -> Result<BootstrapArtifacts, ScenarioError> {
    config.validate()?;
    boot.validate()?;
    let binning = detector.binning().clone();
    let true_family = detector.family();
    if true_family.is_empty() {
        return Err(ScenarioError::InvalidBootstrap("true model family is empty".into()));
    }

    // Localized ground truth of each profiling frame at the identity pose.
    let profiling_truth: Vec<_> = (0..boot.profiling_frames)
        .map(|f| {
            localize(
                &scene.frame_objects(f as u64),
                &Pose::identity(),
                &config.intrinsics,
                config.min_visible_fraction,
            )
        })
        .collect();

    let mut profiles = Vec::with_capacity(true_family.len());
    for model in &true_family.models {
        let native_n = config.frame_side_px.div_ceil(model.input_side_px.max(1)).max(1);
        let mut records = Vec::new();
        let mut latency_samples = Vec::new();
        for n in profiling_grids(native_n) {
            for (f, truth) in profiling_truth.iter().enumerate() {
                for (ti, tile) in uniform_grid(n).iter().enumerate() {
                    let padded = pad_tile(tile, config.padding_fraction);
                    let (dets, lat) = detector.simulate_tile(
                        f as u64,
                        tile,
                        &padded,
                        &model.name,
                        truth,
                        ti,
                    )?;
                    latency_samples.push(lat);
                    let tile_area = tile.area();
                    for obj in truth {
                        if !tile_contains_center(&padded, obj.bbox.center()) {
                            continue;
                        }
                        records.push(DetectionRecord {
                            rel_area: obj.bbox.area() / tile_area,
                            detected: dets.iter().any(|d| d.object_id == obj.source_index),
                        });
                    }
                }
            }
        }
        // Top up short latency measurements with extra draws from the same law.
        let (mu, sigma) = model.lognormal_params();
        let model_key = seeding::hash_str(&model.name);
        let mut k = latency_samples.len() as u64;
        while latency_samples.len() < boot.min_latency_samples {
            let h1 =
                seeding::mix(&[detector.seed(), purpose::PROFILE_LATENCY, model_key, k, 1]);
            let h2 =
                seeding::mix(&[detector.seed(), purpose::PROFILE_LATENCY, model_key, k, 2]);
            latency_samples.push((mu + sigma * seeding::gaussian(h1, h2)).exp());
            k += 1;
        }
        let profile = build_profile(
            model.name.clone(),
            model.input_side_px,
            &records,
            &latency_samples,
            &binning,
        )
        .map_err(|e| ScenarioError::InvalidBootstrap(e.to_string()))?;
        profiles.push(profile);
    }
    let profiles = ModelFamily::new(profiles);

    // Knowledge history: the union of what the best model reports over the
    // opening fraction of the run, swept across its native uniform partition
    // while the camera looks straight ahead.
    let best = true_family.most_accurate().expect("family is non-empty");
    let best_name = true_family.models[best].name.clone();
    let history_n = config.frame_side_px.div_ceil(true_family.models[best].input_side_px.max(1)).max(1);
    let history_frames = ((boot.history_fraction * run_frames as f64).ceil() as usize).max(1);
    let frames: Vec<(u64, Vec<BBox>)> =
        (0..history_frames).map(|f| (f as u64, scene.frame_objects(f as u64))).collect();
    let extractor =
        ExtractionStrategy::Stochastic { detector, model: &best_name, grid_n: history_n };
    let history = extract_history(&frames, &extractor)?;

    // Price the planning pass the runtime will run every frame: the full
    // extracted history localized at each opening frame's (identity) pose, at
    // the full objective — the largest budget the planner will ever get.
    let flat = history.boxes();
    let overhead_sets = vec![flat; history_frames.max(MIN_OVERHEAD_FRAMES)];
    let overhead = estimate_plan_overhead(config, &profiles, &overhead_sets)?;
    let degenerate = overhead.overhead_ms >= config.slo_ms;

    Ok(BootstrapArtifacts { profiles, binning, history, overhead, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{Mode, BIN_COUNT};
    use approx::assert_abs_diff_eq;

    fn small_scene_spec() -> SceneSpec {
        SceneSpec {
            clusters: vec![
                ClusterSpec {
                    center: (0.3, 0.4),
                    spread: 0.08,
                    object_count: 8,
                    median_area: 0.0004,
                    sigma_ln: 0.5,
                },
                ClusterSpec {
                    center: (0.7, 0.6),
                    spread: 0.05,
                    object_count: 5,
                    median_area: 0.0025,
                    sigma_ln: 0.4,
                },
            ],
            jitter: 0.004,
        }
    }

    #[test]
    fn scene_generation_is_deterministic_and_in_bounds() {
        let spec = small_scene_spec();
        let a = generate_scene(&spec, 11).unwrap();
        let b = generate_scene(&spec, 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.base, generate_scene(&spec, 12).unwrap().base);
        assert_eq!(a.base.len(), 13);
        for b in &a.base {
            assert!(b.x_min >= 0.0 && b.y_min >= 0.0 && b.x_max <= 1.0 && b.y_max <= 1.0);
            assert_abs_diff_eq!(b.width(), b.height(), epsilon = 1e-12);
        }
    }

    #[test]
    fn scene_jitter_moves_objects_but_keeps_sizes() {
        let scene = generate_scene(&small_scene_spec(), 3).unwrap();
        let f0 = scene.frame_objects(0);
        let f5 = scene.frame_objects(5);
        assert_eq!(f0, scene.base);
        assert_eq!(f0.len(), f5.len());
        assert_ne!(f0, f5);
        for (a, b) in f0.iter().zip(&f5) {
            assert_abs_diff_eq!(a.area(), b.area(), epsilon = 1e-12);
            assert!(b.x_min >= 0.0 && b.x_max <= 1.0);
        }
        assert_eq!(scene.frame_objects(5), f5);
    }

    #[test]
    fn scene_spec_validation() {
        let mut spec = small_scene_spec();
        spec.clusters[0].median_area = 0.0;
        assert!(generate_scene(&spec, 1).is_err());
        let mut spec = small_scene_spec();
        spec.jitter = -1.0;
        assert!(generate_scene(&spec, 1).is_err());
        assert!(generate_scene(&SceneSpec { clusters: vec![], jitter: 0.0 }, 1).is_err());
    }

    #[test]
    fn scenario_layout_and_determinism() {
        let intr = CameraIntrinsics::default();
        let spec = generate_scenario(200, 42, &intr).unwrap();
        assert_eq!(spec, generate_scenario(200, 42, &intr).unwrap());
        assert!(spec.validate(&intr).is_ok());
        assert!(!spec.actuations.is_empty());
        assert_eq!(spec.actuations[0].kind, ActuationKind::ZoomIn);
        let mut prev_end = 0;
        for act in &spec.actuations {
            assert!(act.start_frame >= prev_end + IDLE_GAP_FRAMES);
            assert!((MIN_ACTUATION_FRAMES..=MAX_ACTUATION_FRAMES).contains(&act.duration));
            prev_end = act.start_frame + act.duration;
        }
        assert!(prev_end + IDLE_GAP_FRAMES <= 200);
        // Minimum length fits exactly one actuation.
        let short = generate_scenario(MIN_SCENARIO_FRAMES, 7, &intr).unwrap();
        assert_eq!(short.actuations.len(), 1);
        assert!(matches!(
            generate_scenario(44, 7, &intr),
            Err(ScenarioError::TooShort { .. })
        ));
    }

    #[test]
    fn scenario_poses_accumulate_deltas() {
        let spec = ScenarioSpec {
            frame_count: 60,
            actuations: vec![Actuation {
                kind: ActuationKind::ZoomIn,
                start_frame: 15,
                duration: 20,
                magnitude: 2.0,
            }],
            seed: 0,
        };
        let poses = spec.poses();
        assert_eq!(poses.len(), 60);
        assert_eq!(poses[0], Pose::identity());
        assert_eq!(poses[14].zoom, 1.0);
        assert_abs_diff_eq!(poses[34].zoom, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(poses[59].zoom, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn validation_rejects_bad_schedules_and_out_of_view() {
        let intr = CameraIntrinsics::default();
        let base = |acts: Vec<Actuation>| ScenarioSpec { frame_count: 100, actuations: acts, seed: 0 };
        // Overlap.
        let overlapping = base(vec![
            Actuation { kind: ActuationKind::ZoomIn, start_frame: 15, duration: 20, magnitude: 2.0 },
            Actuation { kind: ActuationKind::ZoomIn, start_frame: 20, duration: 20, magnitude: 2.0 },
        ]);
        assert!(matches!(overlapping.validate(&intr), Err(ScenarioError::InvalidActuation(_))));
        // Past the end.
        let long = base(vec![Actuation {
            kind: ActuationKind::ZoomIn,
            start_frame: 90,
            duration: 20,
            magnitude: 2.0,
        }]);
        assert!(long.validate(&intr).is_err());
        // Zoom-out.
        let out = base(vec![Actuation {
            kind: ActuationKind::ZoomIn,
            start_frame: 15,
            duration: 20,
            magnitude: 0.5,
        }]);
        assert!(out.validate(&intr).is_err());
        // A pan with no zoom headroom immediately looks off the plane.
        let pan_first = base(vec![Actuation {
            kind: ActuationKind::Pan,
            start_frame: 15,
            duration: 20,
            magnitude: 0.3,
        }]);
        assert!(matches!(pan_first.validate(&intr), Err(ScenarioError::OutOfView { .. })));
        // Idle script is fine.
        assert!(base(vec![]).validate(&intr).is_ok());
    }

    #[test]
    fn true_family_shapes_and_ordering() {
        let binning = SizeBinning::standard();
        let family = standard_true_family(&binning);
        assert_eq!(family.len(), 7);
        for m in &family.models {
            assert_eq!(m.accuracy.len(), BIN_COUNT);
            assert!(m.accuracy.iter().all(|a| (0.0..=1.0).contains(a)));
            assert!(m.latency_p99_ms > m.latency_mean_ms);
        }
        // Quality strictly improves along the ladder at the sweet spot.
        let specs = standard_true_specs();
        let sweet: Vec<f64> = specs.iter().map(|s| s.true_accuracy(0.26)).collect();
        for w in sweet.windows(2) {
            assert!(w[1] > w[0], "{sweet:?}");
        }
        // The sweet spot beats much smaller and oversized objects.
        let xl = &specs[6];
        assert!(xl.true_accuracy(0.26) > xl.true_accuracy(0.001));
        assert!(xl.true_accuracy(0.26) > xl.true_accuracy(1.5));
        assert_abs_diff_eq!(xl.true_accuracy(1.5), 0.88 * 0.18, epsilon = 1e-12);
        // Latency order matches the ladder.
        assert_eq!(family.cheapest(Mode::Conservative), Some(0));
        assert_eq!(family.most_accurate(), Some(6));
    }

    #[test]
    fn profiling_grids_cover_tree_depths_and_native() {
        assert_eq!(profiling_grids(3), vec![1, 2, 3, 4, 8]);
        assert_eq!(profiling_grids(8), vec![1, 2, 4, 8]);
        assert_eq!(profiling_grids(1), vec![1, 2, 4, 8]);
    }

    #[test]
    fn bootstrap_measures_profiles_history_and_overhead() {
        let binning = SizeBinning::standard();
        let family = standard_true_family(&binning);
        let detector = SimulatedDetector::new(family, binning, 27);
        let scene = generate_scene(&small_scene_spec(), 27).unwrap();
        let config = RuntimeConfig::new(300.0, Mode::NonConservative);
        let boot = BootstrapConfig { profiling_frames: 4, ..BootstrapConfig::default() };

        let arts = bootstrap(&config, &boot, &scene, &detector, 50).unwrap();
        assert_eq!(arts.profiles.len(), 7);
        for p in &arts.profiles.models {
            assert_eq!(p.accuracy.len(), BIN_COUNT);
            assert!(p.accuracy.iter().all(|a| (0.0..=1.0).contains(a)));
            assert!(p.latency_mean_ms > 0.0);
            assert!(p.latency_p99_ms >= p.latency_mean_ms);
        }
        assert!(!arts.history.is_empty());
        for o in &arts.history.objects {
            assert!(o.bbox.x_min >= -1e-12 && o.bbox.x_max <= 1.0 + 1e-12);
            assert!((o.source_frame_id as usize) < 10);
        }
        assert!(arts.overhead.overhead_ms > 0.0);
        assert_abs_diff_eq!(
            arts.overhead.overhead_ms,
            crate::runtime::OVERHEAD_MARGIN * arts.overhead.p99_ms,
            epsilon = 1e-12
        );
        assert!(!arts.degenerate);

        // Reproducible end to end.
        let again = bootstrap(&config, &boot, &scene, &detector, 50).unwrap();
        assert_eq!(arts.profiles, again.profiles);
        assert_eq!(arts.history, again.history);
        assert_eq!(arts.overhead, again.overhead);
    }

    #[test]
    fn bootstrap_flags_degenerate_objectives() {
        let binning = SizeBinning::standard();
        let family = standard_true_family(&binning);
        let detector = SimulatedDetector::new(family, binning, 5);
        let scene = generate_scene(&small_scene_spec(), 5).unwrap();
        // An objective this tight cannot even cover the planning allowance.
        let config = RuntimeConfig::new(0.05, Mode::NonConservative);
        let boot = BootstrapConfig { profiling_frames: 2, ..BootstrapConfig::default() };
        let arts = bootstrap(&config, &boot, &scene, &detector, 50).unwrap();
        assert!(arts.degenerate);
    }
}
