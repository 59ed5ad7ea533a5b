//! Latency-budgeted tile planning and simulation for steerable-camera video
//! analytics.
//!
//! A pan-tilt-zoom camera changes its view between frames, which invalidates
//! any cached knowledge expressed in the previous view's pixel coordinates.
//! This crate keeps that knowledge in a view-independent global frame and
//! re-projects it through the camera's known actuation, then plans — per
//! frame, under a hard latency budget — which regions of the current view to
//! run through which detection model.
//!
//! Module map:
//!
//! - [`geometry`]: poses, view transforms, box re-projection and localization
//!   between the global plane and the camera's local view.
//! - [`profile`]: relative-size binning, per-model accuracy/latency profiles,
//!   and the log-normal latency fit behind conservative estimates.
//! - [`distribution`]: per-tile object-size histograms and the expected
//!   accuracy of a tiling (eAP / plan-level eAP).
//! - [`planner`]: the region quad-tree, the budgeted dynamic program that
//!   selects tiles and models, an exhaustive reference solver, uniform and
//!   down-sampling plans, and plan election.
//! - [`runtime`]: the per-frame loop — localize knowledge, plan, simulate
//!   tile inference, merge and score detections — plus the planning-overhead
//!   allowance carved out of every frame's budget.
//! - [`scenario`]: synthetic scenes, scripted camera actuation, the
//!   ground-truth detector family, and the bootstrap measurement phase.
//! - [`seeding`]: the keyed hashing behind every stochastic draw, which makes
//!   whole experiments reproducible from one seed.
//! - [`artifacts`]: the byte-stable JSON and CSV file formats experiments
//!   read and write.
//! - [`experiment`]: sweep orchestration — a declarative recipe expanded into
//!   per-point artifact trees and a cross-point report.

pub mod artifacts;
pub mod distribution;
pub mod experiment;
pub mod geometry;
pub mod planner;
pub mod profile;
pub mod runtime;
pub mod scenario;
pub mod seeding;

pub use artifacts::{
    error_json, history_from_records, history_to_records, read_json, read_report_csv,
    read_results_csv, write_json, write_report_csv, write_results_csv, ArtifactError,
    HistoryBoxRecord, HistoryFrameRecord, OverheadFile, ProfilesFile, ReportRow, ResultRow,
    RunSummary, REPORT_COLUMNS, RESULT_COLUMNS,
};
pub use distribution::{
    plan_estimated_accuracy, tile_distribution, DistributionError, HistoryObject, ObjectHistory,
    TileDistribution,
};
pub use experiment::{
    all_strategies, default_scene_spec, emit_report, run_experiment, run_sweep, slo_dir_label,
    ExperimentError, ExperimentSpec, ReportFile, ReportSeries, SweepEntry, SweepSummary,
};
pub use geometry::{
    localize, visible_fraction, BBox, CameraIntrinsics, LocalizedBox, Pose, PoseDelta,
    ViewTransform,
};
pub use planner::{
    adaptive_plan, brute_force_plan, downsample_plan, dp_dp, dp_dp_with_trace, elect,
    uniform_plan_for_model, uniform_plans, DpSolution, NodeTrace, PlanSource, PlanTile,
    PlannerError, PlanningInstance, RegionNode, RegionTree, TilePlan, MAX_TREE_DEPTH,
};
pub use profile::{
    build_profile, fit_lognormal, nearest_rank_percentile, p99, DetectionRecord, Mode,
    ModelFamily, ModelProfile, ProfileError, SizeBinning, BIN_COUNT,
};
pub use runtime::{
    aggregate_metrics, estimate_plan_overhead, extract_history, nms_merge,
    overhead_from_samples, pad_tile, run_sequence, score_frame, Detection, ExtractionStrategy,
    FrameInput, FrameResult, OverheadEstimate, PlanningCostModel, RunState, RuntimeConfig,
    RuntimeError, SequenceMetrics, SequenceRunner, SimulatedDetector, Strategy,
    FALSE_POSITIVE_ID, MIN_OVERHEAD_FRAMES, OVERHEAD_MARGIN,
};
pub use scenario::{
    bootstrap, generate_scenario, generate_scene, scenario_frames, standard_true_family,
    standard_true_specs, Actuation, ActuationKind, BootstrapArtifacts, BootstrapConfig,
    ClusterSpec, GlobalScene, SceneSpec, ScenarioError, ScenarioSpec, TrueModelSpec,
};
