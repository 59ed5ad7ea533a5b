//! Sweep orchestration: a declarative experiment recipe expanded into a tree
//! of per-point artifacts (profiles, history, overhead, per-strategy frame
//! logs) plus a cross-point accuracy-versus-objective report.
//!
//! Layout written under the output directory:
//!
//! ```text
//! experiment.json                 — the recipe that was run
//! summary.json                    — every (seed, slo, mode, strategy) outcome
//! report.csv / report.json        — seed-averaged series per strategy
//! seed-<s>/scene.json             — realized world
//! seed-<s>/scenario.json          — camera script
//! seed-<s>/slo-<v>/<mode>/
//!     profiles.json overhead.json history.json
//!     <strategy>/results.csv summary.json
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::artifacts::{
    history_to_records, write_json, write_report_csv, write_results_csv, ArtifactError,
    OverheadFile, ProfilesFile, ReportRow, RunSummary,
};
use crate::geometry::CameraIntrinsics;
use crate::profile::{Mode, ModelFamily, SizeBinning};
use crate::runtime::{run_sequence, RuntimeConfig, RuntimeError, SimulatedDetector, Strategy};
use crate::scenario::{
    bootstrap, generate_scene, generate_scenario, scenario_frames, standard_true_family,
    BootstrapConfig, ClusterSpec, SceneSpec, ScenarioError, MIN_SCENARIO_FRAMES,
};

/// Anything that can stop a sweep.
#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
    #[error(transparent)]
    Artifact(#[from] ArtifactError),
}

/// A full sweep recipe: which objectives, modes, and seeds to run, over which
/// world, and how the measurement phase is sized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    /// Latency objectives to sweep, in milliseconds.
    pub slos_ms: Vec<f64>,
    pub modes: Vec<Mode>,
    /// One full run (world + script + simulation) per seed.
    pub seeds: Vec<u64>,
    /// Frames per simulated sequence.
    pub frame_count: usize,
    pub scene: SceneSpec,
    pub boot: BootstrapConfig,
}

impl ExperimentSpec {
    /// The stock sweep: the default scene, both budgeting modes, and an
    /// objective grid spanning starved to saturated.
    pub fn standard(seed: u64) -> Self {
        Self {
            slos_ms: vec![80.0, 150.0, 300.0, 600.0, 1400.0],
            modes: vec![Mode::Conservative, Mode::NonConservative],
            seeds: vec![seed],
            frame_count: 120,
            scene: default_scene_spec(),
            boot: BootstrapConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.slos_ms.is_empty() {
            return Err(ExperimentError::Invalid("slos_ms must not be empty".into()));
        }
        if self.slos_ms.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(ExperimentError::Invalid(format!(
                "slos_ms must be positive and finite, got {:?}",
                self.slos_ms
            )));
        }
        if self.modes.is_empty() {
            return Err(ExperimentError::Invalid("modes must not be empty".into()));
        }
        if self.seeds.is_empty() {
            return Err(ExperimentError::Invalid("seeds must not be empty".into()));
        }
        if self.frame_count < MIN_SCENARIO_FRAMES {
            return Err(ExperimentError::Invalid(format!(
                "frame_count must be at least {MIN_SCENARIO_FRAMES}, got {}",
                self.frame_count
            )));
        }
        self.scene.validate()?;
        self.boot.validate()?;
        Ok(())
    }
}

/// The stock world: five spread-out clusters of chunky objects sized so that
/// fine partitions overshoot (objects larger than the tile) and coarse ones
/// undershoot, giving the planner a real trade-off at every zoom level.
pub fn default_scene_spec() -> SceneSpec {
    let centers = [(0.22, 0.24), (0.75, 0.2), (0.5, 0.52), (0.24, 0.78), (0.78, 0.76)];
    SceneSpec {
        clusters: centers
            .iter()
            .map(|&center| ClusterSpec {
                center,
                spread: 0.12,
                object_count: 3,
                median_area: 0.03,
                sigma_ln: 0.15,
            })
            .collect(),
        jitter: 0.002,
    }
}

/// Every strategy a sweep runs: the planner, the frozen-plan baseline, and
/// one fixed uniform plus one down-sampling baseline per model.
pub fn all_strategies(family: &ModelFamily) -> Vec<Strategy> {
    let mut s = vec![Strategy::Adaptive, Strategy::StaticFrozen];
    s.extend((0..family.len()).map(Strategy::FixedUniform));
    s.extend((0..family.len()).map(Strategy::FixedDownsample));
    s
}

/// Directory fragment for one objective value: `slo-300`, or `slo-62p5` for
/// fractional values (dots are awkward in paths).
pub fn slo_dir_label(slo_ms: f64) -> String {
    if slo_ms.fract() == 0.0 && slo_ms.abs() < 1e15 {
        format!("slo-{}", slo_ms as i64)
    } else {
        format!("slo-{}", slo_ms.to_string().replace('.', "p"))
    }
}

/// One (seed, objective, mode, strategy) outcome inside the sweep summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub seed: u64,
    pub slo_ms: f64,
    pub mode: Mode,
    pub strategy: String,
    /// True when the overhead allowance already exceeds the objective, so
    /// every frame ran a fallback plan.
    pub degenerate: bool,
    pub metrics: crate::runtime::SequenceMetrics,
}

/// Everything a finished sweep produced, written to `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub spec: ExperimentSpec,
    pub entries: Vec<SweepEntry>,
}

/// Runs the full sweep: for every seed a world and camera script are
/// realized, then for every (objective, mode) point the measurement phase is
/// replayed and every strategy simulated over the same frames. All artifacts
/// are written under `out_dir`; the collected summary is returned and also
/// written to `out_dir/summary.json`.
pub fn run_experiment(
    spec: &ExperimentSpec,
    out_dir: impl AsRef<Path>,
) -> Result<SweepSummary, ExperimentError> {
    spec.validate()?;
    let out = out_dir.as_ref();
    write_json(out.join("experiment.json"), spec)?;

    let binning = SizeBinning::standard();
    let intrinsics = CameraIntrinsics::default();
    let mut entries = Vec::new();

    for &seed in &spec.seeds {
        let seed_dir = out.join(format!("seed-{seed}"));
        let scene = generate_scene(&spec.scene, seed)?;
        write_json(seed_dir.join("scene.json"), &scene)?;
        let scenario = generate_scenario(spec.frame_count, seed, &intrinsics)?;
        write_json(seed_dir.join("scenario.json"), &scenario)?;
        let frames = scenario_frames(&scenario, &scene);
        let detector =
            SimulatedDetector::new(standard_true_family(&binning), binning.clone(), seed);

        for &slo in &spec.slos_ms {
            for &mode in &spec.modes {
                let mut config = RuntimeConfig::new(slo, mode);
                config.rng_seed = seed;
                let arts = bootstrap(&config, &spec.boot, &scene, &detector, spec.frame_count)?;
                let point_dir = seed_dir.join(slo_dir_label(slo)).join(mode.as_str());
                write_json(
                    point_dir.join("profiles.json"),
                    &ProfilesFile { binning: binning.clone(), models: arts.profiles.clone() },
                )?;
                write_json(
                    point_dir.join("history.json"),
                    &history_to_records(&arts.history),
                )?;
                write_json(
                    point_dir.join("overhead.json"),
                    &OverheadFile::new(&arts.overhead, arts.degenerate),
                )?;

                let history = arts.history.boxes();
                for strategy in all_strategies(&arts.profiles) {
                    let label = strategy.label(&arts.profiles);
                    let (results, metrics) = run_sequence(
                        &config,
                        &detector,
                        &arts.profiles,
                        &binning,
                        &history,
                        &frames,
                        &arts.overhead,
                        strategy,
                    )?;
                    let run_dir = point_dir.join(&label);
                    write_results_csv(run_dir.join("results.csv"), &results)?;
                    write_json(
                        run_dir.join("summary.json"),
                        &RunSummary {
                            slo_ms: slo,
                            mode: mode.to_string(),
                            strategy: label.clone(),
                            seed,
                            degenerate: arts.degenerate,
                            metrics: metrics.clone(),
                        },
                    )?;
                    entries.push(SweepEntry {
                        seed,
                        slo_ms: slo,
                        mode,
                        strategy: label,
                        degenerate: arts.degenerate,
                        metrics,
                    });
                }
            }
        }
    }

    let summary = SweepSummary { spec: spec.clone(), entries };
    write_json(out.join("summary.json"), &summary)?;
    Ok(summary)
}

/// One accuracy-versus-objective series in `report.json`: a strategy under
/// one mode, averaged over seeds, with one element per swept objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSeries {
    pub strategy: String,
    pub mode: Mode,
    pub mean_scores: Vec<f64>,
    pub miss_rates_pct: Vec<f64>,
    pub mean_latencies_ms: Vec<f64>,
}

/// The machine-readable counterpart of `report.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub slos_ms: Vec<f64>,
    pub series: Vec<ReportSeries>,
}

/// Collapses a sweep summary into the report: one row per (objective, mode,
/// strategy) with metrics averaged across seeds, written as `report.csv`
/// (rows ordered by objective, then mode, then strategy) and `report.json`
/// (one series per strategy and mode, each exactly as long as the objective
/// grid). Returns the rows and the series file.
pub fn emit_report(
    summary: &SweepSummary,
    out_dir: impl AsRef<Path>,
) -> Result<(Vec<ReportRow>, ReportFile), ExperimentError> {
    let out = out_dir.as_ref();
    let spec = &summary.spec;

    // Preserve first-appearance strategy order from the entries.
    let mut strategies: Vec<String> = Vec::new();
    for e in &summary.entries {
        if !strategies.contains(&e.strategy) {
            strategies.push(e.strategy.clone());
        }
    }

    let mut slos = spec.slos_ms.clone();
    slos.sort_by(|a, b| a.partial_cmp(b).expect("validated finite"));
    slos.dedup();

    let mut rows = Vec::new();
    let mut series = Vec::new();
    for &mode in &spec.modes {
        for strategy in &strategies {
            let mut one = ReportSeries {
                strategy: strategy.clone(),
                mode,
                mean_scores: Vec::with_capacity(slos.len()),
                miss_rates_pct: Vec::with_capacity(slos.len()),
                mean_latencies_ms: Vec::with_capacity(slos.len()),
            };
            for &slo in &slos {
                let picked: Vec<&SweepEntry> = summary
                    .entries
                    .iter()
                    .filter(|e| e.mode == mode && &e.strategy == strategy && e.slo_ms == slo)
                    .collect();
                let n = picked.len() as f64;
                let avg = |f: &dyn Fn(&SweepEntry) -> f64| {
                    if picked.is_empty() {
                        0.0
                    } else {
                        picked.iter().map(|e| f(e)).sum::<f64>() / n
                    }
                };
                let mean_score = avg(&|e| e.metrics.mean_score);
                let miss = avg(&|e| e.metrics.miss_rate_pct);
                let lat = avg(&|e| e.metrics.mean_latency_ms);
                one.mean_scores.push(mean_score);
                one.miss_rates_pct.push(miss);
                one.mean_latencies_ms.push(lat);
            }
            series.push(one);
        }
    }
    for (si, &slo) in slos.iter().enumerate() {
        for s in &series {
            rows.push(ReportRow {
                slo_ms: slo,
                mode: s.mode.to_string(),
                strategy: s.strategy.clone(),
                mean_score: s.mean_scores[si],
                miss_rate_pct: s.miss_rates_pct[si],
                mean_latency_ms: s.mean_latencies_ms[si],
            });
        }
    }

    write_report_csv(out.join("report.csv"), &rows)?;
    let file = ReportFile { slos_ms: slos, series };
    write_json(out.join("report.json"), &file)?;
    Ok((rows, file))
}

/// `run_experiment` followed by `emit_report` in the same output directory.
pub fn run_sweep(
    spec: &ExperimentSpec,
    out_dir: impl AsRef<Path>,
) -> Result<(SweepSummary, Vec<ReportRow>), ExperimentError> {
    let summary = run_experiment(spec, &out_dir)?;
    let (rows, _) = emit_report(&summary, &out_dir)?;
    Ok((summary, rows))
}
