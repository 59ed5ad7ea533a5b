//! `steertile` — generate worlds and camera scripts, measure model profiles,
//! plan single frames, simulate sequences, and sweep latency objectives.
//!
//! Every failure exits non-zero with a single-line machine-readable JSON
//! envelope (`{"error": kind, "message": ...}`) on stderr.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use steertile::{
    adaptive_plan, bootstrap, elect, emit_report, error_json, generate_scene, generate_scenario,
    history_from_records, history_to_records, localize, read_json, run_sequence, run_sweep,
    scenario_frames, standard_true_family, uniform_plans, write_json, write_results_csv,
    BootstrapConfig, CameraIntrinsics, ExperimentSpec, GlobalScene, HistoryFrameRecord, Mode,
    OverheadFile, Pose, PoseDelta, ProfilesFile, RegionTree, RunSummary, RuntimeConfig,
    ScenarioSpec, SceneSpec, SimulatedDetector, SizeBinning, Strategy, SweepSummary,
};

#[derive(Parser)]
#[command(
    name = "steertile",
    about = "Latency-budgeted tile planning for steerable cameras",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Realize a world of objects from a scene recipe.
    GenScene(GenSceneArgs),
    /// Generate a scripted camera actuation sequence.
    GenScenario(GenScenarioArgs),
    /// Measure model profiles, seed knowledge, and the planning allowance.
    Bootstrap(BootstrapArgs),
    /// Plan one frame and print the elected plan as JSON.
    Plan(PlanArgs),
    /// Simulate one scenario under one strategy.
    Simulate(SimulateArgs),
    /// Run the full objective sweep and write its report.
    Sweep(SweepArgs),
    /// Rebuild report.csv / report.json from an existing sweep summary.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenSceneArgs {
    /// Seed for all random draws.
    #[arg(long)]
    seed: u64,
    /// Scene recipe JSON; the stock recipe when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the recipe's per-frame drift.
    #[arg(long)]
    jitter: Option<f64>,
    /// Where to write scene.json.
    #[arg(long, default_value = "scene.json")]
    out: PathBuf,
}

#[derive(Args)]
struct GenScenarioArgs {
    #[arg(long)]
    seed: u64,
    /// Frames the script spans.
    #[arg(long, default_value_t = 120)]
    frames: usize,
    #[arg(long, default_value = "scenario.json")]
    out: PathBuf,
}

#[derive(Args)]
struct BootstrapArgs {
    /// Realized scene (scene.json).
    #[arg(long)]
    scene: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Latency objective in milliseconds.
    #[arg(long)]
    slo: f64,
    /// conservative | non_conservative
    #[arg(long, default_value = "conservative")]
    mode: Mode,
    /// Frames of the run the measurement phase is sized against.
    #[arg(long, default_value_t = 120)]
    frames: usize,
    /// Override the number of measurement frames.
    #[arg(long)]
    profiling_frames: Option<usize>,
    /// Override the fraction of the run seeding the knowledge history.
    #[arg(long)]
    history_fraction: Option<f64>,
    /// Directory for profiles.json, history.json, overhead.json.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct PlanArgs {
    /// Measured profiles (profiles.json).
    #[arg(long)]
    profiles: PathBuf,
    /// Knowledge history (history.json).
    #[arg(long)]
    history: PathBuf,
    /// Planning allowance (overhead.json).
    #[arg(long)]
    overhead: PathBuf,
    #[arg(long)]
    slo: f64,
    #[arg(long, default_value = "conservative")]
    mode: Mode,
    /// Camera pose the frame is planned for.
    #[arg(long, default_value_t = 0.0)]
    pan: f64,
    #[arg(long, default_value_t = 0.0)]
    tilt: f64,
    #[arg(long, default_value_t = 1.0)]
    zoom: f64,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    profiles: PathBuf,
    #[arg(long)]
    history: PathBuf,
    #[arg(long)]
    overhead: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    slo: f64,
    #[arg(long, default_value = "conservative")]
    mode: Mode,
    /// adaptive | static | uniform-<model> | downsample-<model>
    #[arg(long, default_value = "adaptive")]
    strategy: String,
    /// Directory for results.csv and summary.json.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    seed: u64,
    /// Full experiment recipe JSON; the stock recipe when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the objective grid, comma-separated milliseconds.
    #[arg(long, value_delimiter = ',')]
    slos: Option<Vec<f64>>,
    /// Override the budgeting modes, comma-separated.
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<Mode>>,
    /// Override frames per sequence.
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Sweep output directory holding summary.json.
    #[arg(long)]
    dir: PathBuf,
}

/// Error kind + human message, rendered as the JSON envelope on exit.
struct Failure {
    kind: &'static str,
    message: String,
}

impl Failure {
    fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Self { kind, message: message.into() }
    }
}

macro_rules! from_err {
    ($ty:ty, $kind:literal) => {
        impl From<$ty> for Failure {
            fn from(e: $ty) -> Self {
                Failure::new($kind, e.to_string())
            }
        }
    };
}
from_err!(steertile::ArtifactError, "artifact");
from_err!(steertile::ScenarioError, "scenario");
from_err!(steertile::RuntimeError, "runtime");
from_err!(steertile::ExperimentError, "experiment");
from_err!(steertile::PlannerError, "planner");

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", error_json("usage", &e.to_string()));
            return ExitCode::FAILURE;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", error_json(f.kind, &f.message));
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::GenScene(a) => gen_scene(a),
        Command::GenScenario(a) => gen_scenario(a),
        Command::Bootstrap(a) => run_bootstrap(a),
        Command::Plan(a) => plan_frame(a),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Report(a) => report(a),
    }
}

fn gen_scene(a: GenSceneArgs) -> Result<(), Failure> {
    let mut spec: SceneSpec = match &a.config {
        Some(path) => read_json(path)?,
        None => steertile::default_scene_spec(),
    };
    if let Some(j) = a.jitter {
        spec.jitter = j;
    }
    let scene = generate_scene(&spec, a.seed)?;
    write_json(&a.out, &scene)?;
    println!("wrote {} ({} objects)", a.out.display(), scene.base.len());
    Ok(())
}

fn gen_scenario(a: GenScenarioArgs) -> Result<(), Failure> {
    let scenario = generate_scenario(a.frames, a.seed, &CameraIntrinsics::default())?;
    write_json(&a.out, &scenario)?;
    println!("wrote {} ({} actuations)", a.out.display(), scenario.actuations.len());
    Ok(())
}

fn run_bootstrap(a: BootstrapArgs) -> Result<(), Failure> {
    let scene: GlobalScene = read_json(&a.scene)?;
    let mut boot = BootstrapConfig::default();
    if let Some(p) = a.profiling_frames {
        boot.profiling_frames = p;
    }
    if let Some(h) = a.history_fraction {
        boot.history_fraction = h;
    }
    let mut config = RuntimeConfig::new(a.slo, a.mode);
    config.rng_seed = a.seed;
    let binning = SizeBinning::standard();
    let detector = SimulatedDetector::new(standard_true_family(&binning), binning.clone(), a.seed);
    let arts = bootstrap(&config, &boot, &scene, &detector, a.frames)?;
    write_json(
        a.out_dir.join("profiles.json"),
        &ProfilesFile { binning, models: arts.profiles },
    )?;
    write_json(a.out_dir.join("history.json"), &history_to_records(&arts.history))?;
    write_json(a.out_dir.join("overhead.json"), &OverheadFile::new(&arts.overhead, arts.degenerate))?;
    println!(
        "wrote profiles.json, history.json, overhead.json to {} \
         (overhead {:.3} ms, {} objects known)",
        a.out_dir.display(),
        arts.overhead.overhead_ms,
        arts.history.len(),
    );
    Ok(())
}

fn plan_frame(a: PlanArgs) -> Result<(), Failure> {
    let profiles: ProfilesFile = read_json(&a.profiles)?;
    let records: Vec<HistoryFrameRecord> = read_json(&a.history)?;
    let overhead: OverheadFile = read_json(&a.overhead)?;
    let history = history_from_records(&records);

    let config = RuntimeConfig::new(a.slo, a.mode);
    config.validate()?;
    let pose = Pose::identity().apply(&PoseDelta {
        pan_rad: a.pan,
        tilt_rad: a.tilt,
        zoom_factor: a.zoom,
    });
    let knowledge: Vec<_> =
        localize(&history.boxes(), &pose, &config.intrinsics, config.min_visible_fraction)
            .into_iter()
            .map(|l| l.bbox)
            .collect();
    let budget = a.slo - overhead.overhead_ms;
    let tree = RegionTree::quad(config.tree_depth)?;
    let adaptive = adaptive_plan(
        &tree,
        &knowledge,
        &profiles.models,
        a.mode,
        budget,
        config.step_ms,
        &profiles.binning,
    );
    let uniforms = uniform_plans(
        &profiles.models,
        &knowledge,
        config.frame_side_px,
        budget,
        a.mode,
        &profiles.binning,
    );
    let elected = elect(Some(adaptive), uniforms);
    println!(
        "{}",
        serde_json::to_string_pretty(&elected)
            .expect("plans serialize")
    );
    Ok(())
}

fn parse_strategy(label: &str, profiles: &ProfilesFile) -> Result<Strategy, Failure> {
    let model_index = |name: &str| {
        profiles.models.models.iter().position(|m| m.name == name).ok_or_else(|| {
            Failure::new("usage", format!("unknown model '{name}' in strategy label"))
        })
    };
    match label {
        "adaptive" => Ok(Strategy::Adaptive),
        "static" => Ok(Strategy::StaticFrozen),
        _ => {
            if let Some(name) = label.strip_prefix("uniform-") {
                Ok(Strategy::FixedUniform(model_index(name)?))
            } else if let Some(name) = label.strip_prefix("downsample-") {
                Ok(Strategy::FixedDownsample(model_index(name)?))
            } else {
                Err(Failure::new(
                    "usage",
                    format!(
                        "unknown strategy '{label}' (expected adaptive, static, \
                         uniform-<model>, or downsample-<model>)"
                    ),
                ))
            }
        }
    }
}

fn simulate(a: SimulateArgs) -> Result<(), Failure> {
    let scene: GlobalScene = read_json(&a.scene)?;
    let scenario: ScenarioSpec = read_json(&a.scenario)?;
    let profiles: ProfilesFile = read_json(&a.profiles)?;
    let records: Vec<HistoryFrameRecord> = read_json(&a.history)?;
    let overhead: OverheadFile = read_json(&a.overhead)?;
    let history = history_from_records(&records).boxes();
    let strategy = parse_strategy(&a.strategy, &profiles)?;

    let mut config = RuntimeConfig::new(a.slo, a.mode);
    config.rng_seed = a.seed;
    scenario.validate(&config.intrinsics)?;
    let detector = SimulatedDetector::new(
        standard_true_family(&profiles.binning),
        profiles.binning.clone(),
        a.seed,
    );
    let frames = scenario_frames(&scenario, &scene);
    let (results, metrics) = run_sequence(
        &config,
        &detector,
        &profiles.models,
        &profiles.binning,
        &history,
        &frames,
        &overhead.estimate(),
        strategy,
    )?;
    write_results_csv(a.out_dir.join("results.csv"), &results)?;
    let summary = RunSummary {
        slo_ms: a.slo,
        mode: a.mode.to_string(),
        strategy: a.strategy.clone(),
        seed: a.seed,
        degenerate: overhead.degenerate,
        metrics,
    };
    write_json(a.out_dir.join("summary.json"), &summary)?;
    println!(
        "wrote results.csv, summary.json to {} (mean score {:.4}, miss {:.2}%)",
        a.out_dir.display(),
        summary.metrics.mean_score,
        summary.metrics.miss_rate_pct,
    );
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    let mut spec = match &a.config {
        Some(path) => read_json::<ExperimentSpec>(path)?,
        None => ExperimentSpec::standard(a.seed),
    };
    spec.seeds = vec![a.seed];
    if let Some(slos) = a.slos {
        spec.slos_ms = slos;
    }
    if let Some(modes) = a.modes {
        spec.modes = modes;
    }
    if let Some(frames) = a.frames {
        spec.frame_count = frames;
    }
    let (summary, rows) = run_sweep(&spec, &a.out_dir)?;
    println!(
        "swept {} points × {} strategies into {} ({} report rows)",
        spec.slos_ms.len() * spec.modes.len() * spec.seeds.len(),
        steertile::all_strategies(&standard_true_family(&SizeBinning::standard())).len(),
        a.out_dir.display(),
        rows.len(),
    );
    let _ = summary;
    Ok(())
}

fn report(a: ReportArgs) -> Result<(), Failure> {
    let summary: SweepSummary = read_json(a.dir.join("summary.json"))?;
    let (rows, _) = emit_report(&summary, &a.dir)?;
    println!("wrote report.csv, report.json to {} ({} rows)", a.dir.display(), rows.len());
    Ok(())
}
