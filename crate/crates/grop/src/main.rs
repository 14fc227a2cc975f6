use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use grop::backend::make_backend;
use grop::bench::{arrange_tasks, run_benchmark, summary_csv, write_report, BenchConfig};
use grop::{fixtures, io, svg};
use grop_core::grid::{rasterize, DEFAULT_RESOLUTION};
use grop_core::oracle::{BackendKind, OracleConfig};
use grop_core::pipeline::{self, PipelineConfig, PipelineOutput};
use grop_core::relations::check_consistency;
use grop_core::sim::{execute, FailureModel, Method};
use grop_core::tamp::TaskMotionPlan;
use grop_core::Scene;

#[derive(Parser)]
#[command(name = "grop", version, about = "Commonsense tabletop arrangement and task-motion planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a relation file for logical consistency (exit 1 if inconsistent).
    Check { file: PathBuf },
    /// Plan one task and write plan.json and layout.svg.
    Plan(RunArgs),
    /// Plan, then execute under the failure model; writes outcome.json too.
    Simulate(SimArgs),
    /// Run every method on every task and write report files.
    Bench(BenchArgs),
    /// Render a scene, optionally with a plan, to SVG.
    Render(RenderArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Oracle {
    Static,
    Replay,
    Http,
}

impl From<Oracle> for BackendKind {
    fn from(o: Oracle) -> Self {
        match o {
            Oracle::Static => BackendKind::Static,
            Oracle::Replay => BackendKind::Replay,
            Oracle::Http => BackendKind::Http,
        }
    }
}

#[derive(Args, Clone)]
struct SceneArgs {
    /// Scene JSON file.
    #[arg(long, conflicts_with = "task")]
    scene: Option<PathBuf>,
    /// Built-in task 1-8.
    #[arg(long)]
    task: Option<u32>,
}

impl SceneArgs {
    fn load(&self) -> Result<Scene> {
        match (&self.scene, self.task) {
            (Some(p), _) => Ok(io::read_scene(p)?),
            (None, Some(t)) => Ok(fixtures::task(t)?),
            (None, None) => bail!("either --scene or --task is required"),
        }
    }
}

#[derive(Args, Clone)]
struct RunArgs {
    #[command(flatten)]
    scene: SceneArgs,
    #[arg(long, value_enum, default_value = "static")]
    oracle: Oracle,
    /// Replay responses (JSON array) or a static answer table.
    #[arg(long)]
    oracle_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.3)]
    lambda: f64,
    /// Number of candidate configurations.
    #[arg(long, default_value_t = 10)]
    candidates: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl RunArgs {
    fn pipeline_config(&self) -> PipelineConfig {
        let mut c = PipelineConfig::default();
        c.planner.lambda = self.lambda;
        c.sampler.candidates = self.candidates;
        c
    }

    fn run(&self) -> Result<(Scene, PipelineOutput)> {
        let scene = self.scene.load()?;
        let config = self.pipeline_config();
        let mut model = make_backend(self.oracle.into(), &OracleConfig::default(), self.oracle_file.as_deref())?;
        let grid = rasterize(&scene, DEFAULT_RESOLUTION);
        let output = pipeline::run(&scene, &grid, &mut model, &config, self.seed)?;
        Ok((scene, output))
    }
}

#[derive(Args)]
struct SimArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Disable all failures.
    #[arg(long)]
    noiseless: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Comma-separated subset of llm-grop, tpra, latp, grop.
    #[arg(long, value_delimiter = ',', default_value = "llm-grop,tpra,latp,grop")]
    methods: Vec<String>,
    /// Comma-separated task ids.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8")]
    tasks: Vec<u32>,
    #[arg(long, value_enum, default_value = "static")]
    oracle: Oracle,
    #[arg(long)]
    oracle_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.3)]
    lambda: f64,
    /// Keep dynamic obstacles where the scene puts them.
    #[arg(long)]
    fixed_obstacles: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    scene: SceneArgs,
    /// plan.json written by `plan`.
    #[arg(long)]
    plan: Option<PathBuf>,
    #[arg(long, default_value = "layout.svg")]
    out: PathBuf,
}

fn check(file: &Path) -> Result<ExitCode> {
    let rs = io::read_relations(file)?;
    let start = Instant::now();
    let verdict = check_consistency(&rs)?;
    let elapsed = start.elapsed();
    match verdict.conflict() {
        None => {
            println!("Consistent ({} relations, {:.1} us)", rs.len(), elapsed.as_secs_f64() * 1e6);
            Ok(ExitCode::SUCCESS)
        }
        Some(c) => {
            println!("Inconsistent\n{}", c.explain(&rs));
            Ok(ExitCode::from(1))
        }
    }
}

fn write_plan(out: &Path, scene: &Scene, output: &PipelineOutput) -> Result<()> {
    io::write_json(&out.join("plan.json"), output)?;
    io::write_text(&out.join("layout.svg"), &svg::render(scene, Some(&output.plan)))?;
    Ok(())
}

fn plan(args: &RunArgs) -> Result<ExitCode> {
    let (scene, output) = args.run()?;
    write_plan(&args.out, &scene, &output)?;
    let p = &output.plan;
    println!(
        "{}: {} steps, utility {:.4}, cost {:.1} s, feasibility {:.3} -> {}",
        scene.name,
        p.steps.len(),
        p.utility,
        p.cost,
        p.feasibility,
        args.out.join("plan.json").display()
    );
    Ok(ExitCode::SUCCESS)
}

fn simulate(args: &SimArgs) -> Result<ExitCode> {
    let (scene, output) = args.run.run()?;
    write_plan(&args.run.out, &scene, &output)?;
    let model = if args.noiseless { FailureModel::noiseless() } else { FailureModel::default() };
    let model = model.with_seed(grop_core::seed::derive(args.run.seed, &[grop_core::seed::stream::EXECUTION]));
    let outcome = execute(&output.plan, &scene, &output.arrangement.relations, &model);
    io::write_json(&args.run.out.join("outcome.json"), &outcome)?;
    println!(
        "semantic score {:.3}, all present {}, exec time {:.1} s (plan {:.1} s)",
        outcome.semantic_score, outcome.all_present, outcome.exec_time, output.plan.cost
    );
    Ok(ExitCode::SUCCESS)
}

fn bench(args: &BenchArgs) -> Result<ExitCode> {
    let methods = args.methods.iter().map(|m| m.parse::<Method>()).collect::<Result<Vec<_>, _>>()?;
    if args.trials < 1 {
        bail!("--trials must be at least 1");
    }
    let mut config = BenchConfig {
        tasks: args.tasks.clone(),
        methods,
        trials: args.trials,
        seed: args.seed,
        relocate_obstacles: !args.fixed_obstacles,
        ..BenchConfig::default()
    };
    config.pipeline.planner.lambda = args.lambda;
    let scenes = args.tasks.iter().map(|&t| Ok((t, fixtures::task(t)?))).collect::<Result<Vec<_>>>()?;
    let mut model = make_backend(args.oracle.into(), &OracleConfig::default(), args.oracle_file.as_deref())?;
    let arrangements = arrange_tasks(&scenes, &mut model, config.pipeline.max_retry)
        .map_err(|(t, e)| anyhow::anyhow!("task {t}: {e}"))?;
    let start = Instant::now();
    let report = run_benchmark(&config, &scenes, &arrangements);
    write_report(&report, &args.out).with_context(|| format!("writing report to {}", args.out.display()))?;
    print!("{}", summary_csv(&report));
    eprintln!("{} rows in {:.1} s", report.rows.len(), start.elapsed().as_secs_f64());
    Ok(ExitCode::SUCCESS)
}

fn render(args: &RenderArgs) -> Result<ExitCode> {
    let scene = args.scene.load()?;
    let plan: Option<TaskMotionPlan> = match &args.plan {
        None => None,
        Some(p) => {
            let v: serde_json::Value = serde_json::from_str(&io::read_text(p)?)?;
            let plan = v.get("plan").cloned().unwrap_or(v);
            Some(serde_json::from_value(plan).with_context(|| format!("{} is not a plan", p.display()))?)
        }
    };
    io::write_text(&args.out, &svg::render(&scene, plan.as_ref()))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check { file } => check(file),
        Command::Plan(a) => plan(a),
        Command::Simulate(a) => simulate(a),
        Command::Bench(a) => bench(a),
        Command::Render(a) => render(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}
