//! `pairbot` — run, explore, analyze, check, and render pairbot systems.
//!
//! Exit codes: 0 clean; 1 bad input (arguments, scene, or trace file);
//! 2 a safety violation or a requested check failed; 3 the event budget or
//! state cap ran out before the question could be settled.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use pairbot_core::algorithms::{Algorithm, ScanOrder};
use pairbot_core::analysis::{
    check_coating_solved, check_marching_progress, coating_set, non_coating_set, surface_set,
    AnalysisOptions, SourceMode,
};
use pairbot_core::engine::{
    explore, replay, run, ExploreConfig, ExploreReport, RunConfig, SchedulerKind, Trace,
};
use pairbot_core::model::Configuration;
use pairbot_core::render::{render_ascii, render_svg, RenderOptions};
use pairbot_core::scene::Scene;

#[derive(Parser)]
#[command(name = "pairbot", version, about = "Pairbot simulator and analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an algorithm under a scheduler and write the trace.
    Run(RunArgs),
    /// Exhaustively explore asynchronous interleavings up to a depth.
    Explore(ExploreArgs),
    /// Compute the surface, non-coating, and coating sets of a scene.
    Analyze(AnalyzeArgs),
    /// Verify or judge an existing trace.
    Check(CheckArgs),
    /// Draw a scene or a trace frame as ASCII or SVG.
    Render(RenderArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Marching,
    Coating,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScanOrderArg {
    Ascending,
    Descending,
}

impl From<ScanOrderArg> for ScanOrder {
    fn from(v: ScanOrderArg) -> ScanOrder {
        match v {
            ScanOrderArg::Ascending => ScanOrder::Ascending,
            ScanOrderArg::Descending => ScanOrder::Descending,
        }
    }
}

impl AlgorithmArg {
    fn build(self, scan: ScanOrderArg) -> Algorithm {
        match self {
            AlgorithmArg::Marching => Algorithm::Marching,
            AlgorithmArg::Coating => Algorithm::Coating { scan: scan.into() },
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchedulerArg {
    Fsync,
    Ssync,
    AsyncRandom,
    AsyncExhaustive,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum CheckKind {
    LineFormed,
    Safety,
    Coating,
    Progress,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SourceModeArg {
    AnyRobot,
    DistinctRobots,
    SingleRobot,
}

impl From<SourceModeArg> for SourceMode {
    fn from(v: SourceModeArg) -> SourceMode {
        match v {
            SourceModeArg::AnyRobot => SourceMode::AnyRobot,
            SourceModeArg::DistinctRobots => SourceMode::DistinctRobots,
            SourceModeArg::SingleRobot => SourceMode::SingleRobot,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long, value_enum)]
    algorithm: AlgorithmArg,
    /// Label scan order used by coating's direction choice.
    #[arg(long, value_enum, default_value_t = ScanOrderArg::Ascending)]
    scan_order: ScanOrderArg,
    #[arg(long, value_enum)]
    scheduler: SchedulerArg,
    /// Seed for the random schedulers; fsync ignores it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-pair activation probability for ssync.
    #[arg(long, default_value_t = 0.5)]
    activation: f64,
    /// Event budget: rounds for fsync/ssync, phases for async-random,
    /// exploration depth for async-exhaustive.
    #[arg(long, default_value_t = 1000)]
    max_events: usize,
    /// Write the trace (or exploration report) here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Checker to apply after the run; repeatable.
    #[arg(long = "check", value_enum)]
    checks: Vec<CheckKind>,
    /// Largest scene async-exhaustive accepts, in pairs.
    #[arg(long, default_value_t = 3)]
    pair_limit: usize,
    /// Worker threads for async-exhaustive.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// State cap for async-exhaustive.
    #[arg(long, default_value_t = 1_000_000)]
    max_states: usize,
    /// Window margin for the coating checker.
    #[arg(long, default_value_t = 3)]
    margin: i64,
}

#[derive(Args)]
struct ExploreArgs {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long, value_enum)]
    algorithm: AlgorithmArg,
    #[arg(long, value_enum, default_value_t = ScanOrderArg::Ascending)]
    scan_order: ScanOrderArg,
    /// Maximum events along any interleaving.
    #[arg(long)]
    depth: usize,
    #[arg(long, default_value_t = 1_000_000)]
    max_states: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Largest accepted scene, in pairs.
    #[arg(long, default_value_t = 3)]
    pair_limit: usize,
    /// Also flag states where the robots stop forming a line.
    #[arg(long)]
    line_invariant: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    scene: PathBuf,
    /// Window margin around the scene.
    #[arg(long, default_value_t = 3)]
    margin: i64,
    /// Where routes may start when counting disjoint routes.
    #[arg(long, value_enum, default_value_t = SourceModeArg::AnyRobot)]
    source_mode: SourceModeArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(subcommand)]
    what: CheckCommand,
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Re-execute a trace and verify every digest, move, and violation list.
    Replay {
        #[arg(long)]
        trace: PathBuf,
    },
    /// Judge line preservation and head progress of a marching trace.
    Marching {
        #[arg(long)]
        trace: PathBuf,
    },
    /// Judge a coating trace against the coating set of its initial scene.
    Coating {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value_t = 3)]
        margin: i64,
        #[arg(long, value_enum, default_value_t = SourceModeArg::AnyRobot)]
        source_mode: SourceModeArg,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Ascii,
    Svg,
}

#[derive(Args)]
struct RenderArgs {
    /// Scene file to draw (frame 0 only).
    #[arg(long, conflicts_with = "trace")]
    scene: Option<PathBuf>,
    /// Trace file to draw a frame of.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Frame number, or "last".
    #[arg(long, default_value = "last")]
    frame: String,
    #[arg(long, value_enum, default_value_t = FormatArg::Ascii)]
    format: FormatArg,
    /// Outline the coating set of the initial configuration.
    #[arg(long)]
    coating: bool,
    /// Window margin for the coating overlay computation.
    #[arg(long, default_value_t = 3)]
    margin: i64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// How a successfully parsed command ended.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Clean,
    /// A violation was observed or a requested check did not hold.
    Failed,
    /// The budget or state cap ran out before the question was settled.
    Budget,
}

impl Outcome {
    fn code(self) -> ExitCode {
        match self {
            Outcome::Clean => ExitCode::SUCCESS,
            Outcome::Failed => ExitCode::from(2),
            Outcome::Budget => ExitCode::from(3),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS // --help and --version
            };
        }
    };
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Explore(args) => cmd_explore(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Check(args) => cmd_check(args),
        Command::Render(args) => cmd_render(args),
    };
    match result {
        Ok(outcome) => outcome.code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load_scene(path: &Path) -> Result<Scene> {
    Scene::from_path(path).with_context(|| format!("loading scene {}", path.display()))
}

fn load_trace(path: &Path) -> Result<Trace> {
    let file = File::open(path).with_context(|| format!("opening trace {}", path.display()))?;
    Trace::read_jsonl(BufReader::new(file))
        .with_context(|| format!("reading trace {}", path.display()))
}

fn write_output(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            let mut file = BufWriter::new(
                File::create(path).with_context(|| format!("creating {}", path.display()))?,
            );
            file.write_all(content.as_bytes())?;
            if !content.ends_with('\n') {
                file.write_all(b"\n")?;
            }
            file.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(content.as_bytes())?;
            if !content.ends_with('\n') {
                lock.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn explore_outcome(report: &ExploreReport) -> Outcome {
    if report.safety_violating_states > 0 || report.predicate_violating_states > 0 {
        Outcome::Failed
    } else if report.truncated_by_state_cap {
        Outcome::Budget
    } else {
        Outcome::Clean
    }
}

fn run_exploration(
    initial: &Configuration,
    cfg: &ExploreConfig,
    pair_limit: usize,
    line_invariant: bool,
    out: Option<&Path>,
) -> Result<Outcome> {
    let pairs = initial.n_pairs();
    if pairs > pair_limit {
        bail!(
            "scene has {pairs} pairs; exhaustive exploration is capped at {pair_limit} \
             (raise --pair-limit if you accept the blowup)"
        );
    }
    let predicate: Option<&(dyn Fn(&Configuration) -> bool + Sync)> = if line_invariant {
        Some(&Configuration::is_line_formed)
    } else {
        None
    };
    let report = explore(initial, cfg, predicate)?;
    write_output(out, &serde_json::to_string_pretty(&report)?)?;
    Ok(explore_outcome(&report))
}

fn cmd_run(args: &RunArgs) -> Result<Outcome> {
    let scene = load_scene(&args.scene)?;
    let algorithm = args.algorithm.build(args.scan_order);

    if args.scheduler == SchedulerArg::AsyncExhaustive {
        for check in &args.checks {
            if !matches!(check, CheckKind::LineFormed | CheckKind::Safety) {
                bail!("--check {check:?} is not available under async-exhaustive");
            }
        }
        let initial = scene.to_configuration()?;
        let cfg = ExploreConfig {
            algorithm,
            depth: args.max_events,
            max_states: args.max_states,
            jobs: args.jobs,
        };
        let line_invariant = args.checks.contains(&CheckKind::LineFormed);
        return run_exploration(
            &initial,
            &cfg,
            args.pair_limit,
            line_invariant,
            args.out.as_deref(),
        );
    }

    let scheduler = match args.scheduler {
        SchedulerArg::Fsync => SchedulerKind::FSync,
        SchedulerArg::Ssync => SchedulerKind::SSync {
            seed: args.seed,
            activation: args.activation,
        },
        SchedulerArg::AsyncRandom => SchedulerKind::AsyncRandom { seed: args.seed },
        SchedulerArg::AsyncExhaustive => unreachable!("handled above"),
    };
    let mut outcome = run(
        &scene,
        &RunConfig {
            algorithm,
            scheduler,
            max_events: args.max_events,
        },
    )?;

    // The safety monitor is always on; --check safety merely records it.
    let mut failed = outcome.violations > 0;
    let mut budget = false;
    let mut checks = serde_json::Map::new();
    for check in &args.checks {
        match check {
            CheckKind::Safety => {
                checks.insert(
                    "safety".to_string(),
                    serde_json::json!({ "violations": outcome.violations }),
                );
            }
            CheckKind::LineFormed | CheckKind::Progress => {
                let progress = check_marching_progress(&outcome.trace)
                    .context("replaying the run's own trace")?;
                if !progress.line_formed_always {
                    failed = true;
                }
                let key = if *check == CheckKind::Progress {
                    "progress"
                } else {
                    "line-formed"
                };
                checks.insert(key.to_string(), serde_json::to_value(&progress)?);
            }
            CheckKind::Coating => {
                let initial = scene.to_configuration()?;
                let replayed =
                    replay(&outcome.trace).context("replaying the run's own trace")?;
                let opts = AnalysisOptions {
                    margin: args.margin,
                    ..AnalysisOptions::default()
                };
                let result =
                    check_coating_solved(&initial, replayed.last(), outcome.terminated, &opts);
                if !outcome.terminated {
                    budget = true;
                } else if !result.solved {
                    failed = true;
                }
                checks.insert("coating".to_string(), serde_json::to_value(&result)?);
            }
        }
    }

    outcome.trace.summary.checks.extend(checks);
    write_output(args.out.as_deref(), &outcome.trace.to_jsonl_string())?;
    Ok(if failed {
        Outcome::Failed
    } else if budget {
        Outcome::Budget
    } else {
        Outcome::Clean
    })
}

fn cmd_explore(args: &ExploreArgs) -> Result<Outcome> {
    let scene = load_scene(&args.scene)?;
    let initial = scene.to_configuration()?;
    let cfg = ExploreConfig {
        algorithm: args.algorithm.build(args.scan_order),
        depth: args.depth,
        max_states: args.max_states,
        jobs: args.jobs,
    };
    run_exploration(
        &initial,
        &cfg,
        args.pair_limit,
        args.line_invariant,
        args.out.as_deref(),
    )
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<Outcome> {
    let scene = load_scene(&args.scene)?;
    let c = scene.to_configuration()?;
    let opts = AnalysisOptions {
        margin: args.margin,
        source_mode: args.source_mode.into(),
    };
    let json = serde_json::json!({
        "surface": surface_set(&c),
        "nonCoating": non_coating_set(&c, &opts),
        "coating": coating_set(&c, &opts),
    });
    write_output(args.out.as_deref(), &serde_json::to_string_pretty(&json)?)?;
    Ok(Outcome::Clean)
}

fn cmd_check(args: &CheckArgs) -> Result<Outcome> {
    match &args.what {
        CheckCommand::Replay { trace } => {
            let trace = load_trace(trace)?;
            match replay(&trace) {
                Ok(replayed) => {
                    let json = serde_json::json!({
                        "verified": true,
                        "events": trace.events.len(),
                        "frames": replayed.frames(),
                    });
                    write_output(None, &serde_json::to_string_pretty(&json)?)?;
                    Ok(Outcome::Clean)
                }
                Err(e) => {
                    let json = serde_json::json!({
                        "verified": false,
                        "error": e.to_string(),
                    });
                    write_output(None, &serde_json::to_string_pretty(&json)?)?;
                    Ok(Outcome::Failed)
                }
            }
        }
        CheckCommand::Marching { trace } => {
            let trace = load_trace(trace)?;
            let progress = check_marching_progress(&trace).context("replaying the trace")?;
            write_output(None, &serde_json::to_string_pretty(&progress)?)?;
            Ok(if progress.line_formed_always {
                Outcome::Clean
            } else {
                Outcome::Failed
            })
        }
        CheckCommand::Coating {
            trace,
            margin,
            source_mode,
        } => {
            let trace = load_trace(trace)?;
            let initial = trace.header.scene.to_configuration()?;
            let replayed = replay(&trace).context("replaying the trace")?;
            let opts = AnalysisOptions {
                margin: *margin,
                source_mode: (*source_mode).into(),
            };
            let result = check_coating_solved(
                &initial,
                replayed.last(),
                trace.summary.terminated,
                &opts,
            );
            write_output(None, &serde_json::to_string_pretty(&result)?)?;
            Ok(if result.solved {
                Outcome::Clean
            } else if !trace.summary.terminated {
                Outcome::Budget
            } else {
                Outcome::Failed
            })
        }
    }
}

fn cmd_render(args: &RenderArgs) -> Result<Outcome> {
    let (initial, frames): (Configuration, Vec<Configuration>) = match (&args.scene, &args.trace)
    {
        (Some(scene), None) => {
            let c = load_scene(scene)?.to_configuration()?;
            (c, Vec::new())
        }
        (None, Some(trace)) => {
            let trace = load_trace(trace)?;
            let replayed = replay(&trace).context("replaying the trace")?;
            (replayed.initial, replayed.configs)
        }
        _ => bail!("pass exactly one of --scene and --trace"),
    };
    let last = frames.len();
    let frame = if args.frame == "last" {
        last
    } else {
        let n: usize = args
            .frame
            .parse()
            .with_context(|| format!("--frame must be a number or \"last\", got {:?}", args.frame))?;
        if n > last {
            bail!("frame {n} out of range; valid frames are 0..={last}");
        }
        n
    };
    let config = if frame == 0 { &initial } else { &frames[frame - 1] };

    let highlight = if args.coating {
        let opts = AnalysisOptions {
            margin: args.margin,
            ..AnalysisOptions::default()
        };
        coating_set(&initial, &opts)
    } else {
        Default::default()
    };
    let opts = RenderOptions {
        color: args.format == FormatArg::Ascii && std::env::var_os("PAIRBOT_NO_COLOR").is_none(),
        highlight,
        margin: 1,
    };
    let drawing = match args.format {
        FormatArg::Ascii => render_ascii(config, &opts),
        FormatArg::Svg => render_svg(config, &opts),
    };
    write_output(args.out.as_deref(), &drawing)?;
    Ok(Outcome::Clean)
}
