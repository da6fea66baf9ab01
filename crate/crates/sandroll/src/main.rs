//! Command-line front end: stability queries, shape-space maps, seeded
//! terrain trials, trajectory analysis, and SVG plots.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use sandroll::analysis::{
    detect_switch_events, load_trajectory, segment_steps, steps_to_csv, summarize,
};
use sandroll::gait::Gait;
use sandroll::geometry::DEFAULT_SEGMENT_LENGTH;
use sandroll::shape_space::sweep;
use sandroll::stability::CriticalPitch;
use sandroll::substrate::{run, GaitContext, RunConfig, TrialOutput};
use sandroll::svg::{shape_space_svg, step_pitch_svg};
use sandroll::{critical_pitch_of_gait, GaitCriticalPitch};

#[derive(Parser)]
#[command(
    name = "sandroll",
    version,
    about = "Shape-programmable rolling: stability queries, shape-space maps, and granular-terrain trials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    /// Leaning hexagon gait
    Hex,
    /// Flattened quadrilateral-like gait
    Quad,
    /// Flattened triangle-like gait
    Tri,
}

impl ShapeArg {
    fn gait_name(self) -> &'static str {
        match self {
            ShapeArg::Hex => "hexagon",
            ShapeArg::Quad => "quadrilateral",
            ShapeArg::Tri => "triangle",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TerrainArg {
    /// Flat rigid reference ground
    Rigid,
    /// Loose dry sand
    Sand,
    /// Loose dry sand with a ground-adapted body
    SandAdapted,
}

impl TerrainArg {
    fn preset_name(self) -> &'static str {
        match self {
            TerrainArg::Rigid => "rigid",
            TerrainArg::Sand => "sand",
            TerrainArg::SandAdapted => "sand_adapted",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Report the critical forward-tipping pitch of a gait's switching configuration
    #[command(group(ArgGroup::new("source").required(true).args(["shape", "gait"])))]
    Betamax {
        /// Built-in gait to query
        #[arg(long, value_enum)]
        shape: Option<ShapeArg>,
        /// Gait JSON file to query instead of a built-in
        #[arg(long)]
        gait: Option<PathBuf>,
        /// Emit machine-readable JSON instead of text
        #[arg(long)]
        json: bool,
    },
    /// Classify rolling direction over the parallelogon angle grid
    Shapespace {
        /// Incline angle in degrees (uphill positive)
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        /// Grid resolution per axis
        #[arg(long, default_value_t = 181)]
        grid: usize,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
        /// Optional SVG map path
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run seeded stride-by-stride trials and write logs per seed
    Simulate {
        /// Built-in gait to drive
        #[arg(long, value_enum)]
        shape: ShapeArg,
        /// Terrain preset
        #[arg(long, value_enum, default_value_t = TerrainArg::Sand)]
        terrain: TerrainArg,
        /// Scenario config JSON overriding the preset
        #[arg(long)]
        config: Option<PathBuf>,
        /// Number of seeded trials (overrides the config)
        #[arg(long)]
        seeds: Option<usize>,
        /// Course length in meters (overrides the config)
        #[arg(long)]
        course: Option<f64>,
        /// Stride budget per trial (overrides the config)
        #[arg(long)]
        max_strides: Option<usize>,
        /// Output directory
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Recover per-step statistics from a trajectory log
    Analyze {
        /// Trajectory CSV to analyze
        #[arg(long)]
        traj: PathBuf,
        /// Commanded stride period in seconds
        #[arg(long, default_value_t = 3.0)]
        period: f64,
        /// Course length in meters for the stopping rules
        #[arg(long, default_value_t = 1.0)]
        course: f64,
        /// Output directory
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Render the step-length-versus-pitch scatter from a trajectory log
    #[command(group(ArgGroup::new("limit").required(true).args(["shape", "beta_m"])))]
    Plot {
        /// Trajectory CSV to plot
        #[arg(long)]
        traj: PathBuf,
        /// Built-in gait providing the critical pitch line
        #[arg(long, value_enum)]
        shape: Option<ShapeArg>,
        /// Critical pitch in degrees, overriding --shape
        #[arg(long)]
        beta_m: Option<f64>,
        /// Commanded stride period in seconds
        #[arg(long, default_value_t = 3.0)]
        period: f64,
        /// Output SVG path
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Serialize)]
struct BetamaxJson {
    gait: String,
    switching: Vec<BetamaxEntry>,
}

#[derive(Serialize)]
struct BetamaxEntry {
    phase: f64,
    beta_m_deg: Option<f64>,
}

#[derive(Serialize)]
struct AggregateJson {
    gait: String,
    scenario: String,
    seeds: usize,
    failure_rate: f64,
    mean_distance_cm: f64,
    median_distance_cm: f64,
    mean_speed_cm_s: f64,
}

fn main() -> ExitCode {
    if let Ok(value) = std::env::var("SANDROLL_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<(), String> {
    match command {
        Command::Betamax { shape, gait, json } => betamax(shape, gait.as_deref(), json),
        Command::Shapespace {
            theta,
            grid,
            out,
            svg,
        } => shapespace(theta, grid, &out, svg.as_deref()),
        Command::Simulate {
            shape,
            terrain,
            config,
            seeds,
            course,
            max_strides,
            out_dir,
        } => simulate(
            shape,
            terrain,
            config.as_deref(),
            seeds,
            course,
            max_strides,
            &out_dir,
        ),
        Command::Analyze {
            traj,
            period,
            course,
            out_dir,
        } => analyze(&traj, period, course, &out_dir),
        Command::Plot {
            traj,
            shape,
            beta_m,
            period,
            out,
        } => plot(&traj, shape, beta_m, period, &out),
    }
}

fn err_to_string(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn load_gait(shape: Option<ShapeArg>, path: Option<&Path>) -> Result<Gait, String> {
    match (shape, path) {
        (_, Some(path)) => Gait::from_file(path).map_err(err_to_string),
        (Some(shape), None) => Gait::builtin(shape.gait_name()).map_err(err_to_string),
        (None, None) => Err("a gait source is required".into()),
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), String> {
    let fail = |e: std::io::Error| format!("writing {}: {e}", path.display());
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(fail)?;
        }
    }
    let mut tmp_name = path.as_os_str().to_owned();
    tmp_name.push(".tmp");
    let tmp = PathBuf::from(tmp_name);
    fs::write(&tmp, contents).map_err(fail)?;
    fs::rename(&tmp, path).map_err(fail)
}

fn betamax(shape: Option<ShapeArg>, path: Option<&Path>, json: bool) -> Result<(), String> {
    let gait = load_gait(shape, path)?;
    let pitches = critical_pitch_of_gait(&gait, DEFAULT_SEGMENT_LENGTH).map_err(err_to_string)?;
    if json {
        let payload = BetamaxJson {
            gait: gait.name.clone(),
            switching: pitches
                .iter()
                .map(|entry| BetamaxEntry {
                    phase: entry.phase,
                    beta_m_deg: match entry.critical_pitch {
                        CriticalPitch::Limit(deg) => Some((deg * 10.0).round() / 10.0),
                        CriticalPitch::NonRolling => None,
                    },
                })
                .collect(),
        };
        println!("{}", serde_json::to_string_pretty(&payload).unwrap());
    } else {
        for GaitCriticalPitch {
            phase,
            critical_pitch,
        } in &pitches
        {
            match critical_pitch {
                CriticalPitch::Limit(deg) => {
                    println!("{}: beta_m = {deg:.1} deg (switch phase {phase})", gait.name)
                }
                CriticalPitch::NonRolling => println!(
                    "{}: non-rolling at switch phase {phase} (center never passes the front contact)",
                    gait.name
                ),
            }
        }
    }
    Ok(())
}

fn shapespace(theta: f64, grid: usize, out: &Path, svg: Option<&Path>) -> Result<(), String> {
    if !(0.0..90.0).contains(&theta) {
        return Err(format!("incline must lie in [0, 90) degrees, got {theta}"));
    }
    if grid < 2 {
        return Err(format!("grid must be at least 2, got {grid}"));
    }
    let map = sweep(grid, theta, DEFAULT_SEGMENT_LENGTH);
    write_atomic(out, &map.to_csv())?;
    if let Some(svg_path) = svg {
        write_atomic(svg_path, &shape_space_svg(&map))?;
    }
    let counts = map.counts();
    println!(
        "{grid}x{grid} grid at {theta} deg: {} forward, {} backward, {} none, {} unrealizable",
        counts.forward, counts.backward, counts.none, counts.invalid
    );
    Ok(())
}

fn simulate(
    shape: ShapeArg,
    terrain: TerrainArg,
    config_path: Option<&Path>,
    seeds: Option<usize>,
    course: Option<f64>,
    max_strides: Option<usize>,
    out_dir: &Path,
) -> Result<(), String> {
    let mut config = match config_path {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("reading {}: {e}", path.display()))?;
            RunConfig::from_json(&text).map_err(err_to_string)?
        }
        None => RunConfig::builtin(terrain.preset_name()).map_err(err_to_string)?,
    };
    if let Some(seeds) = seeds {
        config.seeds = seeds;
    }
    if let Some(course) = course {
        config.course_length_m = course;
    }
    if let Some(max_strides) = max_strides {
        config.max_strides = max_strides;
    }
    if config.seeds == 0 {
        return Err("at least one seed is required".into());
    }
    config.validate().map_err(err_to_string)?;

    let gait = match config.gait_file.clone() {
        Some(path) => Gait::from_file(Path::new(&path)).map_err(err_to_string)?,
        None => Gait::builtin(shape.gait_name()).map_err(err_to_string)?,
    };

    let outputs: Result<Vec<TrialOutput>, String> = (0..config.seeds)
        .into_par_iter()
        .map(|seed| run(&gait, &config, seed as u64).map_err(err_to_string))
        .collect();
    let outputs = outputs?;

    for (seed, output) in outputs.iter().enumerate() {
        let stem = format!("seed_{seed:03}");
        write_atomic(
            &out_dir.join(format!("{stem}_trajectory.csv")),
            &output.trajectory.to_csv(),
        )?;
        write_atomic(
            &out_dir.join(format!("{stem}_steps.csv")),
            &sandroll::substrate::steps_to_csv(&output.steps),
        )?;
        let mut summary = serde_json::to_string_pretty(&output.summary.to_summary_json()).unwrap();
        summary.push('\n');
        write_atomic(&out_dir.join(format!("{stem}_summary.json")), &summary)?;
    }

    let failures = outputs.iter().filter(|o| o.summary.failure).count();
    let mut distances: Vec<f64> = outputs.iter().map(|o| o.summary.distance_m).collect();
    distances.sort_by(f64::total_cmp);
    let median_m = if distances.len() % 2 == 1 {
        distances[distances.len() / 2]
    } else {
        (distances[distances.len() / 2 - 1] + distances[distances.len() / 2]) / 2.0
    };
    let mean_m = distances.iter().sum::<f64>() / distances.len() as f64;
    let mean_speed =
        outputs.iter().map(|o| o.summary.mean_speed_m_s).sum::<f64>() / outputs.len() as f64;
    let aggregate = AggregateJson {
        gait: gait.name.clone(),
        scenario: config_path
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| terrain.preset_name().to_string()),
        seeds: config.seeds,
        failure_rate: failures as f64 / config.seeds as f64,
        mean_distance_cm: mean_m * 100.0,
        median_distance_cm: median_m * 100.0,
        mean_speed_cm_s: mean_speed * 100.0,
    };
    let mut text = serde_json::to_string_pretty(&aggregate).unwrap();
    text.push('\n');
    write_atomic(&out_dir.join("aggregate.json"), &text)?;

    println!(
        "{} over {} seeds: {}/{} failures, median distance {:.1} cm, mean speed {:.2} cm/s",
        gait.name, config.seeds, failures, config.seeds, median_m * 100.0, mean_speed * 100.0
    );
    Ok(())
}

fn analyze(traj_path: &Path, period: f64, course: f64, out_dir: &Path) -> Result<(), String> {
    if period <= 0.0 {
        return Err(format!("stride period must be positive, got {period}"));
    }
    if course <= 0.0 {
        return Err(format!("course length must be positive, got {course}"));
    }
    let traj = load_trajectory(traj_path).map_err(err_to_string)?;
    let steps = segment_steps(&traj, period).map_err(err_to_string)?;
    let stats = summarize(&steps, period, course).map_err(err_to_string)?;

    write_atomic(&out_dir.join("steps.csv"), &steps_to_csv(&steps))?;
    let mut summary = serde_json::to_string_pretty(&stats.to_summary_json()).unwrap();
    summary.push('\n');
    write_atomic(&out_dir.join("summary.json"), &summary)?;

    let detected = detect_switch_events(&traj).len();
    let successful = steps.iter().filter(|s| s.success).count();
    if detected != successful {
        eprintln!(
            "note: {detected} support-switch events detected but {successful} steps measured successful; both are reported as-is"
        );
    }
    println!(
        "{} steps: mean speed {:.2} cm/s (std {:.2}), distance {:.1} cm, failure {}, stop {}",
        steps.len(),
        stats.mean_speed_m_s * 100.0,
        stats.std_speed_m_s * 100.0,
        stats.distance_m * 100.0,
        stats.failure,
        stats.stop
    );
    Ok(())
}

fn plot(
    traj_path: &Path,
    shape: Option<ShapeArg>,
    beta_m: Option<f64>,
    period: f64,
    out: &Path,
) -> Result<(), String> {
    if period <= 0.0 {
        return Err(format!("stride period must be positive, got {period}"));
    }
    let beta_m_deg = match (beta_m, shape) {
        (Some(deg), _) => deg,
        (None, Some(shape)) => {
            let gait = Gait::builtin(shape.gait_name()).map_err(err_to_string)?;
            GaitContext::new(&gait, DEFAULT_SEGMENT_LENGTH)
                .map_err(err_to_string)?
                .beta_m_deg
        }
        (None, None) => return Err("a critical pitch source is required".into()),
    };
    let traj = load_trajectory(traj_path).map_err(err_to_string)?;
    let steps = segment_steps(&traj, period).map_err(err_to_string)?;
    let points: Vec<(f64, f64)> = steps
        .iter()
        .map(|s| (s.pitch_deg, s.step_length_m))
        .collect();
    write_atomic(out, &step_pitch_svg(&points, beta_m_deg))?;
    println!(
        "wrote {} with {} steps against beta_m = {beta_m_deg:.1} deg",
        out.display(),
        points.len()
    );
    Ok(())
}
