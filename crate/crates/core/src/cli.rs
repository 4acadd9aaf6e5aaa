//! Command-line front end.
//!
//! Exit codes: 0 ok, 2 configuration error, 3 input error, 4 simulation
//! error, 5 validation failure.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::camera::simulate;
use crate::error::Error;
use crate::motion::{MotionManifest, Taxonomy};
use crate::recipe_io::{list_recipe_files, read_recipe, recipe_file_name, write_recipe};
use crate::scenario::{Generator, GeneratorConfig, Recipe, WaypointAtlas};
use crate::stats::DatasetStats;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_SIMULATION: u8 = 4;
pub const EXIT_VALIDATION: u8 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "phavforge",
    version,
    about = "Procedural human-action video recipe generator"
)]
pub struct Cli {
    #[command(flatten)]
    pub inputs: InputArgs,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "PHAVFORGE_JOBS")]
    pub jobs: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Generator config (TOML); the builtin config when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Motion manifest (TOML); the bundled fixture when omitted.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    /// Action taxonomy (TOML); the bundled 35 categories when omitted.
    #[arg(long, global = true)]
    pub taxonomy: Option<PathBuf>,
    /// Waypoint graphs (TOML); the bundled fixture when omitted.
    #[arg(long, global = true)]
    pub waypoints: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample recipes into a directory.
    Sample {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        count: usize,
        /// Follow a dataset plan giving every action at least this many clips.
        #[arg(long)]
        per_class_min: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize a recipe directory.
    Stats {
        dir: PathBuf,
        /// Also write the per-variable histograms as CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the 30 Hz camera trajectory of a recipe as CSV.
    SimulateCamera {
        #[arg(long)]
        recipe: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Protagonist speed along +x in m/s.
        #[arg(long, default_value_t = 0.0)]
        speed: f64,
    },
    /// Check every recipe constraint for each file in a directory.
    Validate { dir: PathBuf },
}

/// Resolved inputs of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    pub config: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub taxonomy: Option<PathBuf>,
    pub waypoints: Option<PathBuf>,
    pub master_seed: u64,
    pub out: PathBuf,
    pub count: usize,
    pub per_class_min: Option<usize>,
}

/// Failure carrying its exit code; the message goes to stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn config_err(e: Error) -> Failure {
    Failure::new(EXIT_CONFIG, e)
}

fn input_err(e: Error) -> Failure {
    Failure::new(EXIT_INPUT, e)
}

pub fn load_generator(inputs: &InputArgs) -> CliResult<Generator> {
    let config = match &inputs.config {
        Some(p) => GeneratorConfig::load(p).map_err(config_err)?,
        None => GeneratorConfig::default(),
    };
    let manifest = match &inputs.manifest {
        Some(p) => MotionManifest::load(p).map_err(config_err)?,
        None => MotionManifest::default_fixture(),
    };
    let taxonomy = match &inputs.taxonomy {
        Some(p) => Taxonomy::load(p).map_err(config_err)?,
        None => Taxonomy::default_fixture(),
    };
    let atlas = match &inputs.waypoints {
        Some(p) => WaypointAtlas::load(p).map_err(config_err)?,
        None => WaypointAtlas::default_fixture(),
    };
    Generator::new(config, manifest, taxonomy, atlas).map_err(config_err)
}

fn thread_pool(jobs: Option<usize>) -> CliResult<rayon::ThreadPool> {
    if jobs == Some(0) {
        return Err(Failure::new(EXIT_CONFIG, "--jobs must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::new(EXIT_CONFIG, e))
}

pub fn cmd_sample(gen: &Generator, run: &RunManifest, jobs: Option<usize>, format: Format) -> CliResult<String> {
    let actions = match run.per_class_min {
        Some(min) => Some(gen.planned_actions(min, run.count).map_err(config_err)?),
        None => None,
    };
    std::fs::create_dir_all(&run.out).map_err(|e| input_err(Error::io(&run.out, e)))?;
    let pool = thread_pool(jobs)?;
    let partial: Vec<DatasetStats> = pool
        .install(|| {
            (0..run.count)
                .into_par_iter()
                .map(|i| -> crate::Result<DatasetStats> {
                    let recipe = match &actions {
                        Some(a) => gen.sample_recipe_for_action(run.master_seed, i as u64, &a[i])?,
                        None => gen.sample_recipe(run.master_seed, i as u64)?,
                    };
                    write_recipe(&run.out.join(recipe_file_name(i as u64)), &recipe)?;
                    let mut s = DatasetStats::default();
                    s.add(&recipe);
                    Ok(s)
                })
                .collect::<crate::Result<_>>()
        })
        .map_err(|e| match e {
            Error::Io { .. } => input_err(e),
            e => config_err(e),
        })?;
    let stats = partial.into_iter().fold(DatasetStats::default(), DatasetStats::merged);
    let mut s = String::new();
    let rows = [
        ("recipes", run.count.to_string()),
        ("seed", run.master_seed.to_string()),
        ("out", run.out.display().to_string()),
        ("frames", stats.frames.to_string()),
        ("classes", stats.per_class.len().to_string()),
        (
            "min_clips_per_class",
            stats.per_class.values().min().copied().unwrap_or(0).to_string(),
        ),
        ("mean_clips_per_class", format!("{:.1}", stats.mean_clips_per_class())),
        ("mean_duration_s", format!("{:.3}", stats.mean_duration_s())),
    ];
    match format {
        Format::Text => {
            for (k, v) in rows {
                let _ = writeln!(s, "{k}: {v}");
            }
        }
        Format::Csv => {
            s.push_str("key,value\n");
            for (k, v) in rows {
                let _ = writeln!(s, "{k},{v}");
            }
        }
    }
    Ok(s)
}

fn recipe_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Err(Failure::new(EXIT_INPUT, format!("{}: not a directory", dir.display())));
    }
    let files = list_recipe_files(dir).map_err(input_err)?;
    if files.is_empty() {
        return Err(Failure::new(EXIT_INPUT, format!("{}: no recipe files", dir.display())));
    }
    Ok(files)
}

pub fn cmd_stats(dir: &Path, out: Option<&Path>, jobs: Option<usize>, format: Format) -> CliResult<String> {
    let files = recipe_files(dir)?;
    let pool = thread_pool(jobs)?;
    let stats = pool
        .install(|| {
            files
                .par_iter()
                .map(|p| {
                    let mut s = DatasetStats::default();
                    s.add(&read_recipe(p)?);
                    Ok(s)
                })
                .try_reduce(DatasetStats::default, |a, b| Ok(a.merged(b)))
        })
        .map_err(input_err)?;
    let mut csv = Vec::new();
    stats.write_histograms_csv(&mut csv).expect("write to memory");
    if let Some(path) = out {
        std::fs::write(path, &csv).map_err(|e| input_err(Error::io(path, e)))?;
    }
    Ok(match format {
        Format::Text => stats.report(),
        Format::Csv => String::from_utf8(csv).expect("csv is UTF-8"),
    })
}

/// Protagonist walking along +x from its placement at `speed` m/s.
pub fn straight_line(recipe: &Recipe, speed: f64) -> impl Fn(f64) -> [f64; 3] {
    let p = recipe.placement.protagonist_xyz;
    move |t| [p[0] + speed * t, p[1], p[2]]
}

pub fn cmd_simulate_camera(recipe_path: &Path, out: &Path, speed: f64) -> CliResult<String> {
    let recipe = read_recipe(recipe_path).map_err(input_err)?;
    let traj = simulate(&recipe.camera_rig, straight_line(&recipe, speed), recipe.duration_s).map_err(|e| match e {
        Error::SimulationDiverged { .. } => Failure::new(EXIT_SIMULATION, e),
        e => input_err(e),
    })?;
    let file = std::fs::File::create(out).map_err(|e| input_err(Error::io(out, e)))?;
    let mut w = std::io::BufWriter::new(file);
    traj.write_csv(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| input_err(Error::io(out, e)))?;
    Ok(format!(
        "frames: {}\nfinal_camera_speed_mps: {:.6}\nout: {}\n",
        traj.frames.len(),
        traj.final_camera_speed(),
        out.display()
    ))
}

/// Problems found in one recipe file; empty when it passes.
pub fn validate_file(gen: &Generator, path: &Path) -> Vec<String> {
    match read_recipe(path) {
        Err(e) => vec![format!("read: {e}")],
        Ok(r) => gen.validate_recipe(&r).iter().map(|v| v.to_string()).collect(),
    }
}

pub fn cmd_validate(gen: &Generator, dir: &Path, jobs: Option<usize>, format: Format) -> CliResult<String> {
    let files = recipe_files(dir)?;
    let pool = thread_pool(jobs)?;
    let results: Vec<Vec<String>> = pool.install(|| files.par_iter().map(|p| validate_file(gen, p)).collect());
    let mut report = String::new();
    if format == Format::Csv {
        report.push_str("file,status,problem\n");
    }
    let mut failed = 0;
    for (path, problems) in files.iter().zip(&results) {
        let name = path
            .file_name()
            .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
        if !problems.is_empty() {
            failed += 1;
        }
        match format {
            Format::Text if problems.is_empty() => {
                let _ = writeln!(report, "{name}: ok");
            }
            Format::Text => {
                for p in problems {
                    let _ = writeln!(report, "{name}: FAIL {p}");
                }
            }
            Format::Csv if problems.is_empty() => {
                let _ = writeln!(report, "{name},ok,");
            }
            Format::Csv => {
                for p in problems {
                    let _ = writeln!(report, "{name},fail,\"{}\"", p.replace('"', "\"\""));
                }
            }
        }
    }
    if failed > 0 {
        let _ = writeln!(report, "{failed} of {} files failed", files.len());
        return Err(Failure::new(EXIT_VALIDATION, report));
    }
    Ok(report)
}

pub fn execute(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Sample {
            seed,
            count,
            per_class_min,
            out,
        } => {
            let gen = load_generator(&cli.inputs)?;
            let run = RunManifest {
                config: cli.inputs.config.clone(),
                manifest: cli.inputs.manifest.clone(),
                taxonomy: cli.inputs.taxonomy.clone(),
                waypoints: cli.inputs.waypoints.clone(),
                master_seed: seed,
                out,
                count,
                per_class_min,
            };
            cmd_sample(&gen, &run, cli.jobs, cli.format)
        }
        Command::Stats { dir, out } => cmd_stats(&dir, out.as_deref(), cli.jobs, cli.format),
        Command::SimulateCamera { recipe, out, speed } => cmd_simulate_camera(&recipe, &out, speed),
        Command::Validate { dir } => {
            let gen = load_generator(&cli.inputs)?;
            cmd_validate(&gen, &dir, cli.jobs, cli.format)
        }
    }
}

/// Parse arguments, run, print, and map the outcome to an exit code.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::from(EXIT_OK)
        }
        Err(f) if f.code == EXIT_VALIDATION => {
            print!("{}", f.message);
            ExitCode::from(f.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
