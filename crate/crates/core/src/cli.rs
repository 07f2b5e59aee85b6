//! The `ris-sim` command line.
//!
//! Exit codes: 0 success, 1 runtime error, 2 scenario validation failure,
//! 64 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Result, SimError};
use crate::geometry::RotationAngles;
use crate::io::{
    canonical_json, config_digest, emit_heatmap_csv, emit_heatmap_image, load_config, parse_heatmap_csv, write_file,
    ConfigFile, RunManifest, Summary,
};
use crate::rate::ergodic_rate;
use crate::sweep::{find_optimal_orientation, run_power_sweep, run_rotation_sweep, RateHeatmap, SweepAxis};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Fallback for `--threads`.
pub const THREADS_ENV: &str = "RIS_SIM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "ris-sim", version, about = "Rotation-aware RIS-assisted MIMO link simulator")]
struct Cli {
    /// Override the config's master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: $RIS_SIM_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Also write an SVG heatmap.
    #[arg(long, global = true)]
    image: bool,
    /// Run even if the scenario fails validation.
    #[arg(long, global = true)]
    allow_invalid: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AxisArg {
    Az,
    El,
    Joint,
}

impl From<AxisArg> for SweepAxis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::Az => SweepAxis::Azimuth,
            AxisArg::El => SweepAxis::Elevation,
            AxisArg::Joint => SweepAxis::Joint,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a config against the scenario rules.
    Validate { config: PathBuf },
    /// Ergodic rate at one panel orientation.
    Rate {
        config: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta: f64,
        /// Override the config's transmit power.
        #[arg(long, allow_negative_numbers = true)]
        power_dbm: Option<f64>,
    },
    /// Ergodic rate against transmit power, panel unrotated.
    PowerSweep { config: PathBuf },
    /// Rotation sweep; the axis defaults to the config's sweep axis.
    Sweep {
        config: PathBuf,
        #[arg(long, value_enum)]
        axis: Option<AxisArg>,
    },
    /// Best orientation from a config (runs a joint sweep) or from a
    /// heatmap CSV.
    Optimize { input: PathBuf },
}

/// Runs the CLI writing to the process stdout/stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI and returns its exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let threads = cli.threads.or_else(|| {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
    });
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker threads: {e}");
            return EXIT_RUNTIME;
        }
    };
    let mut buf = Vec::new();
    let result = pool.install(|| execute(&cli, &mut buf));
    let _ = out.write_all(&buf);
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                SimError::Validation(_) => EXIT_VALIDATION,
                _ => EXIT_RUNTIME,
            }
        }
    }
}

fn load(cli: &Cli, path: &Path) -> Result<ConfigFile> {
    let mut config = load_config(path, cli.allow_invalid)?;
    if let Some(seed) = cli.seed {
        config.scenario.master_seed = seed;
    }
    Ok(config)
}

fn out_dir(cli: &Cli) -> Result<PathBuf> {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&dir).map_err(|e| SimError::io(&dir, e))?;
    Ok(dir)
}

fn print_summary(cli: &Cli, out: &mut dyn Write, summary: &Summary) -> Result<()> {
    let text = match cli.format {
        Format::Json => summary.to_json(),
        Format::Csv => format!(
            "mean_rate={} std_error={} azimuth_deg={} elevation_deg={}\n",
            summary.mean_rate, summary.std_error, summary.rotation.azimuth_deg, summary.rotation.elevation_deg
        ),
    };
    out.write_all(text.as_bytes()).map_err(|e| SimError::io("<stdout>", e))
}

/// Writes the heatmap files, summary, canonical config and manifest.
fn write_heatmap_outputs(cli: &Cli, config: &ConfigFile, heatmap: &RateHeatmap, stem: &str, out: &mut dyn Write) -> Result<()> {
    let dir = out_dir(cli)?;
    let digest = config_digest(&config.scenario);
    let mut manifest = RunManifest::start(digest.clone(), config.scenario.master_seed);

    for p in emit_heatmap_csv(heatmap, &dir.join(format!("{stem}.csv")))? {
        manifest.record(&p);
    }
    if cli.format == Format::Json {
        let p = dir.join(format!("{stem}.json"));
        write_file(&p, &canonical_json(heatmap))?;
        manifest.record(&p);
    }
    if cli.image {
        let p = dir.join(format!("{stem}.svg"));
        emit_heatmap_image(heatmap, &p)?;
        manifest.record(&p);
    }
    let summary = Summary::for_heatmap(digest, heatmap)?;
    let p = dir.join("summary.json");
    write_file(&p, &summary.to_json())?;
    manifest.record(&p);
    let p = dir.join("config.json");
    write_file(&p, &canonical_json(config))?;
    manifest.record(&p);
    manifest.finish(&dir.join("manifest.json"))?;
    print_summary(cli, out, &summary)
}

fn execute(cli: &Cli, out: &mut Vec<u8>) -> Result<i32> {
    match &cli.command {
        Command::Validate { config } => {
            let loaded = load(cli, config)?;
            writeln!(out, "ok: {} ({})", config.display(), config_digest(&loaded.scenario))
                .map_err(|e| SimError::io("<stdout>", e))?;
            Ok(EXIT_OK)
        }
        Command::Rate { config, phi, theta, power_dbm } => {
            let mut loaded = load(cli, config)?;
            if let Some(p) = power_dbm {
                loaded.scenario.tx_power_dbm = *p;
            }
            let rotation = RotationAngles::new(*phi, *theta)?;
            let result = ergodic_rate(&loaded.scenario, rotation, loaded.sweep.strategy)?;
            let digest = config_digest(&loaded.scenario);
            let summary = Summary::for_rate(digest.clone(), rotation, &result);
            if cli.out.is_some() {
                let dir = out_dir(cli)?;
                let mut manifest = RunManifest::start(digest, loaded.scenario.master_seed);
                let p = dir.join("summary.json");
                write_file(&p, &summary.to_json())?;
                manifest.record(&p);
                let p = dir.join("config.json");
                write_file(&p, &canonical_json(&loaded))?;
                manifest.record(&p);
                manifest.finish(&dir.join("manifest.json"))?;
            }
            print_summary(cli, out, &summary)?;
            Ok(EXIT_OK)
        }
        Command::PowerSweep { config } => {
            let loaded = load(cli, config)?;
            let heatmap = run_power_sweep(&loaded.scenario, &loaded.sweep)?;
            write_heatmap_outputs(cli, &loaded, &heatmap, "power_sweep", out)?;
            Ok(EXIT_OK)
        }
        Command::Sweep { config, axis } => {
            let loaded = load(cli, config)?;
            let axis = axis.map(SweepAxis::from).unwrap_or(loaded.sweep.axis);
            let heatmap = run_rotation_sweep(&loaded.scenario, &loaded.sweep, axis)?;
            let stem = match axis {
                SweepAxis::Azimuth => "sweep_az",
                SweepAxis::Elevation => "sweep_el",
                SweepAxis::Joint => "sweep_joint",
            };
            write_heatmap_outputs(cli, &loaded, &heatmap, stem, out)?;
            Ok(EXIT_OK)
        }
        Command::Optimize { input } => {
            let is_csv = input
                .extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
            if is_csv {
                let heatmap = parse_heatmap_csv(input)?;
                let (rotation, best) = find_optimal_orientation(&heatmap)?;
                let mut summary = Summary::for_heatmap(String::new(), &heatmap)?;
                summary.rotation = rotation.into();
                summary.mean_rate = best.mean_rate;
                print_summary(cli, out, &summary)?;
            } else {
                let loaded = load(cli, input)?;
                let heatmap = run_rotation_sweep(&loaded.scenario, &loaded.sweep, SweepAxis::Joint)?;
                write_heatmap_outputs(cli, &loaded, &heatmap, "sweep_joint", out)?;
            }
            Ok(EXIT_OK)
        }
    }
}
