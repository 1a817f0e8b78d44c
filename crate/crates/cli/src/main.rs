use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use log::info;

use dbfsim::{
    emit_plot, emit_results, load_preset, parse_sweep_toml_over, run_sweep, HarnessError, OutputFormat, SweepSpec,
    PRESET_NAMES,
};

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Runs digital beamforming uplink sweeps and writes the results.
#[derive(Debug, Parser)]
#[command(name = "dbfsim", version)]
struct Args {
    /// Built-in sweep to run (see --list-presets).
    #[arg(long)]
    preset: Option<String>,
    /// TOML sweep description; overlays --preset when both are given.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Also write an SVG plot.
    #[arg(long)]
    plot: bool,
    /// Master seed; every grid cell derives its own seed from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 uses every CPU).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Print the preset names and exit.
    #[arg(long)]
    list_presets: bool,
}

fn exit_code(e: &HarnessError) -> u8 {
    match e {
        _ if e.is_config() => EXIT_CONFIG,
        HarnessError::Io(_) | HarnessError::Csv(_) | HarnessError::Json(_) => EXIT_IO,
        _ => EXIT_RUNTIME,
    }
}

fn load_spec(args: &Args) -> Result<SweepSpec, HarnessError> {
    let mut spec = match (&args.config, &args.preset) {
        (Some(path), preset) => {
            let text = std::fs::read_to_string(path)?;
            parse_sweep_toml_over(&text, preset.as_deref())?
        }
        (None, Some(name)) => load_preset(name)?,
        (None, None) => {
            return Err(dbfsim::ConfigError::Parse("give --preset or --config (or --list-presets)".into()).into());
        }
    };
    if let Some(seed) = args.seed {
        spec.base.seed = seed;
    }
    Ok(spec)
}

fn run(args: &Args) -> Result<(), HarnessError> {
    let spec = load_spec(args)?;
    let grid = run_sweep(&spec, args.jobs)?;
    let format = match args.format {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    };
    for path in emit_results(&grid, format, &args.out)? {
        println!("{}", path.display());
    }
    if args.plot {
        let path = args.out.join(format!("{}.svg", dbfsim::output::file_stem(&spec.name)));
        emit_plot(&grid, &path)?;
        println!("{}", path.display());
    }
    info!("done");
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    if args.list_presets {
        for name in PRESET_NAMES {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
