//! Command-line front end: one subcommand per standard analysis.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use spin_otto::config::{parse_config, RunConfig};
use spin_otto::cycle::{
    calibrate_uniform_rate, run_cycle, run_heating, sweep_heating_time, CycleConfig,
};
use spin_otto::error::{Error, Result};
use spin_otto::levels::{compare_n_levels, truncate, MappingMode};
use spin_otto::plot::{
    entropy_vs_time, n_level_comparison, power_vs_entropy, temperature_trace_chart,
};
use spin_otto::table::{
    fits_csv, fits_json, fmt_sig9, levels_csv, levels_json, read_population_csv, sweep_csv,
    sweep_json, trajectory_csv, trajectory_json,
};
use spin_otto::tempfit::{fit_dual_boltzmann, temperature_trace, TemperatureFit};
use spin_otto::thermo::zeeman_ladder;

#[derive(Parser)]
#[command(
    name = "spin-otto",
    version,
    about = "Simulate a multilevel quasi-spin Otto engine driven by spin-exchange collisions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotKind {
    /// Entropy along a long heating stroke.
    Entropy,
    /// Power vs heating-stroke entropy over the sweep grid.
    Power,
    /// Truncated-engine comparison.
    Levels,
    /// Effective-temperature regime along heating.
    Temperature,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mapping {
    /// Charge truncated cycles the reference timing for both heat strokes.
    Both,
    /// Map only the heating time; cooling runs on its own clock.
    Heating,
}

#[derive(Subcommand)]
enum Command {
    /// Run one Otto cycle and write its stroke trajectories and summary.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Heating stroke duration, ms.
        #[arg(long = "tau-h", default_value_t = 58.0)]
        tau_h: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Override the closure tolerance.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Truncate the engine to its lowest N levels.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Sweep the heating time and write the power-vs-entropy table.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Calibrate the uniform rate to the configured entropy-peak time.
    Calibrate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the target peak time, ms.
        #[arg(long = "target-peak")]
        target_peak: Option<f64>,
    },
    /// Fit effective temperatures to an external population table
    /// (CSV with columns t_ms, p0..p{N-1}).
    Fit {
        input: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Compare truncated N-level engines at equal exchanged heat.
    Levels {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Level counts to compare, e.g. --n 2,4,7.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, value_enum, default_value_t = Mapping::Both)]
        mapping: Mapping,
    },
    /// Render one of the standard SVG charts.
    Plot {
        #[arg(long, value_enum)]
        kind: PlotKind,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Stroke duration for the entropy/temperature charts, ms.
        #[arg(long = "tau-h")]
        tau_h: Option<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig> {
    match path {
        Some(p) => parse_config(p),
        None => Ok(RunConfig::default_calibrated()),
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

fn apply_overrides(
    mut cycle: CycleConfig,
    epsilon: Option<f64>,
    n: Option<usize>,
) -> Result<CycleConfig> {
    if let Some(n) = n {
        cycle = truncate(&cycle, n)?.config;
    }
    if let Some(eps) = epsilon {
        if !(eps > 0.0 && eps < 0.1) {
            return Err(Error::Config(format!(
                "epsilon: must lie in (0, 0.1), got {eps}"
            )));
        }
        cycle.epsilon = eps;
    }
    Ok(cycle)
}

fn simulate(
    cfg: &RunConfig,
    tau_h: f64,
    out: &Path,
    format: Format,
    epsilon: Option<f64>,
    n: Option<usize>,
) -> Result<()> {
    let cycle_cfg = apply_overrides(cfg.cycle.clone(), epsilon, n)?;
    let record = run_cycle(&cycle_cfg, tau_h)?;
    let high = zeeman_ladder(cycle_cfg.b1, cycle_cfg.levels)?;
    let low = zeeman_ladder(cycle_cfg.b2, cycle_cfg.levels)?;
    let heating = &record.strokes[0].trajectory;
    let cooling = &record.strokes[2].trajectory;
    match format {
        Format::Csv => {
            write_file(out, "heating.csv", &trajectory_csv(heating, &high)?)?;
            write_file(out, "cooling.csv", &trajectory_csv(cooling, &low)?)?;
            write_file(out, "summary.csv", &sweep_csv(&[record]))?;
        }
        Format::Json => {
            write_file(out, "heating.json", &trajectory_json(heating, &high)?)?;
            write_file(out, "cooling.json", &trajectory_json(cooling, &low)?)?;
            write_file(out, "summary.json", &sweep_json(&[record]))?;
        }
    }
    Ok(())
}

fn sweep(cfg: &RunConfig, out: &Path, format: Format) -> Result<()> {
    let result = sweep_heating_time(&cfg.cycle, &cfg.grid())?;
    match format {
        Format::Csv => write_file(out, "sweep.csv", &sweep_csv(&result.records)),
        Format::Json => write_file(out, "sweep.json", &sweep_json(&result.records)),
    }
}

fn fit(cfg: &RunConfig, input: &Path, out: &Path, format: Format) -> Result<()> {
    let text = std::fs::read_to_string(input)?;
    let rows = read_population_csv(&text)?;
    let levels = rows
        .first()
        .map(|(_, p)| p.levels())
        .ok_or_else(|| Error::Domain("population table has no rows".into()))?;
    let ladder = zeeman_ladder(cfg.cycle.b1, levels)?;
    let mut times = Vec::with_capacity(rows.len());
    let mut fits: Vec<TemperatureFit> = Vec::with_capacity(rows.len());
    for (t, p) in &rows {
        times.push(*t);
        fits.push(fit_dual_boltzmann(p, &ladder)?);
    }
    match format {
        Format::Csv => write_file(out, "fits.csv", &fits_csv(&times, &fits)),
        Format::Json => write_file(out, "fits.json", &fits_json(&times, &fits)),
    }
}

fn levels_cmd(
    cfg: &RunConfig,
    ns: &Option<Vec<usize>>,
    out: &Path,
    format: Format,
    mapping: Mapping,
) -> Result<()> {
    let ns: Vec<usize> = match ns {
        Some(v) => v.clone(),
        None => (2..=cfg.cycle.levels).collect(),
    };
    let mode = match mapping {
        Mapping::Both => MappingMode::BothStrokes,
        Mapping::Heating => MappingMode::HeatingOnly,
    };
    let curves = compare_n_levels(&cfg.cycle, &ns, &cfg.grid(), mode)?;
    match format {
        Format::Csv => write_file(out, "levels.csv", &levels_csv(&curves)),
        Format::Json => write_file(out, "levels.json", &levels_json(&curves)),
    }
}

fn plot(cfg: &RunConfig, kind: PlotKind, tau_h: Option<f64>, out: &Path) -> Result<()> {
    match kind {
        PlotKind::Entropy => {
            let duration = tau_h.unwrap_or(cfg.grid_end_ms);
            let stroke = run_heating(&cfg.cycle, duration)?;
            let chart = entropy_vs_time(stroke.trajectory.times(), &stroke.entropy_trace);
            write_file(out, "entropy.svg", &chart.render()?)
        }
        PlotKind::Power => {
            let result = sweep_heating_time(&cfg.cycle, &cfg.grid())?;
            let chart = power_vs_entropy(&result.curve());
            write_file(out, "power.svg", &chart.render()?)
        }
        PlotKind::Levels => {
            let ns: Vec<usize> = (2..=cfg.cycle.levels).collect();
            let curves =
                compare_n_levels(&cfg.cycle, &ns, &cfg.grid(), MappingMode::BothStrokes)?;
            let chart = n_level_comparison(&curves);
            write_file(out, "levels.svg", &chart.render()?)
        }
        PlotKind::Temperature => {
            let duration = tau_h.unwrap_or(2.0 * cfg.target_peak_ms);
            let stroke = run_heating(&cfg.cycle, duration)?;
            let ladder = zeeman_ladder(cfg.cycle.b1, cfg.cycle.levels)?;
            let fits = temperature_trace(&stroke.trajectory, &ladder)?;
            let chart = temperature_trace_chart(stroke.trajectory.times(), &fits);
            write_file(out, "temperature.svg", &chart.render()?)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate {
            config,
            tau_h,
            out,
            format,
            epsilon,
            n,
        } => {
            let cfg = load_config(config)?;
            simulate(&cfg, *tau_h, out, *format, *epsilon, *n)
        }
        Command::Sweep {
            config,
            out,
            format,
        } => {
            let cfg = load_config(config)?;
            sweep(&cfg, out, *format)
        }
        Command::Calibrate {
            config,
            target_peak,
        } => {
            let cfg = load_config(config)?;
            let target = target_peak.unwrap_or(cfg.target_peak_ms);
            let gamma = calibrate_uniform_rate(&cfg.cycle, target)?;
            println!("gamma_per_ms = {}", fmt_sig9(gamma));
            Ok(())
        }
        Command::Fit {
            input,
            config,
            out,
            format,
        } => {
            let cfg = load_config(config)?;
            fit(&cfg, input, out, *format)
        }
        Command::Levels {
            config,
            n,
            out,
            format,
            mapping,
        } => {
            let cfg = load_config(config)?;
            levels_cmd(&cfg, n, out, *format, *mapping)
        }
        Command::Plot {
            kind,
            config,
            tau_h,
            out,
        } => {
            let cfg = load_config(config)?;
            plot(&cfg, *kind, *tau_h, out)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error[{}]: {e}", e.category());
        std::process::exit(e.exit_code());
    }
}
