//! Command-line front end: `run`, `check` and `version`.
//!
//! Exit status is 0 on success, 1 when the simulation diverged and 2 for
//! usage, configuration or output errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use heatplate::{
    averaged_signals, load_config, render_heatmap, run_simulation, scenario_preset, topside_statistics,
    write_field_csv, write_signals_csv, Scenario, SimulationConfig, SimulationResult,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIVERGED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "heatplate",
    about = "Closed-loop heating plate simulator",
    disable_version_flag = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a simulation and write CSV outputs
    Run(RunArgs),
    /// Validate a configuration and report the time-step advisory
    Check(SourceArgs),
    /// Print the version
    Version,
}

#[derive(Debug, Args)]
struct SourceArgs {
    /// Reference scenario (1 = nominal actuators, 2 = realistic actuators)
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2), conflicts_with = "config")]
    scenario: Option<u32>,
    /// JSON configuration file; missing fields default to scenario 1
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Grid override, e.g. 100x40
    #[arg(long, value_name = "JxK", value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// Time step override in seconds
    #[arg(long)]
    dt: Option<f64>,
    /// Final time override in seconds
    #[arg(long = "t-final")]
    t_final: Option<f64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Output directory
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Also write heatmap.pgm of the final field
    #[arg(long)]
    render: bool,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (j, k) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected JxK, got `{s}`"))?;
    let j = j.trim().parse().map_err(|e| format!("bad J in `{s}`: {e}"))?;
    let k = k.trim().parse().map_err(|e| format!("bad K in `{s}`: {e}"))?;
    Ok((j, k))
}

impl SourceArgs {
    fn resolve(&self) -> Result<SimulationConfig, String> {
        let mut cfg = match (&self.config, self.scenario) {
            (Some(path), _) => {
                let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                load_config(&text).map_err(|e| format!("{}: {e}", path.display()))?
            }
            (None, Some(n)) => scenario_preset(Scenario::from_number(n).expect("range-checked by clap")),
            (None, None) => scenario_preset(Scenario::Nominal),
        };
        if let Some((j, k)) = self.grid {
            cfg.grid.cols = j;
            cfg.grid.rows = k;
        }
        if let Some(dt) = self.dt {
            cfg.time.dt = dt;
        }
        if let Some(t) = self.t_final {
            cfg.time.t_final = t;
        }
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

/// Parses `args` (including the program name) and executes the command.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Version => {
            println!("heatplate {}", env!("CARGO_PKG_VERSION"));
            EXIT_OK
        }
        Command::Check(source) => match source.resolve() {
            Ok(cfg) => {
                check(&cfg);
                EXIT_OK
            }
            Err(msg) => {
                eprintln!("error: {msg}");
                EXIT_USAGE
            }
        },
        Command::Run(args) => {
            let cfg = match args.source.resolve() {
                Ok(cfg) => cfg,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return EXIT_USAGE;
                }
            };
            run(&cfg, &args.out, args.render)
        }
    }
}

fn check(cfg: &SimulationConfig) {
    let model = cfg.build().expect("validated");
    let theta_ref = cfg.initial.base;
    let limit = model.grid.stability_limit(&model.material, theta_ref);
    let verdict = if cfg.time.dt <= limit { "ok" } else { "exceeds limit" };
    println!(
        "config ok: grid {}x{}, dx1 = {:e} m, dx2 = {:e} m, {} steps",
        model.grid.cols(),
        model.grid.rows(),
        model.grid.dx1(),
        model.grid.dx2(),
        cfg.time.steps()
    );
    println!(
        "dt = {:e} s, advisory stability limit = {:.4e} s at {theta_ref} K: {verdict}",
        cfg.time.dt, limit
    );
}

fn run(cfg: &SimulationConfig, out: &Path, render: bool) -> i32 {
    let result = match run_simulation(cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Err(msg) = write_outputs(&result, out, render) {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }

    if let Some(d) = result.divergence {
        eprintln!(
            "diverged at step {} (t = {} s) in cell (j={}, k={})",
            d.step, d.time, d.cell.j, d.cell.k
        );
        return EXIT_DIVERGED;
    }

    let stats = topside_statistics(&result);
    let avg = averaged_signals(&result.signals);
    let last = avg.times.len() - 1;
    let mode = stats
        .dominant_mode
        .map_or_else(|| "none".to_string(), |m| m.to_string());
    println!(
        "summary: t = {} s, y_avg = {:.4} K, u_avg = {:.4} W/m^2, topside mean = {:.4} K, peak_to_peak = {:.4} K, dominant_mode = {mode}",
        avg.times[last], avg.output_mean[last], avg.input_mean[last], stats.mean, stats.peak_to_peak
    );
    EXIT_OK
}

fn write_outputs(result: &SimulationResult, out: &Path, render: bool) -> Result<(), String> {
    fs::create_dir_all(out).map_err(|e| format!("{}: {e}", out.display()))?;
    let write = |name: &str, bytes: &[u8]| {
        let path = out.join(name);
        fs::write(&path, bytes).map_err(|e| format!("{}: {e}", path.display()))
    };
    write(
        "final_field.csv",
        write_field_csv(&result.final_field, &result.grid).as_bytes(),
    )?;
    for (i, (_, field)) in result.snapshots.iter().enumerate() {
        write(
            &format!("snapshot_{i:04}.csv"),
            write_field_csv(field, &result.grid).as_bytes(),
        )?;
    }
    write("signals.csv", write_signals_csv(&result.signals).as_bytes())?;
    if render {
        let img = render_heatmap(&result.final_field, &result.grid, None).map_err(|e| e.to_string())?;
        write("heatmap.pgm", &img)?;
    }
    Ok(())
}
