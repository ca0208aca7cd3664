use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use windpath::windsim::{run_legacy_feas, SimLog};
use windpath::{run, ConfigError, FeasibilityParams, Scenario};
use windpath_cli::{metrics, sweep, MetricsReport, ScenarioFile, SweepSpec};

#[derive(Parser)]
#[command(
    name = "windpath",
    version,
    about = "Wind-aware path-following simulation and analysis"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate one scenario file; prints metrics as JSON
    Run {
        scenario: PathBuf,
        /// Directory receiving <name>_log.csv and <name>_metrics.json
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the scenario's simulation seed
        #[arg(long)]
        seed: Option<u64>,
        /// Use the superseded sharp feasibility weight (regression studies)
        #[arg(long)]
        legacy_feas: bool,
    },
    /// Simulate every .toml scenario in a directory
    Batch {
        dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate the steady-state airspeed map over a wind/bearing grid
    Sweep {
        /// Grid spec as TOML; defaults cover 0-15 m/s and all bearings
        #[arg(long)]
        spec: Option<PathBuf>,
        /// CSV output path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a complete scenario file with every default spelled out
    Defaults,
    /// Compare 32-bit and 64-bit feasibility over a dense grid
    Conformance,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn simulate(
    file: &ScenarioFile,
    seed: Option<u64>,
    legacy: bool,
) -> Result<(Scenario, SimLog, MetricsReport)> {
    let mut file = file.clone();
    if let Some(seed) = seed {
        file.sim.seed = seed;
    }
    let scenario = file.to_scenario()?;
    let log = if legacy {
        run_legacy_feas(&scenario)
    } else {
        run(&scenario)
    }
    .with_context(|| format!("running scenario \"{}\"", file.name))?;
    let report = metrics::compute(&file.name, &scenario, &log);
    Ok((scenario, log, report))
}

fn write_outputs(out: &Path, name: &str, log: &SimLog, report: &MetricsReport) -> Result<()> {
    let mut csv = Vec::new();
    log.write_csv(&mut csv)?;
    write_atomic(&out.join(format!("{name}_log.csv")), &csv)?;
    let json = serde_json::to_string_pretty(report)?;
    write_atomic(&out.join(format!("{name}_metrics.json")), json.as_bytes())?;
    Ok(())
}

fn cmd_run(path: &Path, out: Option<&Path>, seed: Option<u64>, legacy: bool) -> Result<()> {
    let file = ScenarioFile::load(path)?;
    let (_, log, report) = simulate(&file, seed, legacy)?;
    if let Some(out) = out {
        write_outputs(out, &file.name, &log, &report)?;
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn cmd_batch(dir: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<()> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "toml"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no .toml scenarios in {}", dir.display());
    }

    let results: Vec<(PathBuf, Result<String>)> = paths
        .par_iter()
        .map(|path| {
            let outcome = (|| {
                let file = ScenarioFile::load(path)?;
                let (_, log, report) = simulate(&file, seed, false)?;
                if let Some(out) = out {
                    write_outputs(out, &file.name, &log, &report)?;
                }
                Ok(format!(
                    "{}: terminal_error={:.3} m, max_error={:.3} m, max_heading_step={:.3} deg",
                    report.scenario,
                    report.terminal_track_error,
                    report.track_error_max,
                    report.heading_ref_max_step_deg
                ))
            })();
            (path.clone(), outcome)
        })
        .collect();

    let mut failed = None;
    for (path, outcome) in results {
        match outcome {
            Ok(line) => println!("{line}"),
            Err(err) => {
                eprintln!("{}: {err:#}", path.display());
                failed.get_or_insert(err);
            }
        }
    }
    match failed {
        Some(err) => Err(err),
        None => Ok(()),
    }
}

fn cmd_sweep(spec: Option<&Path>, out: Option<&Path>) -> Result<()> {
    let spec = match spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            toml::from_str::<SweepSpec>(&text)
                .with_context(|| format!("parsing {}", path.display()))?
        }
        None => SweepSpec::default(),
    };
    let cells = sweep::run_sweep(&spec)?;
    let mut csv = Vec::new();
    sweep::write_csv(&cells, &mut csv)?;
    match out {
        Some(path) => write_atomic(path, &csv)?,
        None => print!("{}", String::from_utf8(csv)?),
    }
    Ok(())
}

fn cmd_conformance() -> Result<()> {
    let gap = sweep::f32_conformance_max_gap(&FeasibilityParams::default());
    println!("max |feas_f32 - feas_f64| = {gap:.3e}");
    if gap > 1e-4 {
        bail!("32-bit feasibility diverges from 64-bit by {gap:.3e}");
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Run {
            scenario,
            out,
            seed,
            legacy_feas,
        } => cmd_run(&scenario, out.as_deref(), seed, legacy_feas),
        Cmd::Batch { dir, out, seed } => cmd_batch(&dir, out.as_deref(), seed),
        Cmd::Sweep { spec, out } => cmd_sweep(spec.as_deref(), out.as_deref()),
        Cmd::Defaults => {
            print!("{}", ScenarioFile::example().to_toml_string()?);
            Ok(())
        }
        Cmd::Conformance => cmd_conformance(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let config_problem = err.is::<ConfigError>()
                || err.is::<toml::de::Error>()
                || err.chain().any(|c| {
                    c.downcast_ref::<ConfigError>().is_some()
                        || c.downcast_ref::<toml::de::Error>().is_some()
                });
            if config_problem {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
