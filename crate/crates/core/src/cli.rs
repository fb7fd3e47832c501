//! Command-line front end. Exit status: 0 on success, 1 for usage and
//! validation problems, 2 for runtime failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::cosim::{parse_events_csv, parse_trace_csv, run, run_batch, threads_from_env, BatchJob, SimConfig, TraceLog};
use crate::error::{Error, Result};
use crate::mapbuild::{
    build_draft_network, fuse_sensor_profile, infer_junctions, parse_osm_subset, validate_topology, DraftDefaults,
    FusionConfig, SensorProfile, DEFAULT_JUNCTION_EPS, DEFAULT_JUNCTION_MIN_PTS,
};
use crate::roadnet::{geometry_error_metrics, RoadNetwork};
use crate::safety::ScenarioMetrics;
use crate::scenario::{analyze_trace, load_scenario, metrics_csv, parse_report_csv, preset, report, ScenarioSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "roadtwin", version, about = "Road twin construction, mixed-traffic co-simulation and TTC analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct RunOptions {
    /// Seed for demand headway jitter.
    #[arg(long)]
    seed: Option<u64>,
    /// Traffic step (s).
    #[arg(long)]
    macro_dt: Option<f64>,
    /// Dynamics substeps per traffic step.
    #[arg(long)]
    substeps: Option<u32>,
    /// Override the scenario horizon (s).
    #[arg(long)]
    horizon: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a lane network from an OSM extract, optionally fusing a sensor CSV.
    BuildMap {
        #[arg(long)]
        osm: PathBuf,
        /// Inclinometer/GPS CSV used to fill slope and superelevation.
        #[arg(long)]
        sensor: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// DBSCAN radius for junction inference (m).
        #[arg(long, default_value_t = DEFAULT_JUNCTION_EPS)]
        eps: f64,
        #[arg(long, default_value_t = DEFAULT_JUNCTION_MIN_PTS)]
        min_pts: usize,
        /// Check topology and fail on errors.
        #[arg(long)]
        validate: bool,
    },
    /// Run one scenario and write trace.csv and events.csv.
    Run {
        scenario: PathBuf,
        /// Road network JSON replacing the scenario's road.
        #[arg(long)]
        network: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[command(flatten)]
        opts: RunOptions,
    },
    /// Recompute TTC metrics of a recorded run.
    Analyze {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        network: Option<PathBuf>,
        /// Metrics CSV path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render metrics CSV files as the comparison table.
    Report {
        #[arg(required = true)]
        metrics: Vec<PathBuf>,
        /// Also write the machine-readable report CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print the scenario document of a reference preset (I..VIII).
    Preset {
        id: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every scenario JSON in a directory in parallel.
    Batch {
        dir: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Worker count; defaults to ROADTWIN_THREADS, 0 meaning one per core.
        #[arg(long)]
        threads: Option<usize>,
        #[command(flatten)]
        opts: RunOptions,
    },
    /// Curvature and slope errors of an estimated network against a reference.
    MetricsGeom { estimated: PathBuf, reference: PathBuf },
}

/// Parses `args` (program name first) and runs the command.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read `{}`: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn sim_config(spec: &ScenarioSpec, opts: &RunOptions) -> Result<SimConfig> {
    let mut c = spec.sim_config();
    if let Some(s) = opts.seed {
        c.seed = s;
    }
    if let Some(dt) = opts.macro_dt {
        c.macro_dt = dt;
    }
    if let Some(n) = opts.substeps {
        c.micro_substeps = n;
    }
    if let Some(h) = opts.horizon {
        c.horizon = h;
    }
    c.validate()?;
    Ok(c)
}

/// Loads a scenario file and the network it runs on.
fn load_job(path: &Path, network: Option<&Path>) -> Result<(ScenarioSpec, RoadNetwork)> {
    let text = read(path)?;
    let spec = match network {
        Some(_) => {
            let s = ScenarioSpec::from_json(&text)?;
            s.validate_document()?;
            s
        }
        None => load_scenario(&text)?,
    };
    let net = match network {
        Some(n) => {
            let mut net = RoadNetwork::from_json(&read(n)?)?;
            net.obstacles.extend(spec.obstacles.iter().cloned());
            net.validate()?;
            net
        }
        None => spec.build_network(path.parent())?,
    };
    Ok((spec, net))
}

fn write_run(dir: &Path, log: &TraceLog) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write(&dir.join("trace.csv"), &log.trace_csv())?;
    write(&dir.join("events.csv"), &log.events_csv())?;
    if let Some(m) = &log.metrics {
        write(&dir.join("metrics.csv"), &metrics_csv(std::slice::from_ref(m)))?;
    }
    Ok(())
}

fn summary(log: &TraceLog) -> String {
    let trigger = log.trigger.as_ref().map_or("none".to_string(), |t| format!("{}", t.time));
    format!(
        "scenario {}: {} steps, trigger at {}, {} collision(s)",
        log.scenario,
        log.steps.len(),
        trigger,
        log.collisions.len()
    )
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::BuildMap {
            osm,
            sensor,
            out: dest,
            eps,
            min_pts,
            validate,
        } => {
            if !(eps > 0.0) || min_pts == 0 {
                return Err(Error::Validation("--eps must be > 0 and --min-pts >= 1".into()));
            }
            let draft = parse_osm_subset(&read(&osm)?)?;
            let mut net = build_draft_network(&draft, &DraftDefaults::default())?;
            if let Some(path) = sensor {
                let file = std::fs::File::open(&path)
                    .map_err(|e| Error::Config(format!("cannot read `{}`: {e}", path.display())))?;
                let profile = SensorProfile::from_csv(file)?;
                net = fuse_sensor_profile(&net, &profile, &FusionConfig::default())?;
            }
            let net = infer_junctions(&net, eps, min_pts);
            if validate {
                let report = validate_topology(&net);
                for w in &report.warnings {
                    writeln!(out, "warning: {w}")?;
                }
                if !report.is_ok() {
                    return Err(Error::Validation(format!("topology errors: {}", report.errors.join("; "))));
                }
            }
            net.save(&dest)?;
            writeln!(
                out,
                "wrote {} lanes, {} junctions to {}",
                net.lanes.len(),
                net.junctions.len(),
                dest.display()
            )?;
        }
        Command::Run {
            scenario,
            network,
            out_dir,
            opts,
        } => {
            let (spec, net) = load_job(&scenario, network.as_deref())?;
            let config = sim_config(&spec, &opts)?;
            let sc = spec.resolve(&net)?;
            let log = run(&net, &sc, &config)?;
            write_run(&out_dir, &log)?;
            writeln!(out, "{}", summary(&log))?;
        }
        Command::Analyze {
            scenario,
            trace,
            events,
            network,
            out: dest,
        } => {
            let (spec, net) = load_job(&scenario, network.as_deref())?;
            let trace = parse_trace_csv(&read(&trace)?)?;
            let events = parse_events_csv(&read(&events)?)?;
            let m = analyze_trace(&spec, &net, &trace, &events, &spec.sim_config().ttc)?;
            let text = metrics_csv(&[m]);
            match dest {
                Some(p) => write(&p, &text)?,
                None => out.write_all(text.as_bytes())?,
            }
        }
        Command::Report { metrics, csv } => {
            let mut rows: Vec<ScenarioMetrics> = Vec::new();
            for p in &metrics {
                rows.extend(parse_report_csv(&read(p)?)?);
            }
            let r = report(&rows)?;
            out.write_all(r.render_table().as_bytes())?;
            if let Some(p) = csv {
                write(&p, &r.to_csv())?;
            }
        }
        Command::Preset { id, out: dest } => {
            let text = preset(&id)?.to_json() + "\n";
            match dest {
                Some(p) => write(&p, &text)?,
                None => out.write_all(text.as_bytes())?,
            }
        }
        Command::Batch {
            dir,
            out_dir,
            threads,
            opts,
        } => {
            let threads = match threads {
                Some(t) => t,
                None => threads_from_env()?,
            };
            let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
                .map_err(|e| Error::Config(format!("cannot read directory `{}`: {e}", dir.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            files.sort();
            if files.is_empty() {
                return Err(Error::Validation(format!("no scenario files in `{}`", dir.display())));
            }
            let mut jobs = Vec::with_capacity(files.len());
            let mut seen = std::collections::BTreeSet::new();
            for f in &files {
                let (spec, network) = load_job(f, None)?;
                if !seen.insert(spec.id.clone()) {
                    return Err(Error::Validation(format!("duplicate scenario id `{}`", spec.id)));
                }
                let config = sim_config(&spec, &opts)?;
                let scenario = spec.resolve(&network)?;
                jobs.push(BatchJob {
                    network,
                    scenario,
                    config,
                });
            }
            let results = run_batch(&jobs, threads)?;
            let mut metrics = Vec::new();
            let mut failure = None;
            for (job, res) in jobs.iter().zip(results) {
                match res {
                    Ok(log) => {
                        write_run(&out_dir.join(&job.scenario.id), &log)?;
                        writeln!(out, "{}", summary(&log))?;
                        metrics.push(log.metrics.unwrap_or(ScenarioMetrics {
                            scenario: job.scenario.id.clone(),
                            traditional: None,
                            simulated: None,
                            high_fidelity: None,
                        }));
                    }
                    Err(e) => {
                        writeln!(out, "scenario {}: failed: {e}", job.scenario.id)?;
                        failure.get_or_insert(e);
                    }
                }
            }
            if !metrics.is_empty() {
                let r = report(&metrics)?;
                write(&out_dir.join("report.txt"), &r.render_table())?;
                write(&out_dir.join("report.csv"), &r.to_csv())?;
                out.write_all(r.render_table().as_bytes())?;
            }
            if let Some(e) = failure {
                return Err(e);
            }
        }
        Command::MetricsGeom { estimated, reference } => {
            let est = RoadNetwork::from_json(&read(&estimated)?)?;
            let reference = RoadNetwork::from_json(&read(&reference)?)?;
            let m = geometry_error_metrics(&est, &reference)?;
            writeln!(out, "metric,mae,rmse")?;
            writeln!(out, "curvature,{},{}", m.curvature_mae, m.curvature_rmse)?;
            writeln!(out, "slope_rad,{},{}", m.slope_mae, m.slope_rmse)?;
            writeln!(out, "slope_percent,{},{}", m.slope_percent_mae, m.slope_percent_rmse)?;
        }
    }
    Ok(())
}
