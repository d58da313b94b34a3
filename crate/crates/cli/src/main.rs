mod config;
mod ndbc;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use wavedesal_core::geometry::{build_geometry, hydrostatic_stiffness};
use wavedesal_core::hydro::{geometry_hash, mesh_resolution};
use wavedesal_core::optimizer::{run_workflow, write_history_csv, OptimizationReport, Workflow};
use wavedesal_core::params::PARAMS_SCHEMA;
use wavedesal_core::pipeline::{evaluate_for, Evaluation, Objective};
use wavedesal_core::seastates::two_level_cluster;
use wavedesal_core::{DesignVector, ParameterSet, SeaState};

use config::{config_error, ConfigError, Run, RUN_SCHEMA};

pub const EVALUATION_SCHEMA: &str = "wavedesal.evaluation/1";
pub const SUMMARY_HEADER: [&str; 12] = ["index", "tp", "hs", "w", "t", "m", "l1", "ap", "vacc", "p0", "qpmax", "lcow"];

#[derive(Parser)]
#[command(name = "wavedesal", version, about = "Wave-driven reverse-osmosis co-design toolkit")]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one design and write its report.
    Evaluate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the simulated time series as CSV.
        #[arg(long)]
        dump_timeseries: bool,
    },
    /// All-at-once optimization of the eight design variables.
    Optimize(WorkflowArgs),
    /// Sequential optimization: flap, then PTO on feed cost, then plant.
    SdoA(WorkflowArgs),
    /// Sequential optimization: flap, then plant, then PTO.
    SdoB(WorkflowArgs),
    /// Optimize every sea state of a set and summarize the best designs.
    Sensitivity {
        #[command(flatten)]
        args: WorkflowArgs,
        #[arg(long, value_enum, default_value_t = WorkflowArg::Mdo)]
        workflow: WorkflowArg,
    },
    /// Two-level k-means of buoy records into representative sea states.
    ClusterSeastates {
        /// Comma-separated station ids.
        #[arg(long, value_delimiter = ',', required = true)]
        stations: Vec<String>,
        /// Year or inclusive range, e.g. 2015-2024.
        #[arg(long)]
        years: String,
        #[arg(long, default_value_t = 10)]
        k1: usize,
        #[arg(long, default_value_t = 20)]
        k2: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Directory holding (or caching) the station files.
        #[arg(long, default_value = "ndbc")]
        data_dir: PathBuf,
        /// Download missing yearly archives into the data directory.
        #[arg(long)]
        fetch: bool,
    },
    /// Panel counts and geometry hash for an external BEM run.
    MeshInfo {
        /// Flap width, m.
        #[arg(long)]
        w: Option<f64>,
        /// Flap thickness, m.
        #[arg(long)]
        t: Option<f64>,
        /// Parameter file; built-in defaults otherwise.
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Check a run configuration or parameter file.
    ValidateConfig { path: PathBuf },
}

#[derive(clap::Args)]
struct WorkflowArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WorkflowArg {
    Mdo,
    SdoA,
    SdoB,
}

impl From<WorkflowArg> for Workflow {
    fn from(w: WorkflowArg) -> Self {
        match w {
            WorkflowArg::Mdo => Workflow::Mdo,
            WorkflowArg::SdoA => Workflow::SdoA,
            WorkflowArg::SdoB => Workflow::SdoB,
        }
    }
}

fn workflow_name(w: Workflow) -> &'static str {
    match w {
        Workflow::Mdo => "mdo",
        Workflow::SdoA => "sdo-a",
        Workflow::SdoB => "sdo-b",
    }
}

#[derive(Serialize)]
struct EvaluationReport<'a> {
    schema: &'static str,
    seed: u64,
    hs: f64,
    tp: f64,
    parameters_checksum: String,
    evaluation: &'a Evaluation,
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    let mut f = create(path)?;
    f.write_all(text.as_bytes())?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

fn cmd_evaluate(config: &Path, out: Option<&Path>, dump: bool) -> anyhow::Result<()> {
    let run = Run::load(config)?;
    let dir = run.output_dir(out);
    let ss = run.sea_state()?;
    let ctx = run.context(ss)?;
    let design = run.design()?;
    let e = evaluate_for(&design, &ctx, Objective::Lcow, dump);
    let report = EvaluationReport {
        schema: EVALUATION_SCHEMA,
        seed: run.config.seed,
        hs: ss.hs,
        tp: ss.tp,
        parameters_checksum: run.params.checksum(),
        evaluation: &e,
    };
    write_text(&dir.join("evaluation.json"), &serde_json::to_string_pretty(&report)?)?;
    if dump {
        match &e.series {
            Some(series) => {
                let mut f = create(&dir.join("timeseries.csv"))?;
                series.write_csv(&mut f)?;
                f.flush()?;
            }
            None => log::warn!("no time series: {}", e.failure.as_deref().unwrap_or("simulation did not run")),
        }
    }
    println!(
        "LCOW {} $/m^3, feasible {}, annual water {:.1} m^3",
        e.levelized_cost, e.feasible, e.awp
    );
    if let Some(f) = &e.failure {
        println!("failure: {f}");
    }
    Ok(())
}

fn write_workflow(dir: &Path, stem: &str, report: &OptimizationReport) -> anyhow::Result<()> {
    write_text(&dir.join(format!("{stem}.json")), &report.to_json())?;
    for stage in &report.stages {
        let mut f = create(&dir.join(format!("{stem}_{}_history.csv", stage.stage.name)))?;
        write_history_csv(&stage.history, &mut f)?;
        f.flush()?;
    }
    Ok(())
}

fn cmd_workflow(args: &WorkflowArgs, workflow: Workflow) -> anyhow::Result<()> {
    let run = Run::load(&args.config)?;
    let dir = run.output_dir(args.out.as_deref());
    let ctx = run.context(run.sea_state()?)?;
    let report = run_workflow(&ctx, workflow, &run.ga_config()?)?;
    let name = workflow_name(workflow);
    write_workflow(&dir, name, &report)?;
    println!("{name}: LCOW {} $/m^3 (nominal {})", report.lcow(), report.nominal.levelized_cost);
    Ok(())
}

fn cmd_sensitivity(args: &WorkflowArgs, workflow: Workflow) -> anyhow::Result<()> {
    let run = Run::load(&args.config)?;
    let dir = run.output_dir(args.out.as_deref());
    let ga = run.ga_config()?;
    let centers = run.sea_state_set()?;
    let contexts = centers
        .iter()
        .map(|c| SeaState::new(c.hs, c.tp).map_err(|e| config_error(e.to_string())).and_then(|ss| run.context(ss)))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let reports = contexts
        .par_iter()
        .map(|ctx| run_workflow(ctx, workflow, &ga))
        .collect::<Result<Vec<_>, _>>()?;
    let name = workflow_name(workflow);
    let mut summary = csv::Writer::from_writer(create(&dir.join("summary.csv"))?);
    summary.write_record(SUMMARY_HEADER)?;
    for (i, (c, r)) in centers.iter().zip(&reports).enumerate() {
        write_workflow(&dir.join("sensitivity"), &format!("seastate_{i:02}_{name}"), r)?;
        let d = r.best_design;
        let row = [c.tp, c.hs, d.w, d.t, d.m, d.l1, d.ap, d.vacc, d.p0, d.qpmax, r.lcow()];
        summary.write_record(std::iter::once(i.to_string()).chain(row.iter().map(f64::to_string)))?;
    }
    summary.flush()?;
    println!("{name}: {} sea states written to {}", reports.len(), dir.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_cluster(
    stations: &[String],
    years: &str,
    k1: usize,
    k2: usize,
    seed: u64,
    out: &Path,
    data_dir: &Path,
    fetch: bool,
) -> anyhow::Result<()> {
    let years = ndbc::parse_years(years).map_err(|e| config_error(format!("--years: {e}")))?;
    let per_station = ndbc::load_stations(data_dir, stations, years, fetch)?;
    let set = two_level_cluster(&per_station, k1, k2, seed)?;
    if set.collapsed {
        log::warn!("k-means collapsed to fewer distinct centers than requested");
    }
    write_text(out, &set.to_json())?;
    println!("{} sea states from {} stations written to {}", set.centers.len(), per_station.len(), out.display());
    Ok(())
}

fn cmd_mesh_info(w: Option<f64>, t: Option<f64>, params: Option<&Path>) -> anyhow::Result<()> {
    let p = ParameterSet::load(params).map_err(|e| config_error(e.to_string()))?;
    let mut design = DesignVector::literature_nominal();
    design.w = w.unwrap_or(design.w);
    design.t = t.unwrap_or(design.t);
    let geom = build_geometry::<f64>(&design, &p).map_err(|e| config_error(e.to_string()))?;
    let (nt, nw, nh) = mesh_resolution(geom.w, geom.t, geom.h);
    let g = &p.general;
    println!("width {} m, thickness {} m, height {} m", geom.w, geom.t, geom.h);
    println!("panels: thickness {nt}, width {nw}, height {nh}");
    println!("geometry hash {}", geometry_hash(&geom, g.water_depth));
    println!("hydrostatic stiffness {} N m/rad", hydrostatic_stiffness(&geom, g.water_density, g.gravity));
    Ok(())
}

fn cmd_validate(path: &Path) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
    let doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    match doc.get("schema").and_then(|s| s.as_str()) {
        Some(RUN_SCHEMA) => {
            let run = Run::load(path)?;
            println!("{}: valid {RUN_SCHEMA}, parameters checksum {}", path.display(), run.params.checksum());
        }
        Some(PARAMS_SCHEMA) => {
            let p = ParameterSet::from_json(&text).map_err(|e| config_error(e.to_string()))?;
            println!("{}: valid {PARAMS_SCHEMA}, checksum {}", path.display(), p.checksum());
        }
        other => {
            return Err(config_error(format!(
                "{}: unrecognized schema {other:?}, expected `{RUN_SCHEMA}` or `{PARAMS_SCHEMA}`",
                path.display()
            )))
        }
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(config_error("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    match &cli.command {
        Command::Evaluate { config, out, dump_timeseries } => cmd_evaluate(config, out.as_deref(), *dump_timeseries),
        Command::Optimize(a) => cmd_workflow(a, Workflow::Mdo),
        Command::SdoA(a) => cmd_workflow(a, Workflow::SdoA),
        Command::SdoB(a) => cmd_workflow(a, Workflow::SdoB),
        Command::Sensitivity { args, workflow } => cmd_sensitivity(args, (*workflow).into()),
        Command::ClusterSeastates { stations, years, k1, k2, seed, out, data_dir, fetch } => {
            cmd_cluster(stations, years, *k1, *k2, *seed, out, data_dir, *fetch)
        }
        Command::MeshInfo { w, t, params } => cmd_mesh_info(*w, *t, params.as_deref()),
        Command::ValidateConfig { path } => cmd_validate(path),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
