use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use simplex_gauge::bundle::{trivial_bundle, AssignMode, SlotsJson};
use simplex_gauge::complex::{ComplexSpec, PointCloud, SimplicialComplex};
use simplex_gauge::group::{GaugeGroup, GroupSpec};
use simplex_gauge::runner::{
    self, fixture, parse_json, read_json_file, BundleKind, ComplexSource, ConnectionInit, ExperimentConfig, Pipeline, Stage,
};
use simplex_gauge::smith::simplicial_homology;
use simplex_gauge::stats::{cumulants, raw_moments, read_samples_csv};
use simplex_gauge::{Error, Result};

#[derive(Parser)]
#[command(name = "sgauge", version, about = "Discrete gauge theory on simplicial complexes")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Global seed; overrides the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

/// Inputs that can replace or override configuration sections.
#[derive(Args, Clone, Default)]
struct Inputs {
    /// Complex JSON file.
    #[arg(long)]
    complex: Option<PathBuf>,
    /// Group as inline JSON or a JSON file, e.g. '{"kind":"so","n":3}'.
    #[arg(long)]
    group: Option<String>,
    /// Slots JSON file.
    #[arg(long)]
    slots: Option<PathBuf>,
    /// Connection JSON file.
    #[arg(long)]
    connection: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a complex from a fixture, a JSON file or a point cloud.
    ComplexBuild {
        #[arg(long, conflicts_with_all = ["fixture", "points"])]
        input: Option<PathBuf>,
        #[arg(long)]
        fixture: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, requires = "radius")]
        points: Option<PathBuf>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
    },
    /// Integral homology of a complex read from a file or stdin.
    Homology {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Random structural-data assignment.
    BundleAssign {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1")]
        classes: Vec<i64>,
        #[arg(long, value_enum, default_value = "free")]
        mode: ModeArg,
    },
    /// Characteristic-class verdicts.
    BundleClasses {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Optimize the connection for the configured functional.
    ConnOptimize {
        #[command(flatten)]
        inputs: Inputs,
        /// Write the objective trace (JSON lines) here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Holonomy set at a base vertex.
    ConnHolonomy {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        base: Option<usize>,
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Scalar curvature per (triangle, base vertex) as CSV.
    CurvatureMap {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Gauge-fitness network as CSV.
    NetGenerate {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Z₂ spin model: frustration, ground states, annealing.
    IsingRun {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        fixture: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        uniform: Option<i8>,
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Moments and reduced moments of a samples CSV.
    StatsCumulants {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        max_order: usize,
    },
    /// Coupled field/connection evolution as JSON lines.
    Evolve {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        steps: Option<usize>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModeArg {
    Free,
    CocycleCompletion,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Config { path: "$".into(), msg: msg.into() }
}

fn read_input(path: &Option<PathBuf>) -> Result<String> {
    match path {
        Some(p) => Ok(fs::read_to_string(p)?),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn emit_bytes(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => runner::write_atomic(p, bytes),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(out: &Option<PathBuf>, v: &T) -> Result<()> {
    let mut s = serde_json::to_vec(v)?;
    s.push(b'\n');
    emit_bytes(out, &s)
}

fn parse_group(s: &str) -> Result<GroupSpec> {
    if s.trim_start().starts_with('{') {
        parse_json(s)
    } else {
        read_json_file(Path::new(s))
    }
}

/// Configuration from `--config` (or a minimal one), with input flags applied.
fn assemble(common: &Common, inputs: &Inputs, stages: Vec<Stage>) -> Result<(ExperimentConfig, PathBuf)> {
    let (mut cfg, base) = match &common.config {
        Some(p) => {
            let base = p.parent().map(Path::to_path_buf).unwrap_or_default();
            (ExperimentConfig::load(p)?, base)
        }
        None => {
            let src = inputs.complex.clone().ok_or_else(|| usage("either --config or --complex is required"))?;
            let cfg = ExperimentConfig {
                seed: 0,
                complex: ComplexSource::File { path: src },
                group: None,
                bundle: Default::default(),
                connection: Default::default(),
                field: None,
                functional: Default::default(),
                optimizer: Default::default(),
                holonomy: Default::default(),
                network: None,
                trigger: None,
                ising: None,
                evolve: None,
                stats: None,
                stages: vec![],
                output: Default::default(),
            };
            (cfg, std::env::current_dir()?)
        }
    };
    if let Some(c) = &inputs.complex {
        cfg.complex = ComplexSource::File { path: absolute(c)? };
    }
    if let Some(g) = &inputs.group {
        cfg.group = Some(parse_group(g)?);
    }
    if let Some(s) = &inputs.slots {
        cfg.bundle.kind = BundleKind::File;
        cfg.bundle.slots = Some(absolute(s)?);
    }
    if let Some(c) = &inputs.connection {
        cfg.connection.init = ConnectionInit::File;
        cfg.connection.path = Some(absolute(c)?);
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    cfg.stages = stages;
    cfg.output.dir = None;
    Ok((cfg, base))
}

fn absolute(p: &Path) -> Result<PathBuf> {
    Ok(if p.is_absolute() { p.to_path_buf() } else { std::env::current_dir()?.join(p) })
}

fn run_stages(common: &Common, inputs: &Inputs, stages: Vec<Stage>) -> Result<(Pipeline, runner::RunReport)> {
    let (cfg, base) = assemble(common, inputs, stages)?;
    let mut p = Pipeline::new(cfg, &base)?;
    let rep = p.run()?;
    Ok((p, rep))
}

fn output_file(p: &Pipeline, name: &str) -> Result<Vec<u8>> {
    p.outputs().get(name).cloned().ok_or_else(|| Error::Input(format!("stage produced no {}", name)))
}

fn execute(cli: Cli) -> Result<()> {
    let common = cli.common.clone();
    let out = &common.out;
    match cli.cmd {
        Cmd::ComplexBuild { input, fixture: fx, n, points, radius, max_dim } => {
            let c = if let Some(p) = input {
                SimplicialComplex::from_spec(&read_json_file::<ComplexSpec>(&p)?)?
            } else if let Some(name) = fx {
                fixture(&name, n).ok_or_else(|| usage(format!("unknown fixture {} (size given: {:?})", name, n)))?
            } else if let Some(p) = points {
                let r = radius.ok_or_else(|| usage("--radius is required with --points"))?;
                SimplicialComplex::build_vietoris_rips(&PointCloud::from_csv_path(&p)?, r, max_dim)?
            } else {
                let spec: ComplexSpec = parse_json(&read_input(&None)?)?;
                SimplicialComplex::from_spec(&spec)?
            };
            emit_json(out, &c.to_spec())
        }
        Cmd::Homology { input, k } => {
            let spec: ComplexSpec = parse_json(&read_input(&input)?)?;
            let c = SimplicialComplex::from_spec(&spec)?;
            match k {
                Some(k) => emit_json(out, &simplicial_homology(&c, k)),
                None => {
                    let top = c.dim().unwrap_or(0);
                    emit_json(out, &(0..=top).map(|k| simplicial_homology(&c, k)).collect::<Vec<_>>())
                }
            }
        }
        Cmd::BundleAssign { inputs, dims, density, classes, mode } => {
            let (cfg, base) = assemble(&common, &inputs, vec![])?;
            let c = runner::load_complex(&cfg.complex, &base)?;
            let g = GaugeGroup::from_spec(cfg.group.as_ref().ok_or_else(|| usage("--group is required"))?)?;
            let mode = match mode {
                ModeArg::Free => AssignMode::Free,
                ModeArg::CocycleCompletion => AssignMode::CocycleCompletion,
            };
            let b = trivial_bundle(&c, &g).assign_random(&dims, density, &classes, mode, runner::stage_seed(cfg.seed, 1001))?;
            emit_json(out, &b.slots_json())
        }
        Cmd::BundleClasses { inputs } => {
            let (cfg, base) = assemble(&common, &inputs, vec![])?;
            let c = runner::load_complex(&cfg.complex, &base)?;
            let g = GaugeGroup::from_spec(cfg.group.as_ref().ok_or_else(|| usage("--group is required"))?)?;
            let mut b = trivial_bundle(&c, &g);
            if let Some(s) = &inputs.slots.clone().or(cfg.bundle.slots.clone()) {
                b = b.with_slots_json(&read_json_file::<SlotsJson>(s)?)?;
            }
            emit_json(out, &b.characteristic_classes()?)
        }
        Cmd::ConnOptimize { inputs, trace } => {
            let (p, _) = run_stages(&common, &inputs, vec![Stage::Optimize])?;
            if let Some(t) = trace {
                runner::write_atomic(&t, &output_file(&p, "trace.jsonl")?)?;
            }
            emit_bytes(out, &output_file(&p, "connection.json")?)
        }
        Cmd::ConnHolonomy { inputs, base, max_len } => {
            let (mut cfg, dir) = assemble(&common, &inputs, vec![Stage::Holonomy])?;
            if base.is_some() {
                cfg.holonomy.base = base;
            }
            if let Some(m) = max_len {
                cfg.holonomy.max_len = m;
            }
            let mut p = Pipeline::new(cfg, &dir)?;
            p.run()?;
            emit_bytes(out, &output_file(&p, "holonomy.json")?)
        }
        Cmd::CurvatureMap { inputs } => {
            let (p, _) = run_stages(&common, &inputs, vec![Stage::Curvature])?;
            emit_bytes(out, &output_file(&p, "curvature.csv")?)
        }
        Cmd::NetGenerate { inputs } => {
            let (p, _) = run_stages(&common, &inputs, vec![Stage::Network])?;
            emit_bytes(out, &output_file(&p, "network.csv")?)
        }
        Cmd::IsingRun { inputs, fixture: fx, n, uniform, runs } => {
            let (mut cfg, dir) = if common.config.is_none() && inputs.complex.is_none() {
                let name = fx.clone().ok_or_else(|| usage("one of --config, --complex or --fixture is required"))?;
                let cfg: ExperimentConfig = parse_json(&format!(
                    r#"{{"complex":{{"kind":"fixture","name":{}{}}},"stages":["ising"]}}"#,
                    serde_json::to_string(&name)?,
                    n.map(|n| format!(",\"n\":{}", n)).unwrap_or_default()
                ))?;
                (cfg, std::env::current_dir()?)
            } else {
                assemble(&common, &inputs, vec![Stage::Ising])?
            };
            if let Some(s) = common.seed {
                cfg.seed = s;
            }
            let mut sec = cfg.ising.clone().unwrap_or_default();
            if let Some(u) = uniform {
                sec.uniform = u;
            }
            if let Some(r) = runs {
                sec.runs = r;
            }
            cfg.ising = Some(sec);
            let mut p = Pipeline::new(cfg, &dir)?;
            p.run()?;
            emit_bytes(out, &output_file(&p, "ising.json")?)
        }
        Cmd::StatsCumulants { input, max_order } => {
            let text = read_input(&input)?;
            let samples = read_samples_csv(text.as_bytes())?;
            let m = raw_moments(&samples, max_order)?;
            let k = cumulants(&m)?;
            emit_json(out, &serde_json::json!({"moments": m.to_json(), "cumulants": k.to_json()}))
        }
        Cmd::Evolve { inputs, steps } => {
            let (mut cfg, dir) = assemble(&common, &inputs, vec![Stage::Evolve])?;
            if let Some(s) = steps {
                let mut sec = cfg.evolve.clone().unwrap_or_default();
                sec.steps = s;
                cfg.evolve = Some(sec);
            }
            let mut p = Pipeline::new(cfg, &dir)?;
            p.run()?;
            emit_bytes(out, &output_file(&p, "evolve.jsonl")?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    if let Some(t) = cli.common.threads {
        if t == 0 || rayon::ThreadPoolBuilder::new().num_threads(t).build_global().is_err() {
            eprintln!("error: invalid --threads value");
            return ExitCode::from(2);
        }
    }
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(runner::exit_code(&e) as u8)
        }
    }
}
