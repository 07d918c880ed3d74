mod profile;

use clap::{Parser, Subcommand};
use lcn_core::io::{
    build_mesh, canned_names, eval, parse_config, run_config_with, status_name, sweep, write_artifacts,
    write_sweep_csv, ExperimentConfig, CANNED,
};
use lcn_core::mesh::{build_edge_topology, fit_creases, read_mesh_ascii, shape_regularity, Mesh};
use lcn_core::solver::FlowStatus;
use lcn_core::{Error, Result};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_CAP: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_FAILURE: u8 = 4;

/// Finite element solver for liquid crystal network membranes.
#[derive(Parser)]
#[command(name = "lcn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file or a built-in experiment name.
    Run {
        config: String,
        /// Artifact directory, overriding `[output] dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Do not write any artifacts.
        #[arg(long, conflicts_with = "out")]
        no_output: bool,
        /// Print a progress line every this many flow steps (0 disables).
        #[arg(long, default_value_t = 25)]
        progress: usize,
    },
    /// List the built-in experiments.
    List,
    /// Print the config of a built-in experiment.
    Show { name: String },
    /// Sample a closed-form surface or initialization field on a lattice.
    SampleProfile {
        /// One of cone, half, degree2, three_half, three_half_heuristic,
        /// disc_bump, table_a, table_b, cube_rhombus.
        name: String,
        #[arg(long, default_value_t = 1.2)]
        lambda: f64,
        /// Anchor radius of the approximate profiles.
        #[arg(long, default_value_t = 0.75)]
        a: f64,
        /// Amplitude of an initialization field.
        #[arg(long)]
        amplitude: Option<f64>,
        /// Lattice cells per side.
        #[arg(long, default_value_t = 64)]
        n: usize,
        /// Sampling box `x0,y0,x1,y1`; entries may be expressions.
        #[arg(long)]
        bounds: Option<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Summarize a mesh file, or the mesh a config builds.
    MeshInfo { path: String },
    /// Rerun a config over a list of parameter values and emit a CSV table.
    Sweep {
        config: String,
        /// `name=v1,v2,...`, e.g. `h=1/32,1/64,1/128`.
        #[arg(long)]
        param: String,
        /// Write the table here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    let setup = matches!(e.stage(), Some("config" | "mesh" | "material" | "init"));
    if setup || matches!(e.root(), Error::Config { .. }) {
        EXIT_CONFIG
    } else {
        EXIT_FAILURE
    }
}

fn load_config(source: &str) -> Result<ExperimentConfig> {
    let path = Path::new(source);
    let text = if path.exists() {
        fs::read_to_string(path).map_err(|e| Error::Config {
            line: None,
            message: format!("cannot read {source}: {e}"),
        })?
    } else if let Some((_, text)) = CANNED.iter().find(|(n, _)| *n == source) {
        (*text).to_string()
    } else {
        return Err(Error::Config {
            line: None,
            message: format!("{source} is neither a file nor a built-in experiment"),
        });
    };
    parse_config(&text).map_err(|e| e.at_stage("config"))
}

fn status_code(status: FlowStatus) -> u8 {
    match status {
        FlowStatus::Converged => 0,
        FlowStatus::StepCap => EXIT_CAP,
    }
}

fn run(config: &str, out: Option<PathBuf>, no_output: bool, progress: usize) -> Result<u8> {
    let cfg = load_config(config)?;
    let outcome = run_config_with(&cfg, |r, _| {
        if progress > 0 && r.step % progress == 0 {
            eprintln!(
                "step {:>6}  E_h {:.6e}  newton {}  tau {:.3e}",
                r.step, r.energy.total, r.newton_iters, r.tau
            );
        }
    })?;
    let dir = if no_output {
        None
    } else {
        out.or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
    };
    let artifacts = match dir {
        Some(d) => write_artifacts(&outcome, &d).map_err(|e| e.at_stage("export"))?,
        None => Vec::new(),
    };
    let r = &outcome.report;
    println!("experiment     {}", r.name);
    println!("status         {}", status_name(r.status));
    println!("steps          {}", r.trace.steps.len());
    println!("energy         {:.6e}", r.energy.total);
    println!("  stretching   {:.6e}", r.energy.stretching);
    println!("  regularizer  {:.6e}", r.energy.regularization);
    println!("metric defect  {:.6e}", r.metric_defect);
    println!("seconds        {:.2}", r.seconds);
    for e in &r.expectations {
        println!(
            "expect {:<14} {:.4e} in [{:.4e}, {:.4e}]  {}",
            e.quantity,
            e.value,
            e.band[0],
            e.band[1],
            if e.pass { "ok" } else { "MISSED" }
        );
    }
    for p in &artifacts {
        println!("wrote {}", p.display());
    }
    Ok(status_code(r.status))
}

fn mesh_info(source: &str) -> Result<u8> {
    let path = Path::new(source);
    let is_config = path.extension().is_some_and(|e| e == "toml") || (!path.exists() && canned_names().any(|n| n == source));
    let (mesh, creases): (Mesh, usize) = if is_config {
        let cfg = load_config(source)?;
        let mesh = build_mesh(&cfg).map_err(|e| e.at_stage("mesh"))?;
        let segs = cfg.crease_segments();
        let creases = if segs.is_empty() {
            0
        } else {
            let topo = build_edge_topology(&mesh).map_err(|e| e.at_stage("mesh"))?;
            fit_creases(&mesh, &topo, &segs).map_err(|e| e.at_stage("mesh"))?.edges.len()
        };
        (mesh, creases)
    } else {
        let file = File::open(path).map_err(|e| Error::Config {
            line: None,
            message: format!("cannot open {source}: {e}"),
        })?;
        (read_mesh_ascii(BufReader::new(file)).map_err(|e| e.at_stage("mesh"))?, 0)
    };
    let topo = build_edge_topology(&mesh)?;
    println!("vertices         {}", mesh.num_vertices());
    println!("elements         {}", mesh.num_elements());
    println!("interior edges   {}", topo.num_interior());
    println!("boundary edges   {}", topo.boundary_edges.len());
    println!("crease edges     {creases}");
    println!("area             {:.12}", mesh.total_area());
    println!("h                {:.6e}", mesh.h);
    println!("max diameter     {:.6e}", mesh.max_diameter());
    println!("min diameter     {:.6e}", mesh.min_diameter());
    println!("shape regularity {:.4}", shape_regularity(&mesh)?);
    Ok(0)
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|v| {
            eval(v.trim()).map_err(|e| Error::Config {
                line: None,
                message: format!("bad value '{v}': {e}"),
            })
        })
        .collect()
}

fn run_sweep(config: &str, param: &str, out: Option<PathBuf>) -> Result<u8> {
    let cfg = load_config(config)?;
    let (name, values) = param.split_once('=').ok_or_else(|| Error::Config {
        line: None,
        message: format!("--param must look like name=v1,v2, got '{param}'"),
    })?;
    let values = parse_list(values)?;
    let rows = sweep(&cfg, name.trim(), &values)?;
    match out {
        Some(p) => {
            let mut w = BufWriter::new(File::create(&p)?);
            write_sweep_csv(&mut w, name.trim(), &rows)?;
            w.flush()?;
        }
        None => write_sweep_csv(std::io::stdout().lock(), name.trim(), &rows)?,
    }
    Ok(rows.iter().map(|r| status_code(r.status)).max().unwrap_or(0))
}

fn dispatch(command: Command) -> Result<u8> {
    match command {
        Command::Run {
            config,
            out,
            no_output,
            progress,
        } => run(&config, out, no_output, progress),
        Command::List => {
            let mut out = std::io::stdout().lock();
            for (name, text) in CANNED {
                let desc = parse_config(text).map(|c| c.description).unwrap_or_default();
                if writeln!(out, "{name:<30} {desc}").is_err() {
                    break;
                }
            }
            Ok(0)
        }
        Command::Show { name } => {
            let (_, text) = CANNED.iter().find(|(n, _)| *n == name).ok_or_else(|| Error::Config {
                line: None,
                message: format!("no built-in experiment named '{name}'"),
            })?;
            print!("{text}");
            Ok(0)
        }
        Command::SampleProfile {
            name,
            lambda,
            a,
            amplitude,
            n,
            bounds,
            out,
        } => {
            let bounds = match bounds {
                Some(b) => {
                    let v = parse_list(&b)?;
                    let arr: [f64; 4] = v.try_into().map_err(|_| Error::Config {
                        line: None,
                        message: "--bounds needs four values".into(),
                    })?;
                    Some(arr)
                }
                None => None,
            };
            if !profile::NAMES.contains(&name.as_str()) {
                return Err(Error::Config {
                    line: None,
                    message: format!("unknown profile '{name}', expected one of {}", profile::NAMES.join(", ")),
                });
            }
            let args = profile::ProfileArgs {
                lambda,
                a,
                amplitude,
                n,
                bounds,
            };
            let files = profile::sample_profile(&name, &args, &out).map_err(|e| e.at_stage("config"))?;
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(0)
        }
        Command::MeshInfo { path } => mesh_info(&path),
        Command::Sweep { config, param, out } => run_sweep(&config, &param, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
