use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use fvbv::harness::{
    apply_overrides, emit_csv, parse_config_file, preset_rows, run_experiment, write_snapshot, ExperimentConfig,
};
use fvbv::mesh::{build_family, write_mesh_dump, MeshFamily, Rect};
use fvbv::physics::CaseName;

#[derive(Parser)]
#[command(name = "fvbv", version, about = "Finite-volume convergence and BV-growth studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a refinement study and write the convergence table as CSV.
    Run(RunArgs),
    /// List the built-in cases with their default mesh and rows.
    ListCases,
    /// Write a polygonal mesh in the plain-text dump format.
    DumpMesh(DumpArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Case name (see `list-cases`).
    #[arg(long)]
    case: Option<String>,
    /// Mesh family: cartesian, perturbed, triangular, staggered, hexagonal.
    #[arg(long)]
    mesh: Option<String>,
    /// Number of preset rows, or a comma list of `h[:delta]` entries.
    #[arg(long)]
    rows: Option<String>,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the perturbed mesh family.
    #[arg(long)]
    seed: Option<u64>,
    /// Final time, overriding the case default.
    #[arg(long = "T", value_name = "T")]
    final_time: Option<f64>,
    /// Flat `key = value` file; its entries override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// gnuplot data file for the finest-row solution.
    #[arg(long)]
    snapshot: Option<PathBuf>,
}

#[derive(clap::Args)]
struct DumpArgs {
    /// Mesh family.
    #[arg(long, default_value = "cartesian")]
    mesh: String,
    /// Target cell size.
    #[arg(long)]
    h: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Take the domain from this case.
    #[arg(long, conflicts_with = "domain")]
    case: Option<String>,
    /// Domain as `x0,x1,y0,y1`; defaults to (-1,1)^2.
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<String>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Run(a) => run(a),
        Command::ListCases => list_cases(),
        Command::DumpMesh(a) => dump_mesh(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run_entries(a: &RunArgs) -> Result<Vec<(String, String)>> {
    let mut entries = Vec::new();
    let mut push = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            entries.push((k.to_string(), v));
        }
    };
    push("case", a.case.clone());
    push("mesh", a.mesh.clone());
    push("rows", a.rows.clone());
    push("out", a.out.as_ref().map(|p| p.display().to_string()));
    push("seed", a.seed.map(|s| s.to_string()));
    push("T", a.final_time.map(|t| t.to_string()));
    push("snapshot", a.snapshot.as_ref().map(|p| p.display().to_string()));
    if let Some(path) = &a.config {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        entries.extend(parse_config_file(&text).with_context(|| format!("in {}", path.display()))?);
    }
    Ok(entries)
}

fn run(a: RunArgs) -> Result<()> {
    let entries = run_entries(&a)?;
    let Some((_, case)) = entries.iter().rev().find(|(k, _)| k == "case") else {
        bail!("no case given; pass --case or set `case` in the config file");
    };
    let mut cfg = ExperimentConfig::preset(case.parse::<CaseName>()?);
    apply_overrides(&mut cfg, &entries)?;

    let result = run_experiment::<f64>(&cfg)?;
    match &cfg.out {
        Some(p) => {
            let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            emit_csv(&result, BufWriter::new(f))?;
            eprintln!("wrote {} rows to {}", result.rows.len(), p.display());
        }
        None => emit_csv(&result, io::stdout().lock())?,
    }
    if let Some(p) = &cfg.snapshot {
        let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
        write_snapshot(&result.snapshot, BufWriter::new(f))?;
    }
    Ok(())
}

fn list_cases() -> Result<()> {
    let mut out = io::stdout().lock();
    for case in CaseName::ALL {
        let rows = preset_rows(case);
        let meshes: Vec<&str> = MeshFamily::ALL
            .iter()
            .filter(|f| case.supports(**f))
            .map(|f| f.name())
            .collect();
        writeln!(out, "{}", case)?;
        writeln!(out, "    {}", case.description())?;
        writeln!(
            out,
            "    meshes: {} (default {}); {} preset rows, h = {} .. {}",
            meshes.join(", "),
            case.default_family(),
            rows.len(),
            rows[0].h,
            rows[rows.len() - 1].h
        )?;
    }
    Ok(())
}

fn parse_domain(s: &str) -> Result<Rect<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("domain '{s}' must be four numbers x0,x1,y0,y1"))?;
    if v.len() != 4 {
        bail!("domain '{s}' must be four numbers x0,x1,y0,y1");
    }
    Ok(Rect::new(v[0], v[1], v[2], v[3]))
}

fn dump_mesh(a: DumpArgs) -> Result<()> {
    let family: MeshFamily = a.mesh.parse()?;
    let domain = match (&a.case, &a.domain) {
        (Some(c), _) => c.parse::<CaseName>()?.build::<f64>().domain(),
        (None, Some(d)) => parse_domain(d)?,
        (None, None) => Rect::square(-1.0, 1.0),
    };
    let mesh = build_family(family, domain, a.h, a.seed)?;
    match &a.out {
        Some(p) => {
            let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            write_mesh_dump(&mesh, BufWriter::new(f))?;
        }
        None => write_mesh_dump(&mesh, io::stdout().lock())?,
    }
    Ok(())
}
