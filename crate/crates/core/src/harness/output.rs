use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::experiment::{ConvergenceRow, ExperimentResult, Snapshot};
use crate::mesh::PERTURBATION_THETA;
use crate::metrics::ErrorNorms;
use crate::physics::CaseName;
use crate::{Error, Result, Scalar};

/// Metric columns in output order.
const METRICS: [&str; 12] = [
    "h", "h_mesh", "delta", "delta_used", "linf", "l1", "l2", "bv", "linf_rate", "l1_rate", "l2_rate", "bv_rate",
];

/// Scientific notation with three significant digits and a signed
/// two-digit exponent, e.g. `2.02e+01`.
pub fn format_sci3(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.2e}");
    let (mant, exp) = s.split_once('e').expect("exponent format");
    let e: i32 = exp.parse().expect("integer exponent");
    format!("{mant}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
}

fn metric_values<T: Scalar>(r: &ConvergenceRow<T>) -> [Option<f64>; 12] {
    let e = r.errors;
    [
        Some(r.h.as_f64()),
        Some(r.h_mesh.as_f64()),
        Some(r.delta.as_f64()),
        Some(r.delta_used.as_f64()),
        e.map(|e| e.linf.as_f64()),
        e.map(|e| e.l1.as_f64()),
        e.map(|e| e.l2.as_f64()),
        Some(r.bv.as_f64()),
        r.linf_rate.map(T::as_f64),
        r.l1_rate.map(T::as_f64),
        r.l2_rate.map(T::as_f64),
        r.bv_rate.map(T::as_f64),
    ]
}

/// Run metadata emitted as `# key: value` lines.
pub fn metadata<T: Scalar>(result: &ExperimentResult<T>) -> Vec<(String, String)> {
    let c = &result.config;
    let case = c.case.build::<f64>();
    let mut m = vec![
        ("case".to_string(), format!("{} ({})", c.case, c.case.description())),
        ("mesh".to_string(), c.family.to_string()),
        ("seed".to_string(), c.seed.to_string()),
        ("final_time".to_string(), format!("{:e}", result.final_time.as_f64())),
        ("boundary".to_string(), case.boundary().name().to_string()),
        (
            "quadrature".to_string(),
            "3-point Gauss per direction for face velocities, sources and flux averages".to_string(),
        ),
        (
            "initial_data".to_string(),
            "cell averages of the initial field".to_string(),
        ),
        (
            "errors".to_string(),
            "against cell averages of the exact solution at the final time".to_string(),
        ),
        (
            "bv".to_string(),
            "sum over interior faces of |face| * |jump|".to_string(),
        ),
        (
            "rates".to_string(),
            "log(v_k / v_{k-1}) / log(h_mesh_k / h_mesh_{k-1})".to_string(),
        ),
        (
            "time_step".to_string(),
            "delta_used = T / ceil(T / delta)".to_string(),
        ),
    ];
    if c.case == CaseName::Ex3Nonlinear {
        m.push(("splitting".to_string(), "M = Lip(F) over the sampled region".to_string()));
    }
    match c.family {
        crate::mesh::MeshFamily::PerturbedCartesian => m.push((
            "mesh_params".to_string(),
            format!("interior vertices moved uniformly in a disk of radius {PERTURBATION_THETA} h"),
        )),
        crate::mesh::MeshFamily::Staggered => m.push((
            "mesh_params".to_string(),
            "odd rows shifted by h/2, end cells 3h/2 wide".to_string(),
        )),
        crate::mesh::MeshFamily::Hexagonal => m.push((
            "mesh_params".to_string(),
            "flat-topped honeycomb stretched to the domain, clipped at the boundary".to_string(),
        )),
        _ => {}
    }
    m
}

/// Writes metadata comments, a header and one line per row. Each metric
/// appears rounded to three digits and again at full precision in a
/// `*_full` column; missing values are `-`.
pub fn emit_csv<T: Scalar, W: Write>(result: &ExperimentResult<T>, out: W) -> Result<()> {
    if result.rows.is_empty() {
        return Err(Error::Config("nothing to write: no rows".into()));
    }
    let mut out = out;
    for (k, v) in metadata(result) {
        writeln!(out, "# {k}: {v}")?;
    }
    let mut w = csv::WriterBuilder::new().from_writer(out);
    let mut header: Vec<String> = vec!["row".into(), "cells".into(), "steps".into()];
    header.extend(METRICS.iter().map(|m| m.to_string()));
    header.extend(METRICS.iter().map(|m| format!("{m}_full")));
    w.write_record(&header).map_err(csv_err)?;
    for (k, r) in result.rows.iter().enumerate() {
        let vals = metric_values(r);
        let mut rec = vec![k.to_string(), r.cells.to_string(), r.steps.to_string()];
        rec.extend(vals.iter().map(|v| v.map_or("-".to_string(), format_sci3)));
        rec.extend(vals.iter().map(|v| v.map_or("-".to_string(), |x| format!("{x:e}"))));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file<T: Scalar>(result: &ExperimentResult<T>, path: &Path) -> Result<()> {
    emit_csv(result, BufWriter::new(File::create(path)?))
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse {
            line: 0,
            message: format!("{other:?}"),
        },
    }
}

/// A table read back from [`emit_csv`] output (full-precision columns).
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTable {
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<ConvergenceRow<f64>>,
}

pub fn parse_csv(text: &str) -> Result<ParsedTable> {
    let metadata = text
        .lines()
        .filter_map(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once(": "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = rd.headers().map_err(csv_err)?.clone();
    let col = |name: &str| {
        header.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("missing column {name}"),
        })
    };
    let mut idx = [0usize; 12];
    for (k, m) in METRICS.iter().enumerate() {
        idx[k] = col(&format!("{m}_full"))?;
    }
    let (c_cells, c_steps) = (col("cells")?, col("steps")?);
    let mut rows = Vec::new();
    for (n, rec) in rd.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = n + 1;
        let field = |c: usize| -> Result<Option<f64>> {
            match rec.get(c) {
                Some("-") => Ok(None),
                Some(s) => s.parse::<f64>().map(Some).map_err(|_| Error::Parse {
                    line,
                    message: format!("bad number '{s}'"),
                }),
                None => Err(Error::Parse {
                    line,
                    message: "short record".into(),
                }),
            }
        };
        let int = |c: usize| -> Result<usize> {
            rec.get(c).and_then(|s| s.parse().ok()).ok_or_else(|| Error::Parse {
                line,
                message: "bad integer".into(),
            })
        };
        let v: Vec<Option<f64>> = idx.iter().map(|&c| field(c)).collect::<Result<_>>()?;
        let req = |k: usize| {
            v[k].ok_or_else(|| Error::Parse {
                line,
                message: format!("{} may not be empty", METRICS[k]),
            })
        };
        let errors = match (v[4], v[5], v[6]) {
            (Some(linf), Some(l1), Some(l2)) => Some(ErrorNorms { linf, l1, l2 }),
            _ => None,
        };
        rows.push(ConvergenceRow {
            h: req(0)?,
            h_mesh: req(1)?,
            delta: req(2)?,
            delta_used: req(3)?,
            steps: int(c_steps)?,
            cells: int(c_cells)?,
            errors,
            bv: req(7)?,
            mass: f64::NAN,
            linf_rate: v[8],
            l1_rate: v[9],
            l2_rate: v[10],
            bv_rate: v[11],
        });
    }
    Ok(ParsedTable { metadata, rows })
}

/// gnuplot data: `x y value` per cell, blank line after each grid row for
/// structured snapshots (`splot ... with pm3d`).
pub fn write_snapshot<T: Scalar, W: Write>(snap: &Snapshot<T>, mut out: W) -> Result<()> {
    writeln!(out, "# t = {:e}", snap.time.as_f64())?;
    writeln!(out, "# x y value")?;
    for (k, p) in snap.points.iter().enumerate() {
        writeln!(out, "{:e} {:e} {:e}", p[0].as_f64(), p[1].as_f64(), p[2].as_f64())?;
        if let Some(n) = snap.row_length {
            if (k + 1) % n == 0 {
                writeln!(out)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}
