use std::sync::Arc;

use rayon::prelude::*;

use super::config::ExperimentConfig;
use crate::fv2d::{self, BoundaryClosure, SchemeConfig};
use crate::fvnl::{NonlinearClosure, SplitScheme};
use crate::fvpoly::{self, PolyScheme};
use crate::mesh::{build_family, CartesianGrid2D, MeshFamily};
use crate::metrics::{self, ErrorNorms};
use crate::physics::{make_split, Boundary, Case, Godunov, NonlinearCase, TransportCase};
use crate::{Error, Result, Scalar};

/// One line of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow<T> {
    /// Nominal mesh size from the configuration.
    pub h: T,
    /// Measured mesh size (longest edge); rates use this one.
    pub h_mesh: T,
    /// Requested time step.
    pub delta: T,
    /// Step actually taken, `T / steps`.
    pub delta_used: T,
    pub steps: usize,
    pub cells: usize,
    pub errors: Option<ErrorNorms<T>>,
    pub bv: T,
    pub mass: T,
    pub linf_rate: Option<T>,
    pub l1_rate: Option<T>,
    pub l2_rate: Option<T>,
    pub bv_rate: Option<T>,
}

/// Final cell values at cell centroids, for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T> {
    pub time: T,
    /// `(x, y, α)` per cell.
    pub points: Vec<[T; 3]>,
    /// Cells per grid row for structured output; `None` for polygonal meshes.
    pub row_length: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult<T> {
    pub config: ExperimentConfig,
    pub final_time: T,
    pub rows: Vec<ConvergenceRow<T>>,
    /// Solution on the finest row.
    pub snapshot: Snapshot<T>,
}

fn transport_closure<T: Scalar>(c: &TransportCase<T>) -> Result<BoundaryClosure<T>> {
    match c.boundary {
        Boundary::ZeroFlux => Ok(BoundaryClosure::ZeroFlux),
        Boundary::ExactInflow => c
            .exact
            .clone()
            .map(BoundaryClosure::Ghost)
            .ok_or_else(|| Error::Config("inflow boundary needs an exact solution".into())),
        Boundary::Mirror => Err(Error::Config("mirror closure is only defined for the split scheme".into())),
    }
}

struct Solved<T> {
    row: ConvergenceRow<T>,
    snapshot: Snapshot<T>,
}

fn partial_row<T: Scalar>(h: T, h_mesh: T, delta: T, out_delta: T, steps: usize, cells: usize) -> ConvergenceRow<T> {
    ConvergenceRow {
        h,
        h_mesh,
        delta,
        delta_used: out_delta,
        steps,
        cells,
        errors: None,
        bv: T::zero(),
        mass: T::zero(),
        linf_rate: None,
        l1_rate: None,
        l2_rate: None,
        bv_rate: None,
    }
}

fn grid_snapshot<T: Scalar>(grid: &CartesianGrid2D<T>, values: &[T], time: T) -> Snapshot<T> {
    let mut points = Vec::with_capacity(values.len());
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let [x, y] = grid.center(i, j);
            points.push([x, y, values[grid.index(i, j)]]);
        }
    }
    Snapshot {
        time,
        points,
        row_length: Some(grid.nx()),
    }
}

fn solve_transport<T: Scalar>(c: &TransportCase<T>, family: MeshFamily, h: T, delta: T, t_end: T, seed: u64) -> Result<Solved<T>> {
    let closure = transport_closure(c)?;
    let flux = Arc::new(Godunov(c.flux));
    if family == MeshFamily::Cartesian {
        let grid = Arc::new(CartesianGrid2D::uniform_with_size(c.domain, h)?);
        let mut cfg = SchemeConfig::new(&grid, flux, c.velocity.clone(), delta, t_end)?.with_boundary(closure);
        if let Some(s) = &c.source {
            cfg = cfg.with_source(s.clone());
        }
        let f0 = fv2d::project_initial(c.initial.as_ref(), grid.clone());
        let out = fv2d::run(&f0, &cfg, t_end)?;
        let values = out.field.values();
        let mut row = partial_row(h, grid.h_max(), delta, out.delta, out.steps, grid.cell_count());
        row.errors = c.exact.as_ref().map(|e| metrics::error_norms(&grid, values, e.as_ref(), t_end));
        row.bv = out.field.bv();
        row.mass = out.field.mass();
        Ok(Solved {
            row,
            snapshot: grid_snapshot(&grid, values, t_end),
        })
    } else {
        let mesh = Arc::new(build_family(family, c.domain, h, seed)?);
        let mut scheme = PolyScheme::new(&mesh, flux, c.velocity.clone(), delta)?.with_boundary(closure);
        if let Some(s) = &c.source {
            scheme = scheme.with_source(s.clone());
        }
        let f0 = fvpoly::project_initial_poly(c.initial.as_ref(), mesh.clone());
        let out = fvpoly::run_poly(&f0, &scheme, t_end)?;
        let values = out.field.values();
        let mut row = partial_row(h, mesh.h_max(), delta, out.delta, out.steps, mesh.cell_count());
        row.errors = c.exact.as_ref().map(|e| metrics::error_norms_poly(&mesh, values, e.as_ref(), t_end));
        row.bv = out.field.bv();
        row.mass = out.field.mass();
        let points = mesh
            .cells()
            .iter()
            .zip(values)
            .map(|(cell, &v)| [cell.centroid[0], cell.centroid[1], v])
            .collect();
        Ok(Solved {
            row,
            snapshot: Snapshot {
                time: t_end,
                points,
                row_length: None,
            },
        })
    }
}

fn solve_nonlinear<T: Scalar>(c: &NonlinearCase<T>, h: T, delta: T, t_end: T) -> Result<Solved<T>> {
    let grid = Arc::new(CartesianGrid2D::uniform_with_size(c.domain, h)?);
    let (lx, ly) = c.flux.lipschitz_components(&c.region);
    let split = make_split(c.flux.clone(), lx.max(ly), &c.region)?;
    let closure = match c.boundary {
        Boundary::Mirror => NonlinearClosure::Mirror,
        Boundary::ZeroFlux => NonlinearClosure::ZeroFlux,
        Boundary::ExactInflow => return Err(Error::Config("the split scheme has no inflow closure".into())),
    };
    let mut scheme = SplitScheme::new(&grid, split, delta)?.with_closure(closure);
    if let Some(s) = &c.source {
        scheme = scheme.with_source(s.clone());
    }
    let f0 = fv2d::project_initial(c.initial.as_ref(), grid.clone());
    let out = crate::fvnl::run_nonlinear(&f0, &scheme, t_end)?;
    let values = out.field.values();
    let mut row = partial_row(h, grid.h_max(), delta, out.delta, out.steps, grid.cell_count());
    row.errors = c.exact.as_ref().map(|e| metrics::error_norms(&grid, values, e.as_ref(), t_end));
    row.bv = out.field.bv();
    row.mass = out.field.mass();
    Ok(Solved {
        row,
        snapshot: grid_snapshot(&grid, values, t_end),
    })
}

/// Runs every refinement row (in parallel) and fills in the rates between
/// consecutive rows.
pub fn run_experiment<T: Scalar>(config: &ExperimentConfig) -> Result<ExperimentResult<T>> {
    config.validate()?;
    let case = config.case.build::<T>();
    let t_end = config.final_time.map(T::lit).unwrap_or_else(|| case.final_time());
    let solved: Vec<Solved<T>> = config
        .rows
        .par_iter()
        .enumerate()
        .map(|(k, r)| {
            let (h, delta) = (T::lit(r.h), T::lit(r.delta));
            let res = match &case {
                Case::Transport(c) => solve_transport(c, config.family, h, delta, t_end, config.seed),
                Case::Nonlinear(c) => solve_nonlinear(c, h, delta, t_end),
            };
            res.map_err(|e| Error::Row {
                row: k,
                h: r.h,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<ConvergenceRow<T>> = Vec::with_capacity(solved.len());
    let mut snapshot = None;
    for s in solved {
        let mut row = s.row;
        if let Some(prev) = rows.last() {
            let r = |a: T, b: T| metrics::rate(a, b, row.h_mesh, prev.h_mesh);
            row.bv_rate = r(row.bv, prev.bv);
            if let (Some(e), Some(p)) = (row.errors, prev.errors) {
                row.linf_rate = r(e.linf, p.linf);
                row.l1_rate = r(e.l1, p.l1);
                row.l2_rate = r(e.l2, p.l2);
            }
        }
        rows.push(row);
        snapshot = Some(s.snapshot);
    }
    Ok(ExperimentResult {
        config: config.clone(),
        final_time: t_end,
        rows,
        snapshot: snapshot.expect("validated configs have at least one row"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::RowSpec;
    use crate::physics::CaseName;

    fn small(case: CaseName, rows: usize) -> ExperimentConfig {
        let mut c = ExperimentConfig::preset(case);
        c.rows.truncate(rows);
        c
    }

    #[test]
    fn single_row_has_no_rates() {
        let r = run_experiment::<f64>(&small(CaseName::Ex1Linear, 1)).unwrap();
        assert_eq!(r.rows.len(), 1);
        let row = r.rows[0];
        assert!(row.bv_rate.is_none() && row.l1_rate.is_none());
        assert_eq!((row.cells, row.steps), (16, 4));
        assert!(row.errors.is_some());
    }

    #[test]
    fn rates_follow_adjacent_rows() {
        let r = run_experiment::<f64>(&small(CaseName::Ex1Linear, 3)).unwrap();
        for w in r.rows.windows(2) {
            let want = metrics::rate(w[1].bv, w[0].bv, w[1].h_mesh, w[0].h_mesh);
            assert_eq!(w[1].bv_rate, want);
            let e = (w[1].errors.unwrap().l1, w[0].errors.unwrap().l1);
            assert_eq!(w[1].l1_rate, metrics::rate(e.0, e.1, w[1].h_mesh, w[0].h_mesh));
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let c = small(CaseName::Ex2Linear, 2).with_family(MeshFamily::PerturbedCartesian);
        let a = run_experiment::<f64>(&c).unwrap();
        let b = run_experiment::<f64>(&c).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.snapshot, b.snapshot);
    }

    #[test]
    fn cfl_refusal_names_the_row() {
        let mut c = small(CaseName::Ex1Linear, 2);
        c.rows[1] = RowSpec { h: 0.25, delta: 2.0 };
        match run_experiment::<f64>(&c) {
            Err(Error::Row { row: 1, source, .. }) => assert!(matches!(*source, Error::CflViolation { .. })),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unsupported_mesh_is_a_config_error() {
        let c = small(CaseName::Despres, 1).with_family(MeshFamily::Triangular);
        assert!(matches!(run_experiment::<f64>(&c), Err(Error::Config(_))));
    }
}
