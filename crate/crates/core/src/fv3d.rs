//! Three-dimensional analogue of [`crate::fv2d`] on nonuniform boxes with a
//! closed boundary (`u·n = 0`).

use std::sync::Arc;

use rayon::prelude::*;

use crate::fv2d::{adjusted_steps, check_cfl, check_interval, time_level, RunOutput, TraceEntry};
use crate::mesh::CartesianGrid3D;
use crate::metrics;
use crate::physics::{face_average_velocity3, NumericalFlux, VelocityField3};
use crate::{Error, Result, Scalar};

/// Cell states `α_ijm` stored at `(m * ny + j) * nx + i`.
#[derive(Debug, Clone)]
pub struct DiscreteField3D<T: Scalar> {
    grid: Arc<CartesianGrid3D<T>>,
    values: Vec<T>,
    time: T,
}

impl<T: Scalar> DiscreteField3D<T> {
    pub fn new(grid: Arc<CartesianGrid3D<T>>, values: Vec<T>, time: T) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(Error::DimensionMismatch {
                expected: grid.cell_count(),
                found: values.len(),
            });
        }
        if let Some(c) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Config(format!("cell {c} holds a non-finite value")));
        }
        Ok(Self { grid, values, time })
    }

    pub fn constant(grid: Arc<CartesianGrid3D<T>>, value: T) -> Self {
        let n = grid.cell_count();
        Self {
            grid,
            values: vec![value; n],
            time: T::zero(),
        }
    }

    pub fn grid(&self) -> &CartesianGrid3D<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn time(&self) -> T {
        self.time
    }

    pub fn get(&self, i: usize, j: usize, m: usize) -> T {
        self.values[self.grid.index(i, j, m)]
    }

    pub fn bv(&self) -> T {
        metrics::bv_xyz(&self.grid, &self.values)
    }

    pub fn volumes(&self) -> Vec<T> {
        let g = &self.grid;
        let mut v = Vec::with_capacity(g.cell_count());
        for m in 0..g.nz() {
            for j in 0..g.ny() {
                for i in 0..g.nx() {
                    v.push(g.volume(i, j, m));
                }
            }
        }
        v
    }

    pub fn mass(&self) -> T {
        metrics::mass(&self.volumes(), &self.values)
    }

    pub fn linf(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// `δ_max = 1 / (4 max(1/k_i + 1/h_j + 1/l_m) Lip(g) ‖u‖∞)`.
pub fn cfl_3d<T: Scalar>(grid: &CartesianGrid3D<T>, lip_g: T, u_sup: T) -> T {
    let denom = T::lit(4.0) * grid.max_inverse_width_sum() * lip_g * u_sup;
    if denom > T::zero() {
        T::one() / denom
    } else {
        T::infinity()
    }
}

#[derive(Clone)]
pub struct SchemeConfig3D<T: Scalar> {
    pub flux: Arc<dyn NumericalFlux<T>>,
    pub velocity: Arc<dyn VelocityField3<T>>,
    pub delta: T,
    pub u_sup: T,
}

impl<T: Scalar> SchemeConfig3D<T> {
    pub fn new(
        grid: &CartesianGrid3D<T>,
        flux: Arc<dyn NumericalFlux<T>>,
        velocity: Arc<dyn VelocityField3<T>>,
        delta: T,
        t_end: T,
    ) -> Result<Self> {
        if !(delta > T::zero()) {
            return Err(Error::InvalidTimeInterval {
                t0: 0.0,
                t1: delta.as_f64(),
            });
        }
        let u_sup = velocity.sup_bound(t_end);
        check_cfl(delta, cfl_3d(grid, flux.lipschitz(), u_sup))?;
        Ok(Self {
            flux,
            velocity,
            delta,
            u_sup,
        })
    }
}

#[inline]
fn upwind<T: Scalar>(g: &dyn NumericalFlux<T>, u: T, a: T, b: T) -> T {
    let mut f = T::zero();
    if u > T::zero() {
        f = f + u * g.eval(a, b);
    }
    if u < T::zero() {
        f = f + u * g.eval(b, a);
    }
    f
}

/// Face/time averages of one velocity component on all faces normal to
/// `axis`; boundary faces carry zero.
fn axis_velocities<T: Scalar>(grid: &CartesianGrid3D<T>, vel: &dyn VelocityField3<T>, axis: usize, t0: T, t1: T) -> Vec<T> {
    let (xe, ye, ze) = (grid.x_edges(), grid.y_edges(), grid.z_edges());
    let mut dims = [grid.nx(), grid.ny(), grid.nz()];
    dims[axis] += 1;
    (0..dims[0] * dims[1] * dims[2])
        .into_par_iter()
        .map(|f| {
            let i = f % dims[0];
            let j = (f / dims[0]) % dims[1];
            let m = f / (dims[0] * dims[1]);
            let idx = [i, j, m];
            if idx[axis] == 0 || idx[axis] == dims[axis] - 1 {
                return T::zero();
            }
            match axis {
                0 => face_average_velocity3(vel, 0, xe[i], [ye[j], ye[j + 1]], [ze[m], ze[m + 1]], t0, t1),
                1 => face_average_velocity3(vel, 1, ye[j], [xe[i], xe[i + 1]], [ze[m], ze[m + 1]], t0, t1),
                _ => face_average_velocity3(vel, 2, ze[m], [xe[i], xe[i + 1]], [ye[j], ye[j + 1]], t0, t1),
            }
        })
        .collect()
}

pub fn step3d<T: Scalar>(
    state: &DiscreteField3D<T>,
    cfg: &SchemeConfig3D<T>,
    t0: T,
    t1: T,
) -> Result<DiscreteField3D<T>> {
    let delta = check_interval(t0, t1)?;
    let grid = state.grid();
    check_cfl(delta, cfl_3d(grid, cfg.flux.lipschitz(), cfg.u_sup))?;
    let (nx, ny, nz) = (grid.nx(), grid.ny(), grid.nz());
    let vel = cfg.velocity.as_ref();
    let u = axis_velocities(grid, vel, 0, t0, t1);
    let v = axis_velocities(grid, vel, 1, t0, t1);
    let w = axis_velocities(grid, vel, 2, t0, t1);
    let (k, h, l) = (grid.widths_x(), grid.widths_y(), grid.widths_z());
    let alpha = &state.values;
    let g = cfg.flux.as_ref();
    let at = |i: usize, j: usize, m: usize| alpha[(m * ny + j) * nx + i];

    let mut out = vec![T::zero(); alpha.len()];
    out.par_chunks_mut(nx).enumerate().for_each(|(row, slots)| {
        let (j, m) = (row % ny, row / ny);
        for (i, slot) in slots.iter_mut().enumerate() {
            let a = at(i, j, m);
            let fx = |fi: usize, lo: usize| {
                let uf = u[(m * ny + j) * (nx + 1) + fi];
                if fi == 0 || fi == nx { T::zero() } else { upwind(g, uf, at(lo, j, m), at(lo + 1, j, m)) }
            };
            let fy = |fj: usize, lo: usize| {
                let vf = v[(m * (ny + 1) + fj) * nx + i];
                if fj == 0 || fj == ny { T::zero() } else { upwind(g, vf, at(i, lo, m), at(i, lo + 1, m)) }
            };
            let fz = |fm: usize, lo: usize| {
                let wf = w[(fm * ny + j) * nx + i];
                if fm == 0 || fm == nz { T::zero() } else { upwind(g, wf, at(i, j, lo), at(i, j, lo + 1)) }
            };
            let dx = fx(i + 1, i) - fx(i, i.wrapping_sub(1));
            let dy = fy(j + 1, j) - fy(j, j.wrapping_sub(1));
            let dz = fz(m + 1, m) - fz(m, m.wrapping_sub(1));
            *slot = a - delta / k[i] * dx - delta / h[j] * dy - delta / l[m] * dz;
        }
    });
    Ok(DiscreteField3D {
        grid: state.grid.clone(),
        values: out,
        time: t1,
    })
}

pub fn run3d<T: Scalar>(
    initial: &DiscreteField3D<T>,
    cfg: &SchemeConfig3D<T>,
    final_time: T,
) -> Result<RunOutput<T, DiscreteField3D<T>>> {
    let t_start = initial.time();
    let (steps, delta) = adjusted_steps(final_time - t_start, cfg.delta);
    let vols = initial.volumes();
    let entry = |n, f: &DiscreteField3D<T>, bt| TraceEntry {
        step: n,
        time: f.time(),
        bv: f.bv(),
        linf: f.linf(),
        mass: metrics::mass(&vols, f.values()),
        bv_time: bt,
    };
    let mut field = initial.clone();
    let mut bv_time = T::zero();
    let mut trace = vec![entry(0, &field, bv_time)];
    for n in 0..steps {
        let t0 = time_level(t_start, final_time, n, steps);
        let t1 = time_level(t_start, final_time, n + 1, steps);
        let next = step3d(&field, cfg, t0, t1)?;
        bv_time = bv_time + metrics::bv_time(&vols, &[field.values, next.values.clone()]);
        field = next;
        trace.push(entry(n + 1, &field, bv_time));
    }
    Ok(RunOutput {
        field,
        trace,
        steps,
        delta,
    })
}
