//! Explicit monotone finite-volume scheme on nonuniform 2D Cartesian grids:
//!
//! ```text
//! α^{n+1}_ij = α^n_ij - μ_i (F_{i+1/2,j} - F_{i-1/2,j}) - λ_j (G_{i,j+1/2} - G_{i,j-1/2})
//!              + δ ⨏⨏ 𝔖(t, x, α^n_ij)
//! F_{i-1/2,j} = u⁺ g(α_{i-1,j}, α_ij) - u⁻ g(α_ij, α_{i-1,j})
//! ```
//!
//! with `μ_i = δ/k_i`, `λ_j = δ/h_j` and face velocities averaged over the
//! face and `[t_n, t_{n+1}]`.

use std::sync::Arc;

use rayon::prelude::*;

use crate::mesh::CartesianGrid2D;
use crate::metrics;
use crate::physics::{face_average_velocity, NumericalFlux, SourceTerm, SpaceTimeField, VelocityField2};
use crate::quadrature::gauss3_on;
use crate::{Error, Result, Scalar};

/// Cell states `α_ij` on a grid at time `t`, stored at `j * nx + i`.
#[derive(Debug, Clone)]
pub struct DiscreteField2D<T: Scalar> {
    grid: Arc<CartesianGrid2D<T>>,
    values: Vec<T>,
    time: T,
}

impl<T: Scalar> DiscreteField2D<T> {
    pub fn new(grid: Arc<CartesianGrid2D<T>>, values: Vec<T>, time: T) -> Result<Self> {
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

    pub fn constant(grid: Arc<CartesianGrid2D<T>>, value: T) -> Self {
        let n = grid.cell_count();
        Self {
            grid,
            values: vec![value; n],
            time: T::zero(),
        }
    }

    /// Same grid, new values and time (no validation).
    pub(crate) fn with_values(&self, values: Vec<T>, time: T) -> Self {
        Self {
            grid: self.grid.clone(),
            values,
            time,
        }
    }

    pub fn grid(&self) -> &CartesianGrid2D<T> {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<CartesianGrid2D<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn time(&self) -> T {
        self.time
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[self.grid.index(i, j)]
    }

    pub fn bv(&self) -> T {
        metrics::bv_xy(&self.grid, &self.values)
    }

    pub fn mass(&self) -> T {
        metrics::mass(&metrics::cell_areas(&self.grid), &self.values)
    }

    pub fn linf(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn min_max(&self) -> (T, T) {
        self.values
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(a, b), &v| (a.min(v), b.max(v)))
    }
}

/// `α⁰_ij = ⨏_{K_ij} α0`.
pub fn project_initial<T: Scalar, F: SpaceTimeField<T> + ?Sized>(
    alpha0: &F,
    grid: Arc<CartesianGrid2D<T>>,
) -> DiscreteField2D<T> {
    let mut values = Vec::with_capacity(grid.cell_count());
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            values.push(alpha0.rect_average(T::zero(), grid.cell_bounds(i, j)));
        }
    }
    DiscreteField2D {
        grid,
        values,
        time: T::zero(),
    }
}

/// Largest `δ` with `4 δ max(1/k_i + 1/h_j) Lip(g) ‖u‖∞ <= 1`; infinite when
/// the product `Lip(g) ‖u‖∞` vanishes.
pub fn max_timestep<T: Scalar>(grid: &CartesianGrid2D<T>, lip_g: T, u_sup: T) -> T {
    let denom = T::lit(4.0) * grid.max_inverse_width_sum() * lip_g * u_sup;
    if denom > T::zero() {
        T::one() / denom
    } else {
        T::infinity()
    }
}

pub(crate) fn check_cfl<T: Scalar>(delta: T, limit: T) -> Result<()> {
    if delta > limit * (T::one() + T::lit(1e-12)) {
        Err(Error::CflViolation {
            delta: delta.as_f64(),
            limit: limit.as_f64(),
        })
    } else {
        Ok(())
    }
}

pub(crate) fn check_interval<T: Scalar>(t0: T, t1: T) -> Result<T> {
    let d = t1 - t0;
    if !(d > T::zero()) || !d.is_finite() {
        return Err(Error::InvalidTimeInterval {
            t0: t0.as_f64(),
            t1: t1.as_f64(),
        });
    }
    Ok(d)
}

/// What happens on boundary faces.
#[derive(Clone)]
pub enum BoundaryClosure<T: Scalar> {
    /// No flux through `∂Ω`.
    ZeroFlux,
    /// Outside state = face average of the given field at `t_n`, used on
    /// both inflow and outflow faces.
    Ghost(Arc<dyn SpaceTimeField<T>>),
}

impl<T: Scalar> BoundaryClosure<T> {
    pub fn name(&self) -> &'static str {
        match self {
            BoundaryClosure::ZeroFlux => "zero-flux",
            BoundaryClosure::Ghost(_) => "ghost",
        }
    }
}

/// Numerical flux, velocity, optional source, boundary closure and `δ`.
#[derive(Clone)]
pub struct SchemeConfig<T: Scalar> {
    pub flux: Arc<dyn NumericalFlux<T>>,
    pub velocity: Arc<dyn VelocityField2<T>>,
    pub source: Option<Arc<dyn SourceTerm<T>>>,
    pub boundary: BoundaryClosure<T>,
    pub delta: T,
    /// `‖u‖∞` used for the CFL check.
    pub u_sup: T,
}

impl<T: Scalar> SchemeConfig<T> {
    /// Validates `δ` against the CFL bound on `grid`, with `‖u‖∞` taken over
    /// `[0, t_end]`.
    pub fn new(
        grid: &CartesianGrid2D<T>,
        flux: Arc<dyn NumericalFlux<T>>,
        velocity: Arc<dyn VelocityField2<T>>,
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
        check_cfl(delta, max_timestep(grid, flux.lipschitz(), u_sup))?;
        Ok(Self {
            flux,
            velocity,
            source: None,
            boundary: BoundaryClosure::ZeroFlux,
            delta,
            u_sup,
        })
    }

    pub fn with_source(mut self, source: Arc<dyn SourceTerm<T>>) -> Self {
        self.source = Some(source);
        self
    }

    pub fn with_boundary(mut self, boundary: BoundaryClosure<T>) -> Self {
        self.boundary = boundary;
        self
    }

    /// `μ_i = δ/k_i`
    pub fn mu(&self, grid: &CartesianGrid2D<T>, i: usize) -> T {
        self.delta / grid.k(i)
    }

    /// `λ_j = δ/h_j`
    pub fn lambda(&self, grid: &CartesianGrid2D<T>, j: usize) -> T {
        self.delta / grid.h(j)
    }
}

/// Face velocities for one step: `u` on the `(nx+1) × ny` vertical faces
/// and `v` on the `nx × (ny+1)` horizontal faces, zeroed on the boundary
/// under the zero-flux closure.
struct FaceVelocities<T> {
    u: Vec<T>,
    v: Vec<T>,
}

fn face_velocities<T: Scalar>(
    grid: &CartesianGrid2D<T>,
    cfg: &SchemeConfig<T>,
    t0: T,
    t1: T,
) -> FaceVelocities<T> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let (xe, ye) = (grid.x_edges(), grid.y_edges());
    let closed = matches!(cfg.boundary, BoundaryClosure::ZeroFlux);
    let vel = cfg.velocity.as_ref();
    let u: Vec<T> = (0..ny * (nx + 1))
        .into_par_iter()
        .map(|f| {
            let (i, j) = (f % (nx + 1), f / (nx + 1));
            if closed && (i == 0 || i == nx) {
                return T::zero();
            }
            face_average_velocity(vel, [[xe[i], ye[j]], [xe[i], ye[j + 1]]], t0, t1)
        })
        .collect();
    let v: Vec<T> = (0..(ny + 1) * nx)
        .into_par_iter()
        .map(|f| {
            let (i, j) = (f % nx, f / nx);
            if closed && (j == 0 || j == ny) {
                return T::zero();
            }
            face_average_velocity(vel, [[xe[i + 1], ye[j]], [xe[i], ye[j]]], t0, t1)
        })
        .collect();
    FaceVelocities { u, v }
}

/// Ghost states around the grid: left/right per row, bottom/top per column.
struct Ghosts<T> {
    left: Vec<T>,
    right: Vec<T>,
    bottom: Vec<T>,
    top: Vec<T>,
}

fn ghosts<T: Scalar>(grid: &CartesianGrid2D<T>, closure: &BoundaryClosure<T>, t: T) -> Option<Ghosts<T>> {
    let BoundaryClosure::Ghost(field) = closure else {
        return None;
    };
    let (xe, ye) = (grid.x_edges(), grid.y_edges());
    let (x0, x1) = (xe[0], xe[grid.nx()]);
    let (y0, y1) = (ye[0], ye[grid.ny()]);
    Some(Ghosts {
        left: (0..grid.ny()).map(|j| field.segment_average(t, [x0, ye[j]], [x0, ye[j + 1]])).collect(),
        right: (0..grid.ny()).map(|j| field.segment_average(t, [x1, ye[j]], [x1, ye[j + 1]])).collect(),
        bottom: (0..grid.nx()).map(|i| field.segment_average(t, [xe[i], y0], [xe[i + 1], y0])).collect(),
        top: (0..grid.nx()).map(|i| field.segment_average(t, [xe[i], y1], [xe[i + 1], y1])).collect(),
    })
}

/// `δ · ⨏_t ⨏_K 𝔖(t, x, y, z)` by 3-point Gauss in each of `t, x, y`.
pub(crate) fn source_increment<T: Scalar>(
    source: &dyn SourceTerm<T>,
    bounds: [T; 4],
    z: T,
    t0: T,
    t1: T,
) -> T {
    let (ts, wt) = gauss3_on(t0, t1);
    let (xs, wx) = gauss3_on(bounds[0], bounds[1]);
    let (ys, wy) = gauss3_on(bounds[2], bounds[3]);
    let mut acc = T::zero();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                acc = acc + wt[a] * wx[b] * wy[c] * source.eval(ts[a], xs[b], ys[c], z);
            }
        }
    }
    (t1 - t0) * acc
}

/// Neighbour states of cell `(i, j)`: `[west, east, south, north]`;
/// `None` on a zero-flux boundary.
#[inline]
fn neighbours<T: Scalar>(
    grid: &CartesianGrid2D<T>,
    values: &[T],
    ghosts: &Option<Ghosts<T>>,
    i: usize,
    j: usize,
) -> [Option<T>; 4] {
    let (nx, ny) = (grid.nx(), grid.ny());
    let g = ghosts.as_ref();
    [
        if i > 0 { Some(values[j * nx + i - 1]) } else { g.map(|g| g.left[j]) },
        if i + 1 < nx { Some(values[j * nx + i + 1]) } else { g.map(|g| g.right[j]) },
        if j > 0 { Some(values[(j - 1) * nx + i]) } else { g.map(|g| g.bottom[i]) },
        if j + 1 < ny { Some(values[(j + 1) * nx + i]) } else { g.map(|g| g.top[i]) },
    ]
}

/// `u⁺ g(a, b) - u⁻ g(b, a)` for a face with `a` on the upwind side of positive `u`.
#[inline]
fn face_flux<T: Scalar>(g: &dyn NumericalFlux<T>, u: T, a: T, b: T) -> T {
    let mut f = T::zero();
    if u > T::zero() {
        f = f + u * g.eval(a, b);
    }
    if u < T::zero() {
        f = f + u * g.eval(b, a);
    }
    f
}

fn prepare<T: Scalar>(
    state: &DiscreteField2D<T>,
    cfg: &SchemeConfig<T>,
    t0: T,
    t1: T,
) -> Result<(T, FaceVelocities<T>, Option<Ghosts<T>>)> {
    let delta = check_interval(t0, t1)?;
    let grid = state.grid();
    check_cfl(delta, max_timestep(grid, cfg.flux.lipschitz(), cfg.u_sup))?;
    Ok((delta, face_velocities(grid, cfg, t0, t1), ghosts(grid, &cfg.boundary, t0)))
}

/// One step of the flux form.
pub fn step<T: Scalar>(state: &DiscreteField2D<T>, cfg: &SchemeConfig<T>, t0: T, t1: T) -> Result<DiscreteField2D<T>> {
    let (delta, fv, gh) = prepare(state, cfg, t0, t1)?;
    let grid = state.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let alpha = state.values();
    let g = cfg.flux.as_ref();
    let mut out = vec![T::zero(); nx * ny];
    out.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        let lam = delta / grid.h(j);
        for (i, slot) in row.iter_mut().enumerate() {
            let a = alpha[j * nx + i];
            let [w, e, s, n] = neighbours(grid, alpha, &gh, i, j);
            let flux = |u: T, lo: Option<T>, hi: Option<T>| match (lo, hi) {
                (Some(l), Some(h)) => face_flux(g, u, l, h),
                _ => T::zero(),
            };
            let f_w = flux(fv.u[j * (nx + 1) + i], w, Some(a));
            let f_e = flux(fv.u[j * (nx + 1) + i + 1], Some(a), e);
            let g_s = flux(fv.v[j * nx + i], s, Some(a));
            let g_n = flux(fv.v[(j + 1) * nx + i], Some(a), n);
            let mu = delta / grid.k(i);
            let mut next = a - mu * (f_e - f_w) - lam * (g_n - g_s);
            if let Some(src) = &cfg.source {
                next = next + source_increment(src.as_ref(), grid.cell_bounds(i, j), a, t0, t1);
            }
            *slot = next;
        }
    });
    Ok(state.with_values(out, t1))
}

/// `D(a, b) = (g(a, b) - f(α))/(a - b)`, zero when `a = b`.
#[inline]
fn diff_quotient<T: Scalar>(g: &dyn NumericalFlux<T>, f_alpha: T, a: T, b: T) -> T {
    if a == b {
        T::zero()
    } else {
        (g.eval(a, b) - f_alpha) / (a - b)
    }
}

/// Coefficients of the convex-combination form for one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexCoefficients<T> {
    /// `μ M` / `λ M` weights of the west, east, south and north neighbours.
    pub weights: [T; 4],
    /// `μ_i (u_{i+1/2} - u_{i-1/2}) + λ_j (v_{j+1/2} - v_{j-1/2})`
    pub divergence: T,
}

impl<T: Scalar> ConvexCoefficients<T> {
    /// Weight left on the cell itself, `1 - Σ weights`.
    pub fn diagonal(&self) -> T {
        T::one() - self.weights.iter().copied().sum::<T>()
    }
}

fn coefficients_for<T: Scalar>(
    g: &dyn NumericalFlux<T>,
    a: T,
    nb: [Option<T>; 4],
    vel: [T; 4],
    scale: [T; 4],
) -> ConvexCoefficients<T> {
    let fa = g.consistent(a);
    let mut w = [T::zero(); 4];
    for k in 0..4 {
        let Some(b) = nb[k] else { continue };
        let u = vel[k];
        // west/south faces see the cell as the downstream (second) argument
        let m = if k % 2 == 0 {
            u.pos() * diff_quotient(g, fa, b, a) + u.neg_part() * diff_quotient(g, fa, a, b)
        } else {
            u.pos() * diff_quotient(g, fa, a, b) + u.neg_part() * diff_quotient(g, fa, b, a)
        };
        w[k] = scale[k] * m;
    }
    let live = |k: usize| if nb[k].is_some() { vel[k] } else { T::zero() };
    ConvexCoefficients {
        weights: w,
        divergence: scale[1] * (live(1) - live(0)) + scale[3] * (live(3) - live(2)),
    }
}

/// Convex-combination coefficients of every cell for the step `t0 → t1`.
pub fn convex_coefficients<T: Scalar>(
    state: &DiscreteField2D<T>,
    cfg: &SchemeConfig<T>,
    t0: T,
    t1: T,
) -> Result<Vec<ConvexCoefficients<T>>> {
    let (delta, fv, gh) = prepare(state, cfg, t0, t1)?;
    let grid = state.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let alpha = state.values();
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (mu, lam) = (delta / grid.k(i), delta / grid.h(j));
            out.push(coefficients_for(
                cfg.flux.as_ref(),
                alpha[j * nx + i],
                neighbours(grid, alpha, &gh, i, j),
                [
                    fv.u[j * (nx + 1) + i],
                    fv.u[j * (nx + 1) + i + 1],
                    fv.v[j * nx + i],
                    fv.v[(j + 1) * nx + i],
                ],
                [mu, mu, lam, lam],
            ));
        }
    }
    Ok(out)
}

/// One step written as
/// `α (1 - Σ μM) + Σ μM α_nb - f(α) [μ Δu + λ Δv] + source`.
/// Equal to [`step`] up to roundoff.
pub fn step_convex<T: Scalar>(
    state: &DiscreteField2D<T>,
    cfg: &SchemeConfig<T>,
    t0: T,
    t1: T,
) -> Result<DiscreteField2D<T>> {
    let coeffs = convex_coefficients(state, cfg, t0, t1)?;
    let grid = state.grid();
    let gh = ghosts(grid, &cfg.boundary, t0);
    let alpha = state.values();
    let nx = grid.nx();
    let mut out = Vec::with_capacity(alpha.len());
    for (c, co) in coeffs.iter().enumerate() {
        let (i, j) = (c % nx, c / nx);
        let a = alpha[c];
        let nb = neighbours(grid, alpha, &gh, i, j);
        let mut next = a * co.diagonal();
        for k in 0..4 {
            if let Some(b) = nb[k] {
                next = next + co.weights[k] * b;
            }
        }
        next = next - cfg.flux.consistent(a) * co.divergence;
        if let Some(src) = &cfg.source {
            next = next + source_increment(src.as_ref(), grid.cell_bounds(i, j), a, t0, t1);
        }
        out.push(next);
    }
    Ok(DiscreteField2D {
        grid: state.grid.clone(),
        values: out,
        time: t1,
    })
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry<T> {
    pub step: usize,
    pub time: T,
    pub bv: T,
    pub linf: T,
    pub mass: T,
    /// `Σ_K |K| Σ_{m<=n} |α^m - α^{m-1}|` up to this step.
    pub bv_time: T,
}

#[derive(Debug, Clone)]
pub struct RunOutput<T: Scalar, F> {
    pub field: F,
    pub trace: Vec<TraceEntry<T>>,
    pub steps: usize,
    /// The step actually used, `T / N`.
    pub delta: T,
}

/// Number of steps and adjusted step `T / ⌈T / δ⌉`.
pub fn adjusted_steps<T: Scalar>(final_time: T, delta: T) -> (usize, T) {
    if final_time <= T::zero() {
        return (0, delta);
    }
    let ratio = final_time / delta;
    // tolerate roundoff in T/δ so that exact divisors are kept
    let n = (ratio - ratio * T::lit(1e-12)).ceil().to_usize().unwrap_or(1).max(1);
    (n, final_time / T::from_usize_lossy(n))
}

/// `t_n = T n / N`, exact at `n = N`.
pub(crate) fn time_level<T: Scalar>(t_start: T, final_time: T, n: usize, steps: usize) -> T {
    if n == steps {
        final_time
    } else {
        t_start + (final_time - t_start) * T::from_usize_lossy(n) / T::from_usize_lossy(steps)
    }
}

/// Advances `initial` from its time stamp to `final_time` with the
/// configured `δ` shortened to divide the interval.
pub fn run<T: Scalar>(
    initial: &DiscreteField2D<T>,
    cfg: &SchemeConfig<T>,
    final_time: T,
) -> Result<RunOutput<T, DiscreteField2D<T>>> {
    drive(initial, final_time, cfg.delta, |f, t0, t1| step(f, cfg, t0, t1))
}

/// Time loop shared by the Cartesian solvers.
pub(crate) fn drive<T: Scalar>(
    initial: &DiscreteField2D<T>,
    final_time: T,
    requested_delta: T,
    mut advance: impl FnMut(&DiscreteField2D<T>, T, T) -> Result<DiscreteField2D<T>>,
) -> Result<RunOutput<T, DiscreteField2D<T>>> {
    let t_start = initial.time();
    let (steps, delta) = adjusted_steps(final_time - t_start, requested_delta);
    let areas = metrics::cell_areas(initial.grid());
    let mut field = initial.clone();
    let mut bv_time = T::zero();
    let entry = |n, f: &DiscreteField2D<T>, bt| TraceEntry {
        step: n,
        time: f.time(),
        bv: f.bv(),
        linf: f.linf(),
        mass: metrics::mass(&areas, f.values()),
        bv_time: bt,
    };
    let mut trace = vec![entry(0, &field, bv_time)];
    for n in 0..steps {
        let t0 = time_level(t_start, final_time, n, steps);
        let t1 = time_level(t_start, final_time, n + 1, steps);
        let next = advance(&field, t0, t1)?;
        bv_time = bv_time + metrics::bv_time(&areas, &[field.values, next.values.clone()]);
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
