//! Explicit scheme for `∂t α + div F(t, x, α) = 𝔖` on 2D Cartesian grids,
//! built on a monotone splitting `F1 = a + b`, `F2 = c + d`:
//!
//! ```text
//! α^{n+1}_ij = α_ij - (1/k_i) (a_{i+1/2}(α_ij) - a_{i-1/2}(α_{i-1,j}) + b_{i+1/2}(α_{i+1,j}) - b_{i-1/2}(α_ij))
//!                   - (1/h_j) (c_{j+1/2}(α_ij) - c_{j-1/2}(α_{i,j-1}) + d_{j+1/2}(α_{i,j+1}) - d_{j-1/2}(α_ij))
//! ```
//!
//! where `γ_{i+1/2}(s) = ∫_{t_n}^{t_{n+1}} ⨏_{face} γ(t, x_{i+1/2}, y, s)`.

use std::sync::Arc;

use rayon::prelude::*;

use crate::fv2d::{check_cfl, check_interval, drive, source_increment, DiscreteField2D, RunOutput};
use crate::mesh::CartesianGrid2D;
use crate::physics::{SourceTerm, SplitFlux};
use crate::quadrature::gauss3_on;
use crate::{Error, Result, Scalar};

/// `δ_max = 1 / (4 Lip(F) max(1/k_i + 1/h_j))`
pub fn cfl_nonlinear<T: Scalar>(grid: &CartesianGrid2D<T>, lip_f: T) -> T {
    let denom = T::lit(4.0) * lip_f * grid.max_inverse_width_sum();
    if denom > T::zero() {
        T::one() / denom
    } else {
        T::infinity()
    }
}

/// Treatment of boundary faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonlinearClosure {
    /// The outside state equals the cell's own state.
    Mirror,
    /// No flux through the boundary.
    ZeroFlux,
}

#[derive(Clone)]
pub struct SplitScheme<T: Scalar> {
    pub split: SplitFlux<T>,
    pub delta: T,
    pub closure: NonlinearClosure,
    pub source: Option<Arc<dyn SourceTerm<T>>>,
}

impl<T: Scalar> SplitScheme<T> {
    /// Checks `δ` against the CFL bound with `Lip(F) = max(M_x, M_y)`.
    pub fn new(grid: &CartesianGrid2D<T>, split: SplitFlux<T>, delta: T) -> Result<Self> {
        if !(delta > T::zero()) {
            return Err(Error::InvalidTimeInterval {
                t0: 0.0,
                t1: delta.as_f64(),
            });
        }
        let s = Self {
            split,
            delta,
            closure: NonlinearClosure::Mirror,
            source: None,
        };
        check_cfl(delta, cfl_nonlinear(grid, s.lipschitz()))?;
        Ok(s)
    }

    pub fn lipschitz(&self) -> T {
        let m = self.split.m();
        m[0].max(m[1])
    }

    pub fn with_closure(mut self, closure: NonlinearClosure) -> Self {
        self.closure = closure;
        self
    }

    pub fn with_source(mut self, source: Arc<dyn SourceTerm<T>>) -> Self {
        self.source = Some(source);
        self
    }
}

/// Averages over `[t0, t1] × face` of `first(·, lo) + second(·, hi)`.
#[allow(clippy::too_many_arguments)]
fn face_flux<T: Scalar>(
    first: impl Fn(T, T, T, T) -> T,
    second: impl Fn(T, T, T, T) -> T,
    vertical: bool,
    c: T,
    span: [T; 2],
    lo: T,
    hi: T,
    t: ([T; 3], [T; 3]),
) -> T {
    let (ss, ws) = gauss3_on(span[0], span[1]);
    let (ts, wt) = t;
    let mut acc = T::zero();
    for a in 0..3 {
        for b in 0..3 {
            let (x, y) = if vertical { (c, ss[b]) } else { (ss[b], c) };
            acc = acc + wt[a] * ws[b] * (first(ts[a], x, y, lo) + second(ts[a], x, y, hi));
        }
    }
    acc
}

/// One step of the split scheme.
pub fn step_nonlinear<T: Scalar>(
    state: &DiscreteField2D<T>,
    scheme: &SplitScheme<T>,
    t0: T,
    t1: T,
) -> Result<DiscreteField2D<T>> {
    let delta = check_interval(t0, t1)?;
    let grid = state.grid();
    check_cfl(delta, cfl_nonlinear(grid, scheme.lipschitz()))?;
    let (nx, ny) = (grid.nx(), grid.ny());
    let (xe, ye) = (grid.x_edges(), grid.y_edges());
    let alpha = state.values();
    let sp = &scheme.split;
    let tq = gauss3_on(t0, t1);
    let mirror = scheme.closure == NonlinearClosure::Mirror;

    // Φ_{i-1/2,j} = a(α_{i-1}) + b(α_i), i = 0..=nx
    let phi_x: Vec<T> = (0..ny * (nx + 1))
        .into_par_iter()
        .map(|f| {
            let (i, j) = (f % (nx + 1), f / (nx + 1));
            let left = if i > 0 { Some(alpha[j * nx + i - 1]) } else { None };
            let right = if i < nx { Some(alpha[j * nx + i]) } else { None };
            let (lo, hi) = match (left, right) {
                (Some(l), Some(r)) => (l, r),
                (Some(s), None) | (None, Some(s)) if mirror => (s, s),
                _ => return T::zero(),
            };
            face_flux(|t, x, y, z| sp.a(t, x, y, z), |t, x, y, z| sp.b(t, x, y, z), true, xe[i], [ye[j], ye[j + 1]], lo, hi, tq)
        })
        .collect();
    // Ψ_{j-1/2,i} = c(α_{j-1}) + d(α_j), j = 0..=ny
    let phi_y: Vec<T> = (0..(ny + 1) * nx)
        .into_par_iter()
        .map(|f| {
            let (i, j) = (f % nx, f / nx);
            let below = if j > 0 { Some(alpha[(j - 1) * nx + i]) } else { None };
            let above = if j < ny { Some(alpha[j * nx + i]) } else { None };
            let (lo, hi) = match (below, above) {
                (Some(l), Some(r)) => (l, r),
                (Some(s), None) | (None, Some(s)) if mirror => (s, s),
                _ => return T::zero(),
            };
            face_flux(|t, x, y, z| sp.c(t, x, y, z), |t, x, y, z| sp.d(t, x, y, z), false, ye[j], [xe[i], xe[i + 1]], lo, hi, tq)
        })
        .collect();

    let mut out = vec![T::zero(); nx * ny];
    out.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        let lam = delta / grid.h(j);
        for (i, slot) in row.iter_mut().enumerate() {
            let mu = delta / grid.k(i);
            let a = alpha[j * nx + i];
            let dx = phi_x[j * (nx + 1) + i + 1] - phi_x[j * (nx + 1) + i];
            let dy = phi_y[(j + 1) * nx + i] - phi_y[j * nx + i];
            let mut next = a - mu * dx - lam * dy;
            if let Some(src) = &scheme.source {
                next = next + source_increment(src.as_ref(), grid.cell_bounds(i, j), a, t0, t1);
            }
            *slot = next;
        }
    });
    Ok(state.with_values(out, t1))
}

pub fn run_nonlinear<T: Scalar>(
    initial: &DiscreteField2D<T>,
    scheme: &SplitScheme<T>,
    final_time: T,
) -> Result<RunOutput<T, DiscreteField2D<T>>> {
    drive(initial, final_time, scheme.delta, |f, t0, t1| step_nonlinear(f, scheme, t0, t1))
}
