//! Discrete BV seminorms, error norms and convergence rates for
//! piecewise-constant fields.

use crate::mesh::{CartesianGrid2D, CartesianGrid3D, PolygonalMesh};
use crate::physics::SpaceTimeField;
use crate::Scalar;

/// `Σ_j h_j Σ_i |α_ij - α_{i-1,j}| + Σ_i k_i Σ_j |α_ij - α_{i,j-1}|`
pub fn bv_xy<T: Scalar>(grid: &CartesianGrid2D<T>, values: &[T]) -> T {
    let (nx, ny) = (grid.nx(), grid.ny());
    debug_assert_eq!(values.len(), nx * ny);
    let mut bx = T::zero();
    let mut by = T::zero();
    for j in 0..ny {
        let row = &values[j * nx..(j + 1) * nx];
        let tv: T = row.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        bx = bx + grid.h(j) * tv;
    }
    for i in 0..nx {
        let mut tv = T::zero();
        for j in 1..ny {
            tv = tv + (values[j * nx + i] - values[(j - 1) * nx + i]).abs();
        }
        by = by + grid.k(i) * tv;
    }
    bx + by
}

/// Three-dimensional analogue: each face jump weighted by the face area.
pub fn bv_xyz<T: Scalar>(grid: &CartesianGrid3D<T>, values: &[T]) -> T {
    let (nx, ny, nz) = (grid.nx(), grid.ny(), grid.nz());
    let (k, h, l) = (grid.widths_x(), grid.widths_y(), grid.widths_z());
    let at = |i, j, m| values[grid.index(i, j, m)];
    let mut acc = T::zero();
    for m in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let a = at(i, j, m);
                if i > 0 {
                    acc = acc + h[j] * l[m] * (a - at(i - 1, j, m)).abs();
                }
                if j > 0 {
                    acc = acc + k[i] * l[m] * (a - at(i, j - 1, m)).abs();
                }
                if m > 0 {
                    acc = acc + k[i] * h[j] * (a - at(i, j, m - 1)).abs();
                }
            }
        }
    }
    acc
}

/// `Σ_{interior e} |e| |α_K - α_L|`
pub fn bv_poly<T: Scalar>(mesh: &PolygonalMesh<T>, values: &[T]) -> T {
    mesh.edges()
        .iter()
        .filter_map(|e| e.right.map(|r| e.length * (values[e.left] - values[r]).abs()))
        .sum()
}

/// `Σ_cells |K| Σ_n |α^{n+1} - α^n|` over a stored trace of snapshots.
pub fn bv_time<T: Scalar>(areas: &[T], trace: &[Vec<T>]) -> T {
    trace
        .windows(2)
        .map(|w| {
            areas
                .iter()
                .zip(w[0].iter().zip(&w[1]))
                .map(|(&a, (&u, &v))| a * (v - u).abs())
                .sum::<T>()
        })
        .sum()
}

/// `Σ |K| α_K`
pub fn mass<T: Scalar>(areas: &[T], values: &[T]) -> T {
    areas.iter().zip(values).map(|(&a, &v)| a * v).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms<T> {
    pub linf: T,
    pub l1: T,
    pub l2: T,
}

/// Cell-wise errors against reference cell averages.
pub fn error_norms_from_reference<T: Scalar>(areas: &[T], values: &[T], reference: &[T]) -> ErrorNorms<T> {
    let mut out = ErrorNorms {
        linf: T::zero(),
        l1: T::zero(),
        l2: T::zero(),
    };
    for ((&a, &v), &r) in areas.iter().zip(values).zip(reference) {
        let e = (v - r).abs();
        out.linf = out.linf.max(e);
        out.l1 = out.l1 + a * e;
        out.l2 = out.l2 + a * e * e;
    }
    out.l2 = out.l2.sqrt();
    out
}

pub fn cell_areas<T: Scalar>(grid: &CartesianGrid2D<T>) -> Vec<T> {
    let mut a = Vec::with_capacity(grid.cell_count());
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            a.push(grid.area(i, j));
        }
    }
    a
}

/// Errors of a Cartesian field against cell averages of `exact(t, ·)`.
pub fn error_norms<T: Scalar, E: SpaceTimeField<T> + ?Sized>(
    grid: &CartesianGrid2D<T>,
    values: &[T],
    exact: &E,
    t: T,
) -> ErrorNorms<T> {
    let mut reference = Vec::with_capacity(grid.cell_count());
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            reference.push(exact.rect_average(t, grid.cell_bounds(i, j)));
        }
    }
    error_norms_from_reference(&cell_areas(grid), values, &reference)
}

/// Errors of a polygonal field against cell averages of `exact(t, ·)`.
pub fn error_norms_poly<T: Scalar, E: SpaceTimeField<T> + ?Sized>(
    mesh: &PolygonalMesh<T>,
    values: &[T],
    exact: &E,
    t: T,
) -> ErrorNorms<T> {
    let reference: Vec<T> = (0..mesh.cell_count())
        .map(|c| exact.polygon_average(t, &mesh.cell_polygon(c)))
        .collect();
    let areas: Vec<T> = mesh.cells().iter().map(|c| c.area).collect();
    error_norms_from_reference(&areas, values, &reference)
}

/// `log(v_fine / v_coarse) / log(h_fine / h_coarse)`; `None` when a value
/// is not positive or the mesh sizes coincide.
pub fn rate<T: Scalar>(v_fine: T, v_coarse: T, h_fine: T, h_coarse: T) -> Option<T> {
    if !(v_fine > T::zero() && v_coarse > T::zero() && h_fine > T::zero() && h_coarse > T::zero())
        || h_fine == h_coarse
    {
        return None;
    }
    Some((v_fine / v_coarse).ln() / (h_fine / h_coarse).ln())
}

/// Summary of one field at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport<T> {
    pub time: T,
    pub errors: Option<ErrorNorms<T>>,
    pub bv: T,
    pub mass: T,
}
