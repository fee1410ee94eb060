//! Grids and meshes: nonuniform Cartesian grids in 2D/3D, polygonal meshes
//! and the generators for the benchmark mesh families.

mod cartesian;
mod dump;
mod families;
mod polygonal;

pub use cartesian::{CartesianGrid2D, CartesianGrid3D};
pub use dump::{read_mesh_dump, write_mesh_dump};
pub use families::{build_family, MeshFamily, PERTURBATION_THETA};
pub use polygonal::{as_polygonal, Edge, PolyCell, PolygonalMesh};

use crate::Scalar;

/// Axis-aligned rectangle `(x0, x1) × (y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect<T> {
    pub x0: T,
    pub x1: T,
    pub y0: T,
    pub y1: T,
}

impl<T: Scalar> Rect<T> {
    pub fn new(x0: T, x1: T, y0: T, y1: T) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn square(lo: T, hi: T) -> Self {
        Self::new(lo, hi, lo, hi)
    }

    pub fn width(&self) -> T {
        self.x1 - self.x0
    }

    pub fn height(&self) -> T {
        self.y1 - self.y0
    }

    pub fn area(&self) -> T {
        self.width() * self.height()
    }

    pub fn is_valid(&self) -> bool {
        self.x0.is_finite() && self.x1.is_finite() && self.y0.is_finite() && self.y1.is_finite()
            && self.x1 > self.x0
            && self.y1 > self.y0
    }
}

/// Signed shoelace area of a closed polygon (positive when counterclockwise).
pub fn shoelace_area<T: Scalar>(pts: &[[T; 2]]) -> T {
    let n = pts.len();
    if n == 0 {
        return T::zero();
    }
    // relative to the first vertex to avoid cancellation on small cells
    let o = pts[0];
    let mut acc = T::zero();
    for k in 1..n.saturating_sub(1) {
        let (p, q) = (pts[k], pts[k + 1]);
        acc = acc + (p[0] - o[0]) * (q[1] - o[1]) - (q[0] - o[0]) * (p[1] - o[1]);
    }
    acc * T::half()
}
