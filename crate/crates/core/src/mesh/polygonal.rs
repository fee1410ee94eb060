use std::collections::HashMap;

use super::{shoelace_area, CartesianGrid2D, MeshFamily, Rect};
use crate::{Error, Result, Scalar};

/// Straight edge between two mesh vertices.
///
/// `normal` is the unit normal pointing from `left` into `right`; for a
/// boundary edge (`right == None`) it points out of the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge<T> {
    pub vertices: [usize; 2],
    pub left: usize,
    pub right: Option<usize>,
    pub length: T,
    pub normal: [T; 2],
}

impl<T: Scalar> Edge<T> {
    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }

    /// The cell across the edge as seen from `cell`.
    pub fn neighbor(&self, cell: usize) -> Option<usize> {
        if cell == self.left {
            self.right
        } else {
            Some(self.left)
        }
    }

    /// `+1` when `normal` is outward for `cell`, `-1` otherwise.
    pub fn orientation(&self, cell: usize) -> T {
        if cell == self.left {
            T::one()
        } else {
            -T::one()
        }
    }
}

/// Polygonal cell: counterclockwise vertex loop plus its edges in loop order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCell<T> {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub area: T,
    pub centroid: [T; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolygonalMesh<T> {
    vertices: Vec<[T; 2]>,
    cells: Vec<PolyCell<T>>,
    edges: Vec<Edge<T>>,
    family: MeshFamily,
    domain: Rect<T>,
}

fn centroid<T: Scalar>(pts: &[[T; 2]], area: T) -> [T; 2] {
    let o = pts[0];
    let (mut cx, mut cy) = (T::zero(), T::zero());
    for k in 1..pts.len() - 1 {
        let p = [pts[k][0] - o[0], pts[k][1] - o[1]];
        let q = [pts[k + 1][0] - o[0], pts[k + 1][1] - o[1]];
        let cross = p[0] * q[1] - q[0] * p[1];
        cx = cx + (p[0] + q[0]) * cross;
        cy = cy + (p[1] + q[1]) * cross;
    }
    let s = T::one() / (T::lit(6.0) * area);
    [o[0] + cx * s, o[1] + cy * s]
}

impl<T: Scalar> PolygonalMesh<T> {
    /// Assembles a mesh from vertex coordinates and counterclockwise cell loops.
    ///
    /// Neighbouring cells must list the same vertices along a shared side
    /// (hanging nodes included), so that each interior edge is produced
    /// exactly twice with opposite orientation.
    pub fn from_loops(
        vertices: Vec<[T; 2]>,
        loops: Vec<Vec<usize>>,
        family: MeshFamily,
        domain: Rect<T>,
    ) -> Result<Self> {
        let mut edges: Vec<Edge<T>> = Vec::new();
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut cells = Vec::with_capacity(loops.len());

        for (c, lp) in loops.into_iter().enumerate() {
            if lp.len() < 3 {
                return Err(Error::InvalidMeshParameters(format!(
                    "cell {c} has only {} vertices",
                    lp.len()
                )));
            }
            if let Some(&bad) = lp.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::InvalidMeshParameters(format!(
                    "cell {c} references missing vertex {bad}"
                )));
            }
            let pts: Vec<[T; 2]> = lp.iter().map(|&v| vertices[v]).collect();
            let area = shoelace_area(&pts);
            if !(area > T::zero()) {
                return Err(Error::DegenerateCell {
                    cell: c,
                    area: area.as_f64(),
                });
            }
            let mut cell_edges = Vec::with_capacity(lp.len());
            for k in 0..lp.len() {
                let (a, b) = (lp[k], lp[(k + 1) % lp.len()]);
                if a == b {
                    return Err(Error::InvalidMeshParameters(format!(
                        "cell {c} repeats vertex {a}"
                    )));
                }
                let key = (a.min(b), a.max(b));
                match lookup.get(&key) {
                    Some(&e) => {
                        let edge = &mut edges[e];
                        if edge.right.is_some() || edge.vertices != [b, a] {
                            return Err(Error::InvalidMeshParameters(format!(
                                "edge ({a}, {b}) of cell {c} is not shared consistently"
                            )));
                        }
                        edge.right = Some(c);
                        cell_edges.push(e);
                    }
                    None => {
                        let (p, q) = (vertices[a], vertices[b]);
                        let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
                        let length = dx.hypot(dy);
                        lookup.insert(key, edges.len());
                        cell_edges.push(edges.len());
                        edges.push(Edge {
                            vertices: [a, b],
                            left: c,
                            right: None,
                            length,
                            normal: [dy / length, -dx / length],
                        });
                    }
                }
            }
            cells.push(PolyCell {
                centroid: centroid(&pts, area),
                vertices: lp,
                edges: cell_edges,
                area,
            });
        }
        Ok(Self {
            vertices,
            cells,
            edges,
            family,
            domain,
        })
    }

    /// Rectangles of a Cartesian grid as polygons; cell `(i, j)` keeps index `j * nx + i`.
    pub fn from_grid(grid: &CartesianGrid2D<T>) -> Self {
        let (nx, ny) = (grid.nx(), grid.ny());
        let xe = grid.x_edges();
        let ye = grid.y_edges();
        let vid = |i: usize, j: usize| j * (nx + 1) + i;
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for &y in ye {
            for &x in xe {
                vertices.push([x, y]);
            }
        }
        let mut loops = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                loops.push(vec![vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)]);
            }
        }
        let mut mesh = Self::from_loops(vertices, loops, MeshFamily::Cartesian, grid.domain())
            .expect("a valid grid always yields a valid polygonal mesh");
        // exact rectangle areas and centers instead of the shoelace roundoff
        for j in 0..ny {
            for i in 0..nx {
                mesh.set_cell_geometry(grid.index(i, j), grid.area(i, j), grid.center(i, j));
            }
        }
        mesh
    }

    pub(super) fn set_cell_geometry(&mut self, c: usize, area: T, centroid: [T; 2]) {
        self.cells[c].area = area;
        self.cells[c].centroid = centroid;
    }

    pub fn vertices(&self) -> &[[T; 2]] {
        &self.vertices
    }

    pub fn cells(&self) -> &[PolyCell<T>] {
        &self.cells
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn family(&self) -> MeshFamily {
        self.family
    }

    pub fn domain(&self) -> Rect<T> {
        self.domain
    }

    pub fn cell_polygon(&self, c: usize) -> Vec<[T; 2]> {
        self.cells[c].vertices.iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn edge_endpoints(&self, e: usize) -> [[T; 2]; 2] {
        let [a, b] = self.edges[e].vertices;
        [self.vertices[a], self.vertices[b]]
    }

    pub fn total_area(&self) -> T {
        self.cells.iter().map(|c| c.area).sum()
    }

    pub fn perimeter(&self, c: usize) -> T {
        self.cells[c].edges.iter().map(|&e| self.edges[e].length).sum()
    }

    /// Mesh size: the longest edge.
    pub fn h_max(&self) -> T {
        self.edges.iter().map(|e| e.length).fold(T::zero(), T::max)
    }

    pub fn interior_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| !e.is_boundary()).count()
    }

    /// `Σ_e |e| n_e` over the outward normals of cell `c` (zero for a closed polygon).
    pub fn closure_defect(&self, c: usize) -> [T; 2] {
        let mut s = [T::zero(); 2];
        for &e in &self.cells[c].edges {
            let edge = &self.edges[e];
            let w = edge.length * edge.orientation(c);
            s[0] = s[0] + w * edge.normal[0];
            s[1] = s[1] + w * edge.normal[1];
        }
        s
    }
}

/// Free-function form of [`PolygonalMesh::from_grid`].
pub fn as_polygonal<T: Scalar>(grid: &CartesianGrid2D<T>) -> PolygonalMesh<T> {
    PolygonalMesh::from_grid(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell_has_four_boundary_edges() {
        let g = CartesianGrid2D::new(&[0.0, 1.0], &[0.0, 1.0]).unwrap();
        let m = as_polygonal(&g);
        assert_eq!(m.cell_count(), 1);
        assert_eq!(m.edges().len(), 4);
        assert!(m.edges().iter().all(Edge::is_boundary));
    }

    #[test]
    fn two_by_two_has_four_shared_edges() {
        let g = CartesianGrid2D::new(&[0.0, 0.5, 1.0], &[0.0, 0.5, 1.0]).unwrap();
        let m = as_polygonal(&g);
        assert_eq!(m.interior_edge_count(), 4);
        for e in m.edges().iter().filter(|e| !e.is_boundary()) {
            assert_ne!(Some(e.left), e.right);
        }
    }

    #[test]
    fn nonuniform_edge_lengths_are_widths() {
        let xe = [0.0f64, 0.3, 1.0, 1.2];
        let ye = [-1.0f64, 0.5, 2.0];
        let g = CartesianGrid2D::new(&xe, &ye).unwrap();
        let m = as_polygonal(&g);
        for (k, e) in m.edges().iter().enumerate() {
            let [p, q] = m.edge_endpoints(k);
            let expected = if p[0] == q[0] {
                // vertical: some h_j
                let j = ye.iter().position(|&y| y == p[1].min(q[1])).unwrap();
                ye[j + 1] - ye[j]
            } else {
                let i = xe.iter().position(|&x| x == p[0].min(q[0])).unwrap();
                xe[i + 1] - xe[i]
            };
            assert_eq!(e.length, expected);
        }
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                assert_eq!(m.cells()[g.index(i, j)].area, g.area(i, j));
            }
        }
    }

    #[test]
    fn normals_point_from_left_to_right() {
        let g = CartesianGrid2D::uniform(Rect::square(0.0, 1.0), 3, 2).unwrap();
        let m = as_polygonal(&g);
        for e in m.edges() {
            if let Some(r) = e.right {
                let (a, b) = (m.cells()[e.left].centroid, m.cells()[r].centroid);
                let d = (b[0] - a[0]) * e.normal[0] + (b[1] - a[1]) * e.normal[1];
                assert!(d > 0.0);
            }
        }
    }

    #[test]
    fn rejects_clockwise_cells() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]];
        let r = PolygonalMesh::from_loops(v, vec![vec![0, 2, 1]], MeshFamily::Triangular, Rect::square(0.0, 1.0));
        assert!(matches!(r, Err(Error::DegenerateCell { .. })));
    }
}
