use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CartesianGrid2D, PolygonalMesh, Rect};
use crate::{Error, Result, Scalar};

/// Largest vertex displacement of the perturbed family, as a fraction of `target_h`.
pub const PERTURBATION_THETA: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeshFamily {
    Cartesian,
    PerturbedCartesian,
    Hexagonal,
    Triangular,
    Staggered,
}

impl MeshFamily {
    pub const ALL: [MeshFamily; 5] = [
        MeshFamily::Cartesian,
        MeshFamily::PerturbedCartesian,
        MeshFamily::Hexagonal,
        MeshFamily::Triangular,
        MeshFamily::Staggered,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeshFamily::Cartesian => "cartesian",
            MeshFamily::PerturbedCartesian => "perturbed_cartesian",
            MeshFamily::Hexagonal => "hexagonal",
            MeshFamily::Triangular => "triangular",
            MeshFamily::Staggered => "staggered",
        }
    }
}

impl fmt::Display for MeshFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeshFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "cartesian" => Ok(MeshFamily::Cartesian),
            "perturbed" | "perturbed_cartesian" => Ok(MeshFamily::PerturbedCartesian),
            "hexagonal" | "hex" => Ok(MeshFamily::Hexagonal),
            "triangular" | "tri" => Ok(MeshFamily::Triangular),
            "staggered" | "brick" => Ok(MeshFamily::Staggered),
            other => Err(Error::Config(format!("unknown mesh family '{other}'"))),
        }
    }
}

/// Builds a mesh of the given family on `domain` with cells of size about
/// `target_h`. Only the perturbed family consumes `seed`.
pub fn build_family<T: Scalar>(
    family: MeshFamily,
    domain: Rect<T>,
    target_h: T,
    seed: u64,
) -> Result<PolygonalMesh<T>> {
    if !domain.is_valid() {
        return Err(Error::InvalidMeshParameters("empty or non-finite domain".into()));
    }
    let short = domain.width().min(domain.height());
    if !(target_h > T::zero()) || !(target_h < short) {
        return Err(Error::InvalidMeshParameters(format!(
            "target_h = {target_h} must lie in (0, {short})"
        )));
    }
    match family {
        MeshFamily::Cartesian => {
            Ok(PolygonalMesh::from_grid(&CartesianGrid2D::uniform_with_size(domain, target_h)?))
        }
        MeshFamily::PerturbedCartesian => perturbed(domain, target_h, seed),
        MeshFamily::Triangular => triangular(domain, target_h),
        MeshFamily::Staggered => staggered(domain, target_h),
        MeshFamily::Hexagonal => hexagonal(domain, target_h),
    }
}

fn counts<T: Scalar>(len: T, h: T) -> usize {
    (len / h).round().to_usize().unwrap_or(1).max(1)
}

/// `lo + (hi - lo) * m / n`, returning `hi` bit-exactly at `m == n`.
fn lattice<T: Scalar>(lo: T, hi: T, m: i64, n: i64) -> T {
    if m == n {
        hi
    } else if m == 0 {
        lo
    } else {
        lo + (hi - lo) * T::lit(m as f64) / T::lit(n as f64)
    }
}

fn grid_vertices<T: Scalar>(domain: Rect<T>, nx: usize, ny: usize) -> Vec<[T; 2]> {
    let mut v = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            v.push([
                lattice(domain.x0, domain.x1, i as i64, nx as i64),
                lattice(domain.y0, domain.y1, j as i64, ny as i64),
            ]);
        }
    }
    v
}

fn perturbed<T: Scalar>(domain: Rect<T>, h: T, seed: u64) -> Result<PolygonalMesh<T>> {
    let nx = counts(domain.width(), h);
    let ny = counts(domain.height(), h);
    let mut vertices = grid_vertices(domain, nx, ny);
    let radius = T::lit(PERTURBATION_THETA) * h;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for j in 1..ny {
        for i in 1..nx {
            // uniform in the disk of the given radius
            let r = rng.gen::<f64>().sqrt();
            let phi = rng.gen::<f64>() * std::f64::consts::TAU;
            let v = &mut vertices[j * (nx + 1) + i];
            v[0] = v[0] + radius * T::lit(r * phi.cos());
            v[1] = v[1] + radius * T::lit(r * phi.sin());
        }
    }
    let vid = |i: usize, j: usize| j * (nx + 1) + i;
    let loops = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| vec![vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)]))
        .collect();
    PolygonalMesh::from_loops(vertices, loops, MeshFamily::PerturbedCartesian, domain)
}

fn triangular<T: Scalar>(domain: Rect<T>, h: T) -> Result<PolygonalMesh<T>> {
    let nx = counts(domain.width(), h);
    let ny = counts(domain.height(), h);
    let vertices = grid_vertices(domain, nx, ny);
    let vid = |i: usize, j: usize| j * (nx + 1) + i;
    let mut loops = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            loops.push(vec![vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)]);
            loops.push(vec![vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)]);
        }
    }
    PolygonalMesh::from_loops(vertices, loops, MeshFamily::Triangular, domain)
}

/// Interns lattice points `(p, q)` so shared corners get one vertex id.
struct VertexPool<T> {
    ids: HashMap<(i64, i64), usize>,
    coords: Vec<[T; 2]>,
}

impl<T: Scalar> VertexPool<T> {
    fn new() -> Self {
        Self {
            ids: HashMap::new(),
            coords: Vec::new(),
        }
    }

    fn id(&mut self, key: (i64, i64), at: impl FnOnce() -> [T; 2]) -> usize {
        let next = self.coords.len();
        *self.ids.entry(key).or_insert_with(|| {
            self.coords.push(at());
            next
        })
    }
}

/// Brick pattern: rows of height `dy`, odd rows shifted by half a cell. The
/// half cell at each end of an odd row is merged with its neighbour, so every
/// cell is at least one cell width wide. Break points along each horizontal
/// line are the union of the rows above and below (hanging nodes).
fn staggered<T: Scalar>(domain: Rect<T>, h: T) -> Result<PolygonalMesh<T>> {
    let nx = counts(domain.width(), h);
    let ny = counts(domain.height(), h);
    // horizontal positions in half-cell units
    let breaks = |row: usize| -> Vec<i64> {
        if row % 2 == 0 {
            (0..=nx as i64).map(|i| 2 * i).collect()
        } else {
            let mut b = vec![0];
            b.extend((1..nx as i64 - 1).map(|i| 2 * i + 1));
            b.push(2 * nx as i64);
            b
        }
    };
    let level = |j: usize| -> Vec<i64> {
        let mut pts = Vec::new();
        if j > 0 {
            pts.extend(breaks(j - 1));
        }
        if j < ny {
            pts.extend(breaks(j));
        }
        pts.sort_unstable();
        pts.dedup();
        pts
    };
    let levels: Vec<Vec<i64>> = (0..=ny).map(level).collect();
    let mut pool = VertexPool::new();
    let mut loops = Vec::new();
    for j in 0..ny {
        let b = breaks(j);
        for w in b.windows(2) {
            let (xa, xb) = (w[0], w[1]);
            let mut lp = Vec::new();
            let mut push = |p: i64, q: usize, pool: &mut VertexPool<T>| {
                lp.push(pool.id((p, q as i64), || {
                    [
                        lattice(domain.x0, domain.x1, p, 2 * nx as i64),
                        lattice(domain.y0, domain.y1, q as i64, ny as i64),
                    ]
                }));
            };
            for &p in levels[j].iter().filter(|&&p| p >= xa && p <= xb) {
                push(p, j, &mut pool);
            }
            for &p in levels[j + 1].iter().rev().filter(|&&p| p >= xa && p <= xb) {
                push(p, j + 1, &mut pool);
            }
            loops.push(lp);
        }
    }
    PolygonalMesh::from_loops(pool.coords, loops, MeshFamily::Staggered, domain)
}

/// Clips a lattice polygon against `lo <= coord[axis]` (`keep_above`) or
/// `coord[axis] <= hi`. Every crossing edge is horizontal or vertical in
/// lattice units, so intersections stay on the lattice.
fn clip_axis(poly: &[(i64, i64)], axis: usize, bound: i64, keep_above: bool) -> Vec<(i64, i64)> {
    let coord = |p: &(i64, i64)| if axis == 0 { p.0 } else { p.1 };
    let inside = |p: &(i64, i64)| if keep_above { coord(p) >= bound } else { coord(p) <= bound };
    let cut = |s: &(i64, i64), e: &(i64, i64)| -> (i64, i64) {
        let (a0, a1) = if axis == 0 { (s.0, e.0) } else { (s.1, e.1) };
        let (b0, b1) = if axis == 0 { (s.1, e.1) } else { (s.0, e.0) };
        let num = (b1 - b0) * (bound - a0);
        let den = a1 - a0;
        debug_assert_eq!(num % den, 0, "hexagon clip left the lattice");
        let other = b0 + num / den;
        if axis == 0 {
            (bound, other)
        } else {
            (other, bound)
        }
    };
    let mut out = Vec::with_capacity(poly.len() + 2);
    for k in 0..poly.len() {
        let s = &poly[(k + poly.len() - 1) % poly.len()];
        let e = &poly[k];
        match (inside(s), inside(e)) {
            (true, true) => out.push(*e),
            (true, false) => out.push(cut(s, e)),
            (false, true) => {
                out.push(cut(s, e));
                out.push(*e);
            }
            (false, false) => {}
        }
    }
    out.dedup();
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

fn lattice_area2(poly: &[(i64, i64)]) -> i64 {
    let n = poly.len();
    (0..n)
        .map(|k| {
            let (p, q) = (poly[k], poly[(k + 1) % n]);
            p.0 * q.1 - q.0 * p.1
        })
        .sum()
}

/// Drops vertices lying on a straight run along the domain boundary.
fn drop_boundary_collinear(poly: Vec<(i64, i64)>, pmax: i64, qmax: i64) -> Vec<(i64, i64)> {
    let on = |a: &(i64, i64), b: &(i64, i64), c: &(i64, i64)| {
        (a.0 == b.0 && b.0 == c.0 && (b.0 == 0 || b.0 == pmax))
            || (a.1 == b.1 && b.1 == c.1 && (b.1 == 0 || b.1 == qmax))
    };
    let n = poly.len();
    (0..n)
        .filter(|&k| !on(&poly[(k + n - 1) % n], &poly[k], &poly[(k + 1) % n]))
        .map(|k| poly[k])
        .collect()
}

/// Flat-topped honeycomb, stretched so the left/right boundaries pass through
/// column centers and the bottom/top boundaries through even-column centers
/// (odd columns meet them along a flat side). Cells are clipped to the domain.
fn hexagonal<T: Scalar>(domain: Rect<T>, h: T) -> Result<PolygonalMesh<T>> {
    let nx = counts(domain.width(), T::lit(1.5) * h);
    let ny = counts(domain.height(), T::lit(3f64.sqrt()) * h);
    // lattice: x in units of dx/3, y in units of dy/2
    let (pmax, qmax) = (3 * nx as i64, 2 * ny as i64);
    let mut pool = VertexPool::new();
    let mut loops = Vec::new();
    for i in 0..=nx as i64 {
        let odd = i % 2 == 1;
        let rows = if odd { ny as i64 } else { ny as i64 + 1 };
        for j in 0..rows {
            let (cp, cq) = (3 * i, 2 * j + i64::from(odd));
            let hex = vec![
                (cp + 2, cq),
                (cp + 1, cq + 1),
                (cp - 1, cq + 1),
                (cp - 2, cq),
                (cp - 1, cq - 1),
                (cp + 1, cq - 1),
            ];
            let mut poly = clip_axis(&hex, 0, 0, true);
            poly = clip_axis(&poly, 0, pmax, false);
            poly = clip_axis(&poly, 1, 0, true);
            poly = clip_axis(&poly, 1, qmax, false);
            if poly.len() < 3 || lattice_area2(&poly) <= 0 {
                continue;
            }
            let poly = drop_boundary_collinear(poly, pmax, qmax);
            let lp = poly
                .into_iter()
                .map(|(p, q)| {
                    pool.id((p, q), || {
                        [
                            lattice(domain.x0, domain.x1, p, pmax),
                            lattice(domain.y0, domain.y1, q, qmax),
                        ]
                    })
                })
                .collect();
            loops.push(lp);
        }
    }
    PolygonalMesh::from_loops(pool.coords, loops, MeshFamily::Hexagonal, domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::shoelace_area;

    fn unit() -> Rect<f64> {
        Rect::square(0.0, 1.0)
    }

    fn check_partition(m: &PolygonalMesh<f64>) {
        let dom = m.domain().area();
        assert!((m.total_area() - dom).abs() <= 1e-10 * dom, "area {}", m.total_area());
        for c in 0..m.cell_count() {
            let d = m.closure_defect(c);
            assert!(d[0].abs() < 1e-12 && d[1].abs() < 1e-12, "cell {c}: {d:?}");
            assert!(m.cells()[c].area > 0.0);
        }
        // boundary edges lie on the domain boundary, interior ones do not
        let r = m.domain();
        for (k, e) in m.edges().iter().enumerate() {
            let [p, q] = m.edge_endpoints(k);
            let on_boundary = (p[0] == r.x0 && q[0] == r.x0)
                || (p[0] == r.x1 && q[0] == r.x1)
                || (p[1] == r.y0 && q[1] == r.y0)
                || (p[1] == r.y1 && q[1] == r.y1);
            assert_eq!(e.is_boundary(), on_boundary, "edge {k}");
        }
    }

    #[test]
    fn triangular_unit_square() {
        let m = build_family(MeshFamily::Triangular, unit(), 0.5, 0).unwrap();
        assert_eq!(m.cell_count(), 8);
        check_partition(&m);
    }

    #[test]
    fn staggered_unit_square() {
        let m = build_family(MeshFamily::Staggered, unit(), 0.5, 0).unwrap();
        // two cells in row 0, one double-width cell in row 1
        assert_eq!(m.cell_count(), 3);
        check_partition(&m);
    }

    #[test]
    fn every_family_partitions_the_domain() {
        let dom = Rect::new(-1.0, 1.0, -3.0, 3.0);
        for fam in MeshFamily::ALL {
            for h in [0.5, 0.21, 0.1] {
                let m = build_family(fam, dom, h, 7).unwrap();
                check_partition(&m);
            }
        }
    }

    #[test]
    fn perturbed_areas_match_shoelace() {
        let m = build_family(MeshFamily::PerturbedCartesian, Rect::square(-1.0, 1.0), 0.125, 42).unwrap();
        for (c, cell) in m.cells().iter().enumerate() {
            let pts = m.cell_polygon(c);
            // independent recomputation by the trapezoid formula
            let n = pts.len();
            let trap: f64 = (0..n)
                .map(|k| {
                    let (p, q) = (pts[k], pts[(k + 1) % n]);
                    (q[0] - p[0]) * (q[1] + p[1])
                })
                .sum::<f64>()
                * -0.5;
            assert!((cell.area - trap).abs() < 1e-14);
            assert_eq!(cell.area, shoelace_area(&pts));
        }
    }

    #[test]
    fn perturbation_is_bounded_and_spares_the_boundary() {
        let dom = Rect::square(0.0f64, 1.0);
        let m = build_family(MeshFamily::PerturbedCartesian, dom, 0.1, 3).unwrap();
        let reference = grid_vertices(dom, 10, 10);
        for (v, r) in m.vertices().iter().zip(&reference) {
            let d = (v[0] - r[0]).hypot(v[1] - r[1]);
            assert!(d <= PERTURBATION_THETA * 0.1 + 1e-15);
            if r[0] == 0.0 || r[0] == 1.0 || r[1] == 0.0 || r[1] == 1.0 {
                assert_eq!(v, r);
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        for fam in MeshFamily::ALL {
            let a = build_family(fam, Rect::square(-1.0, 1.0), 0.2, 11).unwrap();
            let b = build_family(fam, Rect::square(-1.0, 1.0), 0.2, 11).unwrap();
            assert_eq!(a, b);
        }
        let a = build_family(MeshFamily::PerturbedCartesian, unit(), 0.2, 1).unwrap();
        let b = build_family(MeshFamily::PerturbedCartesian, unit(), 0.2, 2).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn hexagons_are_hexagons_inside() {
        let m = build_family(MeshFamily::Hexagonal, Rect::square(-3.0, 3.0), 0.3, 0).unwrap();
        let six = m.cells().iter().filter(|c| c.vertices.len() == 6).count();
        assert!(six * 2 > m.cell_count());
        assert!(m.cells().iter().all(|c| c.vertices.len() >= 3 && c.vertices.len() <= 6));
    }

    #[test]
    fn rejects_oversized_h() {
        assert!(build_family(MeshFamily::Cartesian, unit(), 1.0, 0).is_err());
        assert!(build_family(MeshFamily::Cartesian, unit(), -0.1, 0).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for fam in MeshFamily::ALL {
            assert_eq!(fam.name().parse::<MeshFamily>().unwrap(), fam);
        }
        assert!("octagonal".parse::<MeshFamily>().is_err());
    }
}
